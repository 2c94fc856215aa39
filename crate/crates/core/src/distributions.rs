//! Univariate continuous laws described through their quantile functions.
//!
//! | law | parameters | support | quantile `Q(p)` |
//! |-----|------------|---------|-----------------|
//! | `uniform` | `a < b` | `[a, b]` | `a + (b-a)p` |
//! | `exp` | rate `λ > 0` | `[0, ∞)` | `-ln(1-p)/λ` |
//! | `logistic` | loc, scale `> 0` | `ℝ` | `m + s·ln(p/(1-p))` |
//! | `normal` | mean, sd `> 0` | `ℝ` | `μ + σΦ⁻¹(p)` |
//! | `weibull` | scale `λ`, shape `k` | `[0, ∞)` | `λ(-ln(1-p))^{1/k}` |
//! | `laplace` | loc, scale `> 0` | `ℝ` | two exponential tails |
//! | `gumbel` | loc, scale `> 0` | `ℝ` | `m - β ln(-ln p)` |
//! | `pareto` | `0 < ν < 1` | `[1, ∞)` | `(1-p)^{-(1-ν)}` |
//! | `power` | `ν > 1` | `[0, 1]` | `1 - (1-p)^{ν-1}` |
//!
//! The `pareto` and `power` families are the transform laws of the extended
//! Gini index: `H⁻¹(p) - μ_H` is proportional to `-(1-p)^{ν-1}` in both.
//! Laws can also be built from a sample (`empirical`), by an affine map of
//! another law, or as the law of `e^Y`.

use crate::error::{Error, Result};
use crate::prob::Prob;
use crate::quadrature::{integrate, Tolerance, UnitInterval};
use crate::special::{exp_integral_e1, normal_cdf, normal_pdf, normal_quantile, EULER_GAMMA};
use statrs::function::gamma::{gamma, gamma_li};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// A univariate continuous law (or an empirical step law).
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    law: Law,
}

#[derive(Debug, Clone, PartialEq)]
enum Law {
    Uniform {
        lower: f64,
        upper: f64,
    },
    Exponential {
        rate: f64,
    },
    Logistic {
        loc: f64,
        scale: f64,
    },
    Normal {
        mean: f64,
        sd: f64,
    },
    Weibull {
        scale: f64,
        shape: f64,
    },
    Laplace {
        loc: f64,
        scale: f64,
    },
    Gumbel {
        loc: f64,
        scale: f64,
    },
    Pareto {
        nu: f64,
    },
    Power {
        nu: f64,
    },
    Empirical(Arc<Sample>),
    Affine {
        base: Box<Distribution>,
        shift: f64,
        scale: f64,
    },
    ExpOf(Box<Distribution>),
}

/// Sorted observations with prefix sums.
#[derive(Debug, Clone, PartialEq)]
struct Sample {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

impl Sample {
    fn n(&self) -> usize {
        self.sorted.len()
    }

    /// Index (1-based) of the order statistic returned by the inf-form quantile.
    fn rank_for(&self, u: Prob) -> usize {
        let n = self.n();
        let r = u.p() * n as f64;
        let nearest = r.round();
        let k = if (r - nearest).abs() <= 1e-9 * n as f64 {
            nearest
        } else {
            r.ceil()
        };
        (k as usize).clamp(1, n)
    }

    fn partial_mean(&self, u: Prob) -> f64 {
        let n = self.n();
        let r = u.p() * n as f64;
        let k = (r.floor() as usize).min(n);
        let mut sum = self.prefix[k];
        if k < n {
            sum += (r - k as f64) * self.sorted[k];
        }
        sum / n as f64
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

impl Distribution {
    fn from_law(law: Law) -> Self {
        Distribution { law }
    }

    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        finite("lower", lower)?;
        finite("upper", upper)?;
        if upper <= lower {
            return Err(Error::InvalidParameter(format!(
                "uniform needs lower < upper, got {lower} and {upper}"
            )));
        }
        Ok(Self::from_law(Law::Uniform { lower, upper }))
    }

    /// Uniform on (0, 1).
    pub fn standard_uniform() -> Self {
        Self::from_law(Law::Uniform { lower: 0.0, upper: 1.0 })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Self::from_law(Law::Exponential {
            rate: positive("rate", rate)?,
        }))
    }

    pub fn logistic(loc: f64, scale: f64) -> Result<Self> {
        Ok(Self::from_law(Law::Logistic {
            loc: finite("location", loc)?,
            scale: positive("scale", scale)?,
        }))
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Ok(Self::from_law(Law::Normal {
            mean: finite("mean", mean)?,
            sd: positive("standard deviation", sd)?,
        }))
    }

    pub fn weibull(scale: f64, shape: f64) -> Result<Self> {
        Ok(Self::from_law(Law::Weibull {
            scale: positive("scale", scale)?,
            shape: positive("shape", shape)?,
        }))
    }

    pub fn laplace(loc: f64, scale: f64) -> Result<Self> {
        Ok(Self::from_law(Law::Laplace {
            loc: finite("location", loc)?,
            scale: positive("scale", scale)?,
        }))
    }

    /// Largest-extreme-value law, `F(x) = exp(-e^{-(x-m)/β})`.
    pub fn gumbel(loc: f64, scale: f64) -> Result<Self> {
        Ok(Self::from_law(Law::Gumbel {
            loc: finite("location", loc)?,
            scale: positive("scale", scale)?,
        }))
    }

    /// `F(x) = 1 - x^{-1/(1-ν)}` on `[1, ∞)`, for `0 < ν < 1`.
    pub fn pareto(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::InvalidParameter(format!("pareto needs 0 < ν < 1, got {nu}")));
        }
        Ok(Self::from_law(Law::Pareto { nu }))
    }

    /// `F(x) = 1 - (1-x)^{1/(ν-1)}` on `[0, 1]`, for `ν > 1`.
    pub fn power(nu: f64) -> Result<Self> {
        if !(nu > 1.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("power needs ν > 1, got {nu}")));
        }
        Ok(Self::from_law(Law::Power { nu }))
    }

    /// Step law putting mass `1/n` on each observation.
    pub fn empirical(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empirical law needs at least one value".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite observation {bad}")));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(sorted.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &x in &sorted {
            acc += x;
            prefix.push(acc);
        }
        Ok(Self::from_law(Law::Empirical(Arc::new(Sample { sorted, prefix }))))
    }

    /// Law of `shift + scale · X`.
    pub fn affine(&self, shift: f64, scale: f64) -> Result<Self> {
        finite("shift", shift)?;
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "affine scale must be nonzero, got {scale}"
            )));
        }
        Ok(Self::from_law(Law::Affine {
            base: Box::new(self.clone()),
            shift,
            scale,
        }))
    }

    /// Law of `-X`.
    pub fn reflect(&self) -> Self {
        Self::from_law(Law::Affine {
            base: Box::new(self.clone()),
            shift: 0.0,
            scale: -1.0,
        })
    }

    /// Law of `e^X`.
    pub fn exp_of(&self) -> Result<Self> {
        if self.is_empirical() {
            return Err(Error::Unsupported("exp transform of an empirical law".into()));
        }
        Ok(Self::from_law(Law::ExpOf(Box::new(self.clone()))))
    }

    pub fn is_empirical(&self) -> bool {
        matches!(self.law, Law::Empirical(_))
    }

    /// Family identifier.
    pub fn name(&self) -> &'static str {
        match &self.law {
            Law::Uniform { .. } => "uniform",
            Law::Exponential { .. } => "exp",
            Law::Logistic { .. } => "logistic",
            Law::Normal { .. } => "normal",
            Law::Weibull { .. } => "weibull",
            Law::Laplace { .. } => "laplace",
            Law::Gumbel { .. } => "gumbel",
            Law::Pareto { .. } => "pareto",
            Law::Power { .. } => "power",
            Law::Empirical(_) => "empirical",
            Law::Affine { .. } => "affine",
            Law::ExpOf(_) => "exp-of",
        }
    }

    /// Numeric parameters in constructor order.
    pub fn params(&self) -> Vec<f64> {
        match &self.law {
            Law::Uniform { lower, upper } => vec![*lower, *upper],
            Law::Exponential { rate } => vec![*rate],
            Law::Logistic { loc, scale } | Law::Laplace { loc, scale } | Law::Gumbel { loc, scale } => {
                vec![*loc, *scale]
            }
            Law::Normal { mean, sd } => vec![*mean, *sd],
            Law::Weibull { scale, shape } => vec![*scale, *shape],
            Law::Pareto { nu } | Law::Power { nu } => vec![*nu],
            Law::Empirical(s) => vec![s.n() as f64],
            Law::Affine { shift, scale, .. } => vec![*shift, *scale],
            Law::ExpOf(_) => vec![],
        }
    }

    /// Closure of the support, with infinite ends as `±∞`.
    pub fn support(&self) -> (f64, f64) {
        match &self.law {
            Law::Uniform { lower, upper } => (*lower, *upper),
            Law::Exponential { .. } | Law::Weibull { .. } => (0.0, f64::INFINITY),
            Law::Logistic { .. } | Law::Normal { .. } | Law::Laplace { .. } | Law::Gumbel { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            Law::Pareto { .. } => (1.0, f64::INFINITY),
            Law::Power { .. } => (0.0, 1.0),
            Law::Empirical(s) => (s.sorted[0], s.sorted[s.n() - 1]),
            Law::Affine { base, shift, scale } => {
                let (lo, hi) = base.support();
                let (a, b) = (shift + scale * lo, shift + scale * hi);
                if *scale > 0.0 {
                    (a, b)
                } else {
                    (b, a)
                }
            }
            Law::ExpOf(base) => {
                let (lo, hi) = base.support();
                (lo.exp(), hi.exp())
            }
        }
    }

    /// Centre of symmetry, if the law is symmetric about a point.
    pub fn symmetry_center(&self) -> Option<f64> {
        match &self.law {
            Law::Uniform { lower, upper } => Some(0.5 * (lower + upper)),
            Law::Logistic { loc, .. } | Law::Laplace { loc, .. } => Some(*loc),
            Law::Normal { mean, .. } => Some(*mean),
            Law::Affine { base, shift, scale } => base.symmetry_center().map(|c| shift + scale * c),
            _ => None,
        }
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_prob(x).p()
    }

    /// `(P(X ≤ x), P(X > x))` with both members computed directly.
    pub fn cdf_prob(&self, x: f64) -> Prob {
        if x.is_nan() {
            return Prob::HALF;
        }
        match &self.law {
            Law::Uniform { lower, upper } => {
                if x <= *lower {
                    Prob::ZERO
                } else if x >= *upper {
                    Prob::ONE
                } else {
                    let w = upper - lower;
                    Prob::from_pair((x - lower) / w, (upper - x) / w)
                }
            }
            Law::Exponential { rate } => {
                if x <= 0.0 {
                    Prob::ZERO
                } else {
                    Prob::from_pair(-(-rate * x).exp_m1(), (-rate * x).exp())
                }
            }
            Law::Logistic { loc, scale } => Prob::from_logit((x - loc) / scale),
            Law::Normal { mean, sd } => normal_cdf((x - mean) / sd),
            Law::Weibull { scale, shape } => {
                if x <= 0.0 {
                    Prob::ZERO
                } else {
                    let h = (x / scale).powf(*shape);
                    Prob::from_pair(-(-h).exp_m1(), (-h).exp())
                }
            }
            Law::Laplace { loc, scale } => {
                let z = (x - loc) / scale;
                if z < 0.0 {
                    let t = 0.5 * z.exp();
                    Prob::from_pair(t, 1.0 - t)
                } else {
                    let t = 0.5 * (-z).exp();
                    Prob::from_pair(1.0 - t, t)
                }
            }
            Law::Gumbel { loc, scale } => {
                let t = (-(x - loc) / scale).exp();
                Prob::from_pair((-t).exp(), -(-t).exp_m1())
            }
            Law::Pareto { nu } => {
                if x <= 1.0 {
                    Prob::ZERO
                } else {
                    let alpha = 1.0 / (1.0 - nu);
                    let tail = (-alpha * x.ln()).exp();
                    Prob::from_pair(1.0 - tail, tail)
                }
            }
            Law::Power { nu } => {
                if x <= 0.0 {
                    Prob::ZERO
                } else if x >= 1.0 {
                    Prob::ONE
                } else {
                    let k = 1.0 / (nu - 1.0);
                    let l = (-x).ln_1p() * k;
                    Prob::from_pair(-l.exp_m1(), l.exp())
                }
            }
            Law::Empirical(s) => {
                let count = s.sorted.partition_point(|&v| v <= x);
                Prob::ratio(count, s.n())
            }
            Law::Affine { base, shift, scale } => {
                let z = (x - shift) / scale;
                if *scale > 0.0 {
                    base.cdf_prob(z)
                } else {
                    // P(X ≥ z); continuous bases give P(X > z).
                    match &base.law {
                        Law::Empirical(s) => {
                            let below = s.sorted.partition_point(|&v| v < z);
                            Prob::ratio(s.n() - below, s.n())
                        }
                        _ => base.cdf_prob(z).complement(),
                    }
                }
            }
            Law::ExpOf(base) => {
                if x <= 0.0 {
                    Prob::ZERO
                } else {
                    base.cdf_prob(x.ln())
                }
            }
        }
    }

    /// Generalized inverse `inf{x : F(x) ≥ p}`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        Ok(self.quantile_at(Prob::new(p)))
    }

    /// Quantile at a probability pair; ends map to the support bounds.
    pub fn quantile_at(&self, u: Prob) -> f64 {
        if u.p() <= 0.0 && !self.is_empirical() {
            return self.support().0;
        }
        if u.q() <= 0.0 && !self.is_empirical() {
            return self.support().1;
        }
        match &self.law {
            Law::Uniform { lower, upper } => {
                if u.p() < 0.5 {
                    lower + (upper - lower) * u.p()
                } else {
                    upper - (upper - lower) * u.q()
                }
            }
            Law::Exponential { rate } => -u.ln_q() / rate,
            Law::Logistic { loc, scale } => loc + scale * u.logit(),
            Law::Normal { mean, sd } => mean + sd * normal_quantile(u),
            Law::Weibull { scale, shape } => scale * (-u.ln_q()).powf(1.0 / shape),
            Law::Laplace { loc, scale } => {
                if u.p() < 0.5 {
                    loc + scale * (2.0 * u.p()).ln()
                } else {
                    loc - scale * (2.0 * u.q()).ln()
                }
            }
            Law::Gumbel { loc, scale } => loc - scale * (-u.ln_p()).ln(),
            Law::Pareto { nu } => (-(1.0 - nu) * u.ln_q()).exp(),
            Law::Power { nu } => -((nu - 1.0) * u.ln_q()).exp_m1(),
            Law::Empirical(s) => s.sorted[s.rank_for(u) - 1],
            Law::Affine { base, shift, scale } => {
                if *scale > 0.0 {
                    shift + scale * base.quantile_at(u)
                } else {
                    shift + scale * base.quantile_at(u.complement())
                }
            }
            Law::ExpOf(base) => base.quantile_at(u).exp(),
        }
    }

    /// Derivative of the quantile function.
    pub fn quantile_density(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile density needs p in (0, 1), got {p}")));
        }
        if self.is_empirical() {
            return Err(Error::Unsupported("quantile density of an empirical law".into()));
        }
        Ok(self.quantile_density_at(Prob::new(p)))
    }

    /// Quantile density at an interior probability pair. Empirical laws
    /// return NaN; callers exclude them first.
    pub fn quantile_density_at(&self, u: Prob) -> f64 {
        match &self.law {
            Law::Uniform { lower, upper } => upper - lower,
            Law::Exponential { rate } => 1.0 / (rate * u.q()),
            Law::Logistic { scale, .. } => scale / (u.p() * u.q()),
            Law::Normal { sd, .. } => sd / normal_pdf(normal_quantile(u)),
            Law::Weibull { scale, shape } => {
                let h = -u.ln_q();
                scale / shape * h.powf(1.0 / shape - 1.0) / u.q()
            }
            Law::Laplace { scale, .. } => scale / u.min_tail(),
            Law::Gumbel { scale, .. } => scale / (u.p() * -u.ln_p()),
            Law::Pareto { nu } => (1.0 - nu) * ((nu - 2.0) * u.ln_q()).exp(),
            Law::Power { nu } => (nu - 1.0) * ((nu - 2.0) * u.ln_q()).exp(),
            Law::Empirical(_) => f64::NAN,
            Law::Affine { base, scale, .. } => {
                if *scale > 0.0 {
                    scale * base.quantile_density_at(u)
                } else {
                    -scale * base.quantile_density_at(u.complement())
                }
            }
            Law::ExpOf(base) => base.quantile_at(u).exp() * base.quantile_density_at(u),
        }
    }

    /// Expectation.
    pub fn mean(&self) -> Result<f64> {
        Ok(match &self.law {
            Law::Uniform { lower, upper } => 0.5 * (lower + upper),
            Law::Exponential { rate } => 1.0 / rate,
            Law::Logistic { loc, .. } | Law::Laplace { loc, .. } => *loc,
            Law::Normal { mean, .. } => *mean,
            Law::Weibull { scale, shape } => scale * gamma(1.0 + 1.0 / shape),
            Law::Gumbel { loc, scale } => loc + scale * EULER_GAMMA,
            Law::Pareto { nu } => 1.0 / nu,
            Law::Power { nu } => 1.0 - 1.0 / nu,
            Law::Empirical(s) => s.prefix[s.n()] / s.n() as f64,
            Law::Affine { base, shift, scale } => shift + scale * base.mean()?,
            Law::ExpOf(base) => exp_moment(base, 1.0)?,
        })
    }

    /// Variance.
    pub fn variance(&self) -> Result<f64> {
        Ok(match &self.law {
            Law::Uniform { lower, upper } => (upper - lower).powi(2) / 12.0,
            Law::Exponential { rate } => 1.0 / (rate * rate),
            Law::Logistic { scale, .. } => PI * PI * scale * scale / 3.0,
            Law::Normal { sd, .. } => sd * sd,
            Law::Weibull { scale, shape } => {
                let g1 = gamma(1.0 + 1.0 / shape);
                scale * scale * (gamma(1.0 + 2.0 / shape) - g1 * g1)
            }
            Law::Laplace { scale, .. } => 2.0 * scale * scale,
            Law::Gumbel { scale, .. } => PI * PI * scale * scale / 6.0,
            Law::Pareto { nu } => {
                if *nu <= 0.5 {
                    return Err(Error::MomentUndefined(format!(
                        "pareto with ν = {nu} has infinite variance"
                    )));
                }
                let alpha = 1.0 / (1.0 - nu);
                alpha / ((alpha - 1.0).powi(2) * (alpha - 2.0))
            }
            Law::Power { nu } => 1.0 / (2.0 * nu - 1.0) - 1.0 / (nu * nu),
            Law::Empirical(s) => {
                let m = s.prefix[s.n()] / s.n() as f64;
                s.sorted.iter().map(|x| (x - m).powi(2)).sum::<f64>() / s.n() as f64
            }
            Law::Affine { base, scale, .. } => scale * scale * base.variance()?,
            Law::ExpOf(base) => {
                let m1 = exp_moment(base, 1.0)?;
                exp_moment(base, 2.0)? - m1 * m1
            }
        })
    }

    pub fn std_dev(&self) -> Result<f64> {
        Ok(self.variance()?.sqrt())
    }

    /// `∫_0^p Q(t) dt`.
    pub fn partial_mean(&self, u: Prob) -> f64 {
        if u.p() <= 0.0 {
            return 0.0;
        }
        let (p, q) = (u.p(), u.q());
        match &self.law {
            Law::Uniform { lower, upper } => lower * p + (upper - lower) * p * p / 2.0,
            Law::Exponential { rate } => (p + xlogx(q)) / rate,
            Law::Logistic { loc, scale } => loc * p + scale * (xlogx(p) + xlogx(q)),
            Law::Normal { mean, sd } => {
                if q <= 0.0 {
                    *mean
                } else {
                    mean * p - sd * normal_pdf(normal_quantile(u))
                }
            }
            Law::Weibull { scale, shape } => {
                let x = -u.ln_q();
                if x.is_infinite() {
                    scale * gamma(1.0 + 1.0 / shape)
                } else {
                    scale * gamma_li(1.0 + 1.0 / shape, x)
                }
            }
            Law::Laplace { loc, scale } => {
                let core = if p <= 0.5 {
                    p * (2.0 * p).ln() - p
                } else {
                    xlogx(q) + q * std::f64::consts::LN_2 - q
                };
                loc * p + scale * core
            }
            Law::Gumbel { loc, scale } => {
                if q <= 0.0 {
                    return loc + scale * EULER_GAMMA;
                }
                let t = -u.ln_p();
                loc * p + scale * (-p * t.ln() - exp_integral_e1(t))
            }
            Law::Pareto { nu } => -(nu * u.ln_q()).exp_m1() / nu,
            Law::Power { nu } => p + (nu * u.ln_q()).exp_m1() / nu,
            Law::Empirical(s) => s.partial_mean(u),
            Law::Affine { base, shift, scale } => {
                if *scale > 0.0 {
                    shift * p + scale * base.partial_mean(u)
                } else {
                    let upper = base.mean().unwrap_or(f64::NAN) - base.partial_mean(u.complement());
                    shift * p + scale * upper
                }
            }
            Law::ExpOf(base) => partial_exp_moment(base, u).unwrap_or(f64::NAN),
        }
    }

    /// Average of the quantile function over `(lo, hi)`; the quantile at `lo`
    /// when the interval is empty.
    pub fn interval_mean(&self, lo: Prob, hi: Prob) -> f64 {
        let width = if hi.p() <= 0.5 {
            hi.p() - lo.p()
        } else {
            lo.q() - hi.q()
        };
        if width <= 0.0 {
            return self.quantile_at(lo);
        }
        // Integrals over upper strata are taken from the right end so that
        // heavy right tails do not cancel against the mean.
        let mass = if lo.p() >= 0.5 {
            match self.upper_partial_mean(lo) {
                Some(a) => a - self.upper_partial_mean(hi).unwrap_or(f64::NAN),
                None => self.partial_mean(hi) - self.partial_mean(lo),
            }
        } else {
            self.partial_mean(hi) - self.partial_mean(lo)
        };
        mass / width
    }

    /// `∫_p^1 Q(t) dt` where a closed form avoids cancellation.
    fn upper_partial_mean(&self, u: Prob) -> Option<f64> {
        let q = u.q();
        if q <= 0.0 {
            return Some(0.0);
        }
        match &self.law {
            Law::Pareto { nu } => Some((nu * u.ln_q()).exp() / nu),
            Law::Power { nu } => Some(q - (nu * u.ln_q()).exp() / nu),
            Law::Exponential { rate } => Some(q * (1.0 - u.ln_q()) / rate),
            Law::Uniform { lower, upper } => Some(upper * q - (upper - lower) * q * q / 2.0),
            _ => None,
        }
    }

    /// `G⁻¹(F(x))` with `F` this law.
    pub fn q_transform(&self, target: &Distribution, x: f64) -> f64 {
        target.quantile_at(self.cdf_prob(x))
    }
}

fn exp_moment(base: &Distribution, k: f64) -> Result<f64> {
    let unit = UnitInterval::new(1e-12, 1e-40);
    let r = unit
        .integrate_with_breaks(
            |u| (k * base.quantile_at(u)).exp(),
            &[],
            Tolerance {
                abs_tol: 1e-12,
                rel_tol: 1e-11,
                max_segments: 4000,
            },
        )
        .map_err(|e| Error::MomentUndefined(format!("E[e^({k}·Y)] not finite: {e}")))?;
    Ok(r.value)
}

fn partial_exp_moment(base: &Distribution, u: Prob) -> Result<f64> {
    let limit = UnitInterval::new(1e-12, 1e-40).limit();
    let top = u.logit().min(limit);
    let mut pts = vec![-limit];
    pts.extend(
        [-20.0, -5.0, 0.0, 5.0, 20.0]
            .iter()
            .copied()
            .filter(|&s| s > -limit && s < top),
    );
    pts.push(top);
    let r = integrate(
        |s| {
            let v = Prob::from_logit(s);
            base.quantile_at(v).exp() * v.p() * v.q()
        },
        &pts,
        Tolerance {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_segments: 4000,
        },
    )?;
    Ok(r.value)
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.law {
            Law::Empirical(s) => write!(f, "empirical(n={})", s.n()),
            Law::Affine { base, shift, scale } => write!(f, "affine({base};{shift};{scale})"),
            Law::ExpOf(base) => write!(f, "exp-of({base})"),
            _ => {
                write!(f, "{}", self.name())?;
                for p in self.params() {
                    write!(f, ":{p}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    /// Parses `name:p1:p2`, case-insensitively.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let mut parts = spec.split(':');
        let name = parts.next().unwrap_or("").trim().to_ascii_lowercase();
        let mut params = Vec::new();
        for tok in parts {
            let tok = tok.trim();
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(tok, format!("not a number in `{spec}`")))?;
            params.push(v);
        }
        let arity = |min: usize, max: usize| -> Result<()> {
            if params.len() < min || params.len() > max {
                Err(Error::parse(
                    spec,
                    format!("`{name}` takes {min}..={max} parameters, got {}", params.len()),
                ))
            } else {
                Ok(())
            }
        };
        let get = |i: usize, default: f64| params.get(i).copied().unwrap_or(default);
        let built = match name.as_str() {
            "uniform" | "unif" => {
                arity(0, 2)?;
                if params.len() == 1 {
                    return Err(Error::parse(spec, "uniform takes zero or two parameters"));
                }
                Distribution::uniform(get(0, 0.0), get(1, 1.0))
            }
            "exp" | "exponential" => {
                arity(0, 1)?;
                Distribution::exponential(get(0, 1.0))
            }
            "logistic" => {
                arity(0, 2)?;
                Distribution::logistic(get(0, 0.0), get(1, 1.0))
            }
            "normal" | "norm" | "gauss" => {
                arity(0, 2)?;
                Distribution::normal(get(0, 0.0), get(1, 1.0))
            }
            "weibull" => {
                arity(2, 2)?;
                Distribution::weibull(params[0], params[1])
            }
            "rayleigh" => {
                arity(0, 1)?;
                Distribution::weibull(get(0, 1.0), 2.0)
            }
            "laplace" => {
                arity(0, 2)?;
                Distribution::laplace(get(0, 0.0), get(1, 1.0))
            }
            "gumbel" | "ev" | "extreme-value" | "extremevalue" => {
                arity(0, 2)?;
                Distribution::gumbel(get(0, 0.0), get(1, 1.0))
            }
            "pareto" => {
                arity(1, 1)?;
                Distribution::pareto(params[0])
            }
            "power" => {
                arity(1, 1)?;
                Distribution::power(params[0])
            }
            _ => return Err(Error::parse(name, "unknown distribution")),
        };
        built.map_err(|e| Error::parse(spec, e.to_string()))
    }
}
