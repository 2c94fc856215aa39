//! G-covariance `C(F, G) = Cov(F⁻¹(U), G⁻¹(U))` and the variability measures
//! that are special cases of it.
//!
//! | measure | transform law `G` | relation |
//! |---------|-------------------|----------|
//! | variance | `F` itself | `C(F, F)` |
//! | Gini mean difference | `Uniform(0,1)` | `4·C` |
//! | cumulative residual entropy | `Exponential(1)` | `C` |
//! | generalized CRE of order `n` | `Weibull(1, 1/n)` | differences of `C/n!` |
//! | log-odds covariance | `Logistic(0,1)` | `C` |
//! | extended Gini, `ν > 1` | `Power(ν)` | `ν·C` |
//! | extended Gini, `ν < 1` | `Pareto(ν)` | `-ν·C` |
//!
//! Every measure goes through [`g_covariance`]; the direct integrals over the
//! support live in the test suite as oracles.

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::prob::Prob;
use crate::quadrature::UnitInterval;
use crate::streams::child_rng;
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// How integrals over the unit interval are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

/// Numerical settings shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub method: Method,
    /// Absolute quadrature target.
    pub abs_tol: f64,
    /// Probability mass cut from each end of the unit interval.
    pub tail_eps: f64,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            method: Method::Quadrature,
            abs_tol: 1e-8,
            tail_eps: 1e-40,
            mc_samples: 1_000_000,
            seed: 42,
        }
    }
}

impl IntegrationConfig {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        IntegrationConfig {
            method: Method::MonteCarlo,
            mc_samples: samples,
            seed,
            ..Self::default()
        }
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        IntegrationConfig { abs_tol, ..self }
    }

    pub fn with_tail_eps(self, tail_eps: f64) -> Self {
        IntegrationConfig { tail_eps, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        IntegrationConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if !(self.tail_eps > 0.0 && self.tail_eps < 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "tail_eps must lie in (0, 1e-3), got {}",
                self.tail_eps
            )));
        }
        if self.mc_samples < 1000 {
            return Err(Error::InvalidParameter(format!(
                "mc_samples must be at least 1000, got {}",
                self.mc_samples
            )));
        }
        Ok(())
    }

    pub(crate) fn unit(&self) -> UnitInterval {
        UnitInterval::new(self.abs_tol, self.tail_eps)
    }
}

/// `C(F, G) = ∫₀¹ (F⁻¹(u) - μ_F)(G⁻¹(u) - μ_G) du`.
pub fn g_covariance(f: &Distribution, g: &Distribution, cfg: &IntegrationConfig) -> Result<f64> {
    cfg.validate()?;
    match (f.is_empirical(), g.is_empirical()) {
        (true, true) => Ok(empirical_pair_covariance(f, g)),
        (true, false) => empirical_covariance(f, g),
        (false, true) => empirical_covariance(g, f),
        (false, false) => match cfg.method {
            Method::Quadrature => quadrature_covariance(f, g, cfg),
            Method::MonteCarlo => monte_carlo_covariance(f, g, cfg),
        },
    }
}

fn quadrature_covariance(f: &Distribution, g: &Distribution, cfg: &IntegrationConfig) -> Result<f64> {
    let (mf, mg) = (f.mean()?, g.mean()?);
    let r = cfg
        .unit()
        .integrate(|u| (f.quantile_at(u) - mf) * (g.quantile_at(u) - mg))?;
    Ok(r.value)
}

fn monte_carlo_covariance(f: &Distribution, g: &Distribution, cfg: &IntegrationConfig) -> Result<f64> {
    let mut rng = child_rng(cfg.seed, "g-covariance");
    let n = cfg.mc_samples;
    let (mut mx, mut my, mut cxy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let u = Prob::new(rng.sample::<f64, _>(Open01));
        let (x, y) = (f.quantile_at(u), g.quantile_at(u));
        let k = (i + 1) as f64;
        let dx = x - mx;
        mx += dx / k;
        my += (y - my) / k;
        cxy += dx * (y - my);
    }
    let value = cxy / (n - 1) as f64;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NumericalFailure("Monte Carlo covariance not finite".into()))
    }
}

/// Order statistics of an empirical law.
fn order_statistics(d: &Distribution) -> Vec<f64> {
    let n = d.params()[0] as usize;
    (1..=n).map(|k| d.quantile_at(Prob::ratio(k, n))).collect()
}

fn empirical_covariance(emp: &Distribution, g: &Distribution) -> Result<f64> {
    let xs = order_statistics(emp);
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let mut prev = 0.0;
    let mut sum = 0.0;
    for (k, x) in xs.iter().enumerate() {
        let next = g.partial_mean(Prob::ratio(k + 1, n));
        sum += (x - mean) * (next - prev);
        prev = next;
    }
    if sum.is_finite() {
        Ok(sum)
    } else {
        Err(Error::NumericalFailure(format!(
            "covariance of empirical law with {g} not finite"
        )))
    }
}

fn empirical_pair_covariance(f: &Distribution, g: &Distribution) -> f64 {
    let xs = order_statistics(f);
    let ys = order_statistics(g);
    let (n, m) = (xs.len(), ys.len());
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / m as f64;
    // Walk the merged grid {i/n} ∪ {j/m} in integer units of 1/(n·m).
    let (mut i, mut j) = (0usize, 0usize);
    let mut pos = 0u128;
    let mut sum = 0.0;
    while i < n && j < m {
        let end_i = (i as u128 + 1) * m as u128;
        let end_j = (j as u128 + 1) * n as u128;
        let end = end_i.min(end_j);
        sum += (xs[i] - mx) * (ys[j] - my) * (end - pos) as f64;
        pos = end;
        if end == end_i {
            i += 1;
        }
        if end == end_j {
            j += 1;
        }
    }
    sum / (n as f64 * m as f64)
}

/// `∫₀¹ (F⁻¹(u) - μ_F) score(u) du` for continuous `F`.
fn score_covariance<S: Fn(Prob) -> f64>(f: &Distribution, score: S, cfg: &IntegrationConfig) -> Result<f64> {
    let mf = f.mean()?;
    let r = cfg.unit().integrate(|u| (f.quantile_at(u) - mf) * score(u))?;
    Ok(r.value)
}

fn require_nonnegative(f: &Distribution, what: &str) -> Result<()> {
    let lower = f.support().0;
    if lower < 0.0 {
        Err(Error::Domain(format!(
            "{what} needs nonnegative support; {f} starts at {lower}"
        )))
    } else {
        Ok(())
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Gini mean difference `E|X₁ - X₂|`.
pub fn gmd(f: &Distribution, cfg: &IntegrationConfig) -> Result<f64> {
    Ok(4.0 * g_covariance(f, &Distribution::standard_uniform(), cfg)?)
}

/// Transform law whose G-covariance gives the extended Gini index.
pub fn extended_gini_law(nu: f64) -> Result<Distribution> {
    if !(nu > 0.0 && nu.is_finite()) || nu == 1.0 {
        return Err(Error::Domain(format!("extended Gini needs ν > 0, ν ≠ 1; got {nu}")));
    }
    if nu < 1.0 {
        Distribution::pareto(nu)
    } else {
        Distribution::power(nu)
    }
}

/// Extended Gini `-ν·Cov(X, F̄(X)^{ν-1})`. Nonnegative for `ν > 1`,
/// nonpositive for `ν < 1`.
pub fn extended_gini(f: &Distribution, nu: f64, cfg: &IntegrationConfig) -> Result<f64> {
    let g = extended_gini_law(nu)?;
    let c = g_covariance(f, &g, cfg)?;
    Ok(if nu > 1.0 { nu * c } else { -nu * c })
}

/// Cumulative residual entropy `-∫ F̄ ln F̄`.
pub fn cre(f: &Distribution, cfg: &IntegrationConfig) -> Result<f64> {
    require_nonnegative(f, "cumulative residual entropy")?;
    g_covariance(f, &Distribution::exponential(1.0)?, cfg)
}

/// `C(F, Weibull(1, 1/k))`, i.e. `Cov(X, Λ(X)^k)` with `Λ = -ln F̄`.
fn hazard_power_covariance(f: &Distribution, k: u32, cfg: &IntegrationConfig) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    g_covariance(f, &Distribution::weibull(1.0, 1.0 / k as f64)?, cfg)
}

/// Generalized cumulative residual entropy `(1/n!) ∫ F̄ Λⁿ`.
pub fn gcre(f: &Distribution, n: u32, cfg: &IntegrationConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("generalized CRE needs n ≥ 1".into()));
    }
    require_nonnegative(f, "generalized CRE")?;
    let cn = hazard_power_covariance(f, n, cfg)?;
    let cm = hazard_power_covariance(f, n - 1, cfg)?;
    Ok(cn / factorial(n) - cm / factorial(n - 1))
}

/// `Cov(X, ln(F(X)/F̄(X)))`.
pub fn log_odds_covariance(f: &Distribution, cfg: &IntegrationConfig) -> Result<f64> {
    g_covariance(f, &Distribution::logistic(0.0, 1.0)?, cfg)
}

/// Entropy of the equilibrium law, `CRE/μ + ln μ`.
pub fn equilibrium_entropy(f: &Distribution, cfg: &IntegrationConfig) -> Result<f64> {
    require_nonnegative(f, "equilibrium entropy")?;
    let mu = f.mean()?;
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("equilibrium entropy needs 0 < μ < ∞, got {mu}")));
    }
    Ok(cre(f, cfg)? / mu + mu.ln())
}

/// Which record-value gap to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordGap {
    /// `E(R_n - R_1)` for upper records.
    Upper,
    /// `E(R̃_n - R̃_1)` for lower records (nonpositive).
    Lower,
    /// `E(R_n - R̃_n)`.
    Spread,
}

/// Expected gap between record values of an i.i.d. sequence from `F`.
pub fn record_mean_gap(f: &Distribution, n: u32, kind: RecordGap, cfg: &IntegrationConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("record index must be at least 1".into()));
    }
    if n == 1 {
        return Ok(0.0);
    }
    let m = n - 1;
    let scale = factorial(m);
    let hazard = Distribution::weibull(1.0, 1.0 / m as f64)?;
    match kind {
        RecordGap::Upper => Ok(g_covariance(f, &hazard, cfg)? / scale),
        RecordGap::Lower => Ok(-g_covariance(f, &hazard.reflect(), cfg)? / scale),
        RecordGap::Spread => {
            if f.is_empirical() || cfg.method == Method::MonteCarlo {
                let up = record_mean_gap(f, n, RecordGap::Upper, cfg)?;
                let lo = record_mean_gap(f, n, RecordGap::Lower, cfg)?;
                return Ok(up - lo);
            }
            let e = m as i32;
            let c = score_covariance(f, |u| (-u.ln_q()).powi(e) - (-u.ln_p()).powi(e), cfg)?;
            Ok(c / scale)
        }
    }
}
