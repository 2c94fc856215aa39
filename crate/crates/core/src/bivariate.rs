//! Copulas and bivariate models `F(x, y) = C(F(x), G(y))`.
//!
//! Every family is evaluated through its Hoeffding kernel `C(u,v) - uv`,
//! written so that no term cancels near the edges of the unit square:
//!
//! | family | parameter | `C(u,v) - uv` |
//! |--------|-----------|---------------|
//! | FGM | `γ ∈ [-1, 1]` | `γ·u·v·ū·v̄` |
//! | Gumbel–Barnett | `θ ∈ [0, 1]` | `ū·v̄·(e^{-θ ln ū ln v̄} - 1)` |
//! | Ali–Mikhail–Haq | `θ ∈ [-1, 1]` | `θ·u·v·ū·v̄ / (1 - θ·ū·v̄)` |
//! | Gaussian | `ρ ∈ (-1, 1)` | `∫₀^ρ φ₂(Φ⁻¹u, Φ⁻¹v; r) dr` |
//! | upper bound | | `min(u,v) - uv` |
//! | lower bound | | `max(u+v-1, 0) - uv` |
//!
//! (`ū = 1 - u`.) A copula may also be reflected in either coordinate, which
//! is how the law of `(-X, Y)` or `(X, -Y)` is represented.

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::estimation::PairedSample;
use crate::prob::Prob;
use crate::quadrature::{integrate, Tolerance};
use crate::special::{normal_cdf, normal_quantile};
use crate::streams::child_rng;
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Parametric copula families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family", content = "parameter")]
pub enum Family {
    Independence,
    Fgm(f64),
    GumbelBarnett(f64),
    Amh(f64),
    Gaussian(f64),
    FrechetUpper,
    FrechetLower,
}

/// A copula, optionally reflected (`u ↦ 1-u`, `v ↦ 1-v`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Copula {
    family: Family,
    flip_u: bool,
    flip_v: bool,
}

/// Logit-space bracket for conditional inversion.
const LOGIT_BRACKET: f64 = 60.0;

impl Copula {
    fn base(family: Family) -> Self {
        Copula {
            family,
            flip_u: false,
            flip_v: false,
        }
    }

    pub fn independence() -> Self {
        Self::base(Family::Independence)
    }

    pub fn fgm(gamma: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("FGM needs γ in [-1, 1], got {gamma}")));
        }
        Ok(Self::base(Family::Fgm(gamma)))
    }

    pub fn gumbel_barnett(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "Gumbel–Barnett needs θ in [0, 1], got {theta}"
            )));
        }
        Ok(Self::base(Family::GumbelBarnett(theta)))
    }

    pub fn amh(theta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!("AMH needs θ in [-1, 1], got {theta}")));
        }
        Ok(Self::base(Family::Amh(theta)))
    }

    pub fn gaussian(rho: f64) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Gaussian needs ρ in (-1, 1), got {rho}"
            )));
        }
        Ok(Self::base(Family::Gaussian(rho)))
    }

    pub fn frechet_upper() -> Self {
        Self::base(Family::FrechetUpper)
    }

    pub fn frechet_lower() -> Self {
        Self::base(Family::FrechetLower)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Whether the copula is reflected in (first, second) coordinate.
    pub fn reflections(&self) -> (bool, bool) {
        (self.flip_u, self.flip_v)
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.family, Family::Gaussian(_))
    }

    /// Copula of `(1-U, V)`.
    pub fn reflect_first(&self) -> Self {
        Copula {
            flip_u: !self.flip_u,
            ..*self
        }
    }

    /// Copula of `(U, 1-V)`.
    pub fn reflect_second(&self) -> Self {
        Copula {
            flip_v: !self.flip_v,
            ..*self
        }
    }

    /// Copula of `(V, U)`. All base families are exchangeable.
    pub fn transpose(&self) -> Self {
        Copula {
            flip_u: self.flip_v,
            flip_v: self.flip_u,
            ..*self
        }
    }

    fn base_args(&self, u: Prob, v: Prob) -> (Prob, Prob) {
        (
            if self.flip_u { u.complement() } else { u },
            if self.flip_v { v.complement() } else { v },
        )
    }

    /// `C(u, v)`.
    pub fn cdf(&self, u: f64, v: f64) -> f64 {
        self.cdf_prob(Prob::new(u), Prob::new(v))
    }

    pub fn cdf_prob(&self, u: Prob, v: Prob) -> f64 {
        let c = u.p() * v.p() + self.kernel(u, v);
        c.clamp(0.0, u.p().min(v.p()))
    }

    /// Hoeffding kernel `C(u, v) - u·v`.
    pub fn kernel(&self, u: Prob, v: Prob) -> f64 {
        let (bu, bv) = self.base_args(u, v);
        let k = base_kernel(self.family, bu, bv);
        if self.flip_u != self.flip_v {
            -k
        } else {
            k
        }
    }

    /// Logit-space location of a kink of `v ↦ C(u, v)` at `u = σ(s)`.
    pub fn kink(&self, s: f64) -> Option<f64> {
        let base_s = if self.flip_u { -s } else { s };
        let base_t = match self.family {
            Family::FrechetUpper => base_s,
            Family::FrechetLower => -base_s,
            _ => return None,
        };
        Some(if self.flip_v { -base_t } else { base_t })
    }

    /// `v` with `∂C/∂u (u, v) = w`: a draw of `V` given `U = u` when `w` is uniform.
    pub fn conditional_inverse(&self, u: Prob, w: Prob) -> Prob {
        let bu = if self.flip_u { u.complement() } else { u };
        let bv = base_conditional_inverse(self.family, bu, w);
        if self.flip_v {
            bv.complement()
        } else {
            bv
        }
    }

    /// `u` given `V = v`, the mirror of [`Copula::conditional_inverse`].
    pub fn conditional_inverse_first(&self, v: Prob, w: Prob) -> Prob {
        self.transpose().conditional_inverse(v, w)
    }

    /// `n` draws of `(U, V)`.
    pub fn sample_uniforms<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<(Prob, Prob)> {
        (0..n)
            .map(|_| {
                let u = Prob::new(rng.sample::<f64, _>(Open01));
                let w = Prob::new(rng.sample::<f64, _>(Open01));
                (u, self.conditional_inverse(u, w))
            })
            .collect()
    }

    /// `n_pairs` antithetic pairs sharing `V`: `U` is drawn from its
    /// conditional law at `w` and at `1 - w`.
    pub fn sample_antithetic<R: Rng>(&self, n_pairs: usize, rng: &mut R) -> Vec<[(Prob, Prob); 2]> {
        (0..n_pairs)
            .map(|_| {
                let v = Prob::new(rng.sample::<f64, _>(Open01));
                let w = Prob::new(rng.sample::<f64, _>(Open01));
                [
                    (self.conditional_inverse_first(v, w), v),
                    (self.conditional_inverse_first(v, w.complement()), v),
                ]
            })
            .collect()
    }
}

fn base_kernel(family: Family, u: Prob, v: Prob) -> f64 {
    let (p, q, r, s) = (u.p(), u.q(), v.p(), v.q());
    match family {
        Family::Independence => 0.0,
        Family::Fgm(g) => g * p * r * q * s,
        Family::GumbelBarnett(t) => {
            if q == 0.0 || s == 0.0 {
                return 0.0;
            }
            q * s * (-t * u.ln_q() * v.ln_q()).exp_m1()
        }
        Family::Amh(t) => {
            if p * q * r * s == 0.0 {
                return 0.0;
            }
            let d = amh_denominator(t, u, v);
            t * p * r * q * s / d
        }
        Family::Gaussian(rho) => gaussian_kernel(rho, u, v),
        // Order the arguments on whichever side keeps full precision.
        Family::FrechetUpper => {
            let u_first = if p.min(r) < 0.5 { p <= r } else { q >= s };
            if u_first {
                p * s
            } else {
                r * q
            }
        }
        Family::FrechetLower => {
            let below = if p.min(s) < 0.5 { p <= s } else { q >= r };
            if below {
                -p * r
            } else {
                -q * s
            }
        }
    }
}

/// `∫₀^ρ φ₂(a, b; r) dr` with `a = Φ⁻¹(u)`, `b = Φ⁻¹(v)`.
fn gaussian_kernel(rho: f64, u: Prob, v: Prob) -> f64 {
    if rho == 0.0 || !u.is_interior() || !v.is_interior() {
        return 0.0;
    }
    let a = normal_quantile(u);
    let b = normal_quantile(v);
    let density = |r: f64| {
        let one = 1.0 - r * r;
        (-(a * a - 2.0 * r * a * b + b * b) / (2.0 * one)).exp() / (2.0 * PI * one.sqrt())
    };
    integrate(density, &[0.0, 0.5 * rho, rho], Tolerance::absolute(1e-15))
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
}

/// `1 - t·(1-u)(1-v)` without cancellation.
fn amh_denominator(t: f64, u: Prob, v: Prob) -> f64 {
    if t >= 0.0 {
        (1.0 - t) + t * (u.p() + u.q() * v.p())
    } else {
        1.0 - t * u.q() * v.q()
    }
}

/// `(h, 1-h)` with `h = ∂C/∂u (u, v)` for the exchangeable bisected families.
fn base_conditional(family: Family, u: Prob, v: Prob) -> Prob {
    let (p, q, r, s) = (u.p(), u.q(), v.p(), v.q());
    match family {
        Family::Fgm(g) => {
            let tilt = g * (q - p);
            Prob::from_pair(r * (1.0 + tilt * s), s * (1.0 - tilt * r))
        }
        Family::Amh(t) => {
            let d = amh_denominator(t, u, v);
            let d2 = d * d;
            let h = r * ((1.0 - t) + t * r) / d2;
            // `1 - 2tq + tr + t²q²s`, regrouped into nonnegative terms.
            let n = if t >= 0.0 {
                let a = (1.0 - t) + t * p;
                a * a + t * r * ((1.0 - t) + t * p * (1.0 + q))
            } else {
                (1.0 + t) - t * s - 2.0 * t * q + t * t * q * q * s
            };
            Prob::from_pair(h, s * n / d2)
        }
        Family::GumbelBarnett(t) => {
            if s == 0.0 {
                return Prob::ONE;
            }
            let lv = v.ln_q();
            let e = (-t * u.ln_q() * lv).exp();
            let hc = s * e * (1.0 - t * lv);
            Prob::from_pair(1.0 - hc, hc)
        }
        _ => unreachable!("closed-form families are not bisected"),
    }
}

fn base_conditional_inverse(family: Family, u: Prob, w: Prob) -> Prob {
    match family {
        Family::Independence => w,
        Family::FrechetUpper => u,
        Family::FrechetLower => u.complement(),
        Family::Gaussian(rho) => {
            let z = rho * normal_quantile(u) + (1.0 - rho * rho).sqrt() * normal_quantile(w);
            normal_cdf(z)
        }
        Family::Fgm(_) | Family::Amh(_) | Family::GumbelBarnett(_) => {
            // h(v) < w, compared on whichever side of 1/2 keeps precision.
            let below = |t: f64| {
                let h = base_conditional(family, u, Prob::from_logit(t));
                if w.p() <= 0.5 {
                    h.p() < w.p()
                } else {
                    h.q() > w.q()
                }
            };
            let (mut lo, mut hi) = (-LOGIT_BRACKET, LOGIT_BRACKET);
            if !below(lo) {
                return Prob::from_logit(lo);
            }
            if below(hi) {
                return Prob::from_logit(hi);
            }
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if below(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Prob::from_logit(0.5 * (lo + hi))
        }
    }
}

impl fmt::Display for Copula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Independence => write!(f, "independence")?,
            Family::Fgm(g) => write!(f, "fgm:{g}")?,
            Family::GumbelBarnett(t) => write!(f, "gb:{t}")?,
            Family::Amh(t) => write!(f, "amh:{t}")?,
            Family::Gaussian(r) => write!(f, "gaussian:{r}")?,
            Family::FrechetUpper => write!(f, "frechet-upper")?,
            Family::FrechetLower => write!(f, "frechet-lower")?,
        }
        match (self.flip_u, self.flip_v) {
            (true, true) => write!(f, " (both reflected)"),
            (true, false) => write!(f, " (first reflected)"),
            (false, true) => write!(f, " (second reflected)"),
            (false, false) => Ok(()),
        }
    }
}

impl FromStr for Copula {
    type Err = Error;

    /// `independence | fgm:γ | gb:θ | amh:θ | gaussian:ρ | frechet-upper | frechet-lower`
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let mut parts = spec.split(':');
        let name = parts.next().unwrap_or("").trim().to_ascii_lowercase();
        let rest: Vec<&str> = parts.map(str::trim).collect();
        let param = || -> Result<f64> {
            match rest.as_slice() {
                [tok] => tok
                    .parse::<f64>()
                    .map_err(|_| Error::parse(*tok, format!("not a number in `{spec}`"))),
                _ => Err(Error::parse(spec, format!("`{name}` takes exactly one parameter"))),
            }
        };
        let none = || -> Result<()> {
            if rest.is_empty() {
                Ok(())
            } else {
                Err(Error::parse(spec, format!("`{name}` takes no parameters")))
            }
        };
        let built = match name.as_str() {
            "independence" | "indep" => none().map(|_| Copula::independence()),
            "fgm" => Copula::fgm(param()?),
            "gb" | "gumbel-barnett" => Copula::gumbel_barnett(param()?),
            "amh" => Copula::amh(param()?),
            "gaussian" | "normal" => Copula::gaussian(param()?),
            "frechet-upper" | "upper" => none().map(|_| Copula::frechet_upper()),
            "frechet-lower" | "lower" => none().map(|_| Copula::frechet_lower()),
            _ => return Err(Error::parse(name, "unknown copula")),
        };
        built.map_err(|e| match e {
            Error::Parse { .. } => e,
            other => Error::parse(spec, other.to_string()),
        })
    }
}

/// A copula joined with two margins.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateModel {
    copula: Copula,
    margin_x: Distribution,
    margin_y: Distribution,
}

impl BivariateModel {
    pub fn new(copula: Copula, margin_x: Distribution, margin_y: Distribution) -> Self {
        BivariateModel {
            copula,
            margin_x,
            margin_y,
        }
    }

    pub fn copula(&self) -> &Copula {
        &self.copula
    }

    pub fn margin_x(&self) -> &Distribution {
        &self.margin_x
    }

    pub fn margin_y(&self) -> &Distribution {
        &self.margin_y
    }

    /// `P(X ≤ x, Y ≤ y)`.
    pub fn joint_cdf(&self, x: f64, y: f64) -> f64 {
        self.copula
            .cdf_prob(self.margin_x.cdf_prob(x), self.margin_y.cdf_prob(y))
    }

    /// Model of `(Y, X)`.
    pub fn swap(&self) -> Self {
        BivariateModel {
            copula: self.copula.transpose(),
            margin_x: self.margin_y.clone(),
            margin_y: self.margin_x.clone(),
        }
    }

    /// Model of `(-X, Y)`.
    pub fn negate_x(&self) -> Self {
        BivariateModel {
            copula: self.copula.reflect_first(),
            margin_x: self.margin_x.reflect(),
            margin_y: self.margin_y.clone(),
        }
    }

    /// Model of `(X, -Y)`.
    pub fn negate_y(&self) -> Self {
        BivariateModel {
            copula: self.copula.reflect_second(),
            margin_x: self.margin_x.clone(),
            margin_y: self.margin_y.reflect(),
        }
    }

    /// Model with the second margin replaced by its image under an
    /// increasing map; the copula is unchanged.
    pub fn with_margin_y(&self, margin_y: Distribution) -> Self {
        BivariateModel {
            margin_y,
            ..self.clone()
        }
    }

    pub fn with_margin_x(&self, margin_x: Distribution) -> Self {
        BivariateModel {
            margin_x,
            ..self.clone()
        }
    }

    /// `n` draws, reproducible from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<PairedSample> {
        if n == 0 {
            return Err(Error::InvalidParameter("sample size must be at least 1".into()));
        }
        let mut rng = child_rng(seed, "bivariate-sample");
        let uv = self.copula.sample_uniforms(n, &mut rng);
        let x = uv.iter().map(|(u, _)| self.margin_x.quantile_at(*u)).collect();
        let y = uv.iter().map(|(_, v)| self.margin_y.quantile_at(*v)).collect();
        PairedSample::new(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<Copula> {
        vec![
            Copula::independence(),
            Copula::fgm(0.7).unwrap(),
            Copula::fgm(-1.0).unwrap(),
            Copula::gumbel_barnett(1.0).unwrap(),
            Copula::gumbel_barnett(0.4).unwrap(),
            Copula::amh(1.0).unwrap(),
            Copula::amh(-1.0).unwrap(),
            Copula::amh(0.5).unwrap(),
            Copula::gaussian(0.6).unwrap(),
            Copula::gaussian(-0.8).unwrap(),
            Copula::frechet_upper(),
            Copula::frechet_lower(),
            Copula::gumbel_barnett(1.0).unwrap().reflect_first(),
            Copula::amh(0.8).unwrap().reflect_second(),
        ]
    }

    #[test]
    fn uniform_margins_and_bounds() {
        for c in families() {
            for i in 0..=10 {
                let t = i as f64 / 10.0;
                assert!((c.cdf(t, 1.0) - t).abs() < 1e-12, "{c}");
                assert!((c.cdf(1.0, t) - t).abs() < 1e-12, "{c}");
                assert!(c.cdf(t, 0.0).abs() < 1e-12 && c.cdf(0.0, t).abs() < 1e-12, "{c}");
                for j in 0..=10 {
                    let s = j as f64 / 10.0;
                    let v = c.cdf(t, s);
                    assert!(v >= (t + s - 1.0).max(0.0) - 1e-12 && v <= t.min(s) + 1e-12, "{c}");
                }
            }
        }
    }

    #[test]
    fn two_increasing_on_grid() {
        for c in families() {
            let g: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
            for a in g.windows(2) {
                for b in g.windows(2) {
                    let vol = c.cdf(a[1], b[1]) - c.cdf(a[0], b[1]) - c.cdf(a[1], b[0]) + c.cdf(a[0], b[0]);
                    assert!(vol >= -1e-12, "{c}: {vol}");
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert!((Copula::fgm(1.0).unwrap().cdf(0.5, 0.5) - 0.3125).abs() < 1e-15);
        assert_eq!(Copula::frechet_lower().cdf(0.3, 0.4), 0.0);
        for c in families() {
            assert!((c.cdf(0.4, 1.0) - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_parameter_is_independence() {
        let zero = [
            Copula::gumbel_barnett(0.0).unwrap(),
            Copula::amh(0.0).unwrap(),
            Copula::fgm(0.0).unwrap(),
            Copula::gaussian(0.0).unwrap(),
        ];
        for c in zero {
            for i in 1..10 {
                for j in 1..10 {
                    let (u, v) = (i as f64 / 10.0, j as f64 / 10.0);
                    assert!((c.cdf(u, v) - u * v).abs() < 1e-15, "{c}");
                }
            }
        }
    }

    #[test]
    fn gumbel_bivariate_exponential() {
        let e = Distribution::exponential(1.0).unwrap();
        let m = BivariateModel::new(Copula::gumbel_barnett(1.0).unwrap(), e.clone(), e);
        let want = 1.0 - 2.0 * (-1.0f64).exp() + (-3.0f64).exp();
        assert!((m.joint_cdf(1.0, 1.0) - want).abs() < 1e-12);
        for &(x, y, t) in &[(0.3f64, 2.0f64, 0.5), (1.5, 0.1, 1.0), (4.0, 3.0, 0.2)] {
            let m = BivariateModel::new(
                Copula::gumbel_barnett(t).unwrap(),
                Distribution::exponential(1.0).unwrap(),
                Distribution::exponential(1.0).unwrap(),
            );
            let f = 1.0 - (-x).exp() - (-y).exp() + (-x - y - t * x * y).exp();
            assert!((m.joint_cdf(x, y) - f).abs() < 1e-12);
        }
    }

    #[test]
    fn amh_logistic_closed_form() {
        let l = Distribution::logistic(0.0, 1.0).unwrap();
        for &t in &[-1.0, 0.3, 1.0] {
            let m = BivariateModel::new(Copula::amh(t).unwrap(), l.clone(), l.clone());
            assert!((m.joint_cdf(0.0, 0.0) - 1.0 / (4.0 - t)).abs() < 1e-12);
            for &(x, y) in &[(-2.0, 1.0), (0.5, 0.25), (3.0, -1.5)] {
                let (a, b) = (f64::exp(-x), f64::exp(-y));
                let f = 1.0 / (1.0 + a + b + (1.0 - t) * a * b);
                assert!((m.joint_cdf(x, y) - f).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn amh_power_closed_form() {
        let px = Distribution::power(1.5).unwrap();
        let py = Distribution::power(4.0 / 3.0).unwrap();
        for &t in &[-1.0, 1.0] {
            let m = BivariateModel::new(Copula::amh(t).unwrap(), px.clone(), py.clone());
            for &(x, y) in &[(0.2, 0.7), (0.5, 0.5), (0.9, 0.1)] {
                let (fx, gy) = (x * (2.0 - x), y * (y * y - 3.0 * y + 3.0));
                let f = fx * gy / (1.0 - t * (1.0 - fx) * (1.0 - gy));
                assert!((m.joint_cdf(x, y) - f).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn margins_recovered() {
        let m = BivariateModel::new(
            Copula::amh(0.7).unwrap(),
            Distribution::weibull(1.0, 2.0).unwrap(),
            Distribution::normal(1.0, 2.0).unwrap(),
        );
        for &t in &[-1.0, 0.3, 2.0] {
            assert!((m.joint_cdf(f64::INFINITY, t) - m.margin_y().cdf(t)).abs() < 1e-15);
            assert!((m.joint_cdf(t.abs(), f64::INFINITY) - m.margin_x().cdf(t.abs())).abs() < 1e-15);
        }
    }

    #[test]
    fn reflected_kernel_matches_definition() {
        let c = Copula::gumbel_barnett(0.8).unwrap();
        let r = c.reflect_first();
        for &(u, v) in &[(0.2, 0.3), (0.7, 0.9), (0.5, 0.1)] {
            // P(1-U ≤ u, V ≤ v) = v - C(1-u, v)
            assert!((r.cdf(u, v) - (v - c.cdf(1.0 - u, v))).abs() < 1e-14);
        }
    }

    #[test]
    fn conditional_inverse_solves_h() {
        for c in [
            Copula::fgm(0.9).unwrap(),
            Copula::amh(-0.7).unwrap(),
            Copula::gumbel_barnett(1.0).unwrap(),
        ] {
            for &u in &[0.05, 0.5, 0.97] {
                for &w in &[1e-6, 0.3, 0.8, 1.0 - 1e-7] {
                    let v = c.conditional_inverse(Prob::new(u), Prob::new(w));
                    let h = base_conditional(c.family(), Prob::new(u), v);
                    assert!((h.p() - w).abs() < 1e-10, "{c} u={u} w={w}: {}", h.p());
                    assert!((h.p() + h.q() - 1.0).abs() < 1e-12, "{c}");
                }
            }
        }
    }

    #[test]
    fn frechet_kernels_keep_tail_precision() {
        let u = Prob::from_logit(92.0);
        let v = Prob::from_logit(40.0);
        let k = Copula::frechet_upper().kernel(u, v);
        assert!((k / (v.p() * u.q()) - 1.0).abs() < 1e-12, "{k:e}");
        let k = Copula::frechet_lower().kernel(u, v.complement());
        assert!((k / -(u.q() * v.p()) - 1.0).abs() < 1e-12, "{k:e}");
    }

    #[test]
    fn amh_conditional_complement_near_corner() {
        for t in [1.0, 0.5, -1.0] {
            for (a, b) in [(-40.0, -40.0), (-60.0, -20.0), (30.0, 35.0), (-35.0, 30.0)] {
                let h = base_conditional(Family::Amh(t), Prob::from_logit(a), Prob::from_logit(b));
                assert!((h.p() + h.q() - 1.0).abs() < 1e-12, "t={t} ({a}, {b})");
            }
        }
    }

    #[test]
    fn frechet_samples_are_monotone_couplings() {
        let f = Distribution::weibull(1.0, 2.0).unwrap();
        let g = Distribution::exponential(1.0).unwrap();
        let s = BivariateModel::new(Copula::frechet_upper(), f.clone(), g.clone())
            .sample(200, 1)
            .unwrap();
        for (x, y) in s.pairs() {
            assert!((y - f.q_transform(&g, x)).abs() < 1e-9 * (1.0 + y));
        }
        let s = BivariateModel::new(Copula::frechet_lower(), f.clone(), g.clone())
            .sample(200, 1)
            .unwrap();
        for (x, y) in s.pairs() {
            assert!((y - g.quantile_at(f.cdf_prob(x).complement())).abs() < 1e-9 * (1.0 + y));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = BivariateModel::new(
            Copula::amh(0.5).unwrap(),
            Distribution::standard_uniform(),
            Distribution::standard_uniform(),
        );
        assert_eq!(m.sample(50, 9).unwrap(), m.sample(50, 9).unwrap());
        assert_ne!(m.sample(50, 9).unwrap(), m.sample(50, 10).unwrap());
    }

    #[test]
    fn parse_grammar() {
        assert_eq!("independence".parse::<Copula>().unwrap(), Copula::independence());
        assert_eq!("FGM:-1".parse::<Copula>().unwrap(), Copula::fgm(-1.0).unwrap());
        assert_eq!("gb:1".parse::<Copula>().unwrap(), Copula::gumbel_barnett(1.0).unwrap());
        assert_eq!("amh:0.5".parse::<Copula>().unwrap(), Copula::amh(0.5).unwrap());
        assert_eq!(
            "gaussian:0.3".parse::<Copula>().unwrap(),
            Copula::gaussian(0.3).unwrap()
        );
        assert_eq!("frechet-lower".parse::<Copula>().unwrap(), Copula::frechet_lower());
        match "fgm:x".parse::<Copula>() {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "x"),
            other => panic!("{other:?}"),
        }
        assert!("gb:2".parse::<Copula>().is_err());
        assert!("clayton:1".parse::<Copula>().is_err());
        assert!("frechet-upper:1".parse::<Copula>().is_err());
    }
}
