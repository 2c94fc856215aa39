//! The H-transformed correlation
//!
//! ```text
//! β_H(X, Y) = Cov(X, H⁻¹(G(Y))) / Cov(X, H⁻¹(F(X)))
//! ```
//!
//! and its named cases. The numerator is evaluated on the unit square as
//! `∬ (C(u,v) - uv) · (F⁻¹)'(u) · (H⁻¹)'(v) du dv`, the denominator is the
//! G-covariance `C(F, H)`.
//!
//! | label | `H` |
//! |-------|-----|
//! | Gini | `Uniform(0,1)` |
//! | CRE-based | `Exponential(1)` |
//! | OR-based | `Logistic(0,1)` |
//! | EGini(ν), ν < 1 | `Pareto(ν)` |
//! | EGini(ν), ν > 1 | `Power(ν)` |
//! | ρ-transformed | `G`, the law of `Y` |

use crate::bivariate::{BivariateModel, Copula, Family};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::estimation::{estimate_beta_h_batched, PairedSample, ScoreRule};
use crate::measures::{extended_gini_law, g_covariance, gmd, IntegrationConfig, Method};
use crate::streams::child_rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Name attached to a transform law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexLabel {
    Custom,
    PearsonRhoT,
    Gini,
    EGini(f64),
    OrBased,
    CreBased,
}

impl fmt::Display for IndexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexLabel::Custom => write!(f, "custom"),
            IndexLabel::PearsonRhoT => write!(f, "rho-t"),
            IndexLabel::Gini => write!(f, "Gini"),
            IndexLabel::EGini(nu) => write!(f, "EGini({nu})"),
            IndexLabel::OrBased => write!(f, "OR-based"),
            IndexLabel::CreBased => write!(f, "CRE-based"),
        }
    }
}

/// Transform law `H` together with its label.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSpec {
    h: Distribution,
    label: IndexLabel,
}

impl CorrelationSpec {
    pub fn custom(h: Distribution) -> Self {
        CorrelationSpec {
            h,
            label: IndexLabel::Custom,
        }
    }

    /// `H = G`, giving the ρ-transformed correlation.
    pub fn rho_t(g: Distribution) -> Self {
        CorrelationSpec {
            h: g,
            label: IndexLabel::PearsonRhoT,
        }
    }

    /// The law bound to a named label.
    pub fn named(label: IndexLabel) -> Result<Self> {
        let h = match label {
            IndexLabel::Gini => Distribution::standard_uniform(),
            IndexLabel::CreBased => Distribution::exponential(1.0)?,
            IndexLabel::OrBased => Distribution::logistic(0.0, 1.0)?,
            IndexLabel::EGini(nu) => extended_gini_law(nu)?,
            IndexLabel::Custom | IndexLabel::PearsonRhoT => {
                return Err(Error::InvalidParameter(format!(
                    "label `{label}` needs an explicit transform law"
                )))
            }
        };
        Ok(CorrelationSpec { h, label })
    }

    pub fn gini() -> Self {
        Self::named(IndexLabel::Gini).expect("fixed law")
    }

    pub fn cre_based() -> Self {
        Self::named(IndexLabel::CreBased).expect("fixed law")
    }

    pub fn or_based() -> Self {
        Self::named(IndexLabel::OrBased).expect("fixed law")
    }

    pub fn egini(nu: f64) -> Result<Self> {
        Self::named(IndexLabel::EGini(nu))
    }

    /// CRE-based, OR-based, EGini(0.5), Gini, EGini(3).
    pub fn standard_five() -> Vec<Self> {
        vec![
            Self::cre_based(),
            Self::or_based(),
            Self::egini(0.5).expect("fixed law"),
            Self::gini(),
            Self::egini(3.0).expect("fixed law"),
        ]
    }

    pub fn h(&self) -> &Distribution {
        &self.h
    }

    pub fn label(&self) -> IndexLabel {
        self.label
    }
}

impl fmt::Display for CorrelationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            IndexLabel::Custom => write!(f, "H={}", self.h),
            label => write!(f, "{label}"),
        }
    }
}

impl FromStr for IndexLabel {
    type Err = Error;

    /// `gini | cre-based | or-based | egini:ν | rho-t`; `cre` and `or` also work.
    fn from_str(spec: &str) -> Result<Self> {
        let lower = spec.trim().to_ascii_lowercase();
        let (name, param) = match lower.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (lower.as_str(), None),
        };
        let label = match (name, param) {
            ("gini", None) => IndexLabel::Gini,
            ("cre" | "cre-based", None) => IndexLabel::CreBased,
            ("or" | "or-based", None) => IndexLabel::OrBased,
            ("rho-t" | "rhot", None) => IndexLabel::PearsonRhoT,
            ("egini", Some(p)) => {
                let nu: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(p, format!("not a number in `{spec}`")))?;
                extended_gini_law(nu).map_err(|e| Error::parse(spec, e.to_string()))?;
                IndexLabel::EGini(nu)
            }
            _ => return Err(Error::parse(spec, "unknown index name")),
        };
        Ok(label)
    }
}

impl FromStr for CorrelationSpec {
    type Err = Error;

    /// A named index other than `rho-t`, or any distribution spec used as `H`.
    fn from_str(spec: &str) -> Result<Self> {
        match spec.parse::<IndexLabel>() {
            Ok(IndexLabel::PearsonRhoT) => Err(Error::parse(spec, "rho-t needs the law of Y; use it where Y is known")),
            Ok(label) => Self::named(label),
            Err(_) => Ok(Self::custom(spec.parse()?)),
        }
    }
}

/// Method used when the caller has no preference: Monte Carlo for the
/// Gaussian copula, quadrature otherwise.
pub fn default_method(copula: &Copula) -> Method {
    if copula.is_gaussian() {
        Method::MonteCarlo
    } else {
        Method::Quadrature
    }
}

/// Value of `β_H` with its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    pub value: f64,
    /// `Cov(X, H⁻¹G(Y))`; quadrature only.
    pub numerator: Option<f64>,
    /// `Cov(X, H⁻¹F(X))`; quadrature only.
    pub denominator: Option<f64>,
    /// Batch-means standard error; Monte Carlo only.
    pub std_error: Option<f64>,
}

fn require_continuous(m: &BivariateModel) -> Result<()> {
    if m.margin_x().is_empirical() || m.margin_y().is_empirical() {
        Err(Error::Unsupported("quadrature needs continuous margins".into()))
    } else {
        Ok(())
    }
}

/// `∬ (C(u,v) - uv) (A⁻¹)'(u) (B⁻¹)'(v) du dv = Cov(A⁻¹(U), B⁻¹(V))`.
pub fn hoeffding_covariance(
    copula: &Copula,
    a: &Distribution,
    b: &Distribution,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    cfg.validate()?;
    if a.is_empirical() || b.is_empirical() {
        return Err(Error::Unsupported("quadrature needs continuous laws".into()));
    }
    if copula.family() == Family::Independence {
        return Ok(0.0);
    }
    let r = cfg.unit().integrate_square(
        |u, v| {
            let k = copula.kernel(u, v);
            if k == 0.0 {
                0.0
            } else {
                k * a.quantile_density_at(u) * b.quantile_density_at(v)
            }
        },
        |s| copula.kink(s),
    )?;
    Ok(r.value)
}

fn check_denominator(den: f64, cfg: &IntegrationConfig) -> Result<()> {
    if den > cfg.abs_tol {
        Ok(())
    } else {
        Err(Error::DegenerateDenominator(format!(
            "Cov(X, H⁻¹F(X)) = {den:e} is not above the tolerance"
        )))
    }
}

/// Antithetic sample of the model: pairs share `V`, and consecutive
/// observations `2i`, `2i+1` form a pair.
fn antithetic_sample(m: &BivariateModel, cfg: &IntegrationConfig, tag: &str) -> Result<PairedSample> {
    let mut rng = child_rng(cfg.seed, tag);
    let pairs = m.copula().sample_antithetic(cfg.mc_samples / 2, &mut rng);
    let mut x = Vec::with_capacity(2 * pairs.len());
    let mut y = Vec::with_capacity(2 * pairs.len());
    for pair in &pairs {
        for (u, v) in pair {
            x.push(m.margin_x().quantile_at(*u));
            y.push(m.margin_y().quantile_at(*v));
        }
    }
    PairedSample::new(x, y).map_err(|e| Error::NumericalFailure(format!("sampled values not finite: {e}")))
}

/// `β_H(X, Y)` with its parts.
pub fn beta_h_report(m: &BivariateModel, spec: &CorrelationSpec, cfg: &IntegrationConfig) -> Result<BetaReport> {
    cfg.validate()?;
    match cfg.method {
        Method::Quadrature => {
            require_continuous(m)?;
            let den = g_covariance(m.margin_x(), spec.h(), cfg)?;
            check_denominator(den, cfg)?;
            let num = hoeffding_covariance(m.copula(), m.margin_x(), spec.h(), cfg)?;
            Ok(BetaReport {
                value: num / den,
                numerator: Some(num),
                denominator: Some(den),
                std_error: None,
            })
        }
        Method::MonteCarlo => {
            let sample = antithetic_sample(m, cfg, "beta-h")?;
            let est = estimate_beta_h_batched(&sample, spec.h(), ScoreRule::StratumMean, 10, 2)?;
            Ok(BetaReport {
                value: est.value,
                numerator: None,
                denominator: None,
                std_error: Some(est.std_error),
            })
        }
    }
}

/// `β_H(X, Y)`.
pub fn beta_h(m: &BivariateModel, spec: &CorrelationSpec, cfg: &IntegrationConfig) -> Result<f64> {
    Ok(beta_h_report(m, spec, cfg)?.value)
}

/// `β_H(Y, X) = Cov(Y, H⁻¹F(X)) / Cov(Y, H⁻¹G(Y))`.
pub fn beta_h_reversed(m: &BivariateModel, spec: &CorrelationSpec, cfg: &IntegrationConfig) -> Result<f64> {
    beta_h(&m.swap(), spec, cfg)
}

fn model_covariance(m: &BivariateModel, cfg: &IntegrationConfig) -> Result<f64> {
    match cfg.method {
        Method::Quadrature => {
            require_continuous(m)?;
            hoeffding_covariance(m.copula(), m.margin_x(), m.margin_y(), cfg)
        }
        Method::MonteCarlo => {
            let s = antithetic_sample(m, cfg, "covariance")?;
            let n = s.len() as f64;
            let mx = s.x().iter().sum::<f64>() / n;
            let my = s.y().iter().sum::<f64>() / n;
            Ok(s.pairs().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (n - 1.0))
        }
    }
}

/// Pearson correlation `Cov(X, Y) / (σ_X σ_Y)`.
pub fn pearson(m: &BivariateModel, cfg: &IntegrationConfig) -> Result<f64> {
    let sx = m.margin_x().std_dev()?;
    let sy = m.margin_y().std_dev()?;
    if !(sx > 0.0 && sy > 0.0) {
        return Err(Error::DegenerateDenominator("a margin has zero variance".into()));
    }
    Ok(model_covariance(m, cfg)? / (sx * sy))
}

/// ρ-transformed correlation `Cov(X, Y) / (C(F,G)^{1/2} C(G,F)^{1/2})`.
pub fn rho_t(m: &BivariateModel, cfg: &IntegrationConfig) -> Result<f64> {
    let ex = g_covariance(m.margin_x(), m.margin_y(), cfg)?;
    let ey = g_covariance(m.margin_y(), m.margin_x(), cfg)?;
    check_denominator(ex, cfg)?;
    check_denominator(ey, cfg)?;
    Ok(model_covariance(m, cfg)? / (ex.sqrt() * ey.sqrt()))
}

/// `σ_X σ_Y / (C(F,G)^{1/2} C(G,F)^{1/2})`, the factor with `ρ_t = a·ρ`.
pub fn rho_t_scale(m: &BivariateModel, cfg: &IntegrationConfig) -> Result<f64> {
    let ex = g_covariance(m.margin_x(), m.margin_y(), cfg)?;
    let ey = g_covariance(m.margin_y(), m.margin_x(), cfg)?;
    check_denominator(ex, cfg)?;
    check_denominator(ey, cfg)?;
    Ok(m.margin_x().std_dev()? * m.margin_y().std_dev()? / (ex.sqrt() * ey.sqrt()))
}

/// `β_H` for an FGM copula with parameter `γ` and first margin `F`:
/// `γ · GMD(F) · GMD(H) / (4 C(F, H))`. The second margin does not enter.
pub fn fgm_beta_closed_form(
    f: &Distribution,
    spec: &CorrelationSpec,
    gamma: f64,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    if !(-1.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("FGM needs γ in [-1, 1], got {gamma}")));
    }
    let den = g_covariance(f, spec.h(), cfg)?;
    check_denominator(den, cfg)?;
    Ok(gamma * gmd(f, cfg)? * gmd(spec.h(), cfg)? / (4.0 * den))
}

/// Both directions of `β_H` and their symmetric combinations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricIndices {
    pub beta_xy: f64,
    pub beta_yx: f64,
    /// `C(F, H)`.
    pub eta_x: f64,
    /// `C(G, H)`.
    pub eta_y: f64,
    /// Plain average of the two directions.
    pub tau: f64,
    /// Average weighted by `η_X`, `η_Y`.
    pub nu: f64,
    /// `1 - ν`.
    pub nu_bar: f64,
}

pub fn symmetric_indices(
    m: &BivariateModel,
    spec: &CorrelationSpec,
    cfg: &IntegrationConfig,
) -> Result<SymmetricIndices> {
    let eta_x = g_covariance(m.margin_x(), spec.h(), cfg)?;
    let eta_y = g_covariance(m.margin_y(), spec.h(), cfg)?;
    check_denominator(eta_x, cfg)?;
    check_denominator(eta_y, cfg)?;
    let beta_xy = beta_h(m, spec, cfg)?;
    let beta_yx = beta_h_reversed(m, spec, cfg)?;
    let nu = (eta_x * beta_xy + eta_y * beta_yx) / (eta_x + eta_y);
    Ok(SymmetricIndices {
        beta_xy,
        beta_yx,
        eta_x,
        eta_y,
        tau: 0.5 * (beta_xy + beta_yx),
        nu,
        nu_bar: 1.0 - nu,
    })
}

pub fn symmetric_tau(m: &BivariateModel, spec: &CorrelationSpec, cfg: &IntegrationConfig) -> Result<f64> {
    Ok(symmetric_indices(m, spec, cfg)?.tau)
}

pub fn symmetric_nu(m: &BivariateModel, spec: &CorrelationSpec, cfg: &IntegrationConfig) -> Result<f64> {
    Ok(symmetric_indices(m, spec, cfg)?.nu)
}

pub fn symmetric_nu_bar(m: &BivariateModel, spec: &CorrelationSpec, cfg: &IntegrationConfig) -> Result<f64> {
    Ok(symmetric_indices(m, spec, cfg)?.nu_bar)
}
