//! Standby systems: units that run one after another, so the system lifetime
//! is `T = X₁ + … + X_n` for independent component lifetimes `X_i`.
//!
//! For any transform law `G` the G-covariance of the system splits as
//!
//! ```text
//! C(T, G) = Σ β_G(X_i, T) · C(X_i, G),   0 ≤ β_G(X_i, T) ≤ 1
//! ```
//!
//! so `C(T, G) ≤ Σ C(X_i, G)`. The law of `T` is rarely available in closed
//! form. It is represented by the empirical law of a seeded convolution
//! sample, and every quantity involving `T` carries a standard error from
//! [`BATCHES`] independent batches. A one-unit system uses the component law
//! itself and is exact.

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::estimation::{estimate_beta_h_with, PairedSample, ScoreRule};
use crate::measures::{cre, extended_gini, g_covariance, gcre, gmd, IntegrationConfig, Method};
use crate::prob::Prob;
use crate::streams::child_rng;
use rand::distr::Open01;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

/// Number of batches behind every Monte Carlo standard error.
pub const BATCHES: usize = 10;

/// Independent nonnegative component lifetimes run in sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct StandbySystem {
    components: Vec<Distribution>,
}

impl StandbySystem {
    pub fn new(components: Vec<Distribution>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter(
                "a standby system needs at least one component".into(),
            ));
        }
        for (i, c) in components.iter().enumerate() {
            let lower = c.support().0;
            if lower < 0.0 {
                return Err(Error::Domain(format!("component {} ({c}) can be negative", i + 1)));
            }
            let mean = c.mean()?;
            if !mean.is_finite() {
                return Err(Error::MomentUndefined(format!(
                    "component {} ({c}) has no finite mean",
                    i + 1
                )));
            }
            if let Ok(v) = c.variance() {
                if v <= 0.0 {
                    return Err(Error::DegenerateDenominator(format!(
                        "component {} ({c}) is degenerate",
                        i + 1
                    )));
                }
            }
        }
        Ok(StandbySystem { components })
    }

    pub fn components(&self) -> &[Distribution] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Mean time to failure `Σ μ_i`.
    pub fn mean(&self) -> Result<f64> {
        self.components.iter().map(|c| c.mean()).sum()
    }

    /// Seeded convolution sample of `samples` systems.
    pub fn simulate(&self, samples: usize, seed: u64) -> Result<Simulation> {
        self.simulate_tagged(samples, seed, "standby")
    }

    fn simulate_tagged(&self, samples: usize, seed: u64, tag: &str) -> Result<Simulation> {
        if samples < BATCHES * 10 {
            return Err(Error::InvalidParameter(format!(
                "need at least {} samples, got {samples}",
                BATCHES * 10
            )));
        }
        let batches = (0..BATCHES)
            .into_par_iter()
            .map(|b| {
                let size = samples / BATCHES + usize::from(b < samples % BATCHES);
                let mut rng = child_rng(seed, &format!("{tag}-{b}"));
                let mut columns = vec![Vec::with_capacity(size); self.len()];
                let mut totals = Vec::with_capacity(size);
                for _ in 0..size {
                    let mut t = 0.0;
                    for (c, col) in self.components.iter().zip(columns.iter_mut()) {
                        let x = c.quantile_at(Prob::from_complement(rng.sample::<f64, _>(Open01)));
                        col.push(x);
                        t += x;
                    }
                    totals.push(t);
                }
                Batch { columns, totals }
            })
            .collect();
        Ok(Simulation { batches })
    }

    /// Law of `T`: the component law for one unit, otherwise empirical.
    fn system_laws(&self, sim: &Simulation) -> Result<SystemLaws> {
        if self.len() == 1 {
            let law = self.components[0].clone();
            return Ok(SystemLaws {
                full: law.clone(),
                batches: vec![law; BATCHES],
            });
        }
        let full = Distribution::empirical(&sim.totals())?;
        let batches = sim
            .batches
            .par_iter()
            .map(|b| Distribution::empirical(&b.totals))
            .collect::<Result<Vec<_>>>()?;
        Ok(SystemLaws { full, batches })
    }
}

impl fmt::Display for StandbySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", names.join(" + "))
    }
}

#[derive(Debug, Clone)]
struct Batch {
    columns: Vec<Vec<f64>>,
    totals: Vec<f64>,
}

/// Component draws and system lifetimes, held in batches.
#[derive(Debug, Clone)]
pub struct Simulation {
    batches: Vec<Batch>,
}

impl Simulation {
    pub fn len(&self) -> usize {
        self.batches.iter().map(|b| b.totals.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All system lifetimes in draw order.
    pub fn totals(&self) -> Vec<f64> {
        self.batches.iter().flat_map(|b| b.totals.iter().copied()).collect()
    }

    fn column(&self, i: usize) -> Vec<f64> {
        self.batches.iter().flat_map(|b| b.columns[i].iter().copied()).collect()
    }
}

struct SystemLaws {
    full: Distribution,
    batches: Vec<Distribution>,
}

fn batch_se(values: &[f64]) -> f64 {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (var / k).sqrt()
}

fn quadrature(cfg: &IntegrationConfig) -> IntegrationConfig {
    IntegrationConfig {
        method: Method::Quadrature,
        ..*cfg
    }
}

/// One component's share of `C(T, G)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionTerm {
    pub component: String,
    /// `β_G(X_i, T)`.
    pub beta: f64,
    pub beta_se: f64,
    /// `C(X_i, G)`.
    pub g_covariance: f64,
    /// `β_G(X_i, T) · C(X_i, G)`.
    pub contribution: f64,
}

/// `C(T, G)` split across components, with an independent direct estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub transform: String,
    pub samples: usize,
    pub terms: Vec<DecompositionTerm>,
    /// `Σ β_i C_i`.
    pub total: f64,
    pub total_se: f64,
    /// `C(T, G)` from a separate sample.
    pub direct: f64,
    pub direct_se: f64,
    /// `total - direct`.
    pub residual: f64,
    pub residual_se: f64,
}

impl Decomposition {
    /// `|residual| ≤ k · residual_se`.
    pub fn residual_within(&self, k: f64) -> bool {
        self.residual.abs() <= k * self.residual_se
    }
}

/// Decompose `C(T, G)` using `cfg.mc_samples` systems drawn from `cfg.seed`.
pub fn decompose(sys: &StandbySystem, g: &Distribution, cfg: &IntegrationConfig) -> Result<Decomposition> {
    cfg.validate()?;
    let sim = sys.simulate(cfg.mc_samples, cfg.seed)?;
    decompose_simulation(sys, &sim, g, cfg)
}

/// [`decompose`] on an existing simulation.
pub fn decompose_simulation(
    sys: &StandbySystem,
    sim: &Simulation,
    g: &Distribution,
    cfg: &IntegrationConfig,
) -> Result<Decomposition> {
    let quad = quadrature(cfg);
    let covs = sys
        .components
        .iter()
        .map(|c| g_covariance(c, g, &quad))
        .collect::<Result<Vec<_>>>()?;

    if sys.len() == 1 {
        let c = covs[0];
        return Ok(Decomposition {
            transform: g.to_string(),
            samples: sim.len(),
            terms: vec![DecompositionTerm {
                component: sys.components[0].to_string(),
                beta: 1.0,
                beta_se: 0.0,
                g_covariance: c,
                contribution: c,
            }],
            total: c,
            total_se: 0.0,
            direct: c,
            direct_se: 0.0,
            residual: 0.0,
            residual_se: 0.0,
        });
    }

    let beta = |x: Vec<f64>, t: Vec<f64>| -> Result<f64> {
        estimate_beta_h_with(&PairedSample::new(x, t)?, g, ScoreRule::StratumMean)
    };
    let totals = sim.totals();
    let betas = (0..sys.len())
        .into_par_iter()
        .map(|i| beta(sim.column(i), totals.clone()))
        .collect::<Result<Vec<_>>>()?;
    // Per-batch betas, indexed [batch][component].
    let batch_betas = sim
        .batches
        .par_iter()
        .map(|b| {
            (0..sys.len())
                .map(|i| beta(b.columns[i].clone(), b.totals.clone()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let terms = sys
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let per_batch: Vec<f64> = batch_betas.iter().map(|b| b[i]).collect();
            DecompositionTerm {
                component: c.to_string(),
                beta: betas[i],
                beta_se: batch_se(&per_batch),
                g_covariance: covs[i],
                contribution: betas[i] * covs[i],
            }
        })
        .collect::<Vec<_>>();
    let total = terms.iter().map(|t| t.contribution).sum();
    let batch_totals: Vec<f64> = batch_betas
        .iter()
        .map(|b| b.iter().zip(&covs).map(|(beta, c)| beta * c).sum())
        .collect();
    let total_se = batch_se(&batch_totals);

    let check = sys.simulate_tagged(sim.len(), cfg.seed, "standby-check")?;
    let laws = sys.system_laws(&check)?;
    let direct = g_covariance(&laws.full, g, &quad)?;
    let batch_direct = laws
        .batches
        .par_iter()
        .map(|t| g_covariance(t, g, &quad))
        .collect::<Result<Vec<_>>>()?;
    let direct_se = batch_se(&batch_direct);

    Ok(Decomposition {
        transform: g.to_string(),
        samples: sim.len(),
        terms,
        total,
        total_se,
        direct,
        direct_se,
        residual: total - direct,
        residual_se: total_se.hypot(direct_se),
    })
}

/// Measures covered by the subadditivity report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// `Var(T) ≤ Σ C(X_i, T)`.
    Variance,
    /// Cumulative residual entropy.
    Cre,
    /// Generalized cumulative residual entropy of the given order.
    Gcre(u32),
    /// Gini mean difference.
    Gmd,
    /// Magnitude of the extended Gini index.
    EGini(f64),
}

impl Bound {
    /// The measures reported by [`subadditivity_report`].
    pub fn standard() -> Vec<Bound> {
        vec![
            Bound::Variance,
            Bound::Cre,
            Bound::Gcre(2),
            Bound::Gmd,
            Bound::EGini(0.5),
            Bound::EGini(3.0),
        ]
    }

    fn measure(self, law: &Distribution, cfg: &IntegrationConfig) -> Result<f64> {
        match self {
            Bound::Variance => g_covariance(law, law, cfg),
            Bound::Cre => cre(law, cfg),
            Bound::Gcre(k) => gcre(law, k, cfg),
            Bound::Gmd => gmd(law, cfg),
            // Extended Gini is nonpositive for ν < 1, where the inequality
            // holds for its magnitude.
            Bound::EGini(nu) => Ok(extended_gini(law, nu, cfg)?.abs()),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Variance => write!(f, "var-bound"),
            Bound::Cre => write!(f, "cre"),
            Bound::Gcre(k) => write!(f, "gcre-{k}"),
            Bound::Gmd => write!(f, "gmd"),
            Bound::EGini(nu) => write!(f, "egini-{nu}"),
        }
    }
}

/// `measure(T) ≤ Σ measure(X_i)` for one measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub measure: String,
    /// Measure of the system.
    pub lhs: f64,
    /// Sum over components.
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub std_error: f64,
}

impl BoundRow {
    /// `slack ≥ -k · std_error`.
    pub fn holds_within(&self, k: f64) -> bool {
        self.slack >= -k * self.std_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubadditivityReport {
    pub samples: usize,
    pub rows: Vec<BoundRow>,
}

/// Subadditivity of every [`Bound::standard`] measure over the system.
pub fn subadditivity_report(sys: &StandbySystem, cfg: &IntegrationConfig) -> Result<SubadditivityReport> {
    cfg.validate()?;
    let sim = sys.simulate(cfg.mc_samples, cfg.seed)?;
    subadditivity_simulation(sys, &sim, cfg)
}

/// [`subadditivity_report`] on an existing simulation.
pub fn subadditivity_simulation(
    sys: &StandbySystem,
    sim: &Simulation,
    cfg: &IntegrationConfig,
) -> Result<SubadditivityReport> {
    let quad = quadrature(cfg);
    let laws = sys.system_laws(sim)?;
    let rows = Bound::standard()
        .into_par_iter()
        .map(|bound| bound_row(bound, sys, &laws, &quad))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubadditivityReport {
        samples: sim.len(),
        rows,
    })
}

fn bound_row(bound: Bound, sys: &StandbySystem, laws: &SystemLaws, cfg: &IntegrationConfig) -> Result<BoundRow> {
    let fixed_rhs = match bound {
        Bound::Variance => None,
        _ => Some(
            sys.components
                .iter()
                .map(|c| bound.measure(c, cfg))
                .sum::<Result<f64>>()?,
        ),
    };
    let sides = |t: &Distribution| -> Result<(f64, f64)> {
        let lhs = bound.measure(t, cfg)?;
        let rhs = match fixed_rhs {
            Some(r) => r,
            None => sys
                .components
                .iter()
                .map(|c| g_covariance(c, t, cfg))
                .sum::<Result<f64>>()?,
        };
        Ok((lhs, rhs))
    };
    let (lhs, rhs) = sides(&laws.full)?;
    let std_error = if sys.len() == 1 {
        0.0
    } else {
        let slacks = laws
            .batches
            .iter()
            .map(|t| sides(t).map(|(l, r)| r - l))
            .collect::<Result<Vec<_>>>()?;
        batch_se(&slacks)
    };
    Ok(BoundRow {
        measure: bound.to_string(),
        lhs,
        rhs,
        slack: rhs - lhs,
        std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(samples: usize) -> IntegrationConfig {
        IntegrationConfig {
            mc_samples: samples,
            ..IntegrationConfig::default()
        }
    }

    fn exp1() -> Distribution {
        Distribution::exponential(1.0).unwrap()
    }

    #[test]
    fn rejects_bad_components() {
        assert!(StandbySystem::new(vec![]).is_err());
        assert!(StandbySystem::new(vec![Distribution::normal(0.0, 1.0).unwrap()]).is_err());
        assert!(StandbySystem::new(vec![Distribution::empirical(&[2.0, 2.0]).unwrap()]).is_err());
        assert!(StandbySystem::new(vec![exp1(), Distribution::weibull(1.0, 2.0).unwrap()]).is_ok());
    }

    #[test]
    fn single_unit_is_exact() {
        let sys = StandbySystem::new(vec![Distribution::weibull(1.0, 2.0).unwrap()]).unwrap();
        let d = decompose(&sys, &Distribution::standard_uniform(), &cfg(1000)).unwrap();
        assert_eq!(d.terms[0].beta, 1.0);
        assert_eq!(d.total, d.direct);
        let r = subadditivity_report(&sys, &cfg(1000)).unwrap();
        for row in &r.rows {
            assert!(row.slack.abs() < 1e-12, "{row:?}");
        }
    }

    #[test]
    fn two_exponentials_split_evenly() {
        let sys = StandbySystem::new(vec![exp1(), exp1()]).unwrap();
        let d = decompose(&sys, &Distribution::standard_uniform(), &cfg(200_000)).unwrap();
        assert!(d.residual_within(3.0), "{d:?}");
        // GMD of Gamma(2) is 1.5, so C(T, U) = 0.375.
        assert!((d.total - 0.375).abs() < 4.0 * d.total_se.max(1e-4), "{d:?}");
        assert!((d.terms[0].beta - d.terms[1].beta).abs() < 0.02);
        assert!(d.terms.iter().all(|t| t.beta > 0.0 && t.beta < 1.0));
    }

    #[test]
    fn simulation_is_reproducible() {
        let sys = StandbySystem::new(vec![exp1(), exp1()]).unwrap();
        let a = sys.simulate(1000, 3).unwrap().totals();
        let b = sys.simulate(1000, 3).unwrap().totals();
        let c = sys.simulate(1000, 4).unwrap().totals();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 1000);
    }

    #[test]
    fn bound_labels() {
        let labels: Vec<String> = Bound::standard().iter().map(|b| b.to_string()).collect();
        assert_eq!(labels, ["var-bound", "cre", "gcre-2", "gmd", "egini-0.5", "egini-3"]);
    }
}
