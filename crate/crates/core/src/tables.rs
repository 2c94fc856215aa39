//! Reference tables of correlation ranges, recomputed cell by cell.
//!
//! Each table has a fixed cell layout. Reference values are five-decimal
//! constants; a cell passes when `|computed - reference| ≤ TOLERANCE`.
//! Cells are evaluated in parallel, each with its own derived seed, and are
//! reported in layout order.

#![allow(clippy::approx_constant)]

use crate::bivariate::{BivariateModel, Copula};
use crate::correlation::{beta_h, fgm_beta_closed_form, pearson, rho_t, symmetric_indices, CorrelationSpec};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::measures::IntegrationConfig;
use crate::streams::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Largest accepted `|computed - reference|`.
pub const TOLERANCE: f64 = 5e-4;

/// Bumped whenever a reference constant or the cell layout changes.
pub const REFERENCE_VERSION: u32 = 1;

/// The available tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableId {
    /// Pearson and ρ-transformed ranges under FGM for pairs of margins.
    FgmRhoT,
    /// `β_H` ranges under FGM for several first margins.
    FgmBeta,
    /// Gumbel bivariate exponential and bivariate logistic.
    Exchangeable,
    /// Gumbel-Barnett with Weibull margins, AMH with power margins.
    NonExchangeable,
    /// Symmetrized indices for Gumbel-Barnett with Weibull margins.
    Symmetric,
}

impl TableId {
    pub const ALL: [TableId; 5] = [
        TableId::FgmRhoT,
        TableId::FgmBeta,
        TableId::Exchangeable,
        TableId::NonExchangeable,
        TableId::Symmetric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableId::FgmRhoT => "fgm-rhot",
            TableId::FgmBeta => "fgm-beta",
            TableId::Exchangeable => "exchangeable",
            TableId::NonExchangeable => "nonexchangeable",
            TableId::Symmetric => "symmetric",
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| {
            Error::parse(
                s,
                "unknown table; expected fgm-rhot, fgm-beta, exchangeable, nonexchangeable or symmetric",
            )
        })
    }
}

// ---------------------------------------------------------------------------
// Reference values, version 1.

/// fgm-rhot margins, in row and column order.
const FGM_MARGINS: [&str; 5] = ["Uniform", "Exponential", "Rayleigh", "Logistic", "Normal"];

/// fgm-rhot, Pearson block: value at γ = 1 for X = row, Y = column.
const FGM_PEARSON: [[f64; 5]; 5] = [
    [0.33333, 0.28867, 0.32352, 0.31831, 0.32573], // X Uniform
    [0.28867, 0.25000, 0.28016, 0.27566, 0.28209], // X Exponential
    [0.32352, 0.28016, 0.31396, 0.30892, 0.31613], // X Rayleigh
    [0.31831, 0.27566, 0.30892, 0.30396, 0.31105], // X Logistic
    [0.32573, 0.28209, 0.31613, 0.31105, 0.31831], // X Normal
];

/// fgm-rhot, ρ-transformed block: value at γ = 1.
const FGM_RHO_T: [[f64; 5]; 5] = [
    [0.33333, 0.33333, 0.33333, 0.33333, 0.33333], // X Uniform
    [0.33333, 0.25000, 0.29289, 0.30396, 0.31233], // X Exponential
    [0.33333, 0.29289, 0.31396, 0.31549, 0.32057], // X Rayleigh
    [0.33333, 0.30396, 0.31549, 0.30396, 0.31233], // X Logistic
    [0.33333, 0.31233, 0.32057, 0.31233, 0.31831], // X Normal
];

/// fgm-beta rows (first margin), in order.
const FGM_BETA_ROWS: [&str; 6] = [
    "Weibull(1,0.5)",
    "Exponential(1)",
    "Weibull(1,2)",
    "Logistic(0,1)",
    "ExtremeValue(0,1)",
    "Laplace(0,1)",
];

/// fgm-beta columns.
const FGM_BETA_COLUMNS: [&str; 4] = ["CRE-based", "OR-based", "EGini(0.5)", "EGini(3)"];

/// fgm-beta: value at γ = 1.
const FGM_BETA: [[f64; 4]; 6] = [
    [0.18750, 0.26344, 0.08333, 0.42187], // Weibull(1,0.5)
    [0.25000, 0.30396, 0.16667, 0.37500], // Exponential(1)
    [0.29289, 0.31549, 0.23570, 0.34650], // Weibull(1,2)
    [0.30396, 0.30396, 0.24045, 0.33333], // Logistic(0,1)
    [0.27555, 0.30701, 0.19951, 0.35335], // ExtremeValue(0,1)
    [0.29403, 0.29403, 0.21832, 0.33333], // Laplace(0,1)
];

/// Row order of the exchangeable and nonexchangeable panels.
const INDEX_ROWS: [&str; 7] = [
    "Pearson",
    "rho-t",
    "CRE-based",
    "OR-based",
    "EGini(0.5)",
    "Gini",
    "EGini(3)",
];

/// exchangeable, Gumbel bivariate exponential: (lower at θ = 1, upper at θ = 0).
/// No rho-t row; it equals Pearson for exchangeable pairs.
const GUMBEL_EXP: [(f64, f64); 6] = [
    (-0.40365, 0.0), // Pearson
    (-0.40365, 0.0), // CRE-based
    (-0.51267, 0.0), // OR-based
    (-0.26927, 0.0), // EGini(0.5)
    (-0.55469, 0.0), // Gini
    (-0.64125, 0.0), // EGini(3)
];

/// exchangeable, bivariate logistic: (lower at θ = -1, upper at θ = 1).
const AMH_LOGISTIC: [(f64, f64); 6] = [
    (-0.25000, 0.50000), // Pearson
    (-0.26516, 0.39207), // CRE-based
    (-0.25000, 0.50000), // OR-based
    (-0.22135, 0.27865), // EGini(0.5)
    (-0.27259, 0.50000), // Gini
    (-0.26272, 0.55556), // EGini(3)
];

/// nonexchangeable, Gumbel-Barnett with Weibull(1,2) and Weibull(1,0.5):
/// (lower at θ = 1, upper at θ = 0).
const GB_WEIBULL: [(f64, f64); 7] = [
    (-0.32420, 0.0), // Pearson
    (-0.43307, 0.0), // rho-t
    (-0.48426, 0.0), // CRE-based
    (-0.51759, 0.0), // OR-based
    (-0.41563, 0.0), // EGini(0.5)
    (-0.53692, 0.0), // Gini
    (-0.55776, 0.0), // EGini(3)
];

/// nonexchangeable, AMH with Power(1.5) and Power(4/3):
/// (lower at θ = -1, upper at θ = 1).
const AMH_POWER: [(f64, f64); 7] = [
    (-0.27099, 0.39668), // Pearson
    (-0.27212, 0.39833), // rho-t
    (-0.26589, 0.36447), // CRE-based
    (-0.27387, 0.45685), // OR-based
    (-0.24790, 0.29890), // EGini(0.5)
    (-0.27887, 0.45177), // Gini
    (-0.28324, 0.51025), // EGini(3)
];

/// symmetric columns.
const SYMMETRIC_COLUMNS: [&str; 5] = ["beta(X,Y)", "beta(Y,X)", "tau", "nu", "nu-bar"];

/// symmetric, Gumbel-Barnett θ = 1 with Weibull(1,2) and Weibull(1,0.5).
/// Rows follow `CorrelationSpec::standard_five`.
const SYMMETRIC: [[f64; 5]; 5] = [
    [-0.48426, -0.29817, -0.39121, -0.31673, 1.31673], // CRE-based
    [-0.51759, -0.47762, -0.49761, -0.48267, 1.48267], // OR-based
    [-0.41563, -0.12179, -0.26871, -0.13873, 1.13873], // EGini(0.5)
    [-0.53692, -0.59375, -0.56534, -0.58537, 1.58537], // Gini
    [-0.55776, -0.80720, -0.68248, -0.76379, 1.76379], // EGini(3)
];

// ---------------------------------------------------------------------------

type Eval = Box<dyn Fn(&IntegrationConfig) -> Result<f64> + Send + Sync>;

struct CellDef {
    row: String,
    column: String,
    reference: f64,
    eval: Eval,
}

fn cell(row: impl Into<String>, column: impl Into<String>, reference: f64, eval: Eval) -> CellDef {
    CellDef {
        row: row.into(),
        column: column.into(),
        reference,
        eval,
    }
}

/// One evaluated cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCell {
    pub row: String,
    pub column: String,
    pub computed: Option<f64>,
    pub reference: f64,
    pub abs_diff: Option<f64>,
    /// Set when the computation failed.
    pub error: Option<String>,
}

impl TableCell {
    pub fn within(&self, tol: f64) -> bool {
        self.abs_diff.is_some_and(|d| d <= tol)
    }
}

/// Every cell of one table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub table: TableId,
    pub version: u32,
    pub tolerance: f64,
    pub cells: Vec<TableCell>,
}

impl TableReport {
    /// Cells whose computation failed.
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }

    /// Computed cells outside the tolerance.
    pub fn breaches(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| c.error.is_none() && !c.within(self.tolerance))
            .count()
    }

    pub fn all_within(&self) -> bool {
        self.cells.iter().all(|c| c.within(self.tolerance))
    }

    pub fn max_abs_diff(&self) -> Option<f64> {
        self.cells.iter().filter_map(|c| c.abs_diff).reduce(f64::max)
    }
}

fn fgm_margin(name: &str) -> Distribution {
    match name {
        "Uniform" => Ok(Distribution::standard_uniform()),
        "Exponential" => Distribution::exponential(1.0),
        "Rayleigh" => Distribution::weibull(1.0, 2.0),
        "Logistic" => Distribution::logistic(0.0, 1.0),
        "Normal" => Distribution::normal(0.0, 1.0),
        _ => unreachable!("fixed margin list"),
    }
    .expect("valid fixed parameters")
}

fn fgm_beta_margin(row: usize) -> Distribution {
    match row {
        0 => Distribution::weibull(1.0, 0.5),
        1 => Distribution::exponential(1.0),
        2 => Distribution::weibull(1.0, 2.0),
        3 => Distribution::logistic(0.0, 1.0),
        4 => Distribution::gumbel(0.0, 1.0),
        _ => Distribution::laplace(0.0, 1.0),
    }
    .expect("valid fixed parameters")
}

fn fgm_beta_spec(column: usize) -> CorrelationSpec {
    match column {
        0 => CorrelationSpec::cre_based(),
        1 => CorrelationSpec::or_based(),
        2 => CorrelationSpec::egini(0.5).expect("fixed law"),
        _ => CorrelationSpec::egini(3.0).expect("fixed law"),
    }
}

/// Spec for a row of [`INDEX_ROWS`] other than Pearson.
fn index_spec(row: &str, m: &BivariateModel) -> CorrelationSpec {
    match row {
        "rho-t" => CorrelationSpec::rho_t(m.margin_y().clone()),
        "CRE-based" => CorrelationSpec::cre_based(),
        "OR-based" => CorrelationSpec::or_based(),
        "EGini(0.5)" => CorrelationSpec::egini(0.5).expect("fixed law"),
        "Gini" => CorrelationSpec::gini(),
        "EGini(3)" => CorrelationSpec::egini(3.0).expect("fixed law"),
        _ => unreachable!("fixed row list"),
    }
}

fn index_value(row: &str, m: &BivariateModel, cfg: &IntegrationConfig) -> Result<f64> {
    if row == "Pearson" {
        pearson(m, cfg)
    } else {
        beta_h(m, &index_spec(row, m), cfg)
    }
}

fn gamma_label(gamma: f64) -> &'static str {
    if gamma > 0.0 {
        "gamma=+1"
    } else {
        "gamma=-1"
    }
}

fn fgm_rhot_cells() -> Vec<CellDef> {
    let mut cells = Vec::new();
    for (i, xname) in FGM_MARGINS.iter().enumerate() {
        for (j, yname) in FGM_MARGINS.iter().enumerate() {
            for (index, table) in [("rho", &FGM_PEARSON), ("rho-t", &FGM_RHO_T)] {
                for gamma in [-1.0, 1.0] {
                    let m = BivariateModel::new(
                        Copula::fgm(gamma).expect("γ in range"),
                        fgm_margin(xname),
                        fgm_margin(yname),
                    );
                    let eval: Eval = if index == "rho" {
                        Box::new(move |cfg| pearson(&m, cfg))
                    } else {
                        Box::new(move |cfg| rho_t(&m, cfg))
                    };
                    cells.push(cell(
                        format!("{xname}/{yname}"),
                        format!("{index} {}", gamma_label(gamma)),
                        gamma * table[i][j],
                        eval,
                    ));
                }
            }
        }
    }
    cells
}

/// Second margin used by the quadrature path of fgm-beta; any law works.
fn fgm_beta_partner() -> Distribution {
    Distribution::normal(0.0, 1.0).expect("valid fixed parameters")
}

fn fgm_beta_cells() -> Vec<CellDef> {
    let mut cells = Vec::new();
    for (i, row) in FGM_BETA_ROWS.iter().enumerate() {
        for (j, column) in FGM_BETA_COLUMNS.iter().enumerate() {
            for gamma in [-1.0, 1.0] {
                let f = fgm_beta_margin(i);
                let spec = fgm_beta_spec(j);
                let reference = gamma * FGM_BETA[i][j];
                let label = format!("{column} {}", gamma_label(gamma));
                let closed = {
                    let (f, spec) = (f.clone(), spec.clone());
                    Box::new(move |cfg: &IntegrationConfig| fgm_beta_closed_form(&f, &spec, gamma, cfg))
                };
                cells.push(cell(*row, format!("{label} closed-form"), reference, closed));
                let m = BivariateModel::new(Copula::fgm(gamma).expect("γ in range"), f, fgm_beta_partner());
                let direct = Box::new(move |cfg: &IntegrationConfig| beta_h(&m, &spec, cfg));
                cells.push(cell(*row, format!("{label} integral"), reference, direct));
            }
        }
    }
    cells
}

fn range_cells(
    panel: &str,
    lower: &BivariateModel,
    upper: &BivariateModel,
    rows: &[&str],
    refs: &[(f64, f64)],
) -> Vec<CellDef> {
    let mut cells = Vec::new();
    for (row, &(lo, hi)) in rows.iter().zip(refs) {
        for (bound, m, reference) in [("lower", lower, lo), ("upper", upper, hi)] {
            let (m, row_name) = (m.clone(), row.to_string());
            cells.push(cell(
                format!("{panel} {row}"),
                bound,
                reference,
                Box::new(move |cfg| index_value(&row_name, &m, cfg)),
            ));
        }
    }
    cells
}

fn exchangeable_cells() -> Vec<CellDef> {
    let exp = Distribution::exponential(1.0).expect("valid fixed parameters");
    let logistic = Distribution::logistic(0.0, 1.0).expect("valid fixed parameters");
    let gb = |theta| {
        BivariateModel::new(
            Copula::gumbel_barnett(theta).expect("θ in range"),
            exp.clone(),
            exp.clone(),
        )
    };
    let amh = |theta| {
        BivariateModel::new(
            Copula::amh(theta).expect("θ in range"),
            logistic.clone(),
            logistic.clone(),
        )
    };
    let rows: Vec<&str> = INDEX_ROWS.iter().copied().filter(|r| *r != "rho-t").collect();
    let mut cells = range_cells("gumbel-exponential", &gb(1.0), &gb(0.0), &rows, &GUMBEL_EXP);
    cells.extend(range_cells(
        "bivariate-logistic",
        &amh(-1.0),
        &amh(1.0),
        &rows,
        &AMH_LOGISTIC,
    ));
    cells
}

fn gb_weibull(theta: f64) -> BivariateModel {
    BivariateModel::new(
        Copula::gumbel_barnett(theta).expect("θ in range"),
        Distribution::weibull(1.0, 2.0).expect("valid fixed parameters"),
        Distribution::weibull(1.0, 0.5).expect("valid fixed parameters"),
    )
}

fn nonexchangeable_cells() -> Vec<CellDef> {
    let amh = |theta| {
        BivariateModel::new(
            Copula::amh(theta).expect("θ in range"),
            Distribution::power(1.5).expect("valid fixed parameters"),
            Distribution::power(4.0 / 3.0).expect("valid fixed parameters"),
        )
    };
    let mut cells = range_cells(
        "gb-weibull",
        &gb_weibull(1.0),
        &gb_weibull(0.0),
        &INDEX_ROWS,
        &GB_WEIBULL,
    );
    cells.extend(range_cells("amh-power", &amh(-1.0), &amh(1.0), &INDEX_ROWS, &AMH_POWER));
    cells
}

fn symmetric_cells() -> Vec<CellDef> {
    let m = gb_weibull(1.0);
    let mut cells = Vec::new();
    for (spec, refs) in CorrelationSpec::standard_five().into_iter().zip(SYMMETRIC) {
        for (k, (column, reference)) in SYMMETRIC_COLUMNS.iter().zip(refs).enumerate() {
            let (m, spec2) = (m.clone(), spec.clone());
            cells.push(cell(
                spec.to_string(),
                *column,
                reference,
                Box::new(move |cfg| {
                    let s = symmetric_indices(&m, &spec2, cfg)?;
                    Ok([s.beta_xy, s.beta_yx, s.tau, s.nu, s.nu_bar][k])
                }),
            ));
        }
    }
    cells
}

fn cells_of(id: TableId) -> Vec<CellDef> {
    match id {
        TableId::FgmRhoT => fgm_rhot_cells(),
        TableId::FgmBeta => fgm_beta_cells(),
        TableId::Exchangeable => exchangeable_cells(),
        TableId::NonExchangeable => nonexchangeable_cells(),
        TableId::Symmetric => symmetric_cells(),
    }
}

/// Evaluate every cell of `id`.
pub fn run_table(id: TableId, cfg: &IntegrationConfig) -> Result<TableReport> {
    cfg.validate()?;
    let defs = cells_of(id);
    let cells = defs
        .par_iter()
        .enumerate()
        .map(|(k, def)| {
            let seed = derive_seed(cfg.seed, &format!("{id}-{k}"));
            match (def.eval)(&cfg.with_seed(seed)) {
                Ok(v) => TableCell {
                    row: def.row.clone(),
                    column: def.column.clone(),
                    computed: Some(v),
                    reference: def.reference,
                    abs_diff: Some((v - def.reference).abs()),
                    error: None,
                },
                Err(e) => TableCell {
                    row: def.row.clone(),
                    column: def.column.clone(),
                    computed: None,
                    reference: def.reference,
                    abs_diff: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(TableReport {
        table: id,
        version: REFERENCE_VERSION,
        tolerance: TOLERANCE,
        cells,
    })
}
