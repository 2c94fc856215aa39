//! CSV and JSON rendering.

use htcorr::decomposition::{Decomposition, SubadditivityReport};
use htcorr::tables::{TableCell, TableReport};
use htcorr::{Error, Result};
use serde::Serialize;

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Io(format!("csv output: {e}"))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

/// Shortest round-trip text, in exponent form for very small or large values.
pub fn number(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn num(v: Option<f64>) -> String {
    v.map(number).unwrap_or_default()
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(format!("json output: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// A `quantity,value` line.
pub struct Record {
    key: &'static str,
    value: f64,
}

impl Record {
    pub fn new(key: &'static str, value: f64) -> Self {
        Record { key, value }
    }
}

pub fn records_csv(rows: &[Record]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value"]).map_err(csv_error)?;
    for r in rows {
        w.write_record([r.key.to_string(), number(r.value)])
            .map_err(csv_error)?;
    }
    finish(w)
}

/// JSON shape of a table report.
#[derive(Serialize)]
pub struct TableView<'a> {
    table: String,
    version: u32,
    tolerance: f64,
    all_within: bool,
    max_abs_diff: Option<f64>,
    cells: &'a [TableCell],
}

impl<'a> From<&'a TableReport> for TableView<'a> {
    fn from(r: &'a TableReport) -> Self {
        TableView {
            table: r.table.to_string(),
            version: r.version,
            tolerance: r.tolerance,
            all_within: r.all_within(),
            max_abs_diff: r.max_abs_diff(),
            cells: &r.cells,
        }
    }
}

pub fn tables_csv(reports: &[TableReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "table",
        "row",
        "column",
        "computed",
        "reference",
        "abs_diff",
        "within",
        "error",
    ])
    .map_err(csv_error)?;
    for r in reports {
        for c in &r.cells {
            w.write_record([
                r.table.to_string(),
                c.row.clone(),
                c.column.clone(),
                num(c.computed),
                number(c.reference),
                num(c.abs_diff),
                c.within(r.tolerance).to_string(),
                c.error.clone().unwrap_or_default(),
            ])
            .map_err(csv_error)?;
        }
    }
    finish(w)
}

#[derive(Serialize)]
pub struct DecomposeView {
    pub system: String,
    pub seed: u64,
    pub decomposition: Decomposition,
    pub subadditivity: SubadditivityReport,
}

/// Long format: `section,label,quantity,value`.
pub fn decompose_csv(v: &DecomposeView) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["section", "label", "quantity", "value"])
        .map_err(csv_error)?;
    let mut put = |section: &str, label: &str, quantity: &str, value: String| {
        w.write_record([section, label, quantity, &value]).map_err(csv_error)
    };
    let d = &v.decomposition;
    put("system", &v.system, "samples", d.samples.to_string())?;
    put("system", &v.system, "seed", v.seed.to_string())?;
    for (i, t) in d.terms.iter().enumerate() {
        let label = format!("{}:{}", i + 1, t.component);
        put("term", &label, "beta", number(t.beta))?;
        put("term", &label, "beta_se", number(t.beta_se))?;
        put("term", &label, "g_covariance", number(t.g_covariance))?;
        put("term", &label, "contribution", number(t.contribution))?;
    }
    let g = d.transform.as_str();
    put("identity", g, "total", number(d.total))?;
    put("identity", g, "total_se", number(d.total_se))?;
    put("identity", g, "direct", number(d.direct))?;
    put("identity", g, "direct_se", number(d.direct_se))?;
    put("identity", g, "residual", number(d.residual))?;
    put("identity", g, "residual_se", number(d.residual_se))?;
    for row in &v.subadditivity.rows {
        put("bound", &row.measure, "lhs", number(row.lhs))?;
        put("bound", &row.measure, "rhs", number(row.rhs))?;
        put("bound", &row.measure, "slack", number(row.slack))?;
        put("bound", &row.measure, "std_error", number(row.std_error))?;
    }
    finish(w)
}
