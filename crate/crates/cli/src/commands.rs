use crate::output::{self, Record};
use crate::{Cli, Command, Common, Format, HChoice, MethodArg, TableChoice};
use htcorr::correlation::{beta_h_report, default_method, pearson, rho_t, symmetric_indices};
use htcorr::decomposition::{decompose_simulation, subadditivity_simulation, StandbySystem};
use htcorr::estimation::{estimate_beta_h_batched, estimate_named, NamedIndex, ScoreRule};
use htcorr::tables::{run_table, TableId, TableReport};
use htcorr::{
    BivariateModel, Copula, CorrelationSpec, Distribution, Error, IntegrationConfig, Method, PairedSample, Result,
};
use serde::Serialize;
use std::path::Path;

/// Process exit code for a library error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::InvalidParameter(_)
        | Error::Input { .. }
        | Error::Io(_)
        | Error::Unsupported(_)
        | Error::Domain(_) => 1,
        Error::NumericalFailure(_) | Error::DegenerateDenominator(_) | Error::MomentUndefined(_) => 2,
    }
}

fn config(common: &Common, method: Method) -> Result<IntegrationConfig> {
    let mut cfg = IntegrationConfig {
        method,
        seed: common.seed,
        ..IntegrationConfig::default()
    };
    if let Some(tol) = common.tol {
        cfg.abs_tol = tol;
    }
    if let Some(n) = common.samples {
        cfg.mc_samples = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn method_or(common: &Common, fallback: Method) -> Method {
    match common.method {
        Some(MethodArg::Quadrature) => Method::Quadrature,
        Some(MethodArg::Mc) => Method::MonteCarlo,
        None => fallback,
    }
}

/// Run the parsed command; returns the exit code on success.
pub fn run(cli: &Cli) -> Result<u8> {
    let c = &cli.common;
    match &cli.command {
        Command::Table { table } => table_cmd(c, *table),
        Command::Corr {
            copula,
            fx,
            gy,
            h,
            extended,
        } => corr_cmd(c, copula, fx, gy, h, *extended),
        Command::Estimate { input, h, index } => estimate_cmd(c, input, h.as_ref(), *index),
        Command::Decompose { components, g } => decompose_cmd(c, components, g),
    }
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn table_cmd(common: &Common, choice: TableChoice) -> Result<u8> {
    let cfg = config(common, method_or(common, Method::Quadrature))?;
    let ids: Vec<TableId> = match choice {
        TableChoice::One(id) => vec![id],
        TableChoice::All => TableId::ALL.to_vec(),
    };
    let reports = ids
        .into_iter()
        .map(|id| run_table(id, &cfg))
        .collect::<Result<Vec<TableReport>>>()?;
    let text = match common.format {
        Format::Csv => output::tables_csv(&reports)?,
        Format::Json => match choice {
            TableChoice::One(_) => output::json(&output::TableView::from(&reports[0]))?,
            TableChoice::All => output::json(&reports.iter().map(output::TableView::from).collect::<Vec<_>>())?,
        },
    };
    emit(common, &text)?;
    let failures: usize = reports.iter().map(TableReport::failures).sum();
    let breaches: usize = reports.iter().map(TableReport::breaches).sum();
    if failures > 0 {
        log::error!("{failures} cell(s) failed to compute");
        Ok(2)
    } else if breaches > 0 {
        log::error!("{breaches} cell(s) outside tolerance");
        Ok(3)
    } else {
        Ok(0)
    }
}

#[derive(Serialize)]
struct CorrView {
    copula: String,
    fx: String,
    gy: String,
    h: String,
    method: Method,
    beta_xy: f64,
    beta_yx: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_error_xy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_error_yx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pearson: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu_bar: Option<f64>,
}

fn corr_cmd(
    common: &Common,
    copula: &Copula,
    fx: &Distribution,
    gy: &Distribution,
    h: &HChoice,
    extended: bool,
) -> Result<u8> {
    let cfg = config(common, method_or(common, default_method(copula)))?;
    let model = BivariateModel::new(*copula, fx.clone(), gy.clone());
    // ρ_t uses H = G in each direction.
    let (spec_xy, spec_yx) = match h {
        HChoice::RhoT => (CorrelationSpec::rho_t(gy.clone()), CorrelationSpec::rho_t(fx.clone())),
        HChoice::Spec(s) => (s.clone(), s.clone()),
    };
    let xy = beta_h_report(&model, &spec_xy, &cfg)?;
    let yx = beta_h_report(&model.swap(), &spec_yx, &cfg)?;
    let mut view = CorrView {
        copula: copula.to_string(),
        fx: fx.to_string(),
        gy: gy.to_string(),
        h: spec_xy.to_string(),
        method: cfg.method,
        beta_xy: xy.value,
        beta_yx: yx.value,
        std_error_xy: xy.std_error,
        std_error_yx: yx.std_error,
        pearson: None,
        rho_t: None,
        tau: None,
        nu: None,
        nu_bar: None,
    };
    if extended {
        view.pearson = Some(pearson(&model, &cfg)?);
        view.rho_t = Some(rho_t(&model, &cfg)?);
        if let HChoice::Spec(s) = h {
            let sym = symmetric_indices(&model, s, &cfg)?;
            view.tau = Some(sym.tau);
            view.nu = Some(sym.nu);
            view.nu_bar = Some(sym.nu_bar);
        }
    }
    let text = match common.format {
        Format::Json => output::json(&view)?,
        Format::Csv => {
            let mut rows = vec![
                Record::new("beta_xy", view.beta_xy),
                Record::new("beta_yx", view.beta_yx),
            ];
            let optional = [
                ("std_error_xy", view.std_error_xy),
                ("std_error_yx", view.std_error_yx),
                ("pearson", view.pearson),
                ("rho_t", view.rho_t),
                ("tau", view.tau),
                ("nu", view.nu),
                ("nu_bar", view.nu_bar),
            ];
            rows.extend(optional.into_iter().filter_map(|(k, v)| v.map(|v| Record::new(k, v))));
            output::records_csv(&rows)?
        }
    };
    emit(common, &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct EstimateView {
    input: String,
    n: usize,
    index: String,
    estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_error: Option<f64>,
}

fn estimate_cmd(common: &Common, input: &Path, h: Option<&HChoice>, index: Option<NamedIndex>) -> Result<u8> {
    let sample = PairedSample::from_csv_path(input)?;
    let (label, estimate, std_error) = match (h, index) {
        (Some(HChoice::Spec(spec)), _) => {
            let e = estimate_beta_h_batched(&sample, spec.h(), ScoreRule::StratumMean, 10, 1);
            match e {
                Ok(e) => (spec.to_string(), e.value, Some(e.std_error)),
                // Too few rows for batching; fall back to the point estimate.
                Err(Error::InvalidParameter(_)) if sample.len() >= 3 => (
                    spec.to_string(),
                    htcorr::estimation::estimate_beta_h(&sample, spec)?,
                    None,
                ),
                Err(e) => return Err(e),
            }
        }
        (Some(HChoice::RhoT), _) => ("rho-t".to_string(), estimate_named(&sample, NamedIndex::RhoT)?, None),
        (None, Some(which)) => (index_name(which), estimate_named(&sample, which)?, None),
        (None, None) => return Err(Error::InvalidParameter("give --h or --index".into())),
    };
    let view = EstimateView {
        input: input.display().to_string(),
        n: sample.len(),
        index: label,
        estimate,
        std_error,
    };
    let text = match common.format {
        Format::Json => output::json(&view)?,
        Format::Csv => {
            let mut rows = vec![Record::new("n", view.n as f64), Record::new("estimate", view.estimate)];
            if let Some(se) = view.std_error {
                rows.push(Record::new("std_error", se));
            }
            output::records_csv(&rows)?
        }
    };
    emit(common, &text)?;
    Ok(0)
}

fn index_name(which: NamedIndex) -> String {
    match which {
        NamedIndex::Pearson => "pearson".into(),
        NamedIndex::Gini => "gini".into(),
        NamedIndex::EGini(nu) => format!("egini:{nu}"),
        NamedIndex::OrBased => "or-based".into(),
        NamedIndex::CreBased => "cre-based".into(),
        NamedIndex::RhoT => "rho-t".into(),
    }
}

fn decompose_cmd(common: &Common, components: &[Distribution], g: &Distribution) -> Result<u8> {
    let cfg = config(common, method_or(common, Method::Quadrature))?;
    let sys = StandbySystem::new(components.to_vec())?;
    let sim = sys.simulate(cfg.mc_samples, cfg.seed)?;
    let decomposition = decompose_simulation(&sys, &sim, g, &cfg)?;
    let bounds = subadditivity_simulation(&sys, &sim, &cfg)?;
    let view = output::DecomposeView {
        system: sys.to_string(),
        seed: cfg.seed,
        decomposition,
        subadditivity: bounds,
    };
    let text = match common.format {
        Format::Json => output::json(&view)?,
        Format::Csv => output::decompose_csv(&view)?,
    };
    emit(common, &text)?;
    Ok(0)
}
