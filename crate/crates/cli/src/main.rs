//! `htcorr`: reference tables, ad-hoc correlations, estimation from data and
//! standby-system decompositions.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 numerical failure,
//! 3 a table cell outside tolerance.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use htcorr::estimation::NamedIndex;
use htcorr::tables::TableId;
use htcorr::{Copula, CorrelationSpec, Distribution};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "htcorr",
    version,
    about = "H-transformed correlation and G-covariance measures"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Integration method; Gaussian copulas default to Monte Carlo.
    #[arg(long, value_enum, global = true)]
    method: Option<MethodArg>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Quadrature,
    Mc,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recompute a reference table and compare every cell.
    Table {
        /// fgm-rhot, fgm-beta, exchangeable, nonexchangeable, symmetric or all.
        #[arg(value_parser = parse_table)]
        table: TableChoice,
    },
    /// β_H in both directions for a copula model.
    Corr {
        /// independence | fgm:γ | gb:θ | amh:θ | gaussian:ρ | frechet-upper | frechet-lower
        #[arg(long)]
        copula: Copula,
        /// Law of X, e.g. `exp:1`.
        #[arg(long)]
        fx: Distribution,
        /// Law of Y.
        #[arg(long)]
        gy: Distribution,
        /// Transform law or index name (gini, cre-based, or-based, egini:ν, rho-t).
        #[arg(long, value_parser = parse_h)]
        h: HChoice,
        /// Also report Pearson, ρ_t and the symmetric indices.
        #[arg(long)]
        extended: bool,
    },
    /// Plug-in estimate from a two-column CSV file.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// Transform law or index name.
        #[arg(long, value_parser = parse_h, conflicts_with = "index", required_unless_present = "index")]
        h: Option<HChoice>,
        /// pearson, gini, cre-based, or-based, egini:ν or rho-t.
        #[arg(long)]
        index: Option<NamedIndex>,
    },
    /// Split C(T, G) over the units of a standby system.
    Decompose {
        /// Comma-separated component laws.
        #[arg(long, value_delimiter = ',', required = true)]
        components: Vec<Distribution>,
        /// Transform law G.
        #[arg(long)]
        g: Distribution,
    },
}

#[derive(Debug, Clone, Copy)]
enum TableChoice {
    One(TableId),
    All,
}

fn parse_table(s: &str) -> Result<TableChoice, String> {
    if s == "all" {
        Ok(TableChoice::All)
    } else {
        s.parse()
            .map(TableChoice::One)
            .map_err(|e: htcorr::Error| e.to_string())
    }
}

#[derive(Debug, Clone)]
enum HChoice {
    RhoT,
    Spec(CorrelationSpec),
}

fn parse_h(s: &str) -> Result<HChoice, String> {
    if matches!(s.trim().to_ascii_lowercase().as_str(), "rho-t" | "rhot") {
        Ok(HChoice::RhoT)
    } else {
        s.parse().map(HChoice::Spec).map_err(|e: htcorr::Error| e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
