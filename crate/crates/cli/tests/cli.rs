use htcorr::{BivariateModel, Copula, Distribution};
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn htcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_htcorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = htcorr(&all);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).expect("strict JSON")
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn csv_value(text: &str, key: &str) -> f64 {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    for rec in rdr.records() {
        let rec = rec.unwrap();
        if &rec[0] == key {
            return rec[1].parse().unwrap();
        }
    }
    panic!("no `{key}` row in\n{text}");
}

#[test]
fn corr_gumbel_exponential() {
    let o = htcorr(&[
        "corr", "--copula", "gb:1", "--fx", "exp:1", "--gy", "exp:1", "--h", "exp:1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = csv_value(&stdout(&o), "beta_xy");
    assert!((v + 0.40365).abs() < 5e-6, "{v}");
}

#[test]
fn corr_independence_is_zero() {
    let v = json(&[
        "corr",
        "--copula",
        "independence",
        "--fx",
        "uniform:0:1",
        "--gy",
        "exp:1",
        "--h",
        "uniform:0:1",
    ]);
    assert_eq!(v["beta_xy"].as_f64(), Some(0.0));
    assert_eq!(v["beta_yx"].as_f64(), Some(0.0));
}

#[test]
fn corr_upper_bound_is_one() {
    let v = json(&[
        "corr",
        "--copula",
        "frechet-upper",
        "--fx",
        "weibull:1:2",
        "--gy",
        "exp:1",
        "--h",
        "logistic:0:1",
    ]);
    assert!((v["beta_xy"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn corr_extended_reports_symmetric_indices() {
    let v = json(&[
        "corr",
        "--copula",
        "gb:1",
        "--fx",
        "weibull:1:2",
        "--gy",
        "weibull:1:0.5",
        "--h",
        "gini",
        "--extended",
    ]);
    assert!((v["tau"].as_f64().unwrap() + 0.56534).abs() < 5e-5);
    assert!((v["rho_t"].as_f64().unwrap() + 0.43307).abs() < 5e-5);
    let nu = v["nu"].as_f64().unwrap();
    assert!((v["nu_bar"].as_f64().unwrap() - (1.0 - nu)).abs() < 1e-15);
}

#[test]
fn corr_gaussian_defaults_to_monte_carlo() {
    let v = json(&[
        "corr",
        "--copula",
        "gaussian:0.6",
        "--fx",
        "normal:0:1",
        "--gy",
        "normal:1:3",
        "--h",
        "exp:1",
        "--samples",
        "200000",
    ]);
    assert_eq!(v["method"], "monte-carlo");
    assert!(v["std_error_xy"].as_f64().unwrap() > 0.0);
    assert!((v["beta_xy"].as_f64().unwrap() - 0.6).abs() < 0.02);
}

#[test]
fn parse_errors_exit_one_and_name_the_token() {
    let o = htcorr(&[
        "corr", "--copula", "gb:2", "--fx", "exp:1", "--gy", "exp:1", "--h", "exp:1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("gb:2"));
    let o = htcorr(&[
        "corr", "--copula", "fgm:0.5", "--fx", "expo:1", "--gy", "exp:1", "--h", "exp:1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("expo"));
    assert_eq!(htcorr(&["table", "table-9"]).status.code(), Some(1));
    assert_eq!(htcorr(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let o = htcorr(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("decompose"));
}

#[test]
fn table_csv_has_all_cells_and_passes() {
    let o = htcorr(&["table", "exchangeable"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "table",
            "row",
            "column",
            "computed",
            "reference",
            "abs_diff",
            "within",
            "error"
        ]
    );
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| &r[6] == "true"));
    let gini_upper = rows
        .iter()
        .find(|r| &r[1] == "bivariate-logistic Gini" && &r[2] == "upper")
        .unwrap();
    assert!((gini_upper[3].parse::<f64>().unwrap() - 0.5).abs() < 5e-4);
}

#[test]
fn table_json_round_trips() {
    let v = json(&["table", "nonexchangeable"]);
    assert_eq!(v["table"], "nonexchangeable");
    assert_eq!(v["all_within"], true);
    let cells = v["cells"].as_array().unwrap();
    let egini3 = cells
        .iter()
        .find(|c| c["row"] == "amh-power EGini(3)" && c["column"] == "upper")
        .unwrap();
    assert!((egini3["computed"].as_f64().unwrap() - 0.51025).abs() < 5e-4);
}

#[test]
fn fgm_beta_logistic_or_based() {
    let v = json(&["table", "fgm-beta"]);
    let cell = v["cells"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["row"] == "Logistic(0,1)" && c["column"] == "OR-based gamma=-1 closed-form")
        .unwrap()
        .clone();
    assert!((cell["computed"].as_f64().unwrap() + 0.30396).abs() < 5e-4);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "corr",
        "--copula",
        "gaussian:0.3",
        "--fx",
        "normal:0:1",
        "--gy",
        "logistic:0:1",
        "--h",
        "gini",
        "--samples",
        "20000",
    ];
    assert_eq!(htcorr(&args).stdout, htcorr(&args).stdout);
    let args = [
        "decompose",
        "--components",
        "exp:1,weibull:1:2",
        "--g",
        "exp:1",
        "--samples",
        "20000",
        "--seed",
        "9",
    ];
    assert_eq!(htcorr(&args).stdout, htcorr(&args).stdout);
}

#[test]
fn output_flag_writes_file() {
    let path = scratch("symmetric.csv");
    let _ = std::fs::remove_file(&path);
    let o = htcorr(&["table", "symmetric", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 26);
}

#[test]
fn estimate_comonotone_file_is_one() {
    let path = scratch("comonotone.csv");
    let mut text = String::from("x,y\n");
    for i in 0..500 {
        let x = i as f64 * 0.37 - 40.0;
        text.push_str(&format!("{x},{}\n", x.exp() + 2.0 * x));
    }
    std::fs::write(&path, text).unwrap();
    for h in ["logistic:0:1", "exp:1", "egini:0.5"] {
        let o = htcorr(&["estimate", "--input", path.to_str().unwrap(), "--h", h]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(csv_value(&stdout(&o), "estimate"), 1.0, "{h}");
        assert_eq!(csv_value(&stdout(&o), "n"), 500.0);
    }
}

#[test]
fn estimate_gaussian_sample_recovers_rho() {
    let path = scratch("gaussian.csv");
    let m = BivariateModel::new(
        Copula::gaussian(0.5).unwrap(),
        Distribution::normal(0.0, 1.0).unwrap(),
        Distribution::normal(2.0, 0.5).unwrap(),
    );
    let s = m.sample(100_000, 5).unwrap();
    let mut text = String::new();
    for (x, y) in s.pairs() {
        text.push_str(&format!("{x},{y}\n"));
    }
    std::fs::write(&path, text).unwrap();
    let v = json(&["estimate", "--input", path.to_str().unwrap(), "--h", "logistic:0:1"]);
    assert_eq!(v["n"], 100_000);
    assert!((v["estimate"].as_f64().unwrap() - 0.5).abs() < 0.02, "{v}");
    let v = json(&["estimate", "--input", path.to_str().unwrap(), "--index", "pearson"]);
    assert!((v["estimate"].as_f64().unwrap() - 0.5).abs() < 0.02, "{v}");
}

#[test]
fn estimate_reports_bad_rows() {
    let path = scratch("bad.csv");
    std::fs::write(&path, "1,2\n2,3\n3,abc\n4,5\n5\n").unwrap();
    let o = htcorr(&["estimate", "--input", path.to_str().unwrap(), "--h", "gini"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains('3') && err.contains('5'), "{err}");
}

#[test]
fn estimate_needs_h_or_index() {
    let o = htcorr(&["estimate", "--input", "whatever.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

fn bound(v: &Value, measure: &str) -> (f64, f64) {
    let row = v["subadditivity"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["measure"] == measure)
        .unwrap();
    (row["slack"].as_f64().unwrap(), row["std_error"].as_f64().unwrap())
}

#[test]
fn decompose_two_exponentials() {
    let v = json(&[
        "decompose",
        "--components",
        "exp:1,exp:1",
        "--g",
        "uniform:0:1",
        "--samples",
        "200000",
    ]);
    let d = &v["decomposition"];
    assert!(d["residual"].as_f64().unwrap().abs() <= 3.0 * d["residual_se"].as_f64().unwrap());
    let (slack, se) = bound(&v, "gmd");
    assert!((slack - 0.5).abs() < 4.0 * se, "{slack} ± {se}");
}

#[test]
fn decompose_single_component() {
    let v = json(&[
        "decompose",
        "--components",
        "weibull:1:2",
        "--g",
        "exp:1",
        "--samples",
        "1000",
    ]);
    let terms = v["decomposition"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["beta"].as_f64(), Some(1.0));
}

#[test]
fn decompose_three_components_all_slacks_hold() {
    let v = json(&[
        "decompose",
        "--components",
        "exp:1,weibull:1:2,weibull:1:2",
        "--g",
        "exp:1",
        "--samples",
        "200000",
    ]);
    for row in v["subadditivity"]["rows"].as_array().unwrap() {
        let (slack, se) = (row["slack"].as_f64().unwrap(), row["std_error"].as_f64().unwrap());
        assert!(slack >= -3.0 * se, "{row}");
    }
}

#[test]
fn decompose_rejects_negative_components() {
    let o = htcorr(&["decompose", "--components", "normal:0:1", "--g", "exp:1"]);
    assert_eq!(o.status.code(), Some(1));
}
