//! Measures checked against direct integrals over the support.

mod common;

use htcorr::measures::{
    cre, equilibrium_entropy, extended_gini, g_covariance, gcre, gmd, log_odds_covariance, record_mean_gap, RecordGap,
};
use htcorr::{Distribution, IntegrationConfig};
use std::f64::consts::PI;

fn cfg() -> IntegrationConfig {
    IntegrationConfig::default()
}

fn laws() -> Vec<Distribution> {
    vec![
        Distribution::exponential(2.0).unwrap(),
        Distribution::weibull(1.5, 2.0).unwrap(),
        Distribution::weibull(1.0, 0.5).unwrap(),
        Distribution::uniform(1.0, 4.0).unwrap(),
        Distribution::power(3.0).unwrap(),
    ]
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol * (1.0 + b.abs()), "{a} vs {b}");
}

#[test]
fn gini_mean_difference_matches_support_integral() {
    for f in laws() {
        close(gmd(&f, &cfg()).unwrap(), common::gmd_oracle(&f), 1e-7);
    }
}

#[test]
fn cumulative_residual_entropy_matches_support_integral() {
    for f in laws() {
        close(cre(&f, &cfg()).unwrap(), common::cre_oracle(&f), 1e-7);
    }
}

#[test]
fn generalized_entropy_matches_support_integral() {
    for f in laws() {
        for n in 1..=4 {
            close(gcre(&f, n, &cfg()).unwrap(), common::gcre_oracle(&f, n), 1e-7);
        }
    }
}

#[test]
fn extended_gini_two_is_half_the_mean_difference() {
    for f in laws() {
        close(
            extended_gini(&f, 2.0, &cfg()).unwrap(),
            0.5 * gmd(&f, &cfg()).unwrap(),
            1e-9,
        );
    }
}

#[test]
fn scale_equivariance() {
    let f = Distribution::weibull(1.0, 1.7).unwrap();
    let g = f.affine(0.0, 3.0).unwrap();
    close(gmd(&g, &cfg()).unwrap(), 3.0 * gmd(&f, &cfg()).unwrap(), 1e-9);
    close(cre(&g, &cfg()).unwrap(), 3.0 * cre(&f, &cfg()).unwrap(), 1e-9);
}

#[test]
fn closed_forms_for_exponential() {
    let e = Distribution::exponential(1.0).unwrap();
    close(gmd(&e, &cfg()).unwrap(), 1.0, 1e-9);
    close(cre(&e, &cfg()).unwrap(), 1.0, 1e-9);
    close(log_odds_covariance(&e, &cfg()).unwrap(), PI * PI / 6.0, 1e-9);
    close(equilibrium_entropy(&e, &cfg()).unwrap(), 1.0, 1e-9);
    // The covariance with the law itself is the variance.
    close(g_covariance(&e, &e, &cfg()).unwrap(), 1.0, 1e-9);
}

#[test]
fn record_gaps() {
    let e = Distribution::exponential(1.0).unwrap();
    let u = Distribution::standard_uniform();
    for n in 1..=5u32 {
        // Upper records of Exp(1) are Gamma(n, 1).
        close(
            record_mean_gap(&e, n, RecordGap::Upper, &cfg()).unwrap(),
            f64::from(n - 1),
            1e-8,
        );
        // For U(0,1), E R_n = 1 - 2^-n and lower records mirror upper ones.
        let gap = 0.5 - 0.5f64.powi(n as i32);
        close(record_mean_gap(&u, n, RecordGap::Upper, &cfg()).unwrap(), gap, 1e-9);
        close(record_mean_gap(&u, n, RecordGap::Lower, &cfg()).unwrap(), -gap, 1e-9);
        close(
            record_mean_gap(&u, n, RecordGap::Spread, &cfg()).unwrap(),
            2.0 * gap,
            1e-9,
        );
    }
}
