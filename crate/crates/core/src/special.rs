//! Special functions not covered by `statrs`.

use crate::prob::Prob;
use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF as a probability pair.
pub fn normal_cdf(z: f64) -> Prob {
    let lower = 0.5 * erfc(-z * FRAC_1_SQRT_2);
    let upper = 0.5 * erfc(z * FRAC_1_SQRT_2);
    if z < 0.0 {
        Prob::from_pair(lower, 1.0 - lower)
    } else {
        Prob::from_pair(1.0 - upper, upper)
    }
}

/// Standard normal quantile.
pub fn normal_quantile(u: Prob) -> f64 {
    if u.p() <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u.q() <= 0.0 {
        return f64::INFINITY;
    }
    if u.p() <= 0.5 {
        lower_quantile(u.p())
    } else {
        -lower_quantile(u.q())
    }
}

// Acklam's rational approximation for p <= 1/2, followed by one Halley step.
#[allow(clippy::excessive_precision)]
fn lower_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    let e = 0.5 * erfc(-x * FRAC_1_SQRT_2) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        // Modified Lentz evaluation of the continued fraction.
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_inverts_cdf() {
        for &z in &[-37.0, -8.0, -2.5, -0.3, 0.0, 0.7, 3.0, 8.0] {
            let back = normal_quantile(normal_cdf(z));
            assert!((back - z).abs() < 1e-12 * (1.0 + z.abs()), "{z} -> {back}");
        }
    }

    #[test]
    fn known_quantiles() {
        let z = normal_quantile(Prob::new(0.975));
        assert!((z - 1.959_963_984_540_054).abs() < 1e-14, "{z}");
        assert_eq!(normal_quantile(Prob::HALF), 0.0);
    }

    #[test]
    fn e1_reference_values() {
        // Abramowitz & Stegun table values.
        assert!((exp_integral_e1(0.5) - 0.559_773_594_776_160_8).abs() < 1e-14);
        assert!((exp_integral_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-14);
        assert!((exp_integral_e1(2.0) - 0.048_900_510_708_061_12).abs() < 1e-15);
        assert!((exp_integral_e1(10.0) - 4.156_968_929_685_324e-6).abs() < 1e-18);
    }
}
