//! Oracles shared by the integration tests. They work on the support of the
//! law with a plain composite Simpson rule, independent of the library's
//! unit-interval quadrature.

#![allow(dead_code)]

use htcorr::Distribution;

/// Composite Simpson over `[a, b]` with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Upper integration limit where the survival function is negligible.
pub fn upper_limit(d: &Distribution) -> f64 {
    let (_, hi) = d.support();
    if hi.is_finite() {
        hi
    } else {
        d.quantile(1.0 - 1e-15).unwrap() * 1.5
    }
}

/// `∫ g(F(x), F̄(x)) dx` over a support bounded below. Substitutions
/// flatten the integrand at the ends: `x = lo + t²` for an unbounded
/// support, a cubic smoothstep for a bounded one.
pub fn over_support<G: Fn(f64, f64) -> f64>(d: &Distribution, g: G) -> f64 {
    let (lo, hi) = d.support();
    let at = |x: f64| {
        let p = d.cdf(x);
        g(p, 1.0 - p)
    };
    if hi.is_finite() {
        let w = hi - lo;
        simpson(
            |t| 6.0 * w * t * (1.0 - t) * at(lo + w * t * t * (3.0 - 2.0 * t)),
            0.0,
            1.0,
            400_000,
        )
    } else {
        let top = (upper_limit(d) - lo).sqrt();
        simpson(|t| 2.0 * t * at(lo + t * t), 0.0, top, 400_000)
    }
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `E|X₁ - X₂| = 2 ∫ F F̄`.
pub fn gmd_oracle(d: &Distribution) -> f64 {
    over_support(d, |p, q| 2.0 * p * q)
}

/// `-∫ F̄ ln F̄`.
pub fn cre_oracle(d: &Distribution) -> f64 {
    over_support(d, |_, q| -xlnx(q))
}

/// `(1/n!) ∫ F̄ (-ln F̄)ⁿ`.
pub fn gcre_oracle(d: &Distribution, n: u32) -> f64 {
    let fact: f64 = (1..=n).map(f64::from).product();
    over_support(d, |_, q| if q <= 0.0 { 0.0 } else { q * (-q.ln()).powi(n as i32) }) / fact
}
