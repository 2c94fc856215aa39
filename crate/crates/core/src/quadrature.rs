//! Adaptive Gauss–Kronrod quadrature on finite intervals and on the unit
//! interval / unit square through a logistic change of variables.
//!
//! Integrals over `(0, 1)` are evaluated in logit space: `u = 1/(1+e^{-s})`,
//! `du = u(1-u) ds`. Quantile functions that blow up at `0` or `1` become
//! smooth, at most exponentially growing functions of `s` while the Jacobian
//! decays exponentially. The `s` range is truncated at `±logit(1-ε)`; each
//! integral also measures the strip between `ε/2` and `ε` on both sides and
//! fails if that strip is not negligible.

use crate::error::{Error, Result};
use crate::prob::Prob;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

// QUADPACK qk21 abscissae and weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_928_651,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Fixed breakpoints in logit space; integrands change character around them.
const LOGIT_BREAKS: [f64; 11] = [-40.0, -20.0, -10.0, -5.0, -2.0, 0.0, 2.0, 5.0, 10.0, 20.0, 40.0];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Stopping rule: stop once the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Tolerance {
    pub fn absolute(abs_tol: f64) -> Self {
        Tolerance {
            abs_tol,
            rel_tol: 1e-13,
            max_segments: 4000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut resabs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    if !value.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "integrand not finite on [{a:e}, {b:e}]"
        )));
    }
    let error = rescale_error((res_k - res_g) * half, resabs * half.abs(), resasc * half.abs());
    Ok(Segment { a, b, value, error })
}

/// Global adaptive integration of `f` over `[points[0], points[last]]`,
/// starting from the partition given by `points`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: Tolerance) -> Result<Integral> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("need at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let seg = gk21(&mut f, w[0], w[1])?;
        value += seg.value;
        error += seg.error;
        heap.push(seg);
    }
    let mut evaluations = 21 * heap.len();
    while error > tol.target(value) {
        if heap.len() >= tol.max_segments {
            return Err(Error::NumericalFailure(format!(
                "quadrature did not converge: value {value:e}, error estimate {error:e}"
            )));
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NumericalFailure(format!(
                "quadrature cannot subdivide near {mid:e}; error estimate {error:e}"
            )));
        }
        let left = gk21(&mut f, worst.a, mid)?;
        let right = gk21(&mut f, mid, worst.b)?;
        evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Recompute from scratch now and then to shed accumulated rounding.
        if evaluations % (42 * 64) == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Integral {
        value,
        error,
        evaluations,
    })
}

/// Integration over `(0, 1)` in logit space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitInterval {
    pub abs_tol: f64,
    pub tail_eps: f64,
}

impl UnitInterval {
    pub fn new(abs_tol: f64, tail_eps: f64) -> Self {
        UnitInterval { abs_tol, tail_eps }
    }

    /// Logit of `1 - ε`, the half-width of the truncated `s` range.
    pub fn limit(&self) -> f64 {
        ((1.0 - self.tail_eps) / self.tail_eps).ln()
    }

    fn partition(limit: f64, extra: &[f64]) -> Vec<f64> {
        let mut pts: Vec<f64> = LOGIT_BREAKS
            .iter()
            .chain(extra.iter())
            .copied()
            .filter(|s| s.is_finite() && s.abs() < limit)
            .collect();
        pts.push(-limit);
        pts.push(limit);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        pts
    }

    /// `∫_0^1 f(u) du`.
    pub fn integrate<F: FnMut(Prob) -> f64>(&self, f: F) -> Result<Integral> {
        self.integrate_with_breaks(f, &[], Tolerance::absolute(self.abs_tol))
    }

    /// `∫_0^1 f(u) du` with extra breakpoints given in logit space.
    pub fn integrate_with_breaks<F: FnMut(Prob) -> f64>(
        &self,
        mut f: F,
        breaks: &[f64],
        tol: Tolerance,
    ) -> Result<Integral> {
        let limit = self.limit();
        let mut g = |s: f64| {
            let u = Prob::from_logit(s);
            let jac = u.p() * u.q();
            if jac == 0.0 {
                0.0
            } else {
                f(u) * jac
            }
        };
        let pts = Self::partition(limit, breaks);
        let main = integrate(&mut g, &pts, tol)?;
        let outer = ((1.0 - 0.5 * self.tail_eps) / (0.5 * self.tail_eps)).ln();
        let lo = gk21(&mut g, -outer, -limit)?;
        let hi = gk21(&mut g, limit, outer)?;
        let strip = lo.value.abs() + hi.value.abs();
        if strip > tol.target(main.value) {
            return Err(Error::NumericalFailure(format!(
                "integrand mass beyond tail truncation {:e} is {strip:e}",
                self.tail_eps
            )));
        }
        Ok(Integral {
            evaluations: main.evaluations + 42,
            ..main
        })
    }

    /// `∫∫_{(0,1)^2} f(u, v) du dv`. `kink(s)` may name a logit-space point
    /// where the inner integrand (in `v`) is not smooth for a given outer `s`.
    pub fn integrate_square<F, K>(&self, f: F, kink: K) -> Result<Integral>
    where
        F: Fn(Prob, Prob) -> f64,
        K: Fn(f64) -> Option<f64>,
    {
        let limit = self.limit();
        let span = 2.0 * limit;
        let mut failure: Option<Error> = None;
        let mut inner_evals = 0usize;
        let outer = |u: Prob| -> f64 {
            if failure.is_some() {
                return 0.0;
            }
            // The inner result is weighted by the outer logistic density u(1-u)
            // in logit space, so the inner target is scaled up by its inverse
            // where that density is small.
            let weight = (u.p() * u.q()).max(1.0 / span);
            let tol = Tolerance {
                abs_tol: 0.25 * self.abs_tol * weight / (u.p() * u.q()).max(f64::MIN_POSITIVE),
                rel_tol: 1e-12,
                max_segments: 2000,
            };
            let breaks: Vec<f64> = kink(u.logit()).into_iter().collect();
            match self.integrate_with_breaks(|v| f(u, v), &breaks, tol) {
                Ok(r) => {
                    inner_evals += r.evaluations;
                    r.value
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        };
        let res = self.integrate_with_breaks(
            outer,
            &[],
            Tolerance {
                abs_tol: 0.5 * self.abs_tol,
                rel_tol: 1e-12,
                max_segments: 2000,
            },
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let mut r = res?;
        r.evaluations += inner_evals;
        Ok(r)
    }
}
