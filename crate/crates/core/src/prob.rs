//! Probabilities carried together with their complements.
//!
//! Tail computations lose everything when `1 - p` is formed from a `p` close
//! to one, so every probability here travels as the pair `(p, 1 - p)` with
//! both members computed directly.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prob {
    p: f64,
    q: f64,
}

impl Prob {
    pub const ZERO: Prob = Prob { p: 0.0, q: 1.0 };
    pub const ONE: Prob = Prob { p: 1.0, q: 0.0 };
    pub const HALF: Prob = Prob { p: 0.5, q: 0.5 };

    /// From a plain probability; the complement is `1 - p`.
    pub fn new(p: f64) -> Self {
        let p = p.clamp(0.0, 1.0);
        Prob { p, q: 1.0 - p }
    }

    /// From a complement; `p` is `1 - q`.
    pub fn from_complement(q: f64) -> Self {
        Prob::new(q).complement()
    }

    /// From a pair already known to sum to one.
    pub fn from_pair(p: f64, q: f64) -> Self {
        debug_assert!((p + q - 1.0).abs() < 1e-12);
        Prob { p, q }
    }

    /// `p = 1 / (1 + e^{-s})`, with `q` from the mirrored expression.
    pub fn from_logit(s: f64) -> Self {
        if s >= 0.0 {
            let e = (-s).exp();
            Prob {
                p: 1.0 / (1.0 + e),
                q: e / (1.0 + e),
            }
        } else {
            let e = s.exp();
            Prob {
                p: e / (1.0 + e),
                q: 1.0 / (1.0 + e),
            }
        }
    }

    /// `k / n` with the complement `(n - k) / n` formed exactly.
    pub fn ratio(k: usize, n: usize) -> Self {
        Prob {
            p: k as f64 / n as f64,
            q: (n - k) as f64 / n as f64,
        }
    }

    pub fn p(self) -> f64 {
        self.p
    }

    pub fn q(self) -> f64 {
        self.q
    }

    pub fn complement(self) -> Self {
        Prob { p: self.q, q: self.p }
    }

    /// `ln p`, accurate near both ends.
    pub fn ln_p(self) -> f64 {
        if self.q < 0.5 {
            (-self.q).ln_1p()
        } else {
            self.p.ln()
        }
    }

    /// `ln(1 - p)`, accurate near both ends.
    pub fn ln_q(self) -> f64 {
        if self.p < 0.5 {
            (-self.p).ln_1p()
        } else {
            self.q.ln()
        }
    }

    /// `ln(p / (1 - p))`.
    pub fn logit(self) -> f64 {
        self.ln_p() - self.ln_q()
    }

    /// Whether the pair lies strictly inside (0, 1).
    pub fn is_interior(self) -> bool {
        self.p > 0.0 && self.q > 0.0
    }

    /// The smaller of `p` and `1 - p`.
    pub fn min_tail(self) -> f64 {
        self.p.min(self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logit_round_trip() {
        for &s in &[-80.0, -12.5, -1.0, 0.0, 0.3, 7.0, 60.0] {
            let u = Prob::from_logit(s);
            assert!((u.p() + u.q() - 1.0).abs() < 1e-15);
            assert!((u.logit() - s).abs() < 1e-12 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn tails_keep_precision() {
        let u = Prob::from_logit(60.0);
        assert!((u.ln_q() + 60.0).abs() < 1e-12);
        let v = Prob::from_logit(-60.0);
        assert!((v.ln_p() + 60.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_complement_is_exact() {
        let u = Prob::ratio(3, 7);
        assert_eq!(u.q(), 4.0 / 7.0);
        assert_eq!(u.complement().p(), 4.0 / 7.0);
    }
}
