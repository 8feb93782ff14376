//! Brute-force reference evaluators.
//!
//! These are deliberately naive O(n) / O(n^2) scans kept independent of the
//! production paths so the fast implementations can be checked against them.
//! They share nothing with the sweep or the breakpoint search except the
//! elementary expressions being maximized.

use crate::conjugates::ConvexGridFunction;

/// `max_k (k ln r - ln M_k)` by scanning every k; ties keep the smallest k.
pub fn brute_force_w(ln_m: &[f64], r: f64) -> (f64, usize) {
    if r == 0.0 {
        return (0.0, 0);
    }
    let t = r.ln();
    let mut best = f64::NEG_INFINITY;
    let mut best_k = 0usize;
    for (k, &lm) in ln_m.iter().enumerate() {
        let val = k as f64 * t - lm;
        if val > best {
            best = val;
            best_k = k;
        }
    }
    (best, best_k)
}

/// `max_y (x y - f(y))` by scanning every grid node; ties keep the smallest
/// y.
pub fn brute_force_conjugate(f: &ConvexGridFunction, x: f64) -> (f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut best_j = 0usize;
    for (j, (&y, &v)) in f.xs().iter().zip(f.vals()).enumerate() {
        let val = x * y - v;
        if val > best {
            best = val;
            best_j = j;
        }
    }
    (best, best_j)
}
