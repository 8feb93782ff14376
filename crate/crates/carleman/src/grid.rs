//! Deterministic grids and the stabilization proxy for suprema over
//! unbounded domains.
//!
//! Every supremum or lim-inf in this crate ranges over an unbounded set in
//! the underlying statements. On a finite grid we can only report the
//! extremum *seen*, together with evidence that it has converged: the
//! running extremum must not have updated during the final decade of the
//! scanned range. Reports carry this as an explicit `stabilized` flag and
//! never claim more.

use crate::{Error, Result};

/// Geometrically spaced grid with exact endpoints.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi <= lo {
        return Err(Error::invalid(format!(
            "log grid needs 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    if n < 2 {
        return Err(Error::invalid("log grid needs at least 2 points"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    let mut xs: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
    xs[0] = lo;
    xs[n - 1] = hi;
    Ok(xs)
}

/// Uniformly spaced grid with exact endpoints.
pub fn linear_spaced(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::invalid(format!(
            "linear grid needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    if n < 2 {
        return Err(Error::invalid("linear grid needs at least 2 points"));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut xs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    xs[0] = lo;
    xs[n - 1] = hi;
    Ok(xs)
}

/// Symmetric uniform grid `-half, ..., 0, ..., half` with `2*half_steps + 1`
/// points; node `i` is the exact product `i * step`, so integer multiples of
/// the step are hit bit-exactly.
pub fn symmetric_step_grid(half_steps: i64, step: f64) -> Result<Vec<f64>> {
    if half_steps < 1 || !(step > 0.0) || !step.is_finite() {
        return Err(Error::invalid("symmetric grid needs half_steps >= 1, step > 0"));
    }
    Ok((-half_steps..=half_steps).map(|i| i as f64 * step).collect())
}

/// Running maximum over `(arg, value)` pairs with stabilization evidence.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SupScan {
    /// Largest value seen.
    pub value: f64,
    /// Argument where it was first attained.
    pub arg: f64,
    /// Argument of the last running-max update.
    pub last_update_arg: f64,
    /// True when the running maximum did not move during the final decade
    /// of the scanned range.
    pub stabilized: bool,
}

/// Scan `(args, vals)` in order; ties keep the earliest argument. `args`
/// must be positive and nondecreasing for the final-decade criterion to be
/// meaningful.
pub fn sup_with_stabilization(args: &[f64], vals: &[f64]) -> Result<SupScan> {
    if args.len() != vals.len() || args.len() < 2 {
        return Err(Error::invalid("sup scan needs >= 2 (arg, value) pairs"));
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_arg = args[0];
    let mut last_update = args[0];
    for (&a, &v) in args.iter().zip(vals) {
        if v > best {
            best = v;
            best_arg = a;
            last_update = a;
        }
    }
    let hi = *args.last().unwrap();
    Ok(SupScan {
        value: best,
        arg: best_arg,
        last_update_arg: last_update,
        stabilized: last_update <= hi / 10.0,
    })
}

/// Least-squares slope of `vals` against `args` (used for trend evidence in
/// lim-inf proxies).
pub fn trend_slope(args: &[f64], vals: &[f64]) -> f64 {
    let n = args.len() as f64;
    if args.len() < 2 {
        return 0.0;
    }
    let mx = args.iter().sum::<f64>() / n;
    let my = vals.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in args.iter().zip(vals) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
