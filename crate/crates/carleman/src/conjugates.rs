//! Discrete Legendre-Fenchel conjugation and the spatial weights derived
//! from it.
//!
//! A convex function is carried as samples on an increasing grid. The
//! conjugate `g(x) = sup_y (x y - f(y))` is computed by the monotone-argmax
//! sweep: for convex `f` the smallest maximizing grid node is nondecreasing
//! in `x`, so one pointer pass over the grid serves every requested `x` in
//! ascending order. Ties resolve to the smallest `y` for determinism.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Slope-monotonicity tolerance for the discrete convexity invariant.
pub const CONVEXITY_TOL: f64 = 1e-10;

/// A sampled convex function on a strictly increasing grid.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexGridFunction {
    xs: Vec<f64>,
    vals: Vec<f64>,
}

impl ConvexGridFunction {
    /// Validates strict grid monotonicity and discrete convexity (chord
    /// slopes nondecreasing within `CONVEXITY_TOL`).
    pub fn new(xs: Vec<f64>, vals: Vec<f64>) -> Result<Self> {
        if xs.len() != vals.len() || xs.len() < 2 {
            return Err(Error::invalid("grid function needs >= 2 nodes"));
        }
        if xs.iter().chain(vals.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid function entries must be finite"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid must be strictly increasing"));
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..xs.len() - 1 {
            let s = (vals[i + 1] - vals[i]) / (xs[i + 1] - xs[i]);
            if s < prev - CONVEXITY_TOL {
                return Err(Error::invalid(format!(
                    "not convex: slope drops from {prev} to {s} at node {i}"
                )));
            }
            prev = s;
        }
        Ok(ConvexGridFunction { xs, vals })
    }

    /// Sample a closure on the given grid.
    pub fn sample(xs: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let vals = xs.iter().map(|&x| f(x)).collect();
        ConvexGridFunction::new(xs, vals)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    /// Never empty: construction requires at least two nodes.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Linear interpolation; exact at nodes; errors outside the domain.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::invalid(format!(
                "x = {x} outside grid domain [{lo}, {hi}]"
            )));
        }
        // index of the first node > x, so the segment is [i-1, i]
        let i = self.xs.partition_point(|&g| g <= x);
        if i == 0 {
            return Ok(self.vals[0]);
        }
        if i == self.xs.len() {
            return Ok(*self.vals.last().unwrap());
        }
        if self.xs[i - 1] == x {
            return Ok(self.vals[i - 1]);
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let t = (x - x0) / (x1 - x0);
        Ok(self.vals[i - 1] * (1.0 - t) + self.vals[i] * t)
    }

    /// Chord slopes between consecutive nodes.
    pub fn slopes(&self) -> Vec<f64> {
        self.xs
            .windows(2)
            .zip(self.vals.windows(2))
            .map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0]))
            .collect()
    }

    /// Smallest and largest attained chord slope.
    pub fn slope_range(&self) -> (f64, f64) {
        let n = self.xs.len();
        let first = (self.vals[1] - self.vals[0]) / (self.xs[1] - self.xs[0]);
        let last =
            (self.vals[n - 1] - self.vals[n - 2]) / (self.xs[n - 1] - self.xs[n - 2]);
        (first, last)
    }
}

/// Conjugate values on a requested slope grid, with per-point edge flags.
/// A flagged point attained its maximum at a grid boundary, so the true
/// supremum over the real line may be larger there.
#[derive(Debug, Clone, Serialize)]
pub struct LegendreTransform {
    pub g: ConvexGridFunction,
    pub edge_attained: Vec<bool>,
}

/// Monotone-argmax sweep for `g(x) = max_y (x y - f(y))` over the grid of
/// `f`, evaluated at each `x` in `xs_out` (strictly increasing).
pub fn legendre_transform(f: &ConvexGridFunction, xs_out: &[f64]) -> Result<LegendreTransform> {
    if xs_out.len() < 2 || xs_out.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "conjugate needs a strictly increasing output grid with >= 2 points",
        ));
    }
    let ys = f.xs();
    let fv = f.vals();
    let n = ys.len();
    let mut j = 0usize;
    let mut g = Vec::with_capacity(xs_out.len());
    let mut edge = Vec::with_capacity(xs_out.len());
    for &x in xs_out {
        // advance while the next node strictly improves; ties keep the
        // smallest y, and the smallest argmax is nondecreasing in x
        while j + 1 < n && x * ys[j + 1] - fv[j + 1] > x * ys[j] - fv[j] {
            j += 1;
        }
        g.push(x * ys[j] - fv[j]);
        edge.push(j == 0 || j == n - 1);
    }
    Ok(LegendreTransform {
        g: ConvexGridFunction::new(xs_out.to_vec(), g)?,
        edge_attained: edge,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BiconjugateReport {
    /// `max_i (f(x_i) - f**(x_i))`; nonnegative and within grid resolution.
    pub defect: f64,
    /// Most negative pointwise difference, a floating-point sanity bound.
    pub min_difference: f64,
    pub slope_nodes: usize,
}

/// Conjugate twice and measure `max (f - f**)` at the nodes. The slope grid
/// for the inner conjugate is the set of attained chord slopes, which makes
/// `f**` exact at nodes for a convex input up to rounding.
pub fn biconjugate_check(f: &ConvexGridFunction) -> Result<BiconjugateReport> {
    // slope plateaus collapse to one conjugate node
    let mut uniq: Vec<f64> = Vec::new();
    for s in f.slopes() {
        if uniq.last().map(|&p| s > p).unwrap_or(true) {
            uniq.push(s);
        }
    }
    if uniq.len() < 2 {
        // affine input: a single slope; duplicate with a tiny offset is not
        // meaningful, evaluate the conjugate pointwise instead
        let s = uniq.first().copied().unwrap_or(0.0);
        let ys = f.xs();
        let fv = f.vals();
        let star = ys
            .iter()
            .zip(fv)
            .map(|(&y, &v)| s * y - v)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut defect = f64::NEG_INFINITY;
        let mut min_diff = f64::INFINITY;
        for (&x, &v) in ys.iter().zip(fv) {
            let back = x * s - star;
            defect = defect.max(v - back);
            min_diff = min_diff.min(v - back);
        }
        return Ok(BiconjugateReport {
            defect,
            min_difference: min_diff,
            slope_nodes: 1,
        });
    }
    let star = legendre_transform(f, &uniq)?;
    let back = legendre_transform(&star.g, f.xs())?;
    let mut defect = f64::NEG_INFINITY;
    let mut min_diff = f64::INFINITY;
    for (&v, &b) in f.vals().iter().zip(back.g.vals()) {
        defect = defect.max(v - b);
        min_diff = min_diff.min(v - b);
    }
    Ok(BiconjugateReport {
        defect,
        min_difference: min_diff,
        slope_nodes: uniq.len(),
    })
}

// ---------------------------------------------------------------------------
// psi
// ---------------------------------------------------------------------------

/// Wire form `{"form":"power","alpha":2.0,"Y":100,"step":0.001}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PsiConfig {
    pub form: PsiForm,
    pub alpha: f64,
    #[serde(rename = "Y", default = "default_y")]
    pub y_max: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_y() -> f64 {
    100.0
}

fn default_step() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PsiForm {
    Power,
}

impl Default for PsiConfig {
    fn default() -> Self {
        PsiConfig {
            form: PsiForm::Power,
            alpha: 2.0,
            y_max: default_y(),
            step: default_step(),
        }
    }
}

impl PsiConfig {
    /// Sample `|y|^alpha / alpha` on the symmetric grid.
    pub fn build_grid(&self) -> Result<ConvexGridFunction> {
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return Err(Error::invalid("psi power form needs alpha > 1"));
        }
        let half = (self.y_max / self.step).round() as i64;
        let xs = crate::grid::symmetric_step_grid(half, self.step)?;
        let a = self.alpha;
        let vals = xs
            .iter()
            .map(|&y| {
                if a == 2.0 {
                    0.5 * y * y
                } else {
                    y.abs().powf(a) / a
                }
            })
            .collect();
        ConvexGridFunction::new(xs, vals)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiReport {
    pub alpha: f64,
    /// Fitted smallest Hoelder-type constant over the pair grid.
    pub a_psi: f64,
    pub witness: (f64, f64),
    /// Per-scale maxima of the constant; stabilization across scales is the
    /// finite evidence that the constant does not escape with |x|.
    pub scale_maxima: Vec<(f64, f64)>,
    pub cond1_stabilized: bool,
    /// `psi(x)/|x|` must be nondecreasing outward and exceed the threshold
    /// at the grid edge (superlinearity proxy).
    pub superlinear_edge_value: f64,
    pub superlinear_threshold: f64,
    pub superlinear_monotone: bool,
    pub superlinear_ok: bool,
    pub passed: bool,
}

/// Fit the growth-regularity constant of psi and probe superlinearity.
pub fn validate_psi(
    psi: &ConvexGridFunction,
    alpha: f64,
    subsample: usize,
    superlinear_threshold: f64,
) -> Result<PsiReport> {
    if !(alpha > 1.0) {
        return Err(Error::invalid("alpha must exceed 1"));
    }
    if subsample < 8 {
        return Err(Error::invalid("pair-grid subsample must be >= 8"));
    }
    let xs = psi.xs();
    let vals = psi.vals();
    let n = xs.len();

    let ratio = |i: usize, j: usize| -> f64 {
        let num = (vals[i] - vals[j]).abs();
        let den = (1.0 + xs[i].abs() + xs[j].abs()).powf(alpha - 1.0) * (xs[i] - xs[j]).abs();
        num / den
    };

    let stride = (n / subsample).max(1);
    let mut picks: Vec<usize> = (0..n).step_by(stride).collect();
    if *picks.last().unwrap() != n - 1 {
        picks.push(n - 1);
    }

    let mut a_psi = 0.0f64;
    let mut witness = (xs[0], xs[1]);
    let mut by_scale: Vec<(f64, f64)> = Vec::new(); // (scale bucket hi, max ratio)
    let note = |r: f64, i: usize, j: usize, a_psi: &mut f64, witness: &mut (f64, f64)| {
        if r > *a_psi {
            *a_psi = r;
            *witness = (xs[i], xs[j]);
        }
    };
    let bucket_note = |scale: f64, r: f64, by_scale: &mut Vec<(f64, f64)>| {
        let b = (1.0 + scale).log10().floor();
        let hi = 10f64.powf(b + 1.0);
        match by_scale.iter_mut().find(|(s, _)| *s == hi) {
            Some(entry) => entry.1 = entry.1.max(r),
            None => by_scale.push((hi, r)),
        }
    };
    for (a_idx, &i) in picks.iter().enumerate() {
        for &j in picks.iter().skip(a_idx + 1) {
            let r = ratio(i, j);
            note(r, i, j, &mut a_psi, &mut witness);
            bucket_note(xs[i].abs() + xs[j].abs(), r, &mut by_scale);
        }
    }
    // adjacent pairs at full resolution cover the near-diagonal supremum
    for i in 0..n - 1 {
        let r = ratio(i, i + 1);
        note(r, i, i + 1, &mut a_psi, &mut witness);
        bucket_note(xs[i].abs() + xs[i + 1].abs(), r, &mut by_scale);
    }
    by_scale.sort_by(|a, b| a.0.total_cmp(&b.0));
    let cond1_stabilized = if by_scale.len() < 2 {
        true
    } else {
        let last = by_scale[by_scale.len() - 1].1;
        let prev = by_scale[by_scale.len() - 2].1;
        last <= prev * 1.25 + 1e-12
    };

    // superlinearity: psi(x)/|x| nondecreasing outward on |x| >= 1
    let mut monotone = true;
    let mut edge = f64::INFINITY;
    for side in [false, true] {
        let mut prev = f64::NEG_INFINITY;
        let idx: Vec<usize> = if side {
            (0..n).filter(|&i| xs[i] >= 1.0).collect()
        } else {
            (0..n).rev().filter(|&i| xs[i] <= -1.0).collect()
        };
        let mut last = f64::NEG_INFINITY;
        for &i in &idx {
            let q = vals[i] / xs[i].abs();
            if q < prev - 1e-9 {
                monotone = false;
            }
            prev = q;
            last = q;
        }
        if last.is_finite() {
            edge = edge.min(last);
        }
    }
    let superlinear_ok = monotone && edge >= superlinear_threshold;
    Ok(PsiReport {
        alpha,
        a_psi,
        witness,
        scale_maxima: by_scale,
        cond1_stabilized,
        superlinear_edge_value: edge,
        superlinear_threshold,
        superlinear_monotone: monotone,
        superlinear_ok,
        passed: cond1_stabilized && superlinear_ok,
    })
}

/// `ln theta_m(x) = phi(x) - m ln(1+|x|)`; errors when x is outside phi's
/// grid.
pub fn ln_theta_m(phi: &ConvexGridFunction, m: u32, x: f64) -> Result<f64> {
    Ok(phi.eval(x)? - m as f64 * x.abs().ln_1p())
}

/// `theta_m` as `(log value, linear value)`.
pub fn theta_m(phi: &ConvexGridFunction, m: u32, x: f64) -> Result<(f64, f64)> {
    let l = ln_theta_m(phi, m, x)?;
    Ok((l, l.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid;

    fn quad_grid(y: f64, step: f64) -> ConvexGridFunction {
        let half = (y / step).round() as i64;
        let xs = grid::symmetric_step_grid(half, step).unwrap();
        ConvexGridFunction::sample(xs, |v| 0.5 * v * v).unwrap()
    }

    #[test]
    fn constructor_rejects_nonconvex() {
        assert!(ConvexGridFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.5]).is_err());
        assert!(ConvexGridFunction::new(vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]).is_err());
        assert!(ConvexGridFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.4, 1.0]).is_ok());
    }

    #[test]
    fn eval_is_exact_at_nodes_and_linear_between() {
        let f = ConvexGridFunction::new(vec![0.0, 1.0, 3.0], vec![1.0, 1.0, 5.0]).unwrap();
        assert_eq!(f.eval(1.0).unwrap(), 1.0);
        assert!((f.eval(2.0).unwrap() - 3.0).abs() < 1e-15);
        assert!(f.eval(3.5).is_err());
    }

    #[test]
    fn quadratic_conjugate_values() {
        let f = quad_grid(10.0, 1e-3);
        let t = legendre_transform(&f, &[-1.0, 0.0, 1.0, 2.5]).unwrap();
        let g = t.g.vals();
        assert!((g[1] - 0.0).abs() <= 1e-12); // g(0) = 0
        assert!((g[2] - 0.5).abs() <= 1e-9); // self-conjugate pair
        assert!((g[3] - 3.125).abs() <= 1e-9);
        assert!(t.edge_attained.iter().all(|&e| !e));
    }

    #[test]
    fn cubic_conjugate_matches_dual_power() {
        // f = |y|^3/3 has conjugate |x|^{3/2}/(3/2)
        let half = (10.0f64 / 1e-3).round() as i64;
        let xs = grid::symmetric_step_grid(half, 1e-3).unwrap();
        let f = ConvexGridFunction::sample(xs, |y: f64| y.abs().powi(3) / 3.0).unwrap();
        let t = legendre_transform(&f, &[3.0, 4.0]).unwrap();
        let expect = 2.0 / 3.0 * 8.0;
        assert!(
            (t.g.vals()[1] - expect).abs() < 1e-5,
            "got {} want {}",
            t.g.vals()[1],
            expect
        );
    }

    #[test]
    fn edge_attainment_is_flagged_beyond_slope_range() {
        let f = quad_grid(1.0, 1e-2); // slopes within (-1, 1)
        let t = legendre_transform(&f, &[0.0, 5.0]).unwrap();
        assert!(!t.edge_attained[0]);
        assert!(t.edge_attained[1]);
    }

    #[test]
    fn biconjugate_defect_small_for_quadratic() {
        let f = quad_grid(5.0, 1e-3);
        let r = biconjugate_check(&f).unwrap();
        assert!(r.defect >= 0.0, "defect = {}", r.defect);
        assert!(r.defect <= 1e-6);
        assert!(r.min_difference >= -1e-9);
    }

    #[test]
    fn biconjugate_exact_for_affine_and_abs() {
        let xs: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let f = ConvexGridFunction::sample(xs, |x| 0.5 * x - 2.0).unwrap();
        let r = biconjugate_check(&f).unwrap();
        assert_eq!(r.defect, 0.0);
        assert_eq!(r.slope_nodes, 1);

        let xs: Vec<f64> = (-5..=5).map(|i| i as f64).collect();
        let f = ConvexGridFunction::sample(xs, |x: f64| x.abs()).unwrap();
        let r = biconjugate_check(&f).unwrap();
        assert_eq!(r.defect, 0.0);
    }

    #[test]
    fn psi_quadratic_constant_below_one() {
        let psi = quad_grid(100.0, 1e-2);
        let r = validate_psi(&psi, 2.0, 128, 10.0).unwrap();
        assert!(r.passed);
        assert!(r.a_psi <= 1.0, "a_psi = {}", r.a_psi);
        assert!(r.a_psi >= 0.4); // sup is 1/2 in the limit
        assert!(r.superlinear_edge_value >= 10.0);
    }

    #[test]
    fn psi_linear_fails_superlinearity() {
        let half = 10_000i64;
        let xs = grid::symmetric_step_grid(half, 1e-2).unwrap();
        let psi = ConvexGridFunction::sample(xs, |y: f64| y.abs()).unwrap();
        let r = validate_psi(&psi, 2.0, 128, 10.0).unwrap();
        assert!(!r.superlinear_ok);
        assert!(!r.passed);
        assert!(r.cond1_stabilized); // |y| is Lipschitz, condition 1 is fine
    }

    #[test]
    fn psi_cubic_passes_with_alpha_three() {
        let half = 20_000i64;
        let xs = grid::symmetric_step_grid(half, 5e-3).unwrap();
        let psi = ConvexGridFunction::sample(xs, |y: f64| y.abs().powi(3) / 3.0).unwrap();
        let r = validate_psi(&psi, 3.0, 128, 10.0).unwrap();
        assert!(r.passed, "a_psi = {}, cond1 = {}", r.a_psi, r.cond1_stabilized);
    }

    #[test]
    fn psi_quartic_with_declared_alpha_two_is_flagged() {
        let half = 10_000i64;
        let xs = grid::symmetric_step_grid(half, 1e-2).unwrap();
        let psi = ConvexGridFunction::sample(xs, |y: f64| y.powi(4) / 4.0).unwrap();
        let r = validate_psi(&psi, 2.0, 128, 10.0).unwrap();
        assert!(!r.cond1_stabilized);
        assert!(!r.passed);
    }

    #[test]
    fn theta_values_from_quadratic_phi() {
        let psi = quad_grid(100.0, 1e-3);
        let xs_out = grid::symmetric_step_grid(50_000, 1e-3).unwrap();
        let phi = legendre_transform(&psi, &xs_out).unwrap().g;
        // theta_m(0) = 1 for every m
        for m in [0u32, 1, 5] {
            let (_, v) = theta_m(&phi, m, 0.0).unwrap();
            assert!((v - 1.0).abs() <= 1e-12);
        }
        let (_, v) = theta_m(&phi, 1, 1.0).unwrap();
        assert!((v - (0.5f64 - 2f64.ln()).exp()).abs() < 1e-9);
        let (_, v) = theta_m(&phi, 0, 2.0).unwrap();
        assert!((v - std::f64::consts::E.powi(2)).abs() < 1e-8);
        assert!(ln_theta_m(&phi, 1, 100.0).is_err());
    }
}
