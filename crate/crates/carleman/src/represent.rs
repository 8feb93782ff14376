//! Weighted least-squares fitting of nonharmonic exponential sums with
//! frequencies taken from a zero set, and the weighted-seminorm residual
//! calculus around it.
//!
//! The series coefficients of the representation theory have no
//! constructive algorithm, so the harness solves a ridge-regularized
//! weighted least-squares problem on a finite window and reports
//! convergence trends. Real even/odd structure is kept explicit: the
//! design uses `cos(mu x)` and `sin(mu x)` columns per radius and the
//! complex coefficients of the pair `+-mu` are assembled as
//! `(a -+ i b)/2`, conjugate-symmetric by construction for real targets.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::conjugates::ConvexGridFunction;
use crate::entire::ZeroSet;
use crate::grid;
use crate::weights::{EpsRule, KWeight};
use crate::{Error, Result};

/// Fit target with analytic derivative oracles for the built-ins.
#[derive(Debug, Clone)]
pub enum Target {
    /// `exp(-a x^2)`
    Gaussian { a: f64 },
    /// `cos(omega x)`
    Cos { omega: f64 },
    /// Sampled values with linear interpolation; value oracle only.
    Table { xs: Vec<f64>, vals: Vec<f64> },
}

impl Target {
    pub fn value(&self, x: f64) -> Result<f64> {
        match self {
            Target::Gaussian { a } => Ok((-a * x * x).exp()),
            Target::Cos { omega } => Ok((omega * x).cos()),
            Target::Table { xs, vals } => {
                if xs.len() != vals.len() || xs.len() < 2 {
                    return Err(Error::invalid("table target needs >= 2 samples"));
                }
                let lo = xs[0];
                let hi = *xs.last().unwrap();
                if !(x >= lo && x <= hi) {
                    return Err(Error::invalid(format!(
                        "x = {x} outside table domain [{lo}, {hi}]"
                    )));
                }
                let i = xs.partition_point(|&g| g <= x);
                if i == 0 {
                    return Ok(vals[0]);
                }
                if i == xs.len() {
                    return Ok(*vals.last().unwrap());
                }
                if xs[i - 1] == x {
                    return Ok(vals[i - 1]);
                }
                let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                Ok(vals[i - 1] * (1.0 - t) + vals[i] * t)
            }
        }
    }

    /// k-th derivative; exact closed forms for the built-ins, rejected for
    /// tables beyond k = 0.
    pub fn derivative(&self, k: usize, x: f64) -> Result<f64> {
        if k == 0 {
            return self.value(x);
        }
        match self {
            Target::Gaussian { a } => {
                // d^k/dx^k e^{-a x^2} = a^{k/2} (-1)^k H_k(sqrt(a) x) e^{-a x^2}
                // via the physicists' Hermite recurrence
                let u = a.sqrt() * x;
                let mut h_prev = 1.0f64; // H_0
                let mut h = 2.0 * u; // H_1
                if k == 1 {
                    h_prev = h;
                }
                for n in 1..k {
                    let next = 2.0 * u * h - 2.0 * n as f64 * h_prev;
                    h_prev = h;
                    h = next;
                    if n + 1 == k {
                        h_prev = h;
                    }
                }
                let hk = if k == 0 { 1.0 } else { h_prev };
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                Ok(sign * a.sqrt().powi(k as i32) * hk * (-a * x * x).exp())
            }
            Target::Cos { omega } => {
                Ok(omega.powi(k as i32)
                    * (omega * x + k as f64 * std::f64::consts::FRAC_PI_2).cos())
            }
            Target::Table { .. } => Err(Error::invalid(
                "table targets carry no derivative oracle beyond k = 0",
            )),
        }
    }

    pub fn max_order(&self) -> usize {
        match self {
            Target::Table { .. } => 0,
            _ => usize::MAX,
        }
    }
}

/// Sample weight used in the fit objective.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum WeightRule {
    /// `1/theta_m(x)`, aligning the objective with the m-th seminorm's
    /// k = 0 term.
    InvTheta { m: u32 },
    Uniform,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitConfig {
    pub x_max: f64,
    pub samples: usize,
    /// Ridge factor relative to the largest squared column norm.
    pub ridge_rel: f64,
    pub weight: WeightRule,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            x_max: 5.0,
            samples: 2001,
            ridge_rel: 1e-12,
            weight: WeightRule::InvTheta { m: 1 },
        }
    }
}

/// The uniform sample grid used by the fit for a given config.
pub fn fit_sample_grid(cfg: &FitConfig) -> Result<Vec<f64>> {
    grid::linear_spaced(-cfg.x_max, cfg.x_max, cfg.samples)
}

/// Fitted exponential sum over the frequency pairs `+- mu_1..mu_J`.
#[derive(Debug, Clone, Serialize)]
pub struct DirichletModel {
    /// Radii backing the frequency pairs, ascending.
    radii: Vec<f64>,
    /// `cos` coefficient per radius.
    a: Vec<f64>,
    /// `sin` coefficient per radius.
    b: Vec<f64>,
    pub weighted_residual_sup: f64,
    /// Root-mean-square weighted residual, the actual least-squares
    /// objective; monotone under frequency-set inclusion by construction.
    pub weighted_residual_l2: f64,
    pub condition_estimate: f64,
    pub ridge: f64,
    pub x_max: f64,
    pub samples: usize,
}

impl DirichletModel {
    /// Frequencies in ascending order `-mu_J .. -mu_1, mu_1 .. mu_J`.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut nu: Vec<f64> = self.radii.iter().rev().map(|&m| -m).collect();
        nu.extend(self.radii.iter().copied());
        nu
    }

    /// Complex coefficients aligned with `frequencies()`. Matching
    /// `a cos(mu x) + b sin(mu x) = c+ e^{-i mu x} + c- e^{i mu x}` gives
    /// `c+ = (a + i b)/2` and `c- = (a - i b)/2`, conjugate pairs whenever
    /// the fit is real.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let mut c: Vec<Complex64> = self
            .radii
            .iter()
            .enumerate()
            .rev()
            .map(|(j, _)| Complex64::new(self.a[j] / 2.0, -self.b[j] / 2.0))
            .collect();
        c.extend(
            self.radii
                .iter()
                .enumerate()
                .map(|(j, _)| Complex64::new(self.a[j] / 2.0, self.b[j] / 2.0)),
        );
        c
    }

    pub fn len_pairs(&self) -> usize {
        self.radii.len()
    }

    pub fn value_at(&self, x: f64) -> f64 {
        let mut s = 0.0;
        for (j, &mu) in self.radii.iter().enumerate() {
            s += self.a[j] * (mu * x).cos() + self.b[j] * (mu * x).sin();
        }
        s
    }

    /// Exact k-th derivative of the fitted sum.
    pub fn derivative_at(&self, k: usize, x: f64) -> f64 {
        let phase = k as f64 * std::f64::consts::FRAC_PI_2;
        let mut s = 0.0;
        for (j, &mu) in self.radii.iter().enumerate() {
            let p = mu.powi(k as i32);
            s += p * (self.a[j] * (mu * x + phase).cos() + self.b[j] * (mu * x + phase).sin());
        }
        s
    }
}

/// Weighted ridge least squares for the coefficients over the first J
/// radii of the zero set, solved by SVD (deterministic, single pass).
pub fn fit_dirichlet(
    target: &Target,
    zs: &ZeroSet,
    j: usize,
    phi: &ConvexGridFunction,
    cfg: &FitConfig,
) -> Result<DirichletModel> {
    if j < 1 || j > zs.len() {
        return Err(Error::invalid(format!(
            "need 1 <= J <= {} frequencies, got {j}",
            zs.len()
        )));
    }
    if cfg.samples < 8 * j + 4 {
        return Err(Error::invalid(format!(
            "sample count {} too small for 2J = {} frequency columns (need >= 4x)",
            cfg.samples,
            2 * j
        )));
    }
    if !(cfg.x_max > 0.0) {
        return Err(Error::invalid("x_max must be positive"));
    }
    let radii = zs.radii()[..j].to_vec();
    let xs = fit_sample_grid(cfg)?;
    let n = xs.len();
    let weight_at = |x: f64| -> Result<f64> {
        match cfg.weight {
            WeightRule::Uniform => Ok(1.0),
            WeightRule::InvTheta { m } => {
                Ok((-crate::conjugates::ln_theta_m(phi, m, x)?).exp())
            }
        }
    };
    let mut w = Vec::with_capacity(n);
    for &x in &xs {
        w.push(weight_at(x)?);
    }

    // Columns are normalized by the dominating weight k(nu_j) on the real
    // axis, i.e. the unknowns are c~_j = c_j k(nu_j). The ridge then
    // penalizes exactly the measure-mass proxy |c_j| k(nu_j), which is the
    // quantity the coefficient bound controls, and out-of-band frequencies
    // cannot pick up solver noise amplified by exp(w).
    let scale: Vec<f64> = zs.ln_majorant()[..j].iter().map(|&l| (-l).exp()).collect();
    let cols = 2 * j;
    let mut design = DMatrix::<f64>::zeros(n + cols, cols);
    let mut rhs = DVector::<f64>::zeros(n + cols);
    for (i, &x) in xs.iter().enumerate() {
        for (jj, &mu) in radii.iter().enumerate() {
            design[(i, jj)] = w[i] * (mu * x).cos() * scale[jj];
            design[(i, j + jj)] = w[i] * (mu * x).sin() * scale[jj];
        }
        rhs[i] = w[i] * target.value(x)?;
    }
    let mut max_col_sq = 0.0f64;
    for c in 0..cols {
        let mut s = 0.0;
        for i in 0..n {
            s += design[(i, c)] * design[(i, c)];
        }
        max_col_sq = max_col_sq.max(s);
    }
    let ridge = cfg.ridge_rel * max_col_sq;
    let sqrt_ridge = ridge.sqrt();
    for c in 0..cols {
        design[(n + c, c)] = sqrt_ridge;
    }

    let svd = design.svd(true, true);
    let sv = &svd.singular_values;
    let (mut s_max, mut s_min) = (0.0f64, f64::INFINITY);
    for &s in sv.iter() {
        s_max = s_max.max(s);
        s_min = s_min.min(s);
    }
    let cond = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::invalid(format!("svd solve failed: {e}")))?;

    let a: Vec<f64> = (0..j).map(|jj| sol[jj] * scale[jj]).collect();
    let b: Vec<f64> = (0..j).map(|jj| sol[j + jj] * scale[jj]).collect();
    let model = DirichletModel {
        radii,
        a,
        b,
        weighted_residual_sup: 0.0,
        weighted_residual_l2: 0.0,
        condition_estimate: cond,
        ridge,
        x_max: cfg.x_max,
        samples: cfg.samples,
    };
    let mut sup = 0.0f64;
    let mut sq = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let r = (target.value(x)? - model.value_at(x)).abs() * w[i];
        sup = sup.max(r);
        sq += r * r;
    }
    Ok(DirichletModel {
        weighted_residual_sup: sup,
        weighted_residual_l2: (sq / n as f64).sqrt(),
        ..model
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SeminormReport {
    pub m: u32,
    pub k_max: usize,
    pub value: f64,
    pub arg_x: f64,
    pub arg_k: usize,
}

/// Truncated weighted seminorm of the fit residual:
/// `sup_{x, k <= k_max} |r^(k)(x)| / ((sigma + eps_m)^k M_k theta_m(x))`.
#[allow(clippy::too_many_arguments)]
pub fn residual_seminorm(
    model: &DirichletModel,
    target: &Target,
    ln_m: &[f64],
    phi: &ConvexGridFunction,
    sigma: f64,
    eps_rule: EpsRule,
    m: u32,
    k_max: usize,
    x_grid: &[f64],
) -> Result<SeminormReport> {
    if k_max > target.max_order() {
        return Err(Error::invalid(
            "target carries no derivative oracle up to the requested order",
        ));
    }
    if k_max >= ln_m.len() {
        return Err(Error::invalid("k_max exceeds the sequence table"));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma must be positive"));
    }
    let eps = eps_rule.eps(m)?;
    let ln_scale = (sigma + eps).ln();
    let mut best = 0.0f64;
    let (mut arg_x, mut arg_k) = (x_grid.first().copied().unwrap_or(0.0), 0usize);
    for &x in x_grid {
        let ln_theta = crate::conjugates::ln_theta_m(phi, m, x)?;
        for k in 0..=k_max {
            let r = target.derivative(k, x)? - model.derivative_at(k, x);
            let ln_den = k as f64 * ln_scale + ln_m[k] + ln_theta;
            let v = r.abs() * (-ln_den).exp();
            if v > best {
                best = v;
                arg_x = x;
                arg_k = k;
            }
        }
    }
    Ok(SeminormReport {
        m,
        k_max,
        value: best,
        arg_x,
        arg_k,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpSeminormRow {
    pub z_re: f64,
    pub z_im: f64,
    /// `ln p_m(exp(-izx))` truncated to the grids.
    pub ln_p: f64,
    /// `ln p_m - psi(Im z) - w_{m+1}(|z|)`.
    pub ln_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpSeminormReport {
    pub m: u32,
    /// Fitted constant: sup of the ratio over the z grid.
    pub k_m: f64,
    pub ln_k_m: f64,
    pub maximizer_abs_z: f64,
    /// Running max of the ratio settled in the bulk of the |z| range.
    pub stabilized: bool,
    pub rows: Vec<ExpSeminormRow>,
}

/// Check the exponential-seminorm bound
/// `p_m(exp(-izx)) <= K_m exp(psi(Im z) + w_{m+1}(|z|))` on a z grid.
///
/// The truncated seminorm separates exactly:
/// `ln p_m = max_k [k ln(|z|/(sigma+eps_m)) - ln M_k]
///         + max_x [x Im z - phi(x) + m ln(1+|x|)]`,
/// the first part being `w_m(|z|)` and the second `psi(Im z)` plus the
/// polynomial excess that the step from `w_m` to `w_{m+1}` absorbs; with
/// `w_m` on the right instead the ratio keeps growing and the scan reports
/// it as not stabilized.
#[allow(clippy::too_many_arguments)]
pub fn exp_seminorm_check(
    ln_m: &[f64],
    phi: &ConvexGridFunction,
    psi: &ConvexGridFunction,
    wf: &crate::weights::WeightFunction,
    sigma: f64,
    eps_rule: EpsRule,
    m: u32,
    bump: u32,
    r_grid: &[f64],
) -> Result<ExpSeminormReport> {
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma must be positive"));
    }
    if r_grid.len() < 8 {
        return Err(Error::invalid("z grid needs >= 8 radii"));
    }
    let eps_m = eps_rule.eps(m)?;
    let eps_right = eps_rule.eps(m + bump)?;
    let ln_scale = (sigma + eps_m).ln();
    let xs = phi.xs();
    let angles = [0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2];
    let mut rows = Vec::new();
    let mut args = Vec::new();
    let mut ratios = Vec::new();
    for &r in r_grid {
        let mut worst_at_r = f64::NEG_INFINITY;
        let mut worst_row = None;
        for &theta in &angles {
            let z = Complex64::from_polar(r, theta);
            // k part: max_k [k(ln r - ln(sigma+eps_m)) - ln M_k] = w_m(r)
            let t = r.ln() - ln_scale;
            let mut k_part = f64::NEG_INFINITY;
            for (k, &lm) in ln_m.iter().enumerate() {
                k_part = k_part.max(k as f64 * t - lm);
            }
            // x part: max_x [x Im z - phi(x) + m ln(1+|x|)] over phi's grid
            let mut x_part = f64::NEG_INFINITY;
            let mut arg_x = 0usize;
            for (i, &x) in xs.iter().enumerate() {
                let v = x * z.im - phi.vals()[i] + m as f64 * x.abs().ln_1p();
                if v > x_part {
                    x_part = v;
                    arg_x = i;
                }
            }
            if arg_x == 0 || arg_x + 1 == xs.len() {
                return Err(Error::invalid(format!(
                    "x-part supremum hit the phi grid edge at Im z = {}; enlarge the grid",
                    z.im
                )));
            }
            let ln_p = k_part + x_part; // k = 0 term already makes k_part >= 0
            let right =
                psi.eval(z.im)? + wf.eval(r / (sigma + eps_right))?.value;
            let ln_ratio = ln_p - right;
            if ln_ratio > worst_at_r {
                worst_at_r = ln_ratio;
                worst_row = Some(ExpSeminormRow {
                    z_re: z.re,
                    z_im: z.im,
                    ln_p,
                    ln_ratio,
                });
            }
        }
        rows.push(worst_row.unwrap());
        args.push(r);
        ratios.push(worst_at_r);
    }
    let scan = grid::sup_with_stabilization(&args, &ratios)?;
    Ok(ExpSeminormReport {
        m,
        k_m: scan.value.exp(),
        ln_k_m: scan.value,
        maximizer_abs_z: scan.arg,
        stabilized: scan.stabilized,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoeffDecayRow {
    pub nu: f64,
    pub abs_c: f64,
    /// `|c| * k(nu)` with `ln k(nu) = psi(0) + w(|nu|/sigma)` on the real
    /// axis.
    pub bound_product: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoeffDecayReport {
    pub c_lambda_proxy: f64,
    pub rows: Vec<CoeffDecayRow>,
}

/// Per-frequency products `|c_j| k(nu_j)` and their maximum, the proxy for
/// the measure-mass constant dominating the coefficients.
pub fn coeff_decay_check(model: &DirichletModel, kw: &KWeight) -> Result<CoeffDecayReport> {
    let nus = model.frequencies();
    let cs = model.coefficients();
    let mut rows = Vec::with_capacity(nus.len());
    let mut proxy = 0.0f64;
    for (&nu, c) in nus.iter().zip(&cs) {
        let ln_k = kw.ln_k_real(nu)?;
        // log-domain product: |c| can underflow to 0 while exp(ln_k)
        // overflows, and 0 * inf would poison the report
        let abs_c = c.norm();
        let product = if abs_c == 0.0 {
            0.0
        } else {
            (abs_c.ln() + ln_k).exp()
        };
        proxy = proxy.max(product);
        rows.push(CoeffDecayRow {
            nu,
            abs_c,
            bound_product: product,
        });
    }
    Ok(CoeffDecayReport {
        c_lambda_proxy: proxy,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entire::{place_zeros, ZeroMode};
    use crate::sequences::{build_sequence, SequenceSpec};
    use crate::weights::WeightFunction;

    fn setup() -> (ZeroSet, ConvexGridFunction, WeightFunction) {
        let seq = build_sequence(&SequenceSpec::mstar(1.0, 400)).unwrap();
        let wf = WeightFunction::from_sequence(&seq).unwrap();
        let zs = place_zeros(&wf, 1.0, 60, ZeroMode::SymmetricReal).unwrap();
        let psi = ConvexGridFunction::sample(
            grid::symmetric_step_grid(20_000, 1e-3).unwrap(),
            |y| 0.5 * y * y,
        )
        .unwrap();
        let phi = crate::conjugates::legendre_transform(
            &psi,
            &grid::symmetric_step_grid(10_000, 1e-3).unwrap(),
        )
        .unwrap()
        .g;
        (zs, phi, wf)
    }

    #[test]
    fn gaussian_derivatives_match_finite_differences() {
        let t = Target::Gaussian { a: 1.0 };
        let h = 1e-5;
        for k in 1..=6usize {
            for &x in &[-2.3, -0.4, 0.0, 0.7, 1.9] {
                let d = t.derivative(k, x).unwrap();
                let fd = (t.derivative(k - 1, x + h).unwrap()
                    - t.derivative(k - 1, x - h).unwrap())
                    / (2.0 * h);
                assert!(
                    (d - fd).abs() <= 1e-5 * (1.0 + fd.abs()),
                    "k = {k}, x = {x}: {d} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn cos_derivative_phases() {
        let t = Target::Cos { omega: 3.0 };
        let x = 0.37;
        assert!((t.derivative(1, x).unwrap() + 3.0 * (3.0 * x).sin()).abs() < 1e-12);
        assert!((t.derivative(2, x).unwrap() + 9.0 * (3.0 * x).cos()).abs() < 1e-12);
    }

    #[test]
    fn cos_target_is_recovered_exactly() {
        let (zs, phi, _) = setup();
        let mu1 = zs.radii()[0];
        let target = Target::Cos { omega: mu1 };
        let model =
            fit_dirichlet(&target, &zs, 1, &phi, &FitConfig::default()).unwrap();
        assert!(model.weighted_residual_sup <= 1e-10, "{}", model.weighted_residual_sup);
        let c = model.coefficients();
        assert!((c[0] - Complex64::new(0.5, 0.0)).norm() <= 1e-10);
        assert!((c[1] - Complex64::new(0.5, 0.0)).norm() <= 1e-10);
        let nus = model.frequencies();
        assert_eq!(nus.len(), 2);
        assert!((nus[0] + mu1).abs() < 1e-15 && (nus[1] - mu1).abs() < 1e-15);
    }

    #[test]
    fn zero_target_gives_zero_coefficients() {
        let (zs, phi, _) = setup();
        let xs = fit_sample_grid(&FitConfig::default()).unwrap();
        let vals = vec![0.0; xs.len()];
        let target = Target::Table { xs, vals };
        let model = fit_dirichlet(&target, &zs, 5, &phi, &FitConfig::default()).unwrap();
        for c in model.coefficients() {
            assert!(c.norm() <= 1e-12);
        }
        assert_eq!(model.weighted_residual_sup, 0.0);
    }

    #[test]
    fn finite_combinations_reconstruct() {
        let (zs, phi, _) = setup();
        let cfg = FitConfig::default();
        let xs = fit_sample_grid(&cfg).unwrap();
        let mus: Vec<f64> = zs.radii()[..5].to_vec();
        let vals: Vec<f64> = xs
            .iter()
            .map(|&x| {
                0.8 * (mus[0] * x).cos() - 0.3 * (mus[2] * x).sin()
                    + 0.05 * (mus[4] * x).cos()
            })
            .collect();
        let target = Target::Table { xs, vals };
        let model = fit_dirichlet(&target, &zs, 5, &phi, &cfg).unwrap();
        assert!(
            model.weighted_residual_sup <= 1e-9,
            "residual {}",
            model.weighted_residual_sup
        );
    }

    #[test]
    fn even_targets_get_conjugate_symmetric_real_fits() {
        let (zs, phi, _) = setup();
        let target = Target::Gaussian { a: 1.0 };
        let model = fit_dirichlet(&target, &zs, 12, &phi, &FitConfig::default()).unwrap();
        let c = model.coefficients();
        let n = c.len();
        for i in 0..n / 2 {
            let diff = (c[i] - c[n - 1 - i].conj()).norm();
            assert!(diff <= 1e-12);
        }
        // fitted sum real and even on the grid
        for &x in &[0.3, 1.7, 4.2] {
            assert!((model.value_at(x) - model.value_at(-x)).abs() <= 1e-10);
        }
    }

    #[test]
    fn l2_residual_shrinks_under_frequency_inclusion() {
        // the least-squares objective is monotone under column inclusion;
        // the sup residual is only expected to trend down
        let (zs, phi, _) = setup();
        let target = Target::Gaussian { a: 1.0 };
        let cfg = FitConfig::default();
        let mut prev = f64::INFINITY;
        for j in [5usize, 10, 20, 40] {
            let model = fit_dirichlet(&target, &zs, j, &phi, &cfg).unwrap();
            assert!(
                model.weighted_residual_l2 <= prev + 1e-9,
                "J = {j}: {} > {prev}",
                model.weighted_residual_l2
            );
            prev = model.weighted_residual_l2;
        }
    }

    #[test]
    fn seminorm_of_exact_fit_is_zero() {
        let (zs, phi, _) = setup();
        let mu1 = zs.radii()[0];
        let target = Target::Cos { omega: mu1 };
        let model = fit_dirichlet(&target, &zs, 1, &phi, &FitConfig::default()).unwrap();
        let seq = build_sequence(&SequenceSpec::mstar(1.0, 400)).unwrap();
        let xg = grid::linear_spaced(-5.0, 5.0, 501).unwrap();
        let rep = residual_seminorm(
            &model,
            &target,
            seq.ln_m(),
            &phi,
            1.0,
            EpsRule::InverseM,
            1,
            6,
            &xg,
        )
        .unwrap();
        assert!(rep.value <= 1e-10, "seminorm {}", rep.value);
    }

    #[test]
    fn seminorm_k0_matches_weighted_residual() {
        let (zs, phi, _) = setup();
        let target = Target::Gaussian { a: 1.0 };
        let cfg = FitConfig::default();
        let model = fit_dirichlet(&target, &zs, 10, &phi, &cfg).unwrap();
        let seq = build_sequence(&SequenceSpec::mstar(1.0, 400)).unwrap();
        let xg = fit_sample_grid(&cfg).unwrap();
        let rep = residual_seminorm(
            &model,
            &target,
            seq.ln_m(),
            &phi,
            1.0,
            EpsRule::InverseM,
            1,
            0,
            &xg,
        )
        .unwrap();
        // k = 0 term of the m = 1 seminorm is exactly the fit's weighted
        // sup residual (M_0 = 1)
        assert!((rep.value - model.weighted_residual_sup).abs() <= 1e-12);
    }

    #[test]
    fn table_targets_reject_derivative_orders() {
        let (zs, phi, _) = setup();
        let xs = fit_sample_grid(&FitConfig::default()).unwrap();
        let vals: Vec<f64> = xs.iter().map(|&x| (-x * x).exp()).collect();
        let target = Target::Table { xs, vals };
        let model = fit_dirichlet(&target, &zs, 5, &phi, &FitConfig::default()).unwrap();
        let seq = build_sequence(&SequenceSpec::mstar(1.0, 400)).unwrap();
        let xg = grid::linear_spaced(-5.0, 5.0, 101).unwrap();
        assert!(residual_seminorm(
            &model,
            &target,
            seq.ln_m(),
            &phi,
            1.0,
            EpsRule::InverseM,
            1,
            3,
            &xg,
        )
        .is_err());
    }

    #[test]
    fn exp_seminorm_bound_needs_the_index_bump() {
        let seq = build_sequence(&SequenceSpec::mstar(1.0, 2000)).unwrap();
        let wf = WeightFunction::from_sequence(&seq).unwrap();
        let psi = ConvexGridFunction::sample(
            grid::symmetric_step_grid(40_000, 1e-2).unwrap(),
            |y| 0.5 * y * y,
        )
        .unwrap();
        let phi = crate::conjugates::legendre_transform(
            &psi,
            &grid::symmetric_step_grid(35_000, 1e-2).unwrap(),
        )
        .unwrap()
        .g;
        let rs = grid::log_spaced(0.5, 300.0, 64).unwrap();
        // against w_{m+1} the constant settles
        let rep = exp_seminorm_check(
            seq.ln_m(),
            &phi,
            &psi,
            &wf,
            1.0,
            EpsRule::InverseM,
            1,
            1,
            &rs,
        )
        .unwrap();
        assert!(rep.stabilized, "maximizer at |z| = {}", rep.maximizer_abs_z);
        assert!(rep.k_m.is_finite() && rep.k_m > 0.0);
        // against w_m itself the ratio keeps growing: the bump is needed
        let rep0 = exp_seminorm_check(
            seq.ln_m(),
            &phi,
            &psi,
            &wf,
            1.0,
            EpsRule::InverseM,
            1,
            0,
            &rs,
        )
        .unwrap();
        assert!(!rep0.stabilized);
        assert!(rep0.ln_k_m > rep.ln_k_m);
    }

    #[test]
    fn coeff_decay_single_term() {
        let (zs, phi, wf) = setup();
        let mu1 = zs.radii()[0];
        let target = Target::Cos { omega: mu1 };
        let model = fit_dirichlet(&target, &zs, 1, &phi, &FitConfig::default()).unwrap();
        let psi = ConvexGridFunction::sample(
            grid::symmetric_step_grid(1000, 0.1).unwrap(),
            |y| 0.5 * y * y,
        )
        .unwrap();
        let kw = KWeight::new(psi, wf, 1.0).unwrap();
        let rep = coeff_decay_check(&model, &kw).unwrap();
        let expect = 0.5 * kw.wf.eval(mu1).unwrap().value.exp();
        assert!((rep.c_lambda_proxy - expect).abs() <= 1e-9 * expect);
    }
}
