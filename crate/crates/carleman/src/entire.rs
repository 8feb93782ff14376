//! Canonical products over the breakpoint radii of an associated weight,
//! and the log-accuracy residual fit for the radial approximation.
//!
//! The zero moduli are always the scaled breakpoint ratios
//! `mu_k = sigma M_k / M_{k-1}`, so the zero-counting function of the set
//! equals the integer slope of `w` at `ln(r/sigma)` exactly. Two placements
//! are supported:
//!
//! * `SymmetricReal` - zeros at `+-mu_k` through the even factors
//!   `1 - z^2/mu_k^2`. The product is real on the real axis and even. Its
//!   log-modulus concentrates on `|Im z|` rather than on `|z|`: summing
//!   `ln(1 + y^2/mu_k^2) >= 2 ln(y/mu_k)` over `mu_k <= y` gives
//!   `ln|N(iy)| >= 2 w(y)`, so the *radial* residual `w - ln|N|` grows
//!   linearly on the imaginary axis. This placement is kept for the even
//!   real calculus (frequencies, symmetry) but cannot satisfy a logarithmic
//!   residual bound.
//! * `Rotating` - one zero per circle at `mu_k e^{i theta_k}` with golden
//!   rotation angles and plain factors `1 - z/zeta_k` multiplied in
//!   ascending order of k. The angular equidistribution makes the partial
//!   sums of `e^{-i theta_k}` bounded, so the angular harmonics of
//!   `ln|1 - z/zeta_k|` cancel across circles and `ln|N|` tracks the
//!   radial `w(|z|/sigma)` outside small discs around the zeros. Explicit
//!   convergence factors would reintroduce uncancelled `Re(z/zeta_k)`
//!   terms of size `|z|/mu_k` and destroy exactly this tracking.

use num_complex::Complex64;
use serde::Serialize;

use crate::grid;
use crate::weights::WeightFunction;
use crate::{Error, Result};

/// Golden-section fraction used for the rotation rule.
const GOLDEN_FRAC: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroMode {
    SymmetricReal,
    Rotating,
}

/// Ordered zero moduli with placement mode and exclusion-disc radius.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroSet {
    radii: Vec<f64>,
    /// Breakpoint radii beyond J kept for tail estimates.
    tail_radii: Vec<f64>,
    /// `w(mu_k / sigma)` per radius: the log of the dominating weight at
    /// the zero (psi vanishes on the real axis for the built-in psi).
    ln_majorant: Vec<f64>,
    pub sigma: f64,
    pub mode: ZeroMode,
    pub d: Option<f64>,
}

/// Zeros at the scaled breakpoint radii `sigma M_k/M_{k-1}`, `k = 1..=J`.
pub fn place_zeros(
    wf: &WeightFunction,
    sigma: f64,
    j: usize,
    mode: ZeroMode,
) -> Result<ZeroSet> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid("sigma must be positive"));
    }
    if j < 1 || j > wf.k_max() {
        return Err(Error::invalid(format!(
            "need 1 <= J <= K = {}, got J = {j}",
            wf.k_max()
        )));
    }
    let radii: Vec<f64> = (1..=j).map(|k| sigma * wf.breakpoint_radius(k)).collect();
    let tail_hi = (4 * j).min(wf.k_max());
    let tail_radii: Vec<f64> = (j + 1..=tail_hi)
        .map(|k| sigma * wf.breakpoint_radius(k))
        .collect();
    let ln_majorant: Vec<f64> = (1..=j)
        .map(|k| wf.eval(wf.breakpoint_radius(k)).map(|e| e.value))
        .collect::<Result<_>>()?;
    Ok(ZeroSet {
        radii,
        tail_radii,
        ln_majorant,
        sigma,
        mode,
        d: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MinGapReport {
    /// Half the smallest separation between zeros (for symmetric sets the
    /// gap `2 mu_1` across the origin competes with consecutive gaps).
    pub d_max: f64,
    pub min_gap: f64,
    /// All zero moduli distinct (simple zeros).
    pub simple: bool,
    /// With the set's exclusion radius d: the last gap index whose gap is
    /// <= 2d (discs beyond it are pairwise disjoint); None when every gap
    /// already exceeds 2d.
    pub prefix: Option<usize>,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// `ln k(nu_k)` on the real axis: `w(mu_k/sigma)` (psi(0) = 0).
    pub fn ln_majorant(&self) -> &[f64] {
        &self.ln_majorant
    }

    pub fn with_d(mut self, d: f64) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::invalid("exclusion radius d must be positive"));
        }
        self.d = Some(d);
        Ok(self)
    }

    /// k-th zero (0-based index into `radii`).
    pub fn zero(&self, k: usize) -> Complex64 {
        let mu = self.radii[k];
        match self.mode {
            ZeroMode::SymmetricReal => Complex64::new(mu, 0.0),
            ZeroMode::Rotating => {
                let theta = std::f64::consts::TAU * (((k + 1) as f64 * GOLDEN_FRAC).fract());
                Complex64::from_polar(mu, theta)
            }
        }
    }

    /// Gap analysis for exclusion discs; radius gaps lower-bound true zero
    /// separations in both modes because `||a| - |b|| <= |a - b|`.
    pub fn min_gap(&self) -> Result<MinGapReport> {
        if self.radii.len() < 2 {
            return Err(Error::invalid("gap analysis needs J >= 2"));
        }
        let mut min_gap = f64::INFINITY;
        let mut simple = true;
        for w in self.radii.windows(2) {
            let gap = w[1] - w[0];
            if gap <= 1e-12 * w[1].abs() {
                simple = false;
            }
            min_gap = min_gap.min(gap);
        }
        if self.mode == ZeroMode::SymmetricReal {
            min_gap = min_gap.min(2.0 * self.radii[0]);
        }
        let d_max = if simple { min_gap / 2.0 } else { 0.0 };
        let prefix = self.d.and_then(|d| {
            let mut last = None;
            for (i, w) in self.radii.windows(2).enumerate() {
                if w[1] - w[0] <= 2.0 * d {
                    last = Some(i + 1);
                }
            }
            last
        });
        Ok(MinGapReport {
            d_max,
            min_gap,
            simple,
            prefix,
        })
    }

    /// Upper bound on the discarded tail of `ln|N|` at radius r.
    ///
    /// Symmetric mode sums `-ln(1 - r^2/mu^2) <= r^2/(mu^2 - r^2)` over the
    /// stored extra breakpoints plus an integral continuation with the last
    /// gap. Rotating mode cannot be bounded factor by factor (the plain
    /// factors only converge through angular cancellation); there the
    /// golden-rotation partial sums `|sum e^{-i n theta_k}| <= b n` give the
    /// Abel bound `|tail| <= 2 b u / (1 - u)^2` with `u = r / mu_{J+1}`.
    /// Infinite when r reaches the stored tail.
    pub fn tail_estimate(&self, r: f64) -> f64 {
        if self.tail_radii.is_empty() {
            return f64::INFINITY;
        }
        match self.mode {
            ZeroMode::SymmetricReal => {
                let mut sum = 0.0;
                for &mu in &self.tail_radii {
                    if mu <= r * (1.0 + 1e-12) {
                        return f64::INFINITY;
                    }
                    sum += r * r / (mu * mu - r * r);
                }
                let n = self.tail_radii.len();
                let last = self.tail_radii[n - 1];
                let gap = if n >= 2 {
                    (last - self.tail_radii[n - 2]).max(1e-12)
                } else {
                    (last - self.radii[self.radii.len() - 1]).max(1e-12)
                };
                sum + (r / (2.0 * gap)) * ((last + r) / (last - r)).ln()
            }
            ZeroMode::Rotating => {
                // |sum_{k>J} ln|1 - z/zeta_k|| <= sum_n (r^n/n) |sum_k
                // e^{-i n theta_k}/mu_k^n| <= sum_n 2 b n/n * u^n * n-factor
                // with u = r/mu_{J+1}; summing n u^{n} style terms gives
                // 2 b u/(1-u)^2. b = 1.25 covers the golden continued
                // fraction bound dist(n phi, Z) >= 1/(sqrt(5) n).
                let mu1 = self.tail_radii[0];
                let u = r / mu1;
                if u >= 1.0 {
                    return f64::INFINITY;
                }
                let b = 1.25;
                2.0 * b * u / ((1.0 - u) * (1.0 - u))
            }
        }
    }

    /// Largest radius with `tail_estimate <= tol`, additionally capped at
    /// the 0.6 J-th zero modulus so the estimate rests on stored data.
    pub fn admissible_radius(&self, tol: f64) -> f64 {
        let cap_idx = ((self.radii.len() as f64 * 0.6) as usize).max(1) - 1;
        let cap = self.radii[cap_idx];
        if self.tail_estimate(cap) <= tol {
            return cap;
        }
        let mut lo = 0.0;
        let mut hi = cap;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.tail_estimate(mid) <= tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogAbsN {
    pub value: f64,
    /// Within distance d of some zero (value still reported; -inf exactly
    /// at a zero).
    pub excluded: bool,
    pub tail_estimate: f64,
}

/// Truncated log-modulus of the canonical product at z. The per-factor
/// cancellation `ln|mu - z| + ln|mu + z| - 2 ln mu` (symmetric mode) and
/// `ln|zeta - z| - ln mu + Re(z conj(zeta))/mu^2` (rotating mode) is stable
/// near the zeros.
pub fn log_abs_n(zs: &ZeroSet, z: Complex64, tail_tol: f64) -> Result<LogAbsN> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::invalid("z must be finite"));
    }
    let r = z.norm();
    let tail = zs.tail_estimate(r);
    if tail > tail_tol {
        return Err(Error::Truncation {
            ln_r: r.max(1e-300).ln(),
            t_max: zs.admissible_radius(tail_tol).max(1e-300).ln(),
        });
    }
    let d = zs.d.unwrap_or(0.0);
    let mut sum = 0.0f64;
    let mut excluded = false;
    match zs.mode {
        ZeroMode::SymmetricReal => {
            for &mu in &zs.radii {
                let dm = (z - Complex64::new(mu, 0.0)).norm();
                let dp = (z + Complex64::new(mu, 0.0)).norm();
                if dm < d || dp < d {
                    excluded = true;
                }
                sum += dm.ln() + dp.ln() - 2.0 * mu.ln();
            }
        }
        ZeroMode::Rotating => {
            // plain factors in ascending k; the golden angles make this
            // ordering of the conditional product deterministic and stable
            for k in 0..zs.radii.len() {
                let zeta = zs.zero(k);
                let mu = zs.radii[k];
                let dist = (z - zeta).norm();
                if dist < d {
                    excluded = true;
                }
                sum += dist.ln() - mu.ln();
            }
        }
    }
    if !sum.is_finite() {
        excluded = true;
    }
    Ok(LogAbsN {
        value: sum,
        excluded,
        tail_estimate: tail,
    })
}

// ---------------------------------------------------------------------------
// residual fit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ShellRow {
    pub r: f64,
    /// Max of |w(r/sigma) - ln|N|| over non-excluded angles; NaN if the
    /// whole shell is excluded.
    pub max_residual: f64,
    pub excluded: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Residual8Fit {
    /// Envelope growth rate in ln(1+|z|): secant slope of the running-max
    /// residual envelope across the outer half of the shells.
    pub a: f64,
    /// Max intercept so the bound holds at every non-excluded point.
    pub c0: f64,
    pub excluded_fraction: f64,
    /// Fraction of non-excluded points satisfying the fitted bound (1.0 by
    /// construction, recomputed as a sanity check).
    pub holds_fraction: f64,
    pub max_residual: f64,
    pub points_total: usize,
    pub points_excluded: usize,
    pub shells: Vec<ShellRow>,
}

/// Scan a polar grid, fit the smallest logarithmic envelope
/// `|w(|z|/sigma) - ln|N(z)|| <= A ln(1+|z|) + C0` over the non-excluded
/// points, and report the excluded fraction.
pub fn check_eq8(
    zs: &ZeroSet,
    wf: &WeightFunction,
    d: f64,
    r_lo: f64,
    r_hi: f64,
    n_shells: usize,
    n_angles: usize,
) -> Result<Residual8Fit> {
    if !(d > 0.0) {
        return Err(Error::invalid("exclusion radius d must be positive"));
    }
    if n_angles < 4 || n_shells < 8 {
        return Err(Error::invalid("polar grid needs >= 8 shells and >= 4 angles"));
    }
    let cap_idx = ((zs.radii.len() as f64 * 0.6) as usize).max(1) - 1;
    let cap = zs.radii[cap_idx];
    if r_hi > cap * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "r_hi = {r_hi} beyond the admissible cap {cap} (0.6 J-th zero)"
        )));
    }
    let set = zs.clone().with_d(d)?;
    let rs = grid::log_spaced(r_lo, r_hi, n_shells)?;
    let mut shells = Vec::with_capacity(rs.len());
    let mut total = 0usize;
    let mut excluded_n = 0usize;
    let mut max_res = f64::NEG_INFINITY;
    for &r in &rs {
        let w = wf.eval(r / zs.sigma)?.value;
        let mut shell_max = f64::NEG_INFINITY;
        let mut shell_excl = 0usize;
        for i in 0..n_angles {
            let theta = std::f64::consts::TAU * i as f64 / n_angles as f64;
            let z = Complex64::from_polar(r, theta);
            let ln_n = log_abs_n(&set, z, f64::INFINITY)?;
            total += 1;
            if ln_n.excluded {
                excluded_n += 1;
                shell_excl += 1;
                continue;
            }
            shell_max = shell_max.max((w - ln_n.value).abs());
        }
        // a fully excluded shell carries no residual
        let shell_max = if shell_excl == n_angles { f64::NAN } else { shell_max };
        if shell_max.is_finite() {
            max_res = max_res.max(shell_max);
        }
        shells.push(ShellRow {
            r,
            max_residual: shell_max,
            excluded: shell_excl,
        });
    }

    // envelope fit in L = ln(1+r)
    let usable: Vec<(f64, f64)> = shells
        .iter()
        .filter(|s| s.max_residual.is_finite())
        .map(|s| ((1.0 + s.r).ln(), s.max_residual))
        .collect();
    if usable.len() < 4 {
        return Err(Error::invalid("too few non-excluded shells to fit"));
    }
    let mut env = Vec::with_capacity(usable.len());
    let mut run = f64::NEG_INFINITY;
    for &(l, v) in &usable {
        run = run.max(v);
        env.push((l, run));
    }
    let l_end = env[env.len() - 1].0;
    let mid_idx = env
        .iter()
        .position(|&(l, _)| l >= l_end / 2.0)
        .unwrap_or(0)
        .min(env.len() - 2);
    let (l_mid, e_mid) = env[mid_idx];
    let (_, e_end) = env[env.len() - 1];
    let a = if l_end > l_mid {
        ((e_end - e_mid) / (l_end - l_mid)).max(0.0)
    } else {
        0.0
    };
    let c0 = usable
        .iter()
        .map(|&(l, v)| v - a * l)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let holds = usable
        .iter()
        .filter(|&&(l, v)| v <= a * l + c0 + 1e-9)
        .count();
    Ok(Residual8Fit {
        a,
        c0,
        excluded_fraction: excluded_n as f64 / total as f64,
        holds_fraction: holds as f64 / usable.len() as f64,
        max_residual: max_res,
        points_total: total,
        points_excluded: excluded_n,
        shells,
    })
}
