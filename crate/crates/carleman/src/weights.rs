//! The associated weight `w(r) = sup_k ln(r^k / M_k)` in exact
//! breakpoint form, the scaled family `w_m`, the dominating weight `k(z)`,
//! and the gap checkers built on them.
//!
//! In the variable `t = ln r` the weight is convex piecewise linear with
//! integer slopes: slope k holds on `[t_k, t_{k+1}]` where
//! `t_k = ln(M_k / M_{k-1})` is the k-th breakpoint. Evaluation is a binary
//! search over breakpoints; the stored index range truncates the supremum,
//! so queries beyond the last breakpoint are refused instead of silently
//! underestimated.

use num_complex::Complex64;
use serde::Serialize;

use crate::grid::{self, SupScan};
use crate::conjugates::ConvexGridFunction;
use crate::sequences::{build_sequence, check_i1, LogSequence, SequenceSpec};
use crate::{Error, Result};

/// Exact piecewise-linear representation of the associated weight.
#[derive(Debug, Clone, Serialize)]
pub struct WeightFunction {
    ln_m: Vec<f64>,
    /// `t[k-1] = ln M_k - ln M_{k-1}`, nondecreasing exactly when i1 holds.
    t: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WEval {
    pub value: f64,
    /// Maximizing index; ties broken to the smallest k.
    pub argmax_k: usize,
}

impl WeightFunction {
    pub fn from_sequence(seq: &LogSequence) -> Result<Self> {
        let i1 = check_i1(seq);
        if !i1.ok {
            return Err(Error::invalid(format!(
                "weight needs a log-convex sequence; i1 fails at k = {:?}",
                i1.first_violation
            )));
        }
        let ln_m = seq.ln_m().to_vec();
        let t: Vec<f64> = (1..ln_m.len()).map(|k| ln_m[k] - ln_m[k - 1]).collect();
        Ok(WeightFunction { ln_m, t })
    }

    pub fn k_max(&self) -> usize {
        self.t.len()
    }

    pub fn ln_m(&self) -> &[f64] {
        &self.ln_m
    }

    /// Breakpoint radius `M_k / M_{k-1}` for `k = 1..=K`.
    pub fn breakpoint_radius(&self, k: usize) -> f64 {
        self.t[k - 1].exp()
    }

    /// Largest radius the truncated representation can answer for.
    pub fn max_radius(&self) -> f64 {
        self.t[self.t.len() - 1].exp()
    }

    /// `w(r)` with the maximizing index. `w(0) = 0` by definition and
    /// `w = 0` on `[0, M_1]`.
    pub fn eval(&self, r: f64) -> Result<WEval> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::invalid(format!("radius must be >= 0, got {r}")));
        }
        if r == 0.0 {
            return Ok(WEval { value: 0.0, argmax_k: 0 });
        }
        let t = r.ln();
        let t_max = self.t[self.t.len() - 1];
        if t > t_max {
            return Err(Error::Truncation { ln_r: t, t_max });
        }
        // slope index = number of breakpoints <= t, then settle rounding
        // and exact ties by comparing the computed candidate values, which
        // reproduces the ascending scan bitwise: strictly larger wins,
        // exact ties keep the smallest k (repeated breakpoints included)
        let mut k = self.t.partition_point(|&b| b <= t);
        let val = |j: usize| j as f64 * t - self.ln_m[j];
        while k + 1 < self.ln_m.len() && val(k + 1) > val(k) {
            k += 1;
        }
        while k >= 1 && val(k - 1) >= val(k) {
            k -= 1;
        }
        Ok(WEval {
            value: val(k),
            argmax_k: k,
        })
    }

    /// Zero-counting function: the slope of `w` at `ln r`.
    pub fn counting(&self, r: f64) -> Result<usize> {
        Ok(self.eval(r)?.argmax_k)
    }
}

// ---------------------------------------------------------------------------
// linear bound A_w
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct AwReport {
    pub a_w: f64,
    pub witness_r: f64,
    /// Worst slack of `A_w r - w(r)` on the verification grid (>= 0 up to
    /// rounding when the fit is correct).
    pub min_slack: f64,
    pub verified_points: usize,
}

/// Fit `A_w = max w(r)/r`. Because `w(e^t)` is affine in `t` on each piece,
/// `w(e^t) - t` attains its maximum over a piece at an endpoint, so scanning
/// breakpoints (plus the range end) is exact.
pub fn linear_bound(wf: &WeightFunction, r_max: f64, verify_points: usize) -> Result<AwReport> {
    if !(r_max > 0.0) {
        return Err(Error::invalid("r_max must be positive"));
    }
    let ln_rmax = r_max.ln();
    let mut a_w = 0.0f64;
    let mut witness = r_max;
    for k in 1..=wf.k_max() {
        let t = wf.t[k - 1];
        if t > ln_rmax {
            break;
        }
        let r = t.exp();
        let q = wf.eval(r)?.value / r;
        if q > a_w {
            a_w = q;
            witness = r;
        }
    }
    let q_end = wf.eval(r_max)?.value / r_max;
    if q_end > a_w {
        a_w = q_end;
        witness = r_max;
    }
    let lo = wf.breakpoint_radius(1).min(r_max / 2.0).max(r_max * 1e-9);
    let rs = grid::log_spaced(lo, r_max, verify_points.max(2))?;
    let mut min_slack = f64::INFINITY;
    for &r in &rs {
        min_slack = min_slack.min(a_w * r - wf.eval(r)?.value);
    }
    Ok(AwReport {
        a_w,
        witness_r: witness,
        min_slack,
        verified_points: rs.len(),
    })
}

// ---------------------------------------------------------------------------
// sandwich bound for the mstar weight
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub rho: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub points: usize,
    /// Worst slack of the upper bound `rho e^{-1} r^{1/rho} - w(r)`.
    pub min_upper_slack: f64,
    pub upper_witness: f64,
    /// Worst slack of the lower bound `w(r) - (rho e^{-1} r^{1/rho} - 2 ln r)`.
    pub min_lower_slack: f64,
    pub lower_witness: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Build the mstar weight with just enough breakpoints for `r_max` and
/// check `rho e^{-1} r^{1/rho} - 2 ln r <= w(r) <= rho e^{-1} r^{1/rho}`
/// on a log grid in `(e^rho, r_max]`.
pub fn check_sandwich_mstar(rho: f64, r_max: f64, points: usize) -> Result<SandwichReport> {
    if !(rho >= 1.0) {
        return Err(Error::invalid("sandwich bound needs rho >= 1"));
    }
    let r_lo = rho.exp();
    if !(r_max > r_lo * 1.0001) {
        return Err(Error::invalid(format!(
            "sandwich domain is r > e^rho = {r_lo:.4}; r_max = {r_max} is too small"
        )));
    }
    let wf = mstar_weight_covering(rho, r_max)?;
    let rs = grid::log_spaced(r_lo * (1.0 + 1e-6), r_max, points.max(2))?;
    let mut min_up = f64::INFINITY;
    let mut min_lo = f64::INFINITY;
    let (mut wit_up, mut wit_lo) = (rs[0], rs[0]);
    for &r in &rs {
        let w = wf.eval(r)?.value;
        let upper = rho * (-1.0f64).exp() * r.powf(1.0 / rho);
        let lower = upper - 2.0 * r.ln();
        let su = upper - w;
        let sl = w - lower;
        if su < min_up {
            min_up = su;
            wit_up = r;
        }
        if sl < min_lo {
            min_lo = sl;
            wit_lo = r;
        }
    }
    let tol = -1e-9;
    Ok(SandwichReport {
        rho,
        r_lo,
        r_hi: r_max,
        points: rs.len(),
        min_upper_slack: min_up,
        upper_witness: wit_up,
        min_lower_slack: min_lo,
        lower_witness: wit_lo,
        tolerance: tol,
        passed: min_up >= tol && min_lo >= tol,
    })
}

/// Weight for the given sequence spec with enough breakpoints to answer
/// radii up to `r_needed`; K doubles until the last breakpoint covers it.
/// Table sequences cannot be extended and fail with a truncation error.
pub fn weight_covering(spec: &SequenceSpec, r_needed: f64) -> Result<WeightFunction> {
    use crate::sequences::SequenceKind;
    let mut k = spec.k.unwrap_or(crate::sequences::DEFAULT_K).max(16);
    loop {
        let mut attempt = spec.clone();
        if attempt.kind != SequenceKind::Table {
            attempt.k = Some(k);
        }
        let seq = build_sequence(&attempt)?;
        let wf = WeightFunction::from_sequence(&seq)?;
        if wf.max_radius() >= r_needed {
            return Ok(wf);
        }
        if attempt.kind == SequenceKind::Table {
            return Err(Error::Truncation {
                ln_r: r_needed.ln(),
                t_max: wf.max_radius().ln(),
            });
        }
        k = k
            .checked_mul(2)
            .ok_or_else(|| Error::invalid("required K out of range"))?;
        if k > 1 << 26 {
            return Err(Error::invalid("coverage needs more than 2^26 breakpoints"));
        }
    }
}

/// mstar weight whose last breakpoint reaches past `r_max`.
pub fn mstar_weight_covering(rho: f64, r_max: f64) -> Result<WeightFunction> {
    let mut spec = SequenceSpec::mstar(rho, 16);
    spec.k = Some(16);
    weight_covering(&spec, r_max)
}

// ---------------------------------------------------------------------------
// scaled family and gaps
// ---------------------------------------------------------------------------

/// `epsilon_m` rule for the scaled family; strictly decreasing to zero.
#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum EpsRule {
    /// `epsilon_m = 1/m`
    InverseM,
}

impl EpsRule {
    pub fn eps(&self, m: u32) -> Result<f64> {
        if m == 0 {
            return Err(Error::invalid("the family index m starts at 1"));
        }
        Ok(match self {
            EpsRule::InverseM => 1.0 / m as f64,
        })
    }
}

/// The family `w_m(r) = w(r / (sigma + epsilon_m))`.
#[derive(Debug, Clone, Serialize)]
pub struct WeightFamily {
    pub base: WeightFunction,
    pub sigma: f64,
    pub eps_rule: EpsRule,
}

impl WeightFamily {
    pub fn new(base: WeightFunction, sigma: f64, eps_rule: EpsRule) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("sigma must be positive"));
        }
        Ok(WeightFamily { base, sigma, eps_rule })
    }

    pub fn w_m(&self, m: u32, r: f64) -> Result<f64> {
        let eps = self.eps_rule.eps(m)?;
        Ok(self.base.eval(r / (self.sigma + eps))?.value)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub q: f64,
    pub maximizer: f64,
    pub stabilized: bool,
    pub points: usize,
}

impl GapReport {
    fn from_scan(scan: SupScan, points: usize) -> Self {
        GapReport {
            q: scan.value,
            maximizer: scan.arg,
            stabilized: scan.stabilized,
            points,
        }
    }
}

/// `Q = max_r [ w_m(r) + A ln(1+r) - w_{m+1}(r) ]` on the grid, with the
/// final-decade stabilization proxy standing in for finiteness over all r.
pub fn lemma3_gap(family: &WeightFamily, m: u32, a: f64, r_grid: &[f64]) -> Result<GapReport> {
    if !(a >= 0.0) {
        return Err(Error::invalid("lemma3 gap needs A >= 0"));
    }
    if r_grid.len() < 8 {
        return Err(Error::invalid("gap scan needs a grid of >= 8 radii"));
    }
    let mut vals = Vec::with_capacity(r_grid.len() + 1);
    let mut args = Vec::with_capacity(r_grid.len() + 1);
    // r = 0 contributes exactly 0, so Q >= 0 always
    args.push(r_grid[0] / 1e6);
    vals.push(0.0);
    for &r in r_grid {
        args.push(r);
        vals.push(family.w_m(m, r)? + a * r.ln_1p() - family.w_m(m + 1, r)?);
    }
    let scan = grid::sup_with_stabilization(&args, &vals)?;
    Ok(GapReport::from_scan(scan, r_grid.len()))
}

/// `Q = max_r [ s w(r) - w(r / (l_s (1-delta))) ]` on the grid.
pub fn lemma4_gap(
    wf: &WeightFunction,
    s: f64,
    delta: f64,
    l_s: f64,
    r_grid: &[f64],
) -> Result<GapReport> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::invalid("lemma4 gap needs s > 0"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("lemma4 gap needs delta in (0, 1)"));
    }
    if !(l_s > 0.0) || !l_s.is_finite() {
        return Err(Error::invalid("lemma4 gap needs l(s) > 0"));
    }
    if r_grid.len() < 8 {
        return Err(Error::invalid("gap scan needs a grid of >= 8 radii"));
    }
    let scale = l_s * (1.0 - delta);
    let mut vals = Vec::with_capacity(r_grid.len() + 1);
    let mut args = Vec::with_capacity(r_grid.len() + 1);
    args.push(r_grid[0] / 1e6);
    vals.push(0.0);
    for &r in r_grid {
        args.push(r);
        vals.push(s * wf.eval(r)?.value - wf.eval(r / scale)?.value);
    }
    let scan = grid::sup_with_stabilization(&args, &vals)?;
    Ok(GapReport::from_scan(scan, r_grid.len()))
}

// ---------------------------------------------------------------------------
// dominating weight k(z)
// ---------------------------------------------------------------------------

/// `ln k(z) = psi(Im z) + w(|z|/sigma)`, a concrete member of the class of
/// continuous majorants dominating every `exp(psi(Im z) + w_m(|z|))`.
#[derive(Debug, Clone)]
pub struct KWeight {
    pub psi: ConvexGridFunction,
    pub wf: WeightFunction,
    pub sigma: f64,
}

impl KWeight {
    pub fn new(psi: ConvexGridFunction, wf: WeightFunction, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::invalid("sigma must be positive"));
        }
        Ok(KWeight { psi, wf, sigma })
    }

    pub fn ln_k(&self, z: Complex64) -> Result<f64> {
        Ok(self.psi.eval(z.im)? + self.wf.eval(z.norm() / self.sigma)?.value)
    }

    /// `ln k` on the real axis, where `psi(0) = 0` for the built-in psi.
    pub fn ln_k_real(&self, x: f64) -> Result<f64> {
        self.ln_k(Complex64::new(x, 0.0))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub m: u32,
    /// `sup ln [ exp(psi(Im z) + w_m(|z|)) / k(z) ] = sup [w_m(|z|) - w(|z|/sigma)]`;
    /// the psi terms cancel identically, so only |z| matters.
    pub sup_ln_ratio: f64,
    pub maximizer: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
    pub passed: bool,
}

/// Verify domination of the family by `k(z)` on a radius grid.
pub fn ratio_check(
    kw: &KWeight,
    eps_rule: EpsRule,
    m_max: u32,
    r_grid: &[f64],
) -> Result<RatioReport> {
    if m_max == 0 {
        return Err(Error::invalid("m_max must be >= 1"));
    }
    let family = WeightFamily::new(kw.wf.clone(), kw.sigma, eps_rule)?;
    let mut rows = Vec::new();
    for m in 1..=m_max {
        let mut sup = f64::NEG_INFINITY;
        let mut arg = r_grid[0];
        for &r in r_grid {
            let v = family.w_m(m, r)? - kw.wf.eval(r / kw.sigma)?.value;
            if v > sup {
                sup = v;
                arg = r;
            }
        }
        rows.push(RatioRow {
            m,
            sup_ln_ratio: sup,
            maximizer: arg,
        });
    }
    let passed = rows.iter().all(|r| r.sup_ln_ratio <= 1e-12);
    Ok(RatioReport { rows, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::brute_force_w;
    use crate::sequences::SequenceSpec;

    fn mstar_wf(rho: f64, k: usize) -> WeightFunction {
        let seq = build_sequence(&SequenceSpec::mstar(rho, k)).unwrap();
        WeightFunction::from_sequence(&seq).unwrap()
    }

    #[test]
    fn eval_matches_hand_values_for_mstar() {
        let wf = mstar_wf(1.0, 10);
        // flat zone
        let e = wf.eval(1.0).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.argmax_k, 0);
        // exact tie at the second breakpoint M_2/M_1 = 4.5
        let e = wf.eval(4.5).unwrap();
        assert!((e.value - 2.25f64.ln()).abs() < 1e-12);
        assert_eq!(e.argmax_k, 1);
        // interior of the slope-4 piece
        let e = wf.eval(10.0).unwrap();
        assert!((e.value - 16f64.ln()).abs() < 1e-12);
        assert_eq!(e.argmax_k, 4);
    }

    #[test]
    fn eval_rejects_truncated_radii() {
        let wf = mstar_wf(1.0, 10);
        let r_bad = wf.max_radius() * 1.01;
        assert!(matches!(
            wf.eval(r_bad),
            Err(Error::Truncation { .. })
        ));
        assert!(wf.eval(-1.0).is_err());
        assert_eq!(wf.eval(0.0).unwrap().value, 0.0);
    }

    #[test]
    fn eval_agrees_with_brute_force_scan() {
        for spec in [
            SequenceSpec::mstar(1.0, 400),
            SequenceSpec::gammafact(2.0, 400),
            SequenceSpec::arctg(400),
        ] {
            let seq = build_sequence(&spec).unwrap();
            let wf = WeightFunction::from_sequence(&seq).unwrap();
            let rs = grid::log_spaced(1e-3, wf.max_radius() * 0.999, 500).unwrap();
            for &r in &rs {
                let fast = wf.eval(r).unwrap();
                let (bv, _) = brute_force_w(seq.ln_m(), r);
                assert!(
                    (fast.value - bv).abs() <= 1e-12,
                    "{}: r = {r}, {} vs {}",
                    seq.name(),
                    fast.value,
                    bv
                );
            }
        }
    }

    #[test]
    fn counting_jumps_by_one_at_breakpoints() {
        let wf = mstar_wf(1.0, 50);
        assert_eq!(wf.counting(1.0).unwrap(), 0);
        assert_eq!(wf.counting(10.0).unwrap(), 4);
        // first breakpoint M_1 = 2: left value 0, right value 1
        assert_eq!(wf.counting(2.0 - 1e-9).unwrap(), 0);
        assert_eq!(wf.counting(2.0).unwrap(), 0); // tie to smaller
        assert_eq!(wf.counting(2.0 + 1e-9).unwrap(), 1);
        for k in 2..30 {
            let r = wf.breakpoint_radius(k);
            assert_eq!(wf.counting(r * (1.0 - 1e-9)).unwrap(), k - 1);
            assert_eq!(wf.counting(r * (1.0 + 1e-9)).unwrap(), k);
        }
    }

    #[test]
    fn linear_bound_converges_to_inverse_e_for_mstar() {
        let wf = mstar_weight_covering(1.0, 1e6).unwrap();
        let r = linear_bound(&wf, 1e6, 400).unwrap();
        assert!(r.min_slack >= -1e-9, "slack {}", r.min_slack);
        let inv_e = (-1.0f64).exp();
        assert!(r.a_w <= inv_e + 1e-9);
        assert!(r.a_w >= inv_e * 0.98, "a_w = {}", r.a_w);
    }

    #[test]
    fn linear_bound_gammafact_finite_at_large_radii() {
        let wf = weight_covering(&SequenceSpec::gammafact(1.0, 100), 1e5).unwrap();
        let r = linear_bound(&wf, 1e5, 200).unwrap();
        assert!(r.a_w.is_finite() && r.a_w > 0.0);
        assert!(r.min_slack >= -1e-9);
    }

    #[test]
    fn linear_bound_flat_zone_is_zero() {
        let wf = mstar_wf(1.0, 50);
        let r = linear_bound(&wf, 1.9, 50).unwrap();
        assert_eq!(r.a_w, 0.0);
    }

    #[test]
    fn sandwich_holds_for_rho_one_and_two() {
        for rho in [1.0, 2.0] {
            let rep = check_sandwich_mstar(rho, 1e6, 500).unwrap();
            assert!(rep.passed, "rho = {rho}: {rep:?}");
        }
    }

    #[test]
    fn sandwich_spot_value_at_ten() {
        let rep = check_sandwich_mstar(1.0, 100.0, 10).unwrap();
        assert!(rep.passed);
        let wf = mstar_weight_covering(1.0, 100.0).unwrap();
        let w10 = wf.eval(10.0).unwrap().value;
        assert!((w10 - 16f64.ln()).abs() <= 1e-12);
        let upper = (-1.0f64).exp() * 10.0;
        let lower = upper - 2.0 * 10f64.ln();
        assert!(lower <= w10 && w10 <= upper);
    }

    #[test]
    fn family_is_monotone_in_m() {
        let wf = mstar_wf(1.0, 2000);
        let fam = WeightFamily::new(wf, 1.0, EpsRule::InverseM).unwrap();
        let rs = grid::log_spaced(0.5, 1e3, 64).unwrap();
        for &r in &rs {
            let mut prev = f64::NEG_INFINITY;
            for m in 1..=6 {
                let v = fam.w_m(m, r).unwrap();
                assert!(v >= prev - 1e-12, "w_m not monotone at r = {r}, m = {m}");
                prev = v;
            }
        }
    }

    #[test]
    fn lemma3_gap_finite_and_nonnegative() {
        let wf = mstar_weight_covering(1.0, 2e6).unwrap();
        let fam = WeightFamily::new(wf, 1.0, EpsRule::InverseM).unwrap();
        let rs = grid::log_spaced(0.1, 1e6, 600).unwrap();
        let rep = lemma3_gap(&fam, 1, 1.0, &rs).unwrap();
        assert!(rep.stabilized, "maximizer at {}", rep.maximizer);
        assert!(rep.q >= 0.0);
        assert!(rep.maximizer < 1e5);

        // A = 0 gives exactly Q = 0 by family monotonicity
        let rep = lemma3_gap(&fam, 2, 0.0, &rs).unwrap();
        assert_eq!(rep.q, 0.0);
    }

    #[test]
    fn lemma4_gap_identity_case_is_zero() {
        let wf = mstar_weight_covering(1.0, 2e6).unwrap();
        let rs = grid::log_spaced(0.1, 1e6, 600).unwrap();
        // s = 1, l(1) = 1: w(r) <= w(r/0.9), so the gap never exceeds 0
        let rep = lemma4_gap(&wf, 1.0, 0.1, 1.0, &rs).unwrap();
        assert_eq!(rep.q, 0.0);
        assert!(rep.stabilized);
    }

    #[test]
    fn lemma4_gap_s_two_is_finite() {
        let wf = mstar_weight_covering(1.0, 3e6).unwrap();
        let rs = grid::log_spaced(0.1, 1e6, 600).unwrap();
        let rep = lemma4_gap(&wf, 2.0, 0.1, 0.5, &rs).unwrap();
        assert!(rep.stabilized, "maximizer {}", rep.maximizer);
        assert!(rep.q.is_finite() && rep.q >= 0.0);
    }

    #[test]
    fn ratio_check_never_exceeds_one() {
        let wf = mstar_wf(1.0, 4000);
        let psi = {
            let xs = grid::symmetric_step_grid(1000, 0.1).unwrap();
            ConvexGridFunction::sample(xs, |y| 0.5 * y * y).unwrap()
        };
        let kw = KWeight::new(psi, wf, 1.0).unwrap();
        let rs = grid::log_spaced(0.5, 1e4, 300).unwrap();
        let rep = ratio_check(&kw, EpsRule::InverseM, 3, &rs).unwrap();
        assert!(rep.passed);
        for row in &rep.rows {
            assert!(row.sup_ln_ratio <= 0.0);
        }
    }

    #[test]
    fn kweight_real_axis_uses_zero_psi() {
        let wf = mstar_wf(1.0, 100);
        let psi = {
            let xs = grid::symmetric_step_grid(1000, 0.1).unwrap();
            ConvexGridFunction::sample(xs, |y| 0.5 * y * y).unwrap()
        };
        let kw = KWeight::new(psi, wf, 1.0).unwrap();
        let w10 = kw.wf.eval(10.0).unwrap().value;
        assert!((kw.ln_k_real(10.0).unwrap() - w10).abs() <= 1e-12);
        let z = Complex64::new(0.0, 3.0);
        assert!((kw.ln_k(z).unwrap() - (4.5 + kw.wf.eval(3.0).unwrap().value)).abs() < 1e-9);
    }
}
