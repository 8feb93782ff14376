//! Candidate sequences and the class-M membership checks.
//!
//! A sequence lives here as the numbers `v_k = ln M_k`; all arithmetic stays
//! in the log domain. The four membership conditions are:
//!
//! * i1 — log convexity: `M_n^2 <= M_{n-1} M_{n+1}`, i.e. nonnegative second
//!   differences of `ln M`;
//! * i2 — factorial lower bound: `M_n >= H1 H2^n n!` for some `H1, H2 > 0`;
//! * i3 — for every `s > 1`, `liminf (M_[sn]/M_n^s)^{1/n} > 1`;
//! * i4 — for every `delta > 0` there are `p, t` with
//!   `sup_m M_{m+n} / (M_m (1+delta)^m) <= p t^n M_n`.
//!
//! i1 is decidable on the stored range. The others quantify over an infinite
//! tail, so the checkers report a tail-window proxy plus trend evidence and
//! an explicit stabilized flag, never a proof.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::conjugates::ConvexGridFunction;
use crate::grid;
use crate::report::{combine_all, Status};
use crate::{Error, Result};

/// Default max index used by the CLI and the test harnesses.
pub const DEFAULT_K: usize = 2000;

/// i3 pass margin: the tail-window minimum must exceed `ln(1 + I3_MARGIN)`.
pub const I3_MARGIN: f64 = 1e-3;

/// Default i3 tail-window fraction of K.
pub const I3_DEFAULT_WINDOW: f64 = 0.1;

/// Declarative sequence description, deserializable from the JSON wire form
/// `{"kind":"mstar","rho":1.0,"K":2000}` or `{"kind":"table","lnM":[...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "lnM", default, skip_serializing_if = "Option::is_none")]
    pub ln_m: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    /// `M_n = (n+1)^{rho n}`
    MStar,
    /// `M_n = Gamma^rho(n+2)`, i.e. `((n+1)!)^rho`
    GammaFact,
    /// `M_n = (n+1)^{(n+1) arctan(n+1)}`
    Arctg,
    /// User-supplied `ln M` table
    Table,
}

impl SequenceSpec {
    pub fn mstar(rho: f64, k: usize) -> Self {
        SequenceSpec { kind: SequenceKind::MStar, rho: Some(rho), k: Some(k), ln_m: None }
    }
    pub fn gammafact(rho: f64, k: usize) -> Self {
        SequenceSpec { kind: SequenceKind::GammaFact, rho: Some(rho), k: Some(k), ln_m: None }
    }
    pub fn arctg(k: usize) -> Self {
        SequenceSpec { kind: SequenceKind::Arctg, rho: None, k: Some(k), ln_m: None }
    }
    pub fn table(ln_m: Vec<f64>) -> Self {
        SequenceSpec { kind: SequenceKind::Table, rho: None, k: None, ln_m: Some(ln_m) }
    }
}

/// The numbers `ln M_k`, `k = 0..=K`, plus provenance.
#[derive(Debug, Clone, Serialize)]
pub struct LogSequence {
    name: String,
    params: Vec<(String, f64)>,
    ln_m: Vec<f64>,
}

/// Build a sequence from its spec, evaluating the defining formula directly
/// in the log domain (never exponentiate-then-log).
pub fn build_sequence(spec: &SequenceSpec) -> Result<LogSequence> {
    let k_max = spec.k.unwrap_or(DEFAULT_K);
    match spec.kind {
        SequenceKind::MStar | SequenceKind::GammaFact => {
            let rho = spec
                .rho
                .ok_or_else(|| Error::invalid("rho is required for mstar/gammafact"))?;
            if !(rho >= 1.0) || !rho.is_finite() {
                return Err(Error::invalid(format!("rho must be >= 1, got {rho}")));
            }
            if spec.ln_m.is_some() {
                return Err(Error::invalid("lnM is only valid for kind=table"));
            }
            if k_max < 2 {
                return Err(Error::invalid("K must be >= 2"));
            }
            let ln_m: Vec<f64> = match spec.kind {
                SequenceKind::MStar => (0..=k_max)
                    .map(|k| rho * k as f64 * ((k + 1) as f64).ln())
                    .collect(),
                _ => (0..=k_max).map(|k| rho * ln_gamma((k + 2) as f64)).collect(),
            };
            let name = match spec.kind {
                SequenceKind::MStar => "mstar",
                _ => "gammafact",
            };
            LogSequence::from_parts(name, vec![("rho".into(), rho)], ln_m)
        }
        SequenceKind::Arctg => {
            if spec.rho.is_some() || spec.ln_m.is_some() {
                return Err(Error::invalid("arctg takes no rho and no lnM"));
            }
            if k_max < 2 {
                return Err(Error::invalid("K must be >= 2"));
            }
            let ln_m: Vec<f64> = (0..=k_max)
                .map(|k| {
                    let u = (k + 1) as f64;
                    u * u.ln() * u.atan()
                })
                .collect();
            LogSequence::from_parts("arctg", vec![], ln_m)
        }
        SequenceKind::Table => {
            if spec.rho.is_some() || spec.k.is_some() {
                return Err(Error::invalid("table takes lnM only"));
            }
            let ln_m = spec
                .ln_m
                .clone()
                .ok_or_else(|| Error::invalid("table requires lnM"))?;
            LogSequence::from_parts("table", vec![], ln_m)
        }
    }
}

impl LogSequence {
    fn from_parts(name: &str, params: Vec<(String, f64)>, ln_m: Vec<f64>) -> Result<Self> {
        if ln_m.len() < 3 {
            return Err(Error::invalid("need K >= 2, i.e. at least 3 entries"));
        }
        if ln_m.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("ln M entries must be finite"));
        }
        if ln_m[0].abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "ln M_0 must be 0 (M_0 = 1), got {}",
                ln_m[0]
            )));
        }
        if ln_m.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("ln M must be strictly increasing"));
        }
        Ok(LogSequence {
            name: name.to_string(),
            params,
            ln_m,
        })
    }

    /// Test-only escape hatch: wrap a raw table without the monotonicity
    /// check, so failure paths of the condition estimators can be probed.
    #[doc(hidden)]
    pub fn raw_for_probe(name: &str, ln_m: Vec<f64>) -> Self {
        LogSequence {
            name: name.to_string(),
            params: vec![],
            ln_m,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    /// Max index K.
    pub fn k_max(&self) -> usize {
        self.ln_m.len() - 1
    }

    pub fn ln_m(&self) -> &[f64] {
        &self.ln_m
    }

    /// `ln(M_k / M_{k-1})`, the k-th breakpoint of the associated weight.
    pub fn ln_ratio(&self, k: usize) -> f64 {
        self.ln_m[k] - self.ln_m[k - 1]
    }
}

/// Floor with a 1e-12 upward guard so that products like `1.5 * 2k` that are
/// mathematically integral floor to themselves despite rounding.
pub(crate) fn floor_guard(x: f64) -> usize {
    (x + 1e-12).floor() as usize
}

// ---------------------------------------------------------------------------
// i1
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct I1Report {
    pub ok: bool,
    /// First k with `ln M_{k+1} - 2 ln M_k + ln M_{k-1} < -tolerance`.
    pub first_violation: Option<usize>,
    pub min_second_diff: f64,
    pub tolerance: f64,
}

/// Log-convexity scan over second differences.
pub fn check_i1(seq: &LogSequence) -> I1Report {
    let tol = 1e-12;
    let v = seq.ln_m();
    let mut min_dd = f64::INFINITY;
    let mut first = None;
    for k in 1..v.len() - 1 {
        let dd = v[k + 1] - 2.0 * v[k] + v[k - 1];
        if dd < min_dd {
            min_dd = dd;
        }
        if dd < -tol && first.is_none() {
            first = Some(k);
        }
    }
    I1Report {
        ok: first.is_none(),
        first_violation: first,
        min_second_diff: min_dd,
        tolerance: tol,
    }
}

// ---------------------------------------------------------------------------
// i2
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct I2Report {
    pub h1: f64,
    pub h2: f64,
    pub ln_h1: f64,
    pub ln_h2: f64,
    /// `min_k (ln M_k - ln k! - k ln H2 - ln H1)`; zero by construction of
    /// the fit, recomputed as a floating-point sanity check.
    pub residual: f64,
    pub witness_k: usize,
    /// Tail-window minimum of `(ln M_k - ln k!)/k` minus the same minimum
    /// over the preceding window. A strongly negative drift means the
    /// infimum escapes to -inf, so no positive H2 exists in the limit.
    pub drift: f64,
    pub drift_tolerance: f64,
    pub passed: bool,
}

/// Fit `(H1, H2)` for the factorial lower bound and report the evidence.
pub fn estimate_i2(seq: &LogSequence) -> Result<I2Report> {
    let k_max = seq.k_max();
    if k_max < 10 {
        return Err(Error::invalid("i2 estimation needs K >= 10"));
    }
    let v = seq.ln_m();
    let g = |k: usize| (v[k] - ln_gamma(k as f64 + 1.0)) / k as f64;

    let tail_min = (k_max / 2..=k_max).map(g).fold(f64::INFINITY, f64::min);
    let early_min = (k_max / 4..k_max / 2).map(g).fold(f64::INFINITY, f64::min);
    let ln_h2 = tail_min;

    let mut d = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        d.push(v[k] - ln_gamma(k as f64 + 1.0) - k as f64 * ln_h2);
    }
    let mut ln_h1 = f64::INFINITY;
    let mut witness = 0;
    for (k, &dk) in d.iter().enumerate() {
        if dk < ln_h1 {
            ln_h1 = dk;
            witness = k;
        }
    }
    let residual = d.iter().map(|&dk| dk - ln_h1).fold(f64::INFINITY, f64::min);

    let drift = tail_min - early_min;
    let drift_tol = -1e-2 * (1.0 + ln_h2.abs());
    let passed = residual >= -1e-9 && drift >= drift_tol;
    Ok(I2Report {
        h1: ln_h1.exp(),
        h2: ln_h2.exp(),
        ln_h1,
        ln_h2,
        residual,
        witness_k: witness,
        drift,
        drift_tolerance: drift_tol,
        passed,
    })
}

// ---------------------------------------------------------------------------
// i3
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct I3Row {
    pub s: f64,
    /// Tail-window minimum of `(ln M_[sn] - s ln M_n)/n`.
    pub proxy: f64,
    pub trend_slope: f64,
    pub n_lo: usize,
    pub n_hi: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct I3Report {
    pub rows: Vec<I3Row>,
    pub margin: f64,
    pub passed: bool,
}

/// Tail-window lim-inf proxy for i3. The window is
/// `n in [K*window, K/s]` and must contain at least 20 integers.
pub fn check_i3(seq: &LogSequence, s_values: &[f64], window: f64) -> Result<I3Report> {
    let k_max = seq.k_max();
    let v = seq.ln_m();
    if !(window > 0.0 && window < 1.0) {
        return Err(Error::invalid("window fraction must lie in (0, 1)"));
    }
    let mut rows = Vec::new();
    for &s in s_values {
        if !(s > 1.0) || !s.is_finite() {
            return Err(Error::invalid(format!("i3 requires s > 1, got {s}")));
        }
        let n_lo = ((k_max as f64 * window).ceil() as usize).max(1);
        let mut n_hi = (k_max as f64 / s).floor() as usize;
        while n_hi > 0 && floor_guard(s * n_hi as f64) > k_max {
            n_hi -= 1;
        }
        if n_hi < n_lo || n_hi - n_lo + 1 < 20 {
            return Err(Error::invalid(format!(
                "i3 window [{n_lo}, {n_hi}] for s = {s} has fewer than 20 points; lower the window fraction or raise K"
            )));
        }
        let ns: Vec<f64> = (n_lo..=n_hi).map(|n| n as f64).collect();
        let terms: Vec<f64> = (n_lo..=n_hi)
            .map(|n| {
                let idx = floor_guard(s * n as f64);
                (v[idx] - s * v[n]) / n as f64
            })
            .collect();
        let proxy = terms.iter().copied().fold(f64::INFINITY, f64::min);
        let slope = grid::trend_slope(&ns, &terms);
        let passed = proxy > (1.0 + I3_MARGIN).ln() && slope >= -1e-9;
        rows.push(I3Row {
            s,
            proxy,
            trend_slope: slope,
            n_lo,
            n_hi,
            passed,
        });
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(I3Report {
        rows,
        margin: I3_MARGIN,
        passed,
    })
}

// ---------------------------------------------------------------------------
// i4
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct I4Report {
    pub delta: f64,
    pub p_delta: f64,
    pub t_delta: f64,
    pub ln_p: f64,
    pub ln_t: f64,
    /// `max_n (S(n) - ln M_n - ln p - n ln t)`; zero by construction.
    pub residual: f64,
    /// Count of n whose inner supremum over m sat on the m_max boundary.
    pub boundary_count: usize,
    pub stabilized: bool,
    pub passed: bool,
}

/// Double scan for i4: `S(n) = max_m (ln M_{m+n} - ln M_m - m ln(1+delta))`,
/// then an envelope fit `ln p + n ln t >= S(n) - ln M_n`.
pub fn check_i4(seq: &LogSequence, delta: f64, n_max: usize, m_max: usize) -> Result<I4Report> {
    let k_max = seq.k_max();
    let v = seq.ln_m();
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::invalid("i4 requires delta > 0"));
    }
    if n_max + m_max > k_max {
        return Err(Error::invalid(format!(
            "i4 needs n_max + m_max <= K ({n_max} + {m_max} > {k_max})"
        )));
    }
    if n_max < 2 || m_max < 10 {
        return Err(Error::invalid("i4 needs n_max >= 2 and m_max >= 10"));
    }
    let ln1d = delta.ln_1p();
    let mut g = Vec::with_capacity(n_max + 1);
    let mut boundary = 0usize;
    for n in 0..=n_max {
        let mut best = f64::NEG_INFINITY;
        let mut best_m = 0usize;
        let mut prev = f64::NEG_INFINITY;
        let mut rising_at_end = false;
        for m in 0..=m_max {
            let val = v[m + n] - v[m] - m as f64 * ln1d;
            if val > best {
                best = val;
                best_m = m;
            }
            if m == m_max {
                rising_at_end = val > prev;
            }
            prev = val;
        }
        if best_m == m_max && rising_at_end {
            boundary += 1;
        }
        g.push(best - v[n]);
    }
    let mut ln_t = 0.0f64;
    for n in 1..=n_max {
        ln_t = ln_t.max(g[n] - g[n - 1]);
    }
    let mut ln_p = f64::NEG_INFINITY;
    for (n, &gn) in g.iter().enumerate() {
        ln_p = ln_p.max(gn - n as f64 * ln_t);
    }
    let residual = g
        .iter()
        .enumerate()
        .map(|(n, &gn)| gn - n as f64 * ln_t - ln_p)
        .fold(f64::NEG_INFINITY, f64::max);
    let stabilized = boundary == 0;
    Ok(I4Report {
        delta,
        p_delta: ln_p.exp(),
        t_delta: ln_t.exp(),
        ln_p,
        ln_t,
        residual,
        boundary_count: boundary,
        stabilized,
        passed: residual <= 1e-9 && stabilized,
    })
}

// ---------------------------------------------------------------------------
// limit (ratio test)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct RatioLimitReport {
    /// Rows `(n, (M_{n+1}/M_n)^{1/n})` on a log-spaced grid of n.
    pub rows: Vec<(usize, f64)>,
    pub final_value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Trend check for `(M_{n+1}/M_n)^{1/n} -> 1`.
pub fn check_eq1_limit(seq: &LogSequence) -> Result<RatioLimitReport> {
    let k_max = seq.k_max();
    if k_max < 100 {
        return Err(Error::invalid("ratio-limit check needs K >= 100"));
    }
    let v = seq.ln_m();
    let n_lo = (k_max / 100).max(10);
    let grid_ns = grid::log_spaced(n_lo as f64, (k_max - 1) as f64, 24)?;
    let mut rows: Vec<(usize, f64)> = Vec::new();
    for &nf in &grid_ns {
        let n = nf.round() as usize;
        if rows.last().map(|&(m, _)| m == n).unwrap_or(false) {
            continue;
        }
        let val = ((v[n + 1] - v[n]) / n as f64).exp();
        rows.push((n, val));
    }
    let final_value = rows.last().unwrap().1;
    let tol = 5e-2;
    let monotone = rows.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    let passed = final_value <= 1.0 + tol && monotone;
    Ok(RatioLimitReport {
        rows,
        final_value,
        tolerance: tol,
        passed,
    })
}

// ---------------------------------------------------------------------------
// piecewise-linear extension v_L
// ---------------------------------------------------------------------------

/// The piecewise-linear function through `(k, ln M_k)`; convex exactly when
/// i1 holds, which is required.
pub fn to_vfun(seq: &LogSequence) -> Result<ConvexGridFunction> {
    let i1 = check_i1(seq);
    if !i1.ok {
        return Err(Error::invalid(format!(
            "v_L needs log convexity; i1 fails first at k = {:?}",
            i1.first_violation
        )));
    }
    let xs: Vec<f64> = (0..=seq.k_max()).map(|k| k as f64).collect();
    ConvexGridFunction::new(xs, seq.ln_m().to_vec())
}

// ---------------------------------------------------------------------------
// aggregate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ClassMReport {
    pub name: String,
    pub k_max: usize,
    pub i1: I1Report,
    pub i2: I2Report,
    pub i3: I3Report,
    pub i4: Vec<I4Report>,
    pub eq1: RatioLimitReport,
    pub status: Status,
}

/// Run the full class-M suite with the given s grid and delta grid.
pub fn class_m_report(
    seq: &LogSequence,
    s_values: &[f64],
    deltas: &[f64],
    window: f64,
) -> Result<ClassMReport> {
    let i1 = check_i1(seq);
    let i2 = estimate_i2(seq)?;
    let i3 = check_i3(seq, s_values, window)?;
    let k_max = seq.k_max();
    // the inner supremum of i4 peaks near m ~ rho n / delta; keep n_max
    // small enough that the peak stays interior for rho <= 2, delta >= 0.1
    let n_max = (k_max / 25).clamp(2, 160);
    let m_max = k_max - n_max;
    let i4: Vec<I4Report> = deltas
        .iter()
        .map(|&d| check_i4(seq, d, n_max, m_max))
        .collect::<Result<_>>()?;
    let eq1 = check_eq1_limit(seq)?;

    let mut status = Status::from_flags(i1.ok, true);
    status = status.combine(Status::from_flags(i2.passed, true));
    status = status.combine(Status::from_flags(i3.passed, true));
    status = combine_all(
        std::iter::once(status).chain(
            i4.iter()
                .map(|r| Status::from_flags(r.residual <= 1e-9, r.stabilized)),
        ),
    );
    status = status.combine(Status::from_flags(eq1.passed, true));

    Ok(ClassMReport {
        name: seq.name().to_string(),
        k_max,
        i1,
        i2,
        i3,
        i4,
        eq1,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln(x: f64) -> f64 {
        x.ln()
    }

    #[test]
    fn mstar_small_table_matches_formula() {
        let seq = build_sequence(&SequenceSpec::mstar(1.0, 4)).unwrap();
        let expect = [
            0.0,
            ln(2.0),
            2.0 * ln(3.0),
            3.0 * ln(4.0),
            4.0 * ln(5.0),
        ];
        for (a, b) in seq.ln_m().iter().zip(expect) {
            assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn gammafact_is_shifted_factorial() {
        let seq = build_sequence(&SequenceSpec::gammafact(1.0, 3)).unwrap();
        let expect = [0.0, ln(2.0), ln(6.0), ln(24.0)];
        for (a, b) in seq.ln_m().iter().zip(expect) {
            assert!((a - b).abs() <= 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn arctg_starts_at_zero() {
        let seq = build_sequence(&SequenceSpec::arctg(5)).unwrap();
        assert_eq!(seq.ln_m()[0], 0.0);
        assert!((seq.ln_m()[1] - 2.0 * ln(2.0) * 2f64.atan()).abs() < 1e-15);
    }

    #[test]
    fn build_rejects_bad_inputs() {
        assert!(build_sequence(&SequenceSpec::mstar(0.5, 100)).is_err());
        assert!(build_sequence(&SequenceSpec::table(vec![0.0, ln(3.0), ln(3.0)])).is_err());
        assert!(build_sequence(&SequenceSpec::table(vec![0.1, 1.0, 2.0])).is_err());
        let mut spec = SequenceSpec::arctg(10);
        spec.rho = Some(2.0);
        assert!(build_sequence(&spec).is_err());
    }

    #[test]
    fn i1_holds_for_builtins_and_catches_concavity() {
        for spec in [
            SequenceSpec::mstar(1.0, 2000),
            SequenceSpec::gammafact(2.0, 500),
            SequenceSpec::arctg(500),
        ] {
            let seq = build_sequence(&spec).unwrap();
            let r = check_i1(&seq);
            assert!(r.ok, "{} violates i1 at {:?}", seq.name(), r.first_violation);
        }
        // 3^2 = 9 > M_0 M_2 = 4: second difference ln4 - 2 ln3 < 0 at k = 1
        let seq = build_sequence(&SequenceSpec::table(vec![0.0, ln(3.0), ln(4.0)])).unwrap();
        let r = check_i1(&seq);
        assert!(!r.ok);
        assert_eq!(r.first_violation, Some(1));
    }

    #[test]
    fn i2_gammafact_has_unit_constants() {
        let seq = build_sequence(&SequenceSpec::gammafact(1.0, 2000)).unwrap();
        let r = estimate_i2(&seq).unwrap();
        assert!(r.passed);
        assert!((r.h1 - 1.0).abs() <= 1e-9, "h1 = {}", r.h1);
        assert!(r.h2 >= 1.0 - 1e-12 && r.h2 <= 1.01, "h2 = {}", r.h2);
        assert!(r.residual >= 0.0);
        // ties at k = 0 and k = K; rounding decides which one wins
        assert!(r.witness_k == 0 || r.witness_k == seq.k_max());
    }

    #[test]
    fn i2_mstar_h2_lands_in_stirling_range() {
        let seq = build_sequence(&SequenceSpec::mstar(1.0, 2000)).unwrap();
        let r = estimate_i2(&seq).unwrap();
        assert!(r.passed);
        assert!(r.h2 >= 2.5 && r.h2 <= std::f64::consts::E, "h2 = {}", r.h2);
        assert!(r.residual >= 0.0);
    }

    #[test]
    fn i2_flags_super_geometric_decay_against_factorial() {
        // ln M_k = ln k! - k ln(k+1): (ln M_k - ln k!)/k = -ln(k+1) -> -inf,
        // so no positive H2 exists in the limit. The wrapper bypasses the
        // monotonicity gate on purpose.
        let ln_m: Vec<f64> = (0..=200)
            .map(|k| ln_gamma(k as f64 + 1.0) - k as f64 * ((k + 1) as f64).ln())
            .collect();
        let seq = LogSequence::raw_for_probe("decay", ln_m);
        let r = estimate_i2(&seq).unwrap();
        assert!(!r.passed, "drift = {}", r.drift);
        assert!(r.drift < r.drift_tolerance);
    }

    #[test]
    fn i3_mstar_matches_analytic_limit() {
        let seq = build_sequence(&SequenceSpec::mstar(1.0, DEFAULT_K)).unwrap();
        let r = check_i3(&seq, &[2.0, 3.0], I3_DEFAULT_WINDOW).unwrap();
        assert!(r.passed);
        // analytic limits 2 ln 2 and 3 ln 3, approached from below
        assert!((r.rows[0].proxy - 2.0 * ln(2.0)).abs() < 0.02);
        assert!((r.rows[1].proxy - 3.0 * ln(3.0)).abs() < 0.03);
        assert!(r.rows[0].proxy < 2.0 * ln(2.0));
    }

    #[test]
    fn i3_gammafact_stirling() {
        let seq = build_sequence(&SequenceSpec::gammafact(1.0, 5000)).unwrap();
        let r = check_i3(&seq, &[2.0], I3_DEFAULT_WINDOW).unwrap();
        assert!(r.passed);
        assert!((r.rows[0].proxy - 2.0 * ln(2.0)).abs() < 0.02);
    }

    #[test]
    fn i3_rejects_thin_windows() {
        let seq = build_sequence(&SequenceSpec::mstar(1.0, 100)).unwrap();
        assert!(check_i3(&seq, &[3.0], 0.3).is_err());
    }

    #[test]
    fn i4_builtins_fit_with_interior_maxima() {
        let seq = build_sequence(&SequenceSpec::gammafact(1.0, 2200)).unwrap();
        let r = check_i4(&seq, 1.0, 200, 2000).unwrap();
        assert!(r.passed, "boundary count {}", r.boundary_count);
        assert!(r.residual <= 0.0);
        assert!(r.p_delta > 0.0 && r.t_delta >= 1.0);

        let seq = build_sequence(&SequenceSpec::mstar(1.0, 2000)).unwrap();
        let r = check_i4(&seq, 0.5, 100, 1900).unwrap();
        assert!(r.passed);
        assert!(r.residual <= 0.0);
    }

    #[test]
    fn i4_n0_row_forces_p_at_least_one() {
        // S(0) = 0 attained at m = 0, so ln p >= 0.
        let seq = build_sequence(&SequenceSpec::mstar(1.0, 2000)).unwrap();
        let r = check_i4(&seq, 0.5, 100, 1900).unwrap();
        assert!(r.p_delta >= 1.0);
    }

    #[test]
    fn eq1_ratio_drifts_to_one() {
        let seq = build_sequence(&SequenceSpec::mstar(1.0, 10_000)).unwrap();
        let r = check_eq1_limit(&seq).unwrap();
        assert!(r.passed);
        let n = r.rows.last().unwrap().0 as f64;
        let predicted = ((std::f64::consts::E * (n + 2.0)).ln() / n).exp();
        assert!((r.final_value - predicted).abs() < 1e-4);

        let seq = build_sequence(&SequenceSpec::gammafact(1.0, 10_000)).unwrap();
        let r = check_eq1_limit(&seq).unwrap();
        assert!(r.passed);
        let n = r.rows.last().unwrap().0 as f64;
        let predicted = ((n + 2.0).ln() / n).exp();
        assert!((r.final_value - predicted).abs() < 1e-6);
    }

    #[test]
    fn eq1_constant_tail_is_exactly_one() {
        // strictly increasing up to K0 = 50, then slope 1e-9 (near-constant
        // is not allowed by monotonicity, so use a tiny slope and a direct
        // ratio: the guard is that values stay at exp(tiny) ~ 1).
        let mut ln_m = vec![0.0];
        for k in 1..=50usize {
            ln_m.push(k as f64);
        }
        for k in 51..=400usize {
            ln_m.push(50.0 + (k - 50) as f64 * 1e-12);
        }
        let seq = LogSequence::raw_for_probe("flat-tail", ln_m);
        let r = check_eq1_limit(&seq).unwrap();
        assert!(r.passed);
        assert!((r.final_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vfun_interpolates_nodes_and_midpoints() {
        let seq = build_sequence(&SequenceSpec::gammafact(1.0, 100)).unwrap();
        let v = to_vfun(&seq).unwrap();
        assert!((v.eval(0.5).unwrap() - 0.5 * ln(2.0)).abs() < 1e-12);
        let seq = build_sequence(&SequenceSpec::mstar(1.0, 100)).unwrap();
        let v = to_vfun(&seq).unwrap();
        assert_eq!(v.eval(2.0).unwrap(), 2.0 * ln(3.0));
        let expect = 0.75 * ln(2.0) + 0.25 * 2.0 * ln(3.0);
        assert!((v.eval(1.25).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn vfun_requires_log_convexity() {
        let seq = build_sequence(&SequenceSpec::table(vec![0.0, ln(3.0), ln(4.0)])).unwrap();
        assert!(to_vfun(&seq).is_err());
    }

    #[test]
    fn membership_holds_across_k_for_every_family() {
        for k in [300usize, 5000] {
            for spec in [
                SequenceSpec::mstar(1.0, k),
                SequenceSpec::mstar(2.0, k),
                SequenceSpec::gammafact(1.0, k),
                SequenceSpec::gammafact(2.0, k),
                SequenceSpec::arctg(k),
            ] {
                let seq = build_sequence(&spec).unwrap();
                let rep =
                    class_m_report(&seq, &[1.5, 2.0, 3.0], &[0.1, 0.5, 1.0], 0.1).unwrap();
                assert!(rep.i1.ok, "{} K={k}", seq.name());
                assert!(rep.i2.residual >= 0.0, "{} K={k}", seq.name());
                assert!(
                    rep.i3.rows.iter().all(|r| r.proxy > 0.0),
                    "{} K={k}",
                    seq.name()
                );
                assert!(
                    rep.i4.iter().all(|r| r.residual <= 0.0 && r.stabilized),
                    "{} K={k}: {:?}",
                    seq.name(),
                    rep.i4.iter().map(|r| r.boundary_count).collect::<Vec<_>>()
                );
            }
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec: SequenceSpec =
            serde_json::from_str(r#"{"kind":"mstar","rho":1.0,"K":2000}"#).unwrap();
        assert_eq!(spec, SequenceSpec::mstar(1.0, 2000));
        let spec: SequenceSpec =
            serde_json::from_str(r#"{"kind":"table","lnM":[0.0,1.0,3.0]}"#).unwrap();
        assert_eq!(spec, SequenceSpec::table(vec![0.0, 1.0, 3.0]));
        assert!(serde_json::from_str::<SequenceSpec>(r#"{"kind":"mstar","rho":1,"bogus":3}"#)
            .is_err());
    }
}
