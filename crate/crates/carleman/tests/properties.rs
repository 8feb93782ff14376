//! Property tests for the structural invariants: convexity is preserved by
//! conjugation, the weight evaluator agrees with the scan everywhere, the
//! scaled family is monotone, and the canonical product keeps its
//! symmetries.

use carleman::conjugates::{biconjugate_check, legendre_transform, ConvexGridFunction};
use carleman::entire::{log_abs_n, place_zeros, ZeroMode};
use carleman::grid;
use carleman::oracles::{brute_force_conjugate, brute_force_w};
use carleman::sequences::LogSequence;
use carleman::weights::{EpsRule, WeightFamily, WeightFunction};
use num_complex::Complex64;
use proptest::prelude::*;

/// Random log-convex strictly increasing table: first difference then
/// nonnegative second differences.
fn log_convex_table() -> impl Strategy<Value = Vec<f64>> {
    (
        10usize..50,
        0.05f64..1.5,
        proptest::collection::vec(0.0f64..0.4, 50),
    )
        .prop_map(|(k, d0, dds)| {
            let mut ln_m = vec![0.0];
            let mut d = d0;
            for i in 0..k {
                ln_m.push(ln_m[i] + d);
                d += dds[i % dds.len()];
            }
            ln_m
        })
}

/// Random convex grid function on a linear grid.
fn convex_grid() -> impl Strategy<Value = ConvexGridFunction> {
    (
        50usize..200,
        -2.0f64..2.0,
        proptest::collection::vec(0.0f64..0.1, 200),
        -1.0f64..1.0,
    )
        .prop_map(|(n, s0, incs, v0)| {
            let xs = grid::linear_spaced(-5.0, 5.0, n).unwrap();
            let mut vals = Vec::with_capacity(n);
            let mut v = v0;
            let mut s = s0;
            for i in 0..n {
                vals.push(v);
                if i + 1 < n {
                    v += s * (xs[i + 1] - xs[i]);
                    s += incs[i % incs.len()];
                }
            }
            ConvexGridFunction::new(xs, vals).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_matches_brute_force_and_is_monotone(ln_m in log_convex_table(), pick in 0.0f64..1.0) {
        let seq = LogSequence::raw_for_probe("random", ln_m.clone());
        let wf = WeightFunction::from_sequence(&seq).unwrap();
        let ln_lo = (0.25 * wf.breakpoint_radius(1)).max(1e-6).ln();
        let ln_hi = (0.999 * wf.max_radius()).ln();
        let r = (ln_lo + (ln_hi - ln_lo) * pick).exp();
        let fast = wf.eval(r).unwrap().value;
        let (slow, _) = brute_force_w(&ln_m, r);
        prop_assert!((fast - slow).abs() <= 1e-12);
        // nondecreasing in r
        let r2 = (r * 1.07).min(wf.max_radius() * 0.9999);
        if r2 > r {
            prop_assert!(wf.eval(r2).unwrap().value >= fast - 1e-12);
        }
    }

    #[test]
    fn family_monotone_in_m(ln_m in log_convex_table(), pick in 0.0f64..1.0) {
        let seq = LogSequence::raw_for_probe("random", ln_m);
        let wf = WeightFunction::from_sequence(&seq).unwrap();
        let fam = WeightFamily::new(wf, 1.0, EpsRule::InverseM).unwrap();
        let hi = 0.9 * fam.base.max_radius();
        let r = hi * pick;
        let mut prev = f64::NEG_INFINITY;
        for m in 1..6 {
            let v = fam.w_m(m, r).unwrap();
            prop_assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn counting_steps_by_one_at_distinct_breakpoints(ln_m in log_convex_table()) {
        let seq = LogSequence::raw_for_probe("random", ln_m);
        let wf = WeightFunction::from_sequence(&seq).unwrap();
        for k in 2..wf.k_max() {
            let r = wf.breakpoint_radius(k);
            let prev_r = wf.breakpoint_radius(k - 1);
            if r / prev_r > 1.0 + 1e-9 && r * 1.000001 < wf.max_radius() {
                let below = wf.counting(r * (1.0 - 1e-9)).unwrap();
                let above = wf.counting(r * (1.0 + 1e-9)).unwrap();
                prop_assert_eq!(above, k);
                prop_assert_eq!(above - below, 1);
            }
        }
    }

    #[test]
    fn conjugate_is_convex_and_matches_scan(f in convex_grid(), lo in 0.05f64..0.45, width in 0.1f64..0.5) {
        let (s_lo, s_hi) = f.slope_range();
        prop_assume!(s_hi - s_lo > 0.2);
        let span = s_hi - s_lo;
        let a = s_lo + lo * span;
        let b = (a + width * span).min(s_hi - 0.01 * span);
        prop_assume!(b > a);
        let out = grid::linear_spaced(a, b, 64).unwrap();
        // constructor inside validates convexity of the output
        let t = legendre_transform(&f, &out).unwrap();
        for (i, &x) in out.iter().enumerate() {
            let (bv, _) = brute_force_conjugate(&f, x);
            prop_assert!((t.g.vals()[i] - bv).abs() <= 1e-12);
        }
    }

    #[test]
    fn biconjugate_never_exceeds_function(f in convex_grid()) {
        let r = biconjugate_check(&f).unwrap();
        prop_assert!(r.defect >= -1e-10, "defect {}", r.defect);
        // piecewise-linear convex functions are their own convex envelope
        prop_assert!(r.defect <= 1e-9, "defect {}", r.defect);
        prop_assert!(r.min_difference >= -1e-9);
    }

    #[test]
    fn symmetric_product_is_even_and_real_symmetric(
        ln_m in log_convex_table(),
        re in -20.0f64..20.0,
        im in -20.0f64..20.0,
    ) {
        let seq = LogSequence::raw_for_probe("random", ln_m);
        let wf = WeightFunction::from_sequence(&seq).unwrap();
        let j = wf.k_max().min(30);
        let zs = place_zeros(&wf, 1.0, j, ZeroMode::SymmetricReal).unwrap();
        let z = Complex64::new(re, im);
        let v = log_abs_n(&zs, z, f64::INFINITY).unwrap().value;
        let vm = log_abs_n(&zs, -z, f64::INFINITY).unwrap().value;
        let vc = log_abs_n(&zs, z.conj(), f64::INFINITY).unwrap().value;
        if v.is_finite() {
            prop_assert!((v - vm).abs() <= 1e-9 * v.abs().max(1.0));
            prop_assert!((v - vc).abs() <= 1e-9 * v.abs().max(1.0));
        }
    }
}
