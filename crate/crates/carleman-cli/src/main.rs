//! Command-line surface tying the library into reproducible experiments.
//!
//! Exit codes: 0 all checks passed, 2 a checked condition failed, 3 a
//! supremum/lim-inf proxy did not stabilize (nothing can be claimed), 4
//! invalid input or usage. Artifacts are written atomically and every
//! report embeds the fully resolved run configuration.

mod artifacts;
mod config;

use std::path::PathBuf;

use carleman::conjugates::{
    biconjugate_check, legendre_transform, validate_psi, ConvexGridFunction,
};
use carleman::entire::{check_eq8, log_abs_n, place_zeros, ZeroMode};
use carleman::grid;
use carleman::hfun::{
    class_v_check, dense_positive_grid, h_continuous, h_discrete, l_of, lemma1_suite,
    lemma2_agreement, prop1_check, verify_inequality, ClassVConfig, HSource, InequalityId,
    InequalityParams,
};
use carleman::report::Status;
use carleman::represent::{
    coeff_decay_check, fit_dirichlet, fit_sample_grid, residual_seminorm, FitConfig, Target,
    WeightRule,
};
use carleman::sequences::{build_sequence, class_m_report, to_vfun, SequenceKind, SequenceSpec};
use carleman::weights::{
    check_sandwich_mstar, lemma3_gap, lemma4_gap, linear_bound, EpsRule, KWeight, WeightFamily,
    WeightFunction,
};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::artifacts::{write_json, Csv};
use crate::config::{Overrides, RunConfig};

/// Default sigma for the fitting harness: the frequency spacing
/// sigma * e of the mstar radii must resolve the weighted window
/// (spacing below ~pi/4), which sigma = 1 does not.
const FIT_DEFAULT_SIGMA: f64 = 0.18;

#[derive(Parser)]
#[command(
    name = "carleman",
    version,
    about = "Log-convex sequence classes, associated weights, conjugates, canonical products, and exponential-sum fits"
)]
struct Cli {
    /// JSON run configuration; flags override individual fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Sequence kind: mstar | gammafact | arctg.
    #[arg(long, global = true)]
    kind: Option<String>,
    /// Sequence parameter rho (>= 1).
    #[arg(long, global = true)]
    rho: Option<f64>,
    /// Max sequence index.
    #[arg(long = "K", global = true)]
    k: Option<usize>,
    /// psi growth exponent alpha (> 1).
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Scale sigma (> 0).
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full class-membership suite on the configured sequence.
    SeqCheck {
        #[arg(long, value_delimiter = ',', default_value = "1.5,2,3")]
        s: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1")]
        delta: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        window: f64,
    },
    /// Emit (r, w(r), n(r)) on a log grid plus the linear bound A_w.
    WeightEval {
        #[arg(long, default_value_t = 1e3)]
        rmax: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Conjugate psi, emit phi as CSV, and validate psi's two conditions.
    Conjugate {
        #[arg(long, default_value_t = 50.0)]
        xmax: f64,
    },
    /// Discrete and continuous indicator estimates plus l(s).
    Hfun {
        #[arg(long, value_delimiter = ',', default_value = "0.5,2")]
        s: Vec<f64>,
    },
    /// Numeric verification of a named statement.
    Verify {
        #[command(subcommand)]
        check: VerifyCmd,
    },
    /// Place zeros at the scaled breakpoint radii and analyze gaps.
    Zeros {
        #[arg(long = "J", default_value_t = 500)]
        j: usize,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Symmetric)]
        mode: ModeArg,
    },
    /// Fit the logarithmic residual envelope of the canonical product.
    Check8 {
        #[arg(long = "J", default_value_t = 500)]
        j: usize,
        #[arg(long, default_value_t = 0.5)]
        d: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Rotating)]
        mode: ModeArg,
        /// Outer shell radius = the radius of this zero (1-based).
        #[arg(long, default_value_t = 300)]
        rmax_idx: usize,
        #[arg(long, default_value_t = 120)]
        shells: usize,
        #[arg(long, default_value_t = 64)]
        angles: usize,
        #[arg(long, default_value_t = 5.0)]
        max_a: f64,
        #[arg(long, default_value_t = 0.1)]
        max_excluded: f64,
    },
    /// Weighted least-squares exponential-sum fit.
    Fit {
        /// gaussian | cos
        #[arg(long, default_value = "gaussian")]
        target: String,
        /// Gaussian decay parameter.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// cos frequency; defaults to the first zero radius.
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long = "J", default_value_t = 40)]
        j: usize,
        #[arg(long = "X", default_value_t = 5.0)]
        x_max: f64,
        #[arg(long, default_value_t = 2001)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        kmax: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Two-sided closed-form bound on the mstar weight.
    Sandwich {
        #[arg(long, default_value_t = 1e6)]
        rmax: f64,
        #[arg(long, default_value_t = 500)]
        points: usize,
    },
    /// Six-property suite for the indicator h.
    Lemma1 {},
    /// Discrete vs continuous indicator agreement.
    Lemma2 {
        #[arg(long, default_value_t = 2.0)]
        s: f64,
    },
    /// Scaled-family gap: w_m + A ln(1+r) <= w_{m+1} + Q.
    Lemma3 {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long = "A", default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1e6)]
        rmax: f64,
    },
    /// Rescaling gap: s w(r) <= w(r/(l(s)(1-delta))) + Q.
    Lemma4 {
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 1e6)]
        rmax: f64,
    },
    /// Explicit superadditivity constant for curvature-bounded u.
    Prop1 {
        #[arg(long = "C", default_value_t = 1.25)]
        c: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1.0")]
        eps: Vec<f64>,
    },
    /// The three class-V growth conditions on v_L.
    #[command(name = "classV")]
    ClassV {},
    /// (v(x+1) - v(x))/x -> 0.
    Eq2 {},
    /// Almost-subadditivity expanded with fitted constants.
    Eq3 {
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Growth envelope from the doubling inequality.
    Eq4 {
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Superhomogeneity with explicit constants on x >= 1/(s-N).
    Eq5 {
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Same with a fitted additive constant for all x >= 0.
    Eq6 {
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// The two lim-inf representations of h agree.
    Eq7 {
        #[arg(long, default_value_t = 2.0)]
        s: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Symmetric,
    Rotating,
}

fn mode_name(m: ModeArg) -> &'static str {
    match m {
        ModeArg::Symmetric => "symmetric",
        ModeArg::Rotating => "rotating",
    }
}

impl From<ModeArg> for ZeroMode {
    fn from(m: ModeArg) -> ZeroMode {
        match m {
            ModeArg::Symmetric => ZeroMode::SymmetricReal,
            ModeArg::Rotating => ZeroMode::Rotating,
        }
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    /// Command parameters (grids, indices, tolerances) as resolved.
    args: serde_json::Value,
    status: Status,
    results: T,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(Status::Pass) => 0,
        Ok(Status::Fail) => 2,
        Ok(Status::Inconclusive) => 3,
        Err(msg) => {
            eprintln!("error: {msg}");
            4
        }
    }
}

fn lib_err(e: carleman::Error) -> String {
    e.to_string()
}

/// Build the configured sequence, raising K for parametric kinds until the
/// weight covers `r_needed`.
fn weight_covering(spec: &SequenceSpec, r_needed: f64) -> Result<WeightFunction, String> {
    carleman::weights::weight_covering(spec, r_needed).map_err(lib_err)
}

/// phi = conjugate of the configured psi on [-x_cover, x_cover].
fn build_phi(cfg: &RunConfig, x_cover: f64) -> Result<ConvexGridFunction, String> {
    let psi = cfg.psi.build_grid().map_err(lib_err)?;
    let half = (x_cover / cfg.psi.step).ceil() as i64;
    let out = grid::symmetric_step_grid(half.max(8), cfg.psi.step).map_err(lib_err)?;
    Ok(legendre_transform(&psi, &out).map_err(lib_err)?.g)
}

fn run(cli: Cli) -> Result<Status, String> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    let sigma_explicit = cli.sigma.is_some() || cli.config.is_some();
    cfg.apply(&Overrides {
        kind: cli.kind.clone(),
        rho: cli.rho,
        k: cli.k,
        alpha: cli.alpha,
        sigma: cli.sigma,
        out_dir: cli.out_dir.clone(),
    })?;
    let out = cfg.out_dir.clone();

    match cli.cmd {
        Cmd::SeqCheck { s, delta, window } => {
            let seq = build_sequence(&cfg.sequence).map_err(lib_err)?;
            let rep = class_m_report(&seq, &s, &delta, window).map_err(lib_err)?;
            let status = rep.status;
            write_json(
                &out.join("seq_check.json"),
                &Report {
                    command: "seq-check",
                    config: &cfg,
                    args: serde_json::json!({"s": s, "delta": delta, "window": window}),
                    status,
                    results: &rep,
                },
            )?;
            Ok(status)
        }
        Cmd::WeightEval { rmax, points } => {
            let wf = weight_covering(&cfg.sequence, rmax)?;
            let rs = grid::log_spaced(wf.breakpoint_radius(1) / 4.0, rmax, points.max(2))
                .map_err(lib_err)?;
            let mut csv = Csv::new(&["r", "w", "n"]);
            for &r in &rs {
                let e = wf.eval(r).map_err(lib_err)?;
                csv.row(&[r, e.value, e.argmax_k as f64]);
            }
            csv.write(&out.join("weight.csv"))?;
            let aw = linear_bound(&wf, rmax, points.max(2)).map_err(lib_err)?;
            let status = if aw.min_slack >= -1e-9 { Status::Pass } else { Status::Fail };
            write_json(
                &out.join("weight_eval.json"),
                &Report {
                    command: "weight-eval",
                    config: &cfg,
                    args: serde_json::json!({"rmax": rmax, "points": points}),
                    status,
                    results: &aw,
                },
            )?;
            Ok(status)
        }
        Cmd::Conjugate { xmax } => {
            let psi = cfg.psi.build_grid().map_err(lib_err)?;
            let half = (xmax / cfg.psi.step).round() as i64;
            let xs = grid::symmetric_step_grid(half, cfg.psi.step).map_err(lib_err)?;
            let t = legendre_transform(&psi, &xs).map_err(lib_err)?;
            let mut csv = Csv::new(&["x", "phi"]);
            for (&x, &v) in t.g.xs().iter().zip(t.g.vals()) {
                csv.row(&[x, v]);
            }
            csv.write(&out.join("phi.csv"))?;
            let biconj = biconjugate_check(&psi).map_err(lib_err)?;
            let psi_rep = validate_psi(&psi, cfg.psi.alpha, 200, 10.0).map_err(lib_err)?;
            #[derive(Serialize)]
            struct ConjugateResults<'a> {
                edge_flagged: usize,
                biconjugate: &'a carleman::conjugates::BiconjugateReport,
                psi: &'a carleman::conjugates::PsiReport,
            }
            let passed = psi_rep.passed
                && biconj.defect >= 0.0
                && biconj.defect <= 1e-5
                && biconj.min_difference >= -1e-9;
            let status = Status::from_flags(passed, psi_rep.cond1_stabilized);
            write_json(
                &out.join("conjugate.json"),
                &Report {
                    command: "conjugate",
                    config: &cfg,
                    args: serde_json::json!({"xmax": xmax}),
                    status,
                    results: ConjugateResults {
                        edge_flagged: t.edge_attained.iter().filter(|&&e| e).count(),
                        biconjugate: &biconj,
                        psi: &psi_rep,
                    },
                },
            )?;
            Ok(status)
        }
        Cmd::Hfun { s } => {
            let seq = build_sequence(&cfg.sequence).map_err(lib_err)?;
            let v = to_vfun(&seq).map_err(lib_err)?;
            #[derive(Serialize)]
            struct HRow {
                s: f64,
                discrete: carleman::hfun::HEstimate,
                continuous: carleman::hfun::HEstimate,
                l: f64,
            }
            let mut rows = Vec::new();
            for &sv in &s {
                let d = h_discrete(&seq, sv, None).map_err(lib_err)?;
                let c = h_continuous(&v, sv, None).map_err(lib_err)?;
                let l = l_of(&d);
                rows.push(HRow { s: sv, discrete: d, continuous: c, l });
            }
            write_json(
                &out.join("hfun.json"),
                &Report {
                    command: "hfun",
                    config: &cfg,
                    args: serde_json::json!({"s": s}),
                    status: Status::Pass,
                    results: &rows,
                },
            )?;
            Ok(Status::Pass)
        }
        Cmd::Verify { check } => run_verify(check, &cfg, &out),
        Cmd::Zeros { j, d, mode } => {
            let wf = weight_covering(&cfg.sequence, 0.0)?;
            let mut zs = place_zeros(&wf, cfg.sigma, j, mode.into()).map_err(lib_err)?;
            let gap0 = zs.min_gap().map_err(lib_err)?;
            let d_used = d.unwrap_or_else(|| (0.5f64).min(gap0.d_max / 2.0));
            if d_used > 0.0 {
                zs = zs.with_d(d_used).map_err(lib_err)?;
            }
            let gaps = zs.min_gap().map_err(lib_err)?;
            let mut csv = Csv::new(&["k", "radius", "re", "im", "ln_majorant"]);
            for k in 0..zs.len() {
                let z = zs.zero(k);
                csv.row(&[(k + 1) as f64, zs.radii()[k], z.re, z.im, zs.ln_majorant()[k]]);
            }
            csv.write(&out.join("zeros.csv"))?;
            #[derive(Serialize)]
            struct ZeroResults<'a> {
                j: usize,
                d: f64,
                gaps: &'a carleman::entire::MinGapReport,
                admissible_radius_1e6: f64,
            }
            let status = if gaps.simple { Status::Pass } else { Status::Fail };
            write_json(
                &out.join("zeros.json"),
                &Report {
                    command: "zeros",
                    config: &cfg,
                    args: serde_json::json!({"J": j, "d": d_used, "mode": mode_name(mode)}),
                    status,
                    results: ZeroResults {
                        j,
                        d: d_used,
                        gaps: &gaps,
                        admissible_radius_1e6: zs.admissible_radius(1e-6),
                    },
                },
            )?;
            Ok(status)
        }
        Cmd::Check8 {
            j,
            d,
            mode,
            rmax_idx,
            shells,
            angles,
            max_a,
            max_excluded,
        } => {
            let spec_k = cfg.sequence.k.unwrap_or(carleman::sequences::DEFAULT_K);
            if cfg.sequence.kind != SequenceKind::Table && spec_k < 2 * j {
                return Err(format!("check8 needs K >= 2J = {} for the doubling probe", 2 * j));
            }
            let seq = build_sequence(&cfg.sequence).map_err(lib_err)?;
            let wf = WeightFunction::from_sequence(&seq).map_err(lib_err)?;
            let zs = place_zeros(&wf, cfg.sigma, j, mode.into()).map_err(lib_err)?;
            if rmax_idx < 1 || rmax_idx > j {
                return Err(format!("rmax-idx must lie in 1..=J = {j}"));
            }
            let r_hi = zs.radii()[rmax_idx - 1];
            let r_lo = zs.radii()[0] / 4.0;
            let fit = check_eq8(&zs, &wf, d, r_lo, r_hi, shells, angles).map_err(lib_err)?;
            // per-point polar grid, matching the fit's evaluation
            let set = zs.clone().with_d(d).map_err(lib_err)?;
            let mut csv = Csv::new(&["re", "im", "log_n", "w", "residual", "excluded"]);
            for &r in grid::log_spaced(r_lo, r_hi, shells).map_err(lib_err)?.iter() {
                let w = wf.eval(r / cfg.sigma).map_err(lib_err)?.value;
                for i in 0..angles {
                    let theta = std::f64::consts::TAU * i as f64 / angles as f64;
                    let z = Complex64::from_polar(r, theta);
                    let ln_n = log_abs_n(&set, z, f64::INFINITY).map_err(lib_err)?;
                    csv.row(&[
                        z.re,
                        z.im,
                        ln_n.value,
                        w,
                        (w - ln_n.value).abs(),
                        ln_n.excluded as u8 as f64,
                    ]);
                }
            }
            csv.write(&out.join("eq8_grid.csv"))?;

            // truncation honesty: doubling J on the tail-admissible range
            let zs2 = place_zeros(&wf, cfg.sigma, (2 * j).min(wf.k_max()), mode.into())
                .map_err(lib_err)?;
            let r_adm = zs.admissible_radius(1e-6);
            let mut doubling_change = 0.0f64;
            for &r in grid::log_spaced(r_adm / 30.0, r_adm, 24).map_err(lib_err)?.iter() {
                for i in 0..8 {
                    let theta = std::f64::consts::TAU * i as f64 / 8.0;
                    let z = Complex64::from_polar(r, theta);
                    let v1 = log_abs_n(&zs, z, f64::INFINITY).map_err(lib_err)?.value;
                    let v2 = log_abs_n(&zs2, z, f64::INFINITY).map_err(lib_err)?.value;
                    doubling_change = doubling_change.max((v1 - v2).abs());
                }
            }
            #[derive(Serialize)]
            struct Check8Results<'a> {
                fit: &'a carleman::entire::Residual8Fit,
                admissible_radius: f64,
                doubling_change: f64,
                doubling_tolerance: f64,
            }
            let passed = fit.a <= max_a
                && fit.excluded_fraction <= max_excluded
                && fit.holds_fraction == 1.0
                && doubling_change <= 1e-6;
            let status = Status::from_flags(passed, true);
            write_json(
                &out.join("check8.json"),
                &Report {
                    command: "check8",
                    config: &cfg,
                    args: serde_json::json!({
                        "J": j, "d": d, "mode": mode_name(mode), "rmax_idx": rmax_idx,
                        "shells": shells, "angles": angles,
                        "max_a": max_a, "max_excluded": max_excluded,
                    }),
                    status,
                    results: Check8Results {
                        fit: &fit,
                        admissible_radius: r_adm,
                        doubling_change,
                        doubling_tolerance: 1e-6,
                    },
                },
            )?;
            Ok(status)
        }
        Cmd::Fit {
            target,
            a,
            omega,
            j,
            x_max,
            samples,
            kmax,
        } => {
            let sigma = if sigma_explicit { cfg.sigma } else { FIT_DEFAULT_SIGMA };
            let seq = build_sequence(&cfg.sequence).map_err(lib_err)?;
            let wf = WeightFunction::from_sequence(&seq).map_err(lib_err)?;
            if j > wf.k_max() {
                return Err(format!("J = {j} exceeds K = {}", wf.k_max()));
            }
            let zs = place_zeros(&wf, sigma, j, ZeroMode::SymmetricReal).map_err(lib_err)?;
            let tgt = match target.as_str() {
                "gaussian" => Target::Gaussian { a },
                "cos" => Target::Cos {
                    omega: omega.unwrap_or(zs.radii()[0]),
                },
                other => return Err(format!("unknown target {other}")),
            };
            let phi = build_phi(&cfg, x_max + 1.0)?;
            let fit_cfg = FitConfig {
                x_max,
                samples,
                ridge_rel: 1e-12,
                weight: WeightRule::InvTheta { m: 1 },
            };
            let model = fit_dirichlet(&tgt, &zs, j, &phi, &fit_cfg).map_err(lib_err)?;
            let psi = cfg.psi.build_grid().map_err(lib_err)?;
            let kw = KWeight::new(psi, wf, sigma).map_err(lib_err)?;
            let decay = coeff_decay_check(&model, &kw).map_err(lib_err)?;

            let mut csv = Csv::new(&["j", "nu", "re_c", "im_c", "abs_c_times_k"]);
            for (idx, ((nu, c), row)) in model
                .frequencies()
                .iter()
                .zip(model.coefficients())
                .zip(&decay.rows)
                .enumerate()
            {
                csv.row(&[(idx + 1) as f64, *nu, c.re, c.im, row.bound_product]);
            }
            csv.write(&out.join("coeffs.csv"))?;

            let xg = fit_sample_grid(&fit_cfg).map_err(lib_err)?;
            let mut csv = Csv::new(&["J", "m", "k_max", "seminorm"]);
            let k_eff = kmax.min(tgt.max_order());
            let mut seminorms = Vec::new();
            for m in 1..=3u32 {
                let rep = residual_seminorm(
                    &model,
                    &tgt,
                    seq.ln_m(),
                    &phi,
                    sigma,
                    EpsRule::from(cfg.eps_rule),
                    m,
                    k_eff,
                    &xg,
                )
                .map_err(lib_err)?;
                csv.row(&[j as f64, m as f64, k_eff as f64, rep.value]);
                seminorms.push(rep);
            }
            csv.write(&out.join("residuals.csv"))?;

            #[derive(Serialize)]
            struct FitResults<'a> {
                sigma: f64,
                model: &'a carleman::represent::DirichletModel,
                seminorms: &'a [carleman::represent::SeminormReport],
                coeff_proxy: f64,
            }
            let warn_cond = model.condition_estimate > 1e12;
            let status = Status::from_flags(true, !warn_cond);
            write_json(
                &out.join("fit.json"),
                &Report {
                    command: "fit",
                    config: &cfg,
                    args: serde_json::json!({
                        "target": target, "a": a, "omega": omega, "J": j,
                        "X": x_max, "samples": samples, "kmax": kmax,
                    }),
                    status,
                    results: FitResults {
                        sigma,
                        model: &model,
                        seminorms: &seminorms,
                        coeff_proxy: decay.c_lambda_proxy,
                    },
                },
            )?;
            Ok(status)
        }
    }
}

fn run_verify(check: VerifyCmd, cfg: &RunConfig, out: &std::path::Path) -> Result<Status, String> {
    match check {
        VerifyCmd::Sandwich { rmax, points } => {
            let rho = cfg.sequence.rho.unwrap_or(1.0);
            let rep = check_sandwich_mstar(rho, rmax, points).map_err(lib_err)?;
            let status = Status::from_flags(rep.passed, true);
            write_json(
                out.join("verify_sandwich.json").as_path(),
                &Report {
                    command: "verify sandwich",
                    config: cfg,
                    args: serde_json::json!({"rmax": rmax, "points": points}),
                    status,
                    results: &rep,
                },
            )?;
            Ok(status)
        }
        VerifyCmd::Lemma1 {} => {
            let seq = build_sequence(&cfg.sequence).map_err(lib_err)?;
            let s_grid = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
            let rep = lemma1_suite(HSource::Discrete(&seq), &s_grid).map_err(lib_err)?;
            let status = Status::from_flags(rep.passed, true);
            write_json(
                out.join("verify_lemma1.json").as_path(),
                &Report {
                    command: "verify lemma1",
                    config: cfg,
                    args: serde_json::json!({"s_grid": s_grid}),
                    status,
                    results: &rep,
                },
            )?;
            Ok(status)
        }
        VerifyCmd::Lemma2 { s } => {
            let seq = build_sequence(&cfg.sequence).map_err(lib_err)?;
            let v = to_vfun(&seq).map_err(lib_err)?;
            let rep = lemma2_agreement(&seq, &v, s).map_err(lib_err)?;
            let status = Status::from_flags(rep.passed, true);
            write_json(
                out.join("verify_lemma2.json").as_path(),
                &Report {
                    command: "verify lemma2",
                    config: cfg,
                    args: serde_json::json!({"s": s}),
                    status,
                    results: &rep,
                },
            )?;
            Ok(status)
        }
        VerifyCmd::Lemma3 { m, a, rmax } => {
            let wf = weight_covering(&cfg.sequence, 1.05 * rmax / cfg.sigma)?;
            let fam =
                WeightFamily::new(wf, cfg.sigma, EpsRule::from(cfg.eps_rule)).map_err(lib_err)?;
            let rs = grid::log_spaced(0.1, rmax, 600).map_err(lib_err)?;
            let rep = lemma3_gap(&fam, m, a, &rs).map_err(lib_err)?;
            let status = Status::from_flags(rep.q.is_finite() && rep.q >= 0.0, rep.stabilized);
            write_json(
                out.join("verify_lemma3.json").as_path(),
                &Report {
                    command: "verify lemma3",
                    config: cfg,
                    args: serde_json::json!({"m": m, "A": a, "rmax": rmax}),
                    status,
                    results: &rep,
                },
            )?;
            Ok(status)
        }
        VerifyCmd::Lemma4 { s, delta, rmax } => {
            // l(s) from the discrete indicator at a tail-heavy K
            let mut h_spec = cfg.sequence.clone();
            if h_spec.kind != SequenceKind::Table {
                h_spec.k = Some(h_spec.k.unwrap_or(0).max(100_000));
            }
            let h_seq = build_sequence(&h_spec).map_err(lib_err)?;
            let l_s = l_of(&h_discrete(&h_seq, s, None).map_err(lib_err)?);
            let scale = l_s * (1.0 - delta);
            let r_needed = (rmax / scale).max(rmax) * 1.05;
            let wf = weight_covering(&cfg.sequence, r_needed)?;
            let rs = grid::log_spaced(0.1, rmax, 600).map_err(lib_err)?;
            let rep = lemma4_gap(&wf, s, delta, l_s, &rs).map_err(lib_err)?;
            #[derive(Serialize)]
            struct Lemma4Results<'a> {
                l_s: f64,
                gap: &'a carleman::weights::GapReport,
            }
            let status = Status::from_flags(rep.q.is_finite() && rep.q >= 0.0, rep.stabilized);
            write_json(
                out.join("verify_lemma4.json").as_path(),
                &Report {
                    command: "verify lemma4",
                    config: cfg,
                    args: serde_json::json!({"s": s, "delta": delta, "rmax": rmax}),
                    status,
                    results: Lemma4Results { l_s, gap: &rep },
                },
            )?;
            Ok(status)
        }
        VerifyCmd::Prop1 { c, eps } => {
            let xs = dense_positive_grid(1.05e4 + 110.0, 128, 400).map_err(lib_err)?;
            let u = ConvexGridFunction::sample(xs, |x| x * x.ln_1p()).map_err(lib_err)?;
            let ys = grid::log_spaced(1.0, 100.0, 24).map_err(lib_err)?;
            let xg = grid::log_spaced(1.0, 1e4, 480).map_err(lib_err)?;
            let mut reports = Vec::new();
            let mut status = Status::Pass;
            for &e in &eps {
                let rep = prop1_check(&u, c, e, &ys, &xg).map_err(lib_err)?;
                status = status.combine(Status::from_flags(
                    rep.curvature_ok && rep.bound_ok,
                    rep.stabilized,
                ));
                reports.push(rep);
            }
            write_json(
                out.join("verify_prop1.json").as_path(),
                &Report {
                    command: "verify prop1",
                    config: cfg,
                    args: serde_json::json!({"C": c, "eps": eps}),
                    status,
                    results: &reports,
                },
            )?;
            Ok(status)
        }
        VerifyCmd::ClassV {} => {
            let seq = build_sequence(&cfg.sequence).map_err(lib_err)?;
            let v = to_vfun(&seq).map_err(lib_err)?;
            let rep = class_v_check(&v, &ClassVConfig::default()).map_err(lib_err)?;
            let stab = rep.v1.stabilized
                && rep.v2.iter().all(|r| r.stabilized)
                && rep.v3.iter().all(|r| r.stabilized);
            let status = Status::from_flags(rep.passed, stab);
            write_json(
                out.join("verify_classv.json").as_path(),
                &Report {
                    command: "verify classV",
                    config: cfg,
                    args: serde_json::json!({}),
                    status,
                    results: &rep,
                },
            )?;
            Ok(status)
        }
        VerifyCmd::Eq2 {} => run_eq(cfg, out, InequalityId::Eq2, InequalityParams::default()),
        VerifyCmd::Eq3 { eps } => run_eq_with_constants(cfg, out, InequalityId::Eq3, eps, None),
        VerifyCmd::Eq4 { eps } => run_eq_with_constants(cfg, out, InequalityId::Eq4, eps, None),
        VerifyCmd::Eq5 { s, eps } => {
            run_eq_with_constants(cfg, out, InequalityId::Eq5, eps, Some(s))
        }
        VerifyCmd::Eq6 { s, eps } => {
            run_eq_with_constants(cfg, out, InequalityId::Eq6, eps, Some(s))
        }
        VerifyCmd::Eq7 { s } => run_eq(
            cfg,
            out,
            InequalityId::Eq7,
            InequalityParams { s: Some(s), ..Default::default() },
        ),
    }
}

fn run_eq(
    cfg: &RunConfig,
    out: &std::path::Path,
    id: InequalityId,
    params: InequalityParams,
) -> Result<Status, String> {
    let seq = build_sequence(&cfg.sequence).map_err(lib_err)?;
    let v = to_vfun(&seq).map_err(lib_err)?;
    let rep = verify_inequality(id, &v, &params).map_err(lib_err)?;
    let status = Status::from_flags(rep.passed, rep.stabilized);
    let name = format!("verify_{id:?}").to_lowercase();
    write_json(
        out.join(format!("{name}.json")).as_path(),
        &Report {
            command: &name,
            config: cfg,
            args: serde_json::json!({"s": params.s, "eps": params.eps}),
            status,
            results: &rep,
        },
    )?;
    Ok(status)
}

fn run_eq_with_constants(
    cfg: &RunConfig,
    out: &std::path::Path,
    id: InequalityId,
    eps: f64,
    s: Option<f64>,
) -> Result<Status, String> {
    let seq = build_sequence(&cfg.sequence).map_err(lib_err)?;
    let v = to_vfun(&seq).map_err(lib_err)?;
    let cv_cfg = ClassVConfig {
        s_values: vec![s.unwrap_or(2.0).max(1.5)],
        eps_values: vec![eps],
    };
    let cv = class_v_check(&v, &cv_cfg).map_err(lib_err)?;
    let row = &cv.v3[0];
    if !row.stabilized {
        let name = format!("verify_{id:?}").to_lowercase();
        write_json(
            out.join(format!("{name}.json")).as_path(),
            &Report {
                command: &name,
                config: cfg,
                args: serde_json::json!({"s": s, "eps": eps}),
                status: Status::Inconclusive,
                results: serde_json::json!({
                    "reason": "constants fit did not stabilize",
                    "v3": row,
                }),
            },
        )?;
        return Ok(Status::Inconclusive);
    }
    let params = InequalityParams {
        s,
        eps: Some(eps),
        a_eps: Some(row.a_eps),
        b_eps: Some(row.b_eps),
    };
    let rep = verify_inequality(id, &v, &params).map_err(lib_err)?;
    #[derive(Serialize)]
    struct EqResults<'a> {
        a_eps: f64,
        b_eps: f64,
        report: &'a carleman::hfun::InequalityReport,
    }
    let status = Status::from_flags(rep.passed, rep.stabilized);
    let name = format!("verify_{id:?}").to_lowercase();
    write_json(
        out.join(format!("{name}.json")).as_path(),
        &Report {
            command: &name,
            config: cfg,
            args: serde_json::json!({"s": s, "eps": eps}),
            status,
            results: EqResults { a_eps: row.a_eps, b_eps: row.b_eps, report: &rep },
        },
    )?;
    Ok(status)
}
