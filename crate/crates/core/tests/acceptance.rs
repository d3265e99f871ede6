//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion on stderr.
//!
//! Lines go straight to the process stderr so they show up even when libtest
//! captures test output. Each check asserts after printing, so a failing
//! criterion also fails `cargo test`.

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use catlab::catalysis::{
    conversion_rate, delta_bound, embezzlement_bound, second_laws, ConversionParams, RateClamp,
};
use catlab::convex_split::{convex_split_bound_raw, verify_convex_split};
use catlab::dilation::{apply_dilation_exact, build_dilation, random_gibbs_stochastic};
use catlab::exact::{self, ExactDist};
use catlab::experiments::{
    classify_target, estimate_f, estimate_psucc, run_experiment, simplex_grid, Experiment,
    SamplerKind, SweepConfig, TargetClass, P_STAR, Q_STAR,
};
use catlab::majorization::{eps_catalytic_step, flattening_saturation, majorizes};
use catlab::simplex::{random_simplex, tensor, trace_distance};
use catlab::{catalysis, AlphaGrid, ProbVec, Seed, ThermalContext};

fn report(name: &str, ok: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let ok = ok && elapsed <= budget;
    let tag = if ok { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr();
    writeln!(
        err,
        "[{tag}] {name}: {detail} ({:.2} s, budget {} s)",
        elapsed.as_secs_f64(),
        budget.as_secs()
    )
    .unwrap();
    assert!(ok, "acceptance criterion failed: {name}: {detail}");
}

fn pv(x: &[f64]) -> ProbVec {
    ProbVec::new(x.to_vec()).unwrap()
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn incomparability_anchor() {
    let t = Instant::now();
    let (p, q) = (pv(&P_STAR), pv(&Q_STAR));
    let ctx = ThermalContext::degenerate(3);
    let laws = second_laws(&p, &q, &ctx, &AlphaGrid::default_grid()).unwrap();
    let incomparable = !majorizes(&p, &q) && !majorizes(&q, &p);
    let ok = incomparable && laws.holds && laws.margin >= 0.0 && laws.strict_margin > 0.0;
    let detail = format!(
        "incomparable = {incomparable}, second laws hold = {}, margin = {:.3e}, margin over alpha > 0 = {:.3e}",
        laws.holds, laws.margin, laws.strict_margin
    );
    report(
        "incomparability anchor",
        ok,
        t.elapsed(),
        Duration::from_secs(1),
        &detail,
    );
}

#[test]
fn convex_split_suite() {
    let t = Instant::now();
    let root = Seed::derive_root(2024, "acceptance/convex-split");
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for i in 0..1000u64 {
        let mut rng = Seed::new(root, i).rng();
        let d = if i % 2 == 0 { 2 } else { 3 };
        let m_max = if d == 2 { 14 } else { 9 };
        let m = rng.random_range(1..=m_max);
        let rho = random_simplex(d, &mut rng);
        let sigma = random_simplex(d, &mut rng);
        let check = verify_convex_split(&rho, &sigma, m).unwrap();
        let raw = convex_split_bound_raw(&rho, &sigma, m).unwrap();
        if check.empirical > raw + 1e-12 {
            violations += 1;
        }
        worst_ratio = worst_ratio.max(check.empirical / raw);
    }
    let detail =
        format!("1000 pairs, {violations} violations, max empirical/bound = {worst_ratio:.4}");
    report(
        "convex-split bound",
        violations == 0,
        t.elapsed(),
        Duration::from_secs(120),
        &detail,
    );
}

#[test]
fn duan_catalyst_chain() {
    // With a trivial Hamiltonian no three-level activation-set pair is ever
    // k-copy transformable (the smaller minimum entry blocks every k), so the
    // population is drawn under the rational Gibbs state (3, 2, 1)/6.
    let t = Instant::now();
    let weights = [3u64, 2, 1];
    let ctx = ThermalContext::from_rational(&weights).unwrap();
    let grid = AlphaGrid::default_grid();
    let root = Seed::derive_root(2024, "acceptance/duan-chain");
    let (mut found, mut passed, mut draws) = (0usize, 0usize, 0u64);
    let mut k_hist = [0usize; 7];
    while found < 200 && draws < 50_000 {
        let mut rng = Seed::new(root, draws).rng();
        draws += 1;
        let ep = ExactDist::round_from(&random_simplex(3, &mut rng), 10_000).unwrap();
        let eq = ExactDist::round_from(&random_simplex(3, &mut rng), 10_000).unwrap();
        let (p, q) = (ep.to_probvec(), eq.to_probvec());
        if classify_target(&p, &q, &ctx, &grid).unwrap().class != TargetClass::CatalyticOnly {
            continue;
        }
        let Some(k) = catalysis::min_k_copy(&p, &q, &ctx, 6).unwrap() else {
            continue;
        };
        found += 1;
        k_hist[k as usize] += 1;
        let (gp, gq) = (ep.embed(&weights).unwrap(), eq.embed(&weights).unwrap());
        if exact::duan_catalysis_check(&gp, &gq, k).unwrap() == (true, true) {
            passed += 1;
        }
    }
    let detail = format!(
        "{passed}/{found} pairs pass exactly (needed 200, {draws} draws), k histogram {:?}",
        &k_hist[1..]
    );
    report(
        "Duan-catalyst chain",
        found == 200 && passed == found,
        t.elapsed(),
        Duration::from_secs(300),
        &detail,
    );
}

#[test]
fn dilation_exactness() {
    let t = Instant::now();
    let root = Seed::derive_root(2024, "acceptance/dilation");
    let (mut marg_ok, mut inv_ok) = (0, 0);
    for i in 0..200u64 {
        let mut rng = Seed::new(root, i).rng();
        let d = rng.random_range(2..=4usize);
        let weights: Vec<u64> = (0..d).map(|_| rng.random_range(1..=3)).collect();
        let ch = random_gibbs_stochastic(&weights, 3, 5, &mut rng).unwrap();
        let dil = build_dilation(&ch).unwrap();
        let nums: Vec<u64> = (0..d).map(|_| rng.random_range(0..=20)).collect();
        let total: u64 = nums.iter().sum::<u64>().max(1);
        let p: Vec<BigRational> = if nums.iter().all(|&x| x == 0) {
            (0..d)
                .map(|_| BigRational::new(BigInt::from(1), BigInt::from(d)))
                .collect()
        } else {
            nums.iter()
                .map(|&x| BigRational::new(BigInt::from(x), BigInt::from(total)))
                .collect()
        };
        if apply_dilation_exact(&dil, &p).unwrap() == ch.apply(&p).unwrap() && dil.is_consistent() {
            marg_ok += 1;
        }
        let shell = dil.embed(&p).unwrap();
        if dil.inverse_permute(&dil.permute(&shell).unwrap()).unwrap() == shell {
            inv_ok += 1;
        }
    }
    let detail = format!("200 channels, exact marginals {marg_ok}/200, exact inverse {inv_ok}/200");
    report(
        "dilation exactness",
        marg_ok == 200 && inv_ok == 200,
        t.elapsed(),
        Duration::from_secs(60),
        &detail,
    );
}

/// Draws a catalyst on the (1/50) lattice and an error on the same lattice
/// below the flattening saturation point, so the flattest state lies on the
/// 0.01 oracle lattice.
fn lattice_instance<R: Rng>(rng: &mut R) -> (ProbVec, f64) {
    loop {
        let a = rng.random_range(0..=50u32);
        let b = rng.random_range(0..=50 - a);
        let c = pv(&[a as f64 / 50.0, b as f64 / 50.0, (50 - a - b) as f64 / 50.0]);
        let sat = flattening_saturation(&c);
        let j_max = ((sat * 50.0 - 1e-9).ceil() as u32).saturating_sub(1);
        if j_max == 0 {
            continue;
        }
        return (c, rng.random_range(1..=j_max) as f64 / 50.0);
    }
}

#[test]
fn approximate_majorization_oracle() {
    let t = Instant::now();
    let lattice = simplex_grid(3, 100).unwrap();
    let ctx = ThermalContext::degenerate(3);
    let root = Seed::derive_root(2024, "acceptance/eps-oracle");
    let (mut unsound, mut step_true, mut oracle_true) = (0, 0, 0);
    for i in 0..500u64 {
        let mut rng = Seed::new(root, i).rng();
        let p = if i % 2 == 0 {
            pv(&P_STAR)
        } else {
            random_simplex(3, &mut rng)
        };
        let q = random_simplex(3, &mut rng);
        let (c, eps) = lattice_instance(&mut rng);
        let step = eps_catalytic_step(&p, &q, &c, eps, &ctx).unwrap();
        let pc = tensor(&p, &c).unwrap();
        let oracle = lattice.iter().any(|ct| {
            trace_distance(&c, ct).unwrap() <= eps + 1e-12
                && majorizes(&pc, &tensor(&q, ct).unwrap())
        });
        step_true += step as usize;
        oracle_true += oracle as usize;
        if step && !oracle {
            unsound += 1;
        }
    }
    let detail = format!(
        "500 instances, step true {step_true}, oracle true {oracle_true}, step-true-oracle-false {unsound}"
    );
    report(
        "approximate-majorization oracle",
        unsound == 0,
        t.elapsed(),
        Duration::from_secs(600),
        &detail,
    );
}

#[test]
fn fig2_trend() {
    let t = Instant::now();
    let base = SweepConfig {
        n_c: 500,
        mu: 0.1,
        ..SweepConfig::default()
    };
    let (p, q) = (pv(&P_STAR), pv(&Q_STAR));
    let mut ok = true;
    let mut parts = Vec::new();
    for sampler in [
        SamplerKind::Rayleigh,
        SamplerKind::Uniform,
        SamplerKind::Exponential,
    ] {
        let curve: Vec<(f64, f64)> = (2..=8)
            .map(|e| {
                let cfg = base.condition(1 << e, sampler).unwrap();
                let est = estimate_psucc(&p, &q, &cfg).unwrap();
                (est.p_succ, est.ci95)
            })
            .collect();
        let monotone = curve
            .windows(2)
            .all(|w| w[1].0 >= w[0].0 - 2.0 * w[0].1.max(w[1].1));
        let mut this_ok = monotone;
        if sampler == SamplerKind::Exponential {
            this_ok &= curve[6].0 - curve[0].0 > 0.1;
        }
        ok &= this_ok;
        let values: Vec<String> = curve.iter().map(|(v, _)| format!("{v:.3}")).collect();
        parts.push(format!(
            "{sampler} [{}] {}",
            values.join(" "),
            if this_ok { "ok" } else { "violated" }
        ));
    }
    report(
        "Fig. 2 trend (mu * eps_bnd)",
        ok,
        t.elapsed(),
        Duration::from_secs(900),
        &parts.join("; "),
    );
}

#[test]
fn fig45_trend() {
    let t = Instant::now();
    let base = SweepConfig {
        n_s: 500,
        n_c: 200,
        mu: 0.1,
        gamma_thd: 0.9,
        ..SweepConfig::default()
    };
    let grid = base.grid().unwrap();
    let p = pv(&P_STAR);
    let mut f = Vec::new();
    for d_c in [16u64, 64, 256] {
        let cfg = base.condition(d_c, SamplerKind::Exponential).unwrap();
        f.push(estimate_f(&p, &cfg, &grid).unwrap().f.unwrap_or(f64::NAN));
    }
    let ok = f[0] < f[2];
    let detail = format!(
        "fraction above 0.9 at d_C = 16, 64, 256: {:.3}, {:.3}, {:.3}",
        f[0], f[1], f[2]
    );
    report(
        "Fig. 4/5 trend",
        ok,
        t.elapsed(),
        Duration::from_secs(2700),
        &detail,
    );
}

#[test]
fn closed_forms() {
    let t = Instant::now();
    let b1 = embezzlement_bound(2, 2);
    let b2 = embezzlement_bound(3, 256);
    // Independent re-evaluation: (d_S − 1)/(1 + (d_S − 1) log₂ d_C) by hand.
    let ok_b = rel_close(b1, 1.0 / (1.0 + 1.0)) && rel_close(b2, 2.0 / (1.0 + 2.0 * 8.0));
    let s = pv(&[0.7, 0.2, 0.1]);
    let ctx = ThermalContext::degenerate(3);
    let rate = conversion_rate(&ConversionParams {
        kappa: 0.5,
        n: 1000,
        source: s.clone(),
        target: s,
        source_ctx: ctx.clone(),
        target_ctx: ctx,
    })
    .unwrap();
    let ok_r = rel_close(rate.r_n, 1.0) && rate.clamp == RateClamp::None;
    let delta = delta_bound(100, 0.5);
    let ok_d = rel_close(delta, (-10.0f64).exp()) && rel_close(b2, 2.0 / 17.0);
    let detail = format!(
        "eps_bnd(2,2) = {b1}, eps_bnd(3,256) = {b2}, r_n(s -> s) = {}, delta(100, 0.5) = {delta:e}",
        rate.r_n
    );
    report(
        "closed forms",
        ok_b && ok_r && ok_d,
        t.elapsed(),
        Duration::from_secs(1),
        &detail,
    );
}

fn small_config(which: Experiment) -> SweepConfig {
    let base = SweepConfig {
        seed: 7,
        n_c: 40,
        n_s: 60,
        d_c: vec![4, 16],
        n_sources: 3,
        boundary_steps: 20,
        ..SweepConfig::default()
    };
    match which {
        Experiment::Fig2 => SweepConfig {
            samplers: vec![
                SamplerKind::Rayleigh,
                SamplerKind::Uniform,
                SamplerKind::Exponential,
            ],
            ..base
        },
        Experiment::Fig3 => SweepConfig {
            d_s: 4,
            n_pairs: 150,
            k_max: 4,
            ..base
        },
        Experiment::Fig6 => SweepConfig {
            qubits: vec![3],
            r_values: vec![0.2],
            ..base
        },
        _ => base,
    }
}

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn determinism() {
    let t = Instant::now();
    let pool = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
    };
    let (one, four) = (pool(1), pool(4));
    let mut failures = Vec::new();
    let mut files = 0;
    for which in Experiment::ALL {
        let cfg = small_config(which);
        let runs: Vec<_> = [&four, &four, &one]
            .iter()
            .map(|p| {
                let dir = tempfile::tempdir().unwrap();
                p.install(|| run_experiment(&cfg, which, dir.path()))
                    .unwrap();
                csv_bytes(dir.path())
            })
            .collect();
        files += runs[0].len();
        if runs[0].is_empty() || runs[0] != runs[1] || runs[0] != runs[2] {
            failures.push(which.name());
        }
    }
    let detail = format!(
        "{} experiments, {files} CSV files, reruns and 1-vs-4 threads byte-identical; mismatches {failures:?}",
        Experiment::ALL.len()
    );
    report(
        "determinism",
        failures.is_empty(),
        t.elapsed(),
        Duration::from_secs(600),
        &detail,
    );
}
