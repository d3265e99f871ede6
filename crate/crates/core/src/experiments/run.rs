//! Sweep drivers that turn a [`SweepConfig`] into CSV/JSON artifacts.
//!
//! Every run writes `summary.json` twice: first with `"complete": false`
//! before any computation, and again at the very end. A directory whose
//! summary still says `false` holds partial or stale output.
//!
//! CSV cells hold shortest round-trip float formatting, so reruns with the
//! same configuration and seed are byte-identical. Wall-clock times go to
//! `timing.json`, the one file that is expected to differ between runs.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{
    classify_target, estimate_f_on, estimate_psucc, kcopy_fraction, psucc_trials, summarize_trials,
    FEstimate, SamplerKind, SweepConfig, TargetClass, TrialOutcome,
};
use crate::catalysis;
use crate::majorization;
use crate::simplex::{self, ProbVec, Seed};
use crate::{Error, Result, VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    /// `p_succ(p, q)` against catalyst dimension, one curve per sampler.
    Fig2,
    /// k-copy share of the catalytic activation set.
    Fig3,
    /// `p_succ(p, q)` over targets `q` for a fixed source.
    Fig4,
    /// `f(p)` over sampled sources, random catalysts.
    Fig5,
    /// `f(p)` over sampled sources, multicopy qubit catalysts.
    Fig6,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Fig2,
        Experiment::Fig3,
        Experiment::Fig4,
        Experiment::Fig5,
        Experiment::Fig6,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Fig6 => "fig6",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub version: String,
    /// SHA-256 of the canonical JSON form of the configuration.
    pub config_sha256: String,
    pub seed: u64,
    pub complete: bool,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
    /// Data rows per CSV file, in the order of `outputs`.
    pub rows: Vec<usize>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

struct Table {
    name: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

struct Trial {
    condition: String,
    index: usize,
    outcome: String,
}

#[derive(Serialize)]
struct Timing {
    condition: String,
    seconds: f64,
}

#[derive(Default)]
struct Output {
    tables: Vec<Table>,
    trials: Vec<Trial>,
    timing: Vec<Timing>,
    warnings: Vec<String>,
}

impl Output {
    fn time<T>(&mut self, condition: String, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t0 = Instant::now();
        let out = f()?;
        self.timing.push(Timing {
            condition,
            seconds: t0.elapsed().as_secs_f64(),
        });
        Ok(out)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn config_digest(cfg: &SweepConfig) -> Result<String> {
    let canonical = serde_json::to_string(cfg)?;
    Ok(hex(&Sha256::digest(canonical.as_bytes())))
}

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x}")
    }
}

fn coords(prefix: char, d: usize) -> Vec<String> {
    (0..d).map(|i| format!("{prefix}{i}")).collect()
}

fn with_columns(base: &[&str], extra: Vec<String>, tail: &[&str]) -> Vec<String> {
    base.iter()
        .map(|s| s.to_string())
        .chain(extra)
        .chain(tail.iter().map(|s| s.to_string()))
        .collect()
}

/// Empirical CDF `P(X ≤ x)` on `x = 0, 0.01, …, 1`. `NaN` values are dropped.
fn cdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    v.sort_by(f64::total_cmp);
    (0..=100)
        .map(|i| {
            let x = i as f64 / 100.0;
            let below = v.partition_point(|&y| y <= x + 1e-12);
            let frac = if v.is_empty() {
                f64::NAN
            } else {
                below as f64 / v.len() as f64
            };
            (x, frac)
        })
        .collect()
}

fn sampled_sources(cfg: &SweepConfig) -> Vec<ProbVec> {
    let root = Seed::derive_root(cfg.seed, "sources");
    (0..cfg.n_sources as u64)
        .map(|i| simplex::random_simplex(cfg.d_s, &mut Seed::new(root, i).rng()))
        .collect()
}

/// Runs one experiment and writes its artifacts into `out_dir`.
///
/// Files: `<fig>.csv` (plus `<fig>_cdf.csv` / `<fig>_summary.csv` where
/// relevant, and `boundary.csv` for three-level fig4 runs), `trials.csv`,
/// `timing.json` and `summary.json`.
pub fn run_experiment(cfg: &SweepConfig, which: Experiment, out_dir: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let digest = config_digest(cfg)?;
    let mut summary = RunSummary {
        experiment: which.name().into(),
        version: VERSION.into(),
        config_sha256: digest.clone(),
        seed: cfg.seed,
        complete: false,
        outputs: Vec::new(),
        rows: Vec::new(),
        warnings: Vec::new(),
        error: None,
    };
    write_summary(out_dir, &summary)?;

    let result = match which {
        Experiment::Fig2 => fig2(cfg),
        Experiment::Fig3 => fig3(cfg),
        Experiment::Fig4 => fig4(cfg),
        Experiment::Fig5 => fig5(cfg),
        Experiment::Fig6 => fig6(cfg),
    };
    let out = match result {
        Ok(o) => o,
        Err(e) => {
            summary.error = Some(e.to_string());
            write_summary(out_dir, &summary)?;
            return Err(e);
        }
    };

    for t in &out.tables {
        let file = format!("{}.csv", t.name);
        let mut w = csv::Writer::from_path(out_dir.join(&file))?;
        w.write_record(&t.header)?;
        for r in &t.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        summary.outputs.push(file);
        summary.rows.push(t.rows.len());
    }

    let mut w = csv::Writer::from_path(out_dir.join("trials.csv"))?;
    w.write_record([
        "experiment",
        "condition",
        "trial",
        "inputs_digest",
        "outcome",
    ])?;
    for t in &out.trials {
        let key = format!("{digest}/{}/{}", t.condition, t.index);
        let d = hex(&Sha256::digest(key.as_bytes())[..8]);
        w.write_record([
            which.name(),
            &t.condition,
            &t.index.to_string(),
            &d,
            &t.outcome,
        ])?;
    }
    w.flush()?;
    summary.outputs.push("trials.csv".into());
    summary.rows.push(out.trials.len());

    fs::write(
        out_dir.join("timing.json"),
        serde_json::to_string_pretty(&out.timing)? + "\n",
    )?;
    summary.outputs.push("timing.json".into());
    summary.rows.push(out.timing.len());

    summary.warnings = out.warnings;
    summary.complete = true;
    write_summary(out_dir, &summary)?;
    Ok(summary)
}

fn write_summary(dir: &Path, s: &RunSummary) -> Result<()> {
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(s)? + "\n",
    )?;
    Ok(())
}

fn fig2(cfg: &SweepConfig) -> Result<Output> {
    let (p, q) = (cfg.source()?, cfg.target()?);
    let mut out = Output::default();
    let mut t = Table::new(
        "fig2",
        &[
            "distribution",
            "d_C",
            "eps_c",
            "p_succ",
            "ci95",
            "n_trials",
            "cap_breaches",
            "seed",
        ],
    );
    for &sampler in &cfg.samplers {
        for &d_c in &cfg.d_c {
            if sampler.implied_dim().is_some_and(|d| d != d_c) {
                out.warnings.push(format!(
                    "skipped {sampler} at d_C = {d_c}: dimension is fixed by the sampler"
                ));
                continue;
            }
            let cond = cfg.condition(d_c, sampler)?;
            let label = format!("{sampler}/d_C={d_c}");
            let outcomes = out.time(label.clone(), || psucc_trials(&p, &q, &cond))?;
            let e = summarize_trials(&outcomes);
            t.rows.push(vec![
                sampler.to_string(),
                d_c.to_string(),
                num(cond.eps_c()),
                num(e.p_succ),
                num(e.ci95),
                e.trials.to_string(),
                e.cap_breaches.to_string(),
                cfg.seed.to_string(),
            ]);
            for (i, o) in outcomes.iter().enumerate() {
                let outcome = match o {
                    TrialOutcome::Success => "success",
                    TrialOutcome::Failure => "failure",
                    TrialOutcome::CapBreach => "cap_breach",
                };
                out.trials.push(Trial {
                    condition: label.clone(),
                    index: i,
                    outcome: outcome.into(),
                });
            }
        }
    }
    out.tables.push(t);
    Ok(out)
}

fn fig3(cfg: &SweepConfig) -> Result<Output> {
    let mut out = Output::default();
    let ctx = cfg.context()?;
    if !ctx.is_uniform() {
        out.warnings
            .push("k-copy study is meant for a trivial Hamiltonian; ctx is not uniform".into());
    }
    let cond = cfg.condition(cfg.d_c[0], SamplerKind::Exponential)?;
    let grid = cfg.grid()?;
    let r = out.time("pairs".into(), || {
        kcopy_fraction(&cond, cfg.k_max, cfg.n_pairs, &grid)
    })?;
    let mut t = Table::new(
        "fig3",
        &[
            "k",
            "fraction",
            "ci95",
            "n_cas",
            "n_pairs",
            "cap_breaches",
            "seed",
        ],
    );
    for row in &r.rows {
        t.rows.push(vec![
            row.k.to_string(),
            num(row.fraction),
            num(row.ci95),
            r.n_cas.to_string(),
            r.n_pairs.to_string(),
            r.cap_breaches.to_string(),
            cfg.seed.to_string(),
        ]);
    }
    for (j, pair) in r.pairs.iter().enumerate() {
        let outcome = match pair.class {
            TargetClass::CatalyticOnly => match (pair.min_k, pair.cap_breach) {
                (Some(k), _) => format!("catalytic_only:k={k}"),
                (None, true) => "catalytic_only:cap_breach".into(),
                (None, false) => "catalytic_only:none".into(),
            },
            c => c.as_str().into(),
        };
        out.trials.push(Trial {
            condition: "pairs".into(),
            index: j,
            outcome,
        });
    }
    out.tables.push(t);
    Ok(out)
}

fn fig4(cfg: &SweepConfig) -> Result<Output> {
    let mut out = Output::default();
    let p = cfg.source()?;
    let ctx = cfg.context()?;
    let grid = cfg.grid()?;
    let d = cfg.d_s;
    let sampler = cfg.samplers[0];
    if cfg.samplers.len() > 1 {
        out.warnings
            .push(format!("fig4 uses only the first sampler ({sampler})"));
    }
    let mode = cfg.target_mode()?;
    let targets = mode.targets(d, Seed::derive_root(cfg.seed, "targets"))?;
    let classes = out.time("classify".into(), || {
        targets
            .par_iter()
            .map(|q| classify_target(&p, q, &ctx, &grid))
            .collect::<Result<Vec<_>>>()
    })?;
    let cas: Vec<usize> = (0..targets.len())
        .filter(|&i| classes[i].class == TargetClass::CatalyticOnly)
        .collect();

    let mut main = Table {
        name: "fig4".into(),
        header: with_columns(
            &["d_C", "target"],
            coords('q', d),
            &[
                "class",
                "grid_sensitive",
                "p_succ",
                "ci95",
                "n_trials",
                "cap_breaches",
            ],
        ),
        rows: Vec::new(),
    };
    let mut cdf_t = Table::new("fig4_cdf", &["d_C", "x", "cdf", "n_cas"]);
    let mut summ = Table::new(
        "fig4_summary",
        &[
            "d_C",
            "eps_c",
            "targets",
            "in_s",
            "in_t",
            "in_d",
            "above_threshold",
            "fraction_above",
            "gamma_thd",
            "cap_breaches",
            "seed",
        ],
    );
    let in_s = classes
        .iter()
        .filter(|c| c.class == TargetClass::Thermal)
        .count();
    for &d_c in &cfg.d_c {
        if sampler.implied_dim().is_some_and(|x| x != d_c) {
            out.warnings.push(format!(
                "skipped d_C = {d_c}: dimension is fixed by {sampler}"
            ));
            continue;
        }
        let cond = cfg.condition(d_c, sampler)?;
        let est = out.time(format!("d_C={d_c}"), || {
            cas.par_iter()
                .map(|&i| estimate_psucc(&p, &targets[i], &cond))
                .collect::<Result<Vec<_>>>()
        })?;
        let mut by_target = vec![None; targets.len()];
        for (&i, e) in cas.iter().zip(&est) {
            by_target[i] = Some(e);
            out.trials.push(Trial {
                condition: format!("d_C={d_c}"),
                index: i,
                outcome: num(e.p_succ),
            });
        }
        for (i, q) in targets.iter().enumerate() {
            let mut row = vec![d_c.to_string(), i.to_string()];
            row.extend(q.iter().map(num));
            row.push(classes[i].class.as_str().into());
            row.push(classes[i].grid_sensitive.to_string());
            match by_target[i] {
                Some(e) => row.extend([
                    num(e.p_succ),
                    num(e.ci95),
                    e.trials.to_string(),
                    e.cap_breaches.to_string(),
                ]),
                None => row.extend([String::new(), String::new(), String::new(), String::new()]),
            }
            main.rows.push(row);
        }
        let values: Vec<f64> = est.iter().map(|e| e.p_succ).collect();
        for (x, c) in cdf(&values) {
            cdf_t
                .rows
                .push(vec![d_c.to_string(), num(x), num(c), cas.len().to_string()]);
        }
        let above = values.iter().filter(|&&v| v >= cfg.gamma_thd).count();
        let frac = if cas.is_empty() {
            f64::NAN
        } else {
            above as f64 / cas.len() as f64
        };
        summ.rows.push(vec![
            d_c.to_string(),
            num(cond.eps_c()),
            targets.len().to_string(),
            in_s.to_string(),
            (in_s + cas.len()).to_string(),
            cas.len().to_string(),
            above.to_string(),
            num(frac),
            num(cfg.gamma_thd),
            est.iter()
                .map(|e| e.cap_breaches)
                .sum::<usize>()
                .to_string(),
            cfg.seed.to_string(),
        ]);
    }
    out.tables.push(main);
    out.tables.push(cdf_t);
    out.tables.push(summ);
    if d == 3 {
        let b = out.time("boundary".into(), || boundary(&p, cfg))?;
        out.tables.push(b);
    }
    Ok(out)
}

/// Lattice points of `S(p)` and `T(p)` that have a lattice neighbour outside
/// the set (points off the simplex count as outside).
fn boundary(p: &ProbVec, cfg: &SweepConfig) -> Result<Table> {
    let ctx = cfg.context()?;
    let grid = cfg.grid()?;
    let n = cfg.boundary_steps as i64;
    let pts: Vec<(i64, i64)> = (0..=n)
        .flat_map(|i| (0..=n - i).map(move |j| (i, j)))
        .collect();
    let member = pts
        .par_iter()
        .map(|&(i, j)| {
            let q = ProbVec::new(vec![
                i as f64 / n as f64,
                j as f64 / n as f64,
                (n - i - j) as f64 / n as f64,
            ])?;
            let s = majorization::thermo_majorizes(p, &q, &ctx)?;
            let t = s || catalysis::second_laws(p, &q, &ctx, &grid)?.holds;
            Ok((s, t))
        })
        .collect::<Result<Vec<_>>>()?;
    let idx = |i: i64, j: i64| -> Option<usize> {
        if i < 0 || j < 0 || i + j > n {
            return None;
        }
        // Row i starts after rows 0..i, which hold n+1, n, … points.
        let start = i * (n + 1) - i * (i - 1) / 2;
        Some((start + j) as usize)
    };
    let nbrs = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];
    let mut t = Table::new("boundary", &["set", "q0", "q1", "q2"]);
    for (set, pick) in [("S", 0usize), ("T", 1)] {
        let inside = |k: usize| if pick == 0 { member[k].0 } else { member[k].1 };
        for (k, &(i, j)) in pts.iter().enumerate() {
            if !inside(k) {
                continue;
            }
            let edge = nbrs
                .iter()
                .any(|&(di, dj)| idx(i + di, j + dj).is_none_or(|m| !inside(m)));
            if edge {
                t.rows.push(vec![
                    set.into(),
                    num(i as f64 / n as f64),
                    num(j as f64 / n as f64),
                    num((n - i - j) as f64 / n as f64),
                ]);
            }
        }
    }
    Ok(t)
}

fn f_row(prefix: Vec<String>, source: usize, p: &ProbVec, e: &FEstimate) -> Vec<String> {
    let k = &e.counts;
    let mut row = prefix;
    row.push(source.to_string());
    row.extend(p.iter().map(num));
    row.extend([
        e.f.map(num).unwrap_or_default(),
        k.sampled.to_string(),
        k.in_s.to_string(),
        k.in_t.to_string(),
        k.in_d.to_string(),
        k.above_threshold.to_string(),
        k.grid_sensitive.to_string(),
        k.cap_breaches.to_string(),
    ]);
    row
}

const F_TAIL: [&str; 8] = [
    "f",
    "sampled",
    "in_s",
    "in_t",
    "in_d",
    "above_threshold",
    "grid_sensitive",
    "cap_breaches",
];

fn f_sweep(
    cfg: &SweepConfig,
    out: &mut Output,
    label: &str,
    cond: &super::ExperimentConfig,
    sources: &[ProbVec],
    targets: &[ProbVec],
) -> Result<Vec<FEstimate>> {
    let grid = cfg.grid()?;
    let est = out.time(label.into(), || {
        sources
            .iter()
            .map(|p| estimate_f_on(p, targets, cond, &grid))
            .collect::<Result<Vec<_>>>()
    })?;
    for (i, e) in est.iter().enumerate() {
        out.trials.push(Trial {
            condition: label.into(),
            index: i,
            outcome: e.f.map(num).unwrap_or_else(|| "undefined".into()),
        });
    }
    Ok(est)
}

fn fig5(cfg: &SweepConfig) -> Result<Output> {
    let mut out = Output::default();
    if cfg.d_s >= 4 {
        out.warnings.push(format!(
            "d_S = {} runs are expensive at full scale; expect long runtimes",
            cfg.d_s
        ));
    }
    let sampler = cfg.samplers[0];
    if cfg.samplers.len() > 1 {
        out.warnings
            .push(format!("fig5 uses only the first sampler ({sampler})"));
    }
    let d = cfg.d_s;
    let sources = sampled_sources(cfg);
    let targets = cfg
        .target_mode()?
        .targets(d, Seed::derive_root(cfg.seed, "targets"))?;
    let mut main = Table {
        name: "fig5".into(),
        header: with_columns(
            &["mu", "gamma_thd", "d_C", "source"],
            coords('p', d),
            &F_TAIL,
        ),
        rows: Vec::new(),
    };
    let mut cdf_t = Table::new(
        "fig5_cdf",
        &["mu", "gamma_thd", "d_C", "x", "cdf", "n_defined"],
    );
    for (mu, gamma) in cfg.mu_gamma_pairs() {
        for &d_c in &cfg.d_c {
            let mut cond = cfg.condition(d_c, sampler)?;
            cond.mu = mu;
            cond.gamma_thd = gamma;
            let label = format!("mu={mu}/gamma={gamma}/d_C={d_c}");
            let est = f_sweep(cfg, &mut out, &label, &cond, &sources, &targets)?;
            let prefix = vec![num(mu), num(gamma), d_c.to_string()];
            for (i, e) in est.iter().enumerate() {
                main.rows.push(f_row(prefix.clone(), i, &sources[i], e));
            }
            let fs: Vec<f64> = est.iter().map(|e| e.f.unwrap_or(f64::NAN)).collect();
            let defined = fs.iter().filter(|x| !x.is_nan()).count();
            for (x, c) in cdf(&fs) {
                let mut row = prefix.clone();
                row.extend([num(x), num(c), defined.to_string()]);
                cdf_t.rows.push(row);
            }
        }
    }
    out.tables.push(main);
    out.tables.push(cdf_t);
    Ok(out)
}

fn fig6(cfg: &SweepConfig) -> Result<Output> {
    let mut out = Output::default();
    let d = cfg.d_s;
    let sources = sampled_sources(cfg);
    let targets = cfg
        .target_mode()?
        .targets(d, Seed::derive_root(cfg.seed, "targets"))?;
    let mut main = Table {
        name: "fig6".into(),
        header: with_columns(&["n", "r", "d_C", "source"], coords('p', d), &F_TAIL),
        rows: Vec::new(),
    };
    let mut cdf_t = Table::new("fig6_cdf", &["n", "r", "d_C", "x", "cdf", "n_defined"]);
    for &n in &cfg.qubits {
        for &r in &cfg.r_values {
            let sampler = SamplerKind::Multicopy { r, n };
            sampler.validate()?;
            let d_c = 1u64 << n;
            let cond = cfg.condition(d_c, sampler)?;
            let label = format!("n={n}/r={r}");
            let est = f_sweep(cfg, &mut out, &label, &cond, &sources, &targets)?;
            let prefix = vec![n.to_string(), num(r), d_c.to_string()];
            for (i, e) in est.iter().enumerate() {
                main.rows.push(f_row(prefix.clone(), i, &sources[i], e));
            }
            let fs: Vec<f64> = est.iter().map(|e| e.f.unwrap_or(f64::NAN)).collect();
            let defined = fs.iter().filter(|x| !x.is_nan()).count();
            for (x, c) in cdf(&fs) {
                let mut row = prefix.clone();
                row.extend([num(x), num(c), defined.to_string()]);
                cdf_t.rows.push(row);
            }
        }
    }
    out.tables.push(main);
    out.tables.push(cdf_t);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("fig7".parse::<Experiment>().is_err());
    }

    #[test]
    fn cdf_examples() {
        let c = cdf(&[0.0, 0.5, 0.5, 1.0, f64::NAN]);
        assert_eq!(c.len(), 101);
        assert_eq!(c[0], (0.0, 0.25));
        assert_eq!(c[49].1, 0.25);
        assert_eq!(c[50].1, 0.75);
        assert_eq!(c[100].1, 1.0);
        assert!(cdf(&[]).iter().all(|(_, y)| y.is_nan()));
    }

    #[test]
    fn number_cells() {
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(f64::NAN), "");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(2.0), "2");
    }

    #[test]
    fn digest_tracks_config() {
        let a = SweepConfig::default();
        let b = SweepConfig {
            seed: 1,
            ..a.clone()
        };
        assert_eq!(
            config_digest(&a).unwrap(),
            config_digest(&a.clone()).unwrap()
        );
        assert_ne!(config_digest(&a).unwrap(), config_digest(&b).unwrap());
        assert_eq!(config_digest(&a).unwrap().len(), 64);
    }
}
