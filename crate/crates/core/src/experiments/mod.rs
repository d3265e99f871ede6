//! Monte Carlo studies of random catalysts.
//!
//! Every estimator is a pure function of its configuration: trial `i` of a
//! condition draws from `Seed { root, stream: i }` with the root derived from
//! the configured seed and a fixed tag. Trials run in parallel and are reduced
//! by counting, so results do not depend on scheduling.
//!
//! Catalysts are shared across targets (common random numbers): for a given
//! seed, sampler and catalyst dimension, every target sees the same catalysts.

mod presets;
mod run;
mod sampling;

pub use presets::{preset, preset_names, Preset};
pub use run::{config_digest, run_experiment, Experiment, RunSummary};
pub use sampling::{sample_catalyst, simplex_grid, SamplerKind, TargetMode};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalysis;
use crate::entropy::{AlphaGrid, ThermalContext};
use crate::majorization;
use crate::simplex::{ProbVec, Seed};
use crate::{Error, Result};

/// One experimental condition.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub d_s: usize,
    pub d_c: u64,
    /// Catalyst error as a fraction of the embezzlement bound.
    pub mu: f64,
    /// Fixed catalyst error; overrides `mu` when set.
    pub eps_fixed: Option<f64>,
    pub gamma_thd: f64,
    pub n_c: usize,
    pub n_s: usize,
    pub sampler: SamplerKind,
    pub seed: u64,
    pub ctx: ThermalContext,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d_s < 2 {
            return Err(Error::Config("d_s must be at least 2".into()));
        }
        if self.ctx.dim() != self.d_s {
            return Err(Error::Config(format!(
                "thermal context has {} levels, d_s is {}",
                self.ctx.dim(),
                self.d_s
            )));
        }
        if self.d_c < 2 {
            return Err(Error::Config("d_c must be at least 2".into()));
        }
        if !(0.0..1.0).contains(&self.mu) {
            return Err(Error::Config(format!(
                "mu must lie in [0, 1), got {}",
                self.mu
            )));
        }
        if let Some(e) = self.eps_fixed {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::Config(format!("eps_c must lie in [0, 1], got {e}")));
            }
        }
        if !(self.gamma_thd > 0.0 && self.gamma_thd <= 1.0) {
            return Err(Error::Config(format!(
                "gamma_thd must lie in (0, 1], got {}",
                self.gamma_thd
            )));
        }
        if self.n_c == 0 || self.n_s == 0 {
            return Err(Error::Config("trial counts must be at least 1".into()));
        }
        self.sampler.validate()?;
        if let Some(d) = self.sampler.implied_dim() {
            if d != self.d_c {
                return Err(Error::Config(format!(
                    "sampler {} implies d_c = {d}, configured {}",
                    self.sampler, self.d_c
                )));
            }
        }
        Ok(())
    }

    /// `μ · ε_bnd(d_S, d_C)`, or the fixed error if one is set.
    pub fn eps_c(&self) -> f64 {
        self.eps_fixed
            .unwrap_or_else(|| self.mu * catalysis::embezzlement_bound(self.d_s as u64, self.d_c))
    }

    fn catalyst_root(&self) -> u64 {
        Seed::derive_root(
            self.seed,
            &format!("catalyst/{}/{}", self.sampler, self.d_c),
        )
    }

    fn target_root(&self) -> u64 {
        Seed::derive_root(self.seed, "targets")
    }

    /// Catalyst `i` of this condition.
    pub fn catalyst(&self, i: usize) -> Result<ProbVec> {
        sample_catalyst(
            self.sampler,
            self.d_c,
            Seed::new(self.catalyst_root(), i as u64),
        )
    }
}

/// Half-width of the normal-approximation 95% interval.
pub fn ci95(p_hat: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    1.96 * (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsuccEstimate {
    /// Success fraction over trials that did not hit the dimension cap
    /// (`NaN` when none completed).
    pub p_succ: f64,
    pub ci95: f64,
    pub successes: usize,
    pub trials: usize,
    pub cap_breaches: usize,
}

/// Outcome of one sampled-catalyst trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Success,
    Failure,
    CapBreach,
}

/// Per-catalyst outcomes of the approximate catalytic test, in trial order.
pub fn psucc_trials(p: &ProbVec, q: &ProbVec, cfg: &ExperimentConfig) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    let eps = cfg.eps_c();
    let n = if cfg.sampler.is_random() { cfg.n_c } else { 1 };
    (0..n)
        .into_par_iter()
        .map(|i| {
            let c = cfg.catalyst(i)?;
            match majorization::eps_catalytic_step(p, q, &c, eps, &cfg.ctx) {
                Ok(true) => Ok(TrialOutcome::Success),
                Ok(false) => Ok(TrialOutcome::Failure),
                Err(e) if e.is_resource_limit() => Ok(TrialOutcome::CapBreach),
                Err(e) => Err(e),
            }
        })
        .collect()
}

pub fn summarize_trials(outcomes: &[TrialOutcome]) -> PsuccEstimate {
    let successes = outcomes
        .iter()
        .filter(|&&o| o == TrialOutcome::Success)
        .count();
    let cap_breaches = outcomes
        .iter()
        .filter(|&&o| o == TrialOutcome::CapBreach)
        .count();
    let trials = outcomes.len() - cap_breaches;
    let p_succ = if trials == 0 {
        f64::NAN
    } else {
        successes as f64 / trials as f64
    };
    PsuccEstimate {
        p_succ,
        ci95: ci95(p_succ, trials),
        successes,
        trials,
        cap_breaches,
    }
}

/// Fraction of sampled catalysts `c` for which `p ⊗ c → q ⊗ c̃` with `c̃` the
/// ε-flattest state of `c` and `ε = μ ε_bnd`. A multicopy sampler is
/// deterministic, so a single trial is run and the estimate is 0 or 1.
pub fn estimate_psucc(p: &ProbVec, q: &ProbVec, cfg: &ExperimentConfig) -> Result<PsuccEstimate> {
    Ok(summarize_trials(&psucc_trials(p, q, cfg)?))
}

/// Where a target sits relative to a source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetClass {
    /// Reachable without a catalyst.
    Thermal,
    /// Reachable only with a catalyst: the catalytic activation set.
    CatalyticOnly,
    Unreachable,
}

impl TargetClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TargetClass::Thermal => "thermal",
            TargetClass::CatalyticOnly => "catalytic_only",
            TargetClass::Unreachable => "unreachable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub class: TargetClass,
    /// The second-law margin was too close to zero to trust the grid.
    pub grid_sensitive: bool,
}

pub fn classify_target(
    p: &ProbVec,
    q: &ProbVec,
    ctx: &ThermalContext,
    grid: &AlphaGrid,
) -> Result<Classification> {
    if majorization::thermo_majorizes(p, q, ctx)? {
        return Ok(Classification {
            class: TargetClass::Thermal,
            grid_sensitive: false,
        });
    }
    let laws = catalysis::second_laws(p, q, ctx, grid)?;
    Ok(Classification {
        class: if laws.holds {
            TargetClass::CatalyticOnly
        } else {
            TargetClass::Unreachable
        },
        grid_sensitive: laws.grid_sensitive,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FCounts {
    pub sampled: usize,
    pub in_s: usize,
    pub in_t: usize,
    pub in_d: usize,
    pub above_threshold: usize,
    pub grid_sensitive: usize,
    pub cap_breaches: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FEstimate {
    /// `None` when the catalytic activation set is empty.
    pub f: Option<f64>,
    pub counts: FCounts,
    /// `(target, p_succ)` for every target in the activation set.
    pub cas: Vec<(ProbVec, PsuccEstimate)>,
}

/// Fraction of the sampled activation set reachable with `p_succ ≥ γ_thd`,
/// targets drawn uniformly from the simplex (`N_S` of them).
pub fn estimate_f(p: &ProbVec, cfg: &ExperimentConfig, grid: &AlphaGrid) -> Result<FEstimate> {
    cfg.validate()?;
    let targets = TargetMode::Sample { count: cfg.n_s }.targets(cfg.d_s, cfg.target_root())?;
    estimate_f_on(p, &targets, cfg, grid)
}

/// [`estimate_f`] over an explicit list of targets.
pub fn estimate_f_on(
    p: &ProbVec,
    targets: &[ProbVec],
    cfg: &ExperimentConfig,
    grid: &AlphaGrid,
) -> Result<FEstimate> {
    cfg.validate()?;
    let classes = targets
        .par_iter()
        .map(|q| classify_target(p, q, &cfg.ctx, grid))
        .collect::<Result<Vec<_>>>()?;
    let mut counts = FCounts {
        sampled: targets.len(),
        ..FCounts::default()
    };
    let mut cas = Vec::new();
    for (q, c) in targets.iter().zip(&classes) {
        counts.grid_sensitive += c.grid_sensitive as usize;
        match c.class {
            TargetClass::Thermal => {
                counts.in_s += 1;
                counts.in_t += 1;
            }
            TargetClass::CatalyticOnly => {
                counts.in_t += 1;
                counts.in_d += 1;
                cas.push(q.clone());
            }
            TargetClass::Unreachable => {}
        }
    }
    let estimates = cas
        .par_iter()
        .map(|q| estimate_psucc(p, q, cfg))
        .collect::<Result<Vec<_>>>()?;
    for e in &estimates {
        counts.cap_breaches += e.cap_breaches;
        if e.p_succ >= cfg.gamma_thd {
            counts.above_threshold += 1;
        }
    }
    let f = (counts.in_d > 0).then(|| counts.above_threshold as f64 / counts.in_d as f64);
    Ok(FEstimate {
        f,
        counts,
        cas: cas.into_iter().zip(estimates).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KCopyRow {
    pub k: u32,
    pub fraction: f64,
    pub ci95: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KCopyPair {
    pub p: ProbVec,
    pub q: ProbVec,
    pub class: TargetClass,
    /// Smallest k found (`None`: none up to `k_max`, or a cap breach).
    pub min_k: Option<u32>,
    pub cap_breach: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KCopyFraction {
    pub rows: Vec<KCopyRow>,
    pub n_pairs: usize,
    pub n_cas: usize,
    pub cap_breaches: usize,
    pub pairs: Vec<KCopyPair>,
}

/// Among uniformly sampled pairs in the catalytic activation set, the share
/// with `p^{⊗i} ≻_T q^{⊗i}` for some `i ≤ k`, for `k = 1..=k_max`.
pub fn kcopy_fraction(
    cfg: &ExperimentConfig,
    k_max: u32,
    n_pairs: usize,
    grid: &AlphaGrid,
) -> Result<KCopyFraction> {
    let root = Seed::derive_root(cfg.seed, "pairs");
    let pairs = (0..n_pairs as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = Seed::new(root, j).rng();
            let p = crate::simplex::random_simplex(cfg.d_s, &mut rng);
            let q = crate::simplex::random_simplex(cfg.d_s, &mut rng);
            let class = classify_target(&p, &q, &cfg.ctx, grid)?.class;
            let (min_k, cap_breach) = if class == TargetClass::CatalyticOnly {
                match catalysis::min_k_copy(&p, &q, &cfg.ctx, k_max) {
                    Ok(k) => (k, false),
                    Err(e) if e.is_resource_limit() => (None, true),
                    Err(e) => return Err(e),
                }
            } else {
                (None, false)
            };
            Ok(KCopyPair {
                p,
                q,
                class,
                min_k,
                cap_breach,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cas: Vec<&KCopyPair> = pairs
        .iter()
        .filter(|p| p.class == TargetClass::CatalyticOnly)
        .collect();
    let n_cas = cas.len();
    let rows = (1..=k_max)
        .map(|k| {
            let hit = cas
                .iter()
                .filter(|p| p.min_k.is_some_and(|m| m <= k))
                .count();
            let fraction = if n_cas == 0 {
                f64::NAN
            } else {
                hit as f64 / n_cas as f64
            };
            KCopyRow {
                k,
                fraction,
                ci95: ci95(fraction, n_cas),
            }
        })
        .collect();
    Ok(KCopyFraction {
        rows,
        n_pairs,
        n_cas,
        cap_breaches: pairs.iter().filter(|p| p.cap_breach).count(),
        pairs,
    })
}

/// Configure rayon's global pool from `CATLAB_THREADS`, if set. Safe to call
/// more than once; later calls are ignored.
pub fn init_thread_pool() {
    if let Some(n) = std::env::var("CATLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// File-level sweep configuration: scalar settings plus the lists each
/// experiment iterates over. Every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub seed: u64,
    pub d_s: usize,
    pub d_c: Vec<u64>,
    pub samplers: Vec<SamplerKind>,
    pub mu: f64,
    /// Fixed catalyst error (trace distance) used instead of `μ ε_bnd`.
    pub eps_c: Option<f64>,
    pub gamma_thd: f64,
    /// Extra `(μ, γ_thd)` settings swept by the arbitrary-source study; empty
    /// means just `(mu, gamma_thd)`.
    pub mu_gamma: Vec<[f64; 2]>,
    pub n_c: usize,
    pub n_s: usize,
    /// Source state; defaults to (0.65, 0.2, 0.15) when `d_s = 3`.
    pub p: Option<Vec<f64>>,
    /// Target state for the fixed-pair sweep; defaults to (0.5, 0.4, 0.1).
    pub q: Option<Vec<f64>>,
    /// Thermal context JSON; defaults to a trivial Hamiltonian.
    pub ctx: Option<serde_json::Value>,
    /// `grid:Δ` or `sample:N`; defaults to `sample:<n_s>`.
    pub targets: Option<String>,
    pub k_max: u32,
    pub n_pairs: usize,
    /// Number of sampled source states in the arbitrary-source sweeps.
    pub n_sources: usize,
    /// Qubit counts of the multicopy catalysts.
    pub qubits: Vec<u32>,
    /// Values of `r` for the multicopy catalysts.
    pub r_values: Vec<f64>,
    pub alpha_grid: String,
    /// Lattice resolution of the emitted S/T boundary (three-level systems only).
    pub boundary_steps: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            d_s: 3,
            d_c: vec![16, 64, 256],
            samplers: vec![SamplerKind::Exponential],
            mu: 0.1,
            eps_c: None,
            gamma_thd: 0.9,
            mu_gamma: Vec::new(),
            n_c: 500,
            n_s: 2000,
            p: None,
            q: None,
            ctx: None,
            targets: None,
            k_max: 8,
            n_pairs: 2000,
            n_sources: 50,
            qubits: vec![4, 8, 10],
            r_values: vec![0.1, 0.2, 0.3, 0.4],
            alpha_grid: "default".into(),
            boundary_steps: 200,
        }
    }
}

pub const P_STAR: [f64; 3] = [0.65, 0.2, 0.15];
pub const Q_STAR: [f64; 3] = [0.5, 0.4, 0.1];

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.context()?;
        self.grid()?;
        self.target_mode()?;
        if self.d_c.is_empty() {
            return Err(Error::Config("d_c list is empty".into()));
        }
        for s in &self.samplers {
            s.validate()?;
        }
        if self.k_max == 0 || self.n_pairs == 0 || self.n_sources == 0 {
            return Err(Error::Config(
                "k_max, n_pairs and n_sources must be positive".into(),
            ));
        }
        if self.r_values.iter().any(|r| !(0.0..0.5).contains(r)) {
            return Err(Error::Config(
                "multicopy r values must lie in [0, 0.5)".into(),
            ));
        }
        for &d_c in &self.d_c {
            for (mu, gamma) in self.mu_gamma_pairs() {
                let mut c = self.condition(d_c, SamplerKind::Exponential)?;
                c.mu = mu;
                c.gamma_thd = gamma;
                c.validate()?;
            }
        }
        Ok(())
    }

    pub fn mu_gamma_pairs(&self) -> Vec<(f64, f64)> {
        if self.mu_gamma.is_empty() {
            vec![(self.mu, self.gamma_thd)]
        } else {
            self.mu_gamma.iter().map(|&[m, g]| (m, g)).collect()
        }
    }

    pub fn context(&self) -> Result<ThermalContext> {
        let ctx = match &self.ctx {
            None => ThermalContext::degenerate(self.d_s.max(1)),
            Some(v) => {
                ThermalContext::from_json_value(v).map_err(|e| Error::Config(e.to_string()))?
            }
        };
        if ctx.dim() != self.d_s {
            return Err(Error::Config(format!(
                "ctx has {} levels, d_s is {}",
                ctx.dim(),
                self.d_s
            )));
        }
        Ok(ctx)
    }

    pub fn grid(&self) -> Result<AlphaGrid> {
        self.alpha_grid
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))
    }

    pub fn target_mode(&self) -> Result<TargetMode> {
        match &self.targets {
            None => Ok(TargetMode::Sample {
                count: self.n_s.max(1),
            }),
            Some(s) => s.parse().map_err(|e: Error| Error::Config(e.to_string())),
        }
    }

    fn state(&self, given: &Option<Vec<f64>>, default: [f64; 3], name: &str) -> Result<ProbVec> {
        let v = match given {
            Some(v) => ProbVec::new(v.clone())?,
            None if self.d_s == 3 => ProbVec::new(default.to_vec())?,
            None => {
                return Err(Error::Config(format!(
                    "{name} must be given when d_s is not 3"
                )))
            }
        };
        if v.dim() != self.d_s {
            return Err(Error::Config(format!(
                "{name} has dimension {}, d_s is {}",
                v.dim(),
                self.d_s
            )));
        }
        Ok(v)
    }

    pub fn source(&self) -> Result<ProbVec> {
        self.state(&self.p, P_STAR, "p")
    }

    pub fn target(&self) -> Result<ProbVec> {
        self.state(&self.q, Q_STAR, "q")
    }

    /// The single condition at catalyst dimension `d_c` drawn with `sampler`.
    pub fn condition(&self, d_c: u64, sampler: SamplerKind) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            d_s: self.d_s,
            d_c,
            mu: self.mu,
            eps_fixed: self.eps_c,
            gamma_thd: self.gamma_thd,
            n_c: self.n_c,
            n_s: self.n_s,
            sampler,
            seed: self.seed,
            ctx: self.context()?,
        })
    }
}
