//! `catlab`: command-line front end for the catalysis numerics.
//!
//! Exit codes: 0 computed (or positive decision), 1 negative decision of a
//! boolean check, 2 usage or input error, 3 resource cap reached.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use catlab::catalysis::{self, ConversionParams};
use catlab::convex_split::verify_convex_split;
use catlab::dilation::{apply_dilation_exact, build_dilation, parse_rational, RationalChannel};
use catlab::exact::{self, ExactDist};
use catlab::experiments::{self, preset, preset_names, Experiment, SweepConfig};
use catlab::majorization;
use catlab::{AlphaGrid, Error, ProbVec, ThermalContext};

#[derive(Parser)]
#[command(
    name = "catlab",
    version,
    about = "Majorization and catalysis numerics for quantum thermodynamics"
)]
struct Cli {
    /// Print exactly one JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Largest number of entries any intermediate vector may have.
    #[arg(long, global = true, value_name = "ENTRIES")]
    dim_cap: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-shot conversion checks.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Second laws, Duan catalysts, k-copy search and closed-form bounds.
    #[command(subcommand)]
    Catalysis(CatalysisCmd),
    /// Convex-split bound checks.
    #[command(subcommand)]
    Convexsplit(ConvexSplitCmd),
    /// Build and verify a permutation dilation of a Gibbs-stochastic channel.
    Dilate(DilateArgs),
    /// Run a Monte Carlo experiment and write its CSV artifacts.
    Exp(ExpArgs),
    /// Shipped experiment configurations.
    #[command(subcommand)]
    Presets(PresetsCmd),
}

/// A pair of states on the same system, with an optional thermal context.
#[derive(Args)]
struct Pair {
    /// Source state: `0.6,0.4` or `{"p":[0.6,0.4]}`.
    #[arg(long, value_parser = parse_state)]
    p: ProbVec,
    /// Target state, same forms as `--p`.
    #[arg(long, value_parser = parse_state)]
    q: ProbVec,
    /// Thermal context JSON; defaults to a trivial Hamiltonian.
    #[arg(long, value_parser = parse_ctx)]
    ctx: Option<ThermalContext>,
}

impl Pair {
    fn context(&self) -> ThermalContext {
        self.ctx
            .clone()
            .unwrap_or_else(|| ThermalContext::degenerate(self.p.dim()))
    }

    fn inputs(&self) -> Value {
        json!({ "p": self.p, "q": self.q, "ctx": self.context().to_json_value() })
    }
}

#[derive(Subcommand)]
enum CheckCmd {
    /// `p ≻ q` (plain majorization).
    Majorize(Pair),
    /// `p ≻_T q` with respect to the Gibbs state of `--ctx`.
    Tmajorize(Pair),
    /// `p ⊗ c ≻_T q ⊗ c̃` with `c̃` the ε-flattest state of `c`.
    EpsStep {
        #[command(flatten)]
        pair: Pair,
        /// Catalyst state.
        #[arg(long, value_parser = parse_state)]
        c: ProbVec,
        /// Allowed trace distance on the catalyst.
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Subcommand)]
enum CatalysisCmd {
    /// Generalized free energies `F_α(p) ≥ F_α(q)` on an α-grid.
    SecondLaws {
        #[command(flatten)]
        pair: Pair,
        /// `default` or a list such as `0,0.5,1,2,inf`.
        #[arg(long, default_value = "default", value_parser = parse_grid)]
        alpha_grid: AlphaGrid,
    },
    /// k-copy and Duan-catalyst checks at a given `k`.
    Duan {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        k: u32,
        /// Round `p` and `q` to this common denominator and decide exactly.
        /// Needs a trivial or rational Gibbs state.
        #[arg(long)]
        exact_den: Option<u128>,
    },
    /// Smallest `k` with `p^{⊗k} ≻_T q^{⊗k}`.
    MinK {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = catalysis::DEFAULT_K_MAX)]
        k_max: u32,
    },
    /// Embezzlement bound and, given a source and target, the finite-n rate.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    d_s: u64,
    #[arg(long)]
    d_c: u64,
    /// Fraction of the embezzlement bound used as catalyst error.
    #[arg(long, default_value_t = 0.1)]
    mu: f64,
    /// Source state for the conversion rate.
    #[arg(long, value_parser = parse_state, requires = "target")]
    source: Option<ProbVec>,
    /// Target state for the conversion rate.
    #[arg(long, value_parser = parse_state, requires = "source")]
    target: Option<ProbVec>,
    #[arg(long, value_parser = parse_ctx)]
    source_ctx: Option<ThermalContext>,
    #[arg(long, value_parser = parse_ctx)]
    target_ctx: Option<ThermalContext>,
    #[arg(long, default_value_t = 1000)]
    n: u64,
    #[arg(long, default_value_t = 0.5)]
    kappa: f64,
}

#[derive(Subcommand)]
enum ConvexSplitCmd {
    /// Empirical trace distance against the bound for `m = 1..=m_max`.
    Verify {
        #[arg(long, value_parser = parse_state)]
        rho: ProbVec,
        #[arg(long, value_parser = parse_state)]
        sigma: ProbVec,
        #[arg(long)]
        m_max: u32,
    },
}

#[derive(Args)]
struct DilateArgs {
    /// Square JSON array of rationals, `rows[i][j] = r(j|i)`.
    #[arg(long)]
    channel: String,
    /// JSON array of rational Gibbs weights.
    #[arg(long)]
    gibbs: String,
}

#[derive(Args)]
struct ExpArgs {
    /// fig2, fig3, fig4, fig5 or fig6.
    #[arg(value_parser = parse_experiment)]
    experiment: Experiment,
    /// JSON sweep configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Shipped configuration (see `presets list`); defaults to the experiment's own.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Root seed; overrides the configuration's.
    #[arg(long)]
    seed: u64,
    /// Override the catalyst sample count.
    #[arg(long)]
    n_c: Option<usize>,
    /// Override the target sample count.
    #[arg(long)]
    n_s: Option<usize>,
    /// Override the target mode: `grid:<step>` or `sample:<n>`.
    #[arg(long)]
    targets: Option<String>,
    /// Fixed catalyst error instead of `mu` times the embezzlement bound.
    #[arg(long)]
    eps_c: Option<f64>,
}

#[derive(Subcommand)]
enum PresetsCmd {
    /// Names and descriptions of the shipped configurations.
    List,
    /// The full configuration of one preset.
    Show { name: String },
}

fn parse_state(s: &str) -> Result<ProbVec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_ctx(s: &str) -> Result<ThermalContext, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<AlphaGrid, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a command produced: a JSON record, optional human-readable text for
/// non-JSON mode, and the exit code.
struct Report {
    json: Value,
    text: Option<String>,
    code: u8,
}

impl Report {
    fn decision(json: Value, result: bool) -> Self {
        Report {
            json,
            text: None,
            code: if result { 0 } else { 1 },
        }
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(e) if e.is_resource_limit() => 3,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

fn check(cmd: CheckCmd) -> Outcome {
    match cmd {
        CheckCmd::Majorize(pair) => {
            let result = majorization::majorizes(&pair.p, &pair.q);
            let margin = majorization::majorization_margin(&pair.p, &pair.q);
            Ok(Report::decision(
                json!({ "result": result, "margin": margin }),
                result,
            ))
        }
        CheckCmd::Tmajorize(pair) => {
            let ctx = pair.context();
            let margin = majorization::tm_margin(&pair.p, &pair.q, &ctx)?;
            let result = majorization::thermo_majorizes(&pair.p, &pair.q, &ctx)?;
            Ok(Report::decision(
                json!({ "result": result, "margin": margin }),
                result,
            ))
        }
        CheckCmd::EpsStep { pair, c, eps } => {
            let ctx = pair.context();
            let margin = majorization::eps_catalytic_margin(&pair.p, &pair.q, &c, eps, &ctx)?;
            let result = majorization::eps_catalytic_step(&pair.p, &pair.q, &c, eps, &ctx)?;
            let c_tilde = majorization::flattest_state(&c, eps)?;
            let json = json!({ "result": result, "margin": margin, "c_tilde": c_tilde });
            Ok(Report::decision(json, result))
        }
    }
}

/// Gibbs numerators for exact checks: all ones for a trivial Hamiltonian.
fn exact_weights(ctx: &ThermalContext) -> Result<Vec<u64>, Failure> {
    if ctx.is_uniform() {
        return Ok(vec![1; ctx.dim()]);
    }
    ctx.rational_form()
        .map(|r| r.numerators.clone())
        .ok_or_else(|| {
            Failure::Usage(
                "--exact-den needs a trivial Hamiltonian or a rational Gibbs state".into(),
            )
        })
}

fn catalysis_cmd(cmd: CatalysisCmd) -> Outcome {
    match cmd {
        CatalysisCmd::SecondLaws { pair, alpha_grid } => {
            let laws = catalysis::second_laws(&pair.p, &pair.q, &pair.context(), &alpha_grid)?;
            let worst = if laws.worst_alpha.is_finite() {
                json!(laws.worst_alpha)
            } else {
                json!("inf")
            };
            let json = json!({
                "inputs": pair.inputs(),
                "result": laws.holds,
                "margin": laws.margin,
                "strict_margin": laws.strict_margin,
                "worst_alpha": worst,
                "grid_sensitive": laws.grid_sensitive,
            });
            Ok(Report::decision(json, laws.holds))
        }
        CatalysisCmd::Duan { pair, k, exact_den } => {
            let ctx = pair.context();
            let (k_copy, catalytic, exactness) = match exact_den {
                None => {
                    let (a, b) = catalysis::duan_catalysis_check(&pair.p, &pair.q, k, &ctx)?;
                    (a, b, Value::Null)
                }
                Some(den) => {
                    let w = exact_weights(&ctx)?;
                    let ep = ExactDist::round_from(&pair.p, den)?;
                    let eq = ExactDist::round_from(&pair.q, den)?;
                    let (a, b) = exact::duan_catalysis_check(&ep.embed(&w)?, &eq.embed(&w)?, k)?;
                    let rounded = json!({ "p": ep.to_probvec(), "q": eq.to_probvec(), "denominator": den.to_string() });
                    (a, b, rounded)
                }
            };
            let spec = catalysis::duan_state(&pair.p, &pair.q, k)?;
            let json = json!({
                "inputs": pair.inputs(),
                "result": catalytic,
                "k": k,
                "k_copy": k_copy,
                "catalyst_dim": spec.total_dim.to_string(),
                "exact": exactness,
            });
            Ok(Report::decision(json, catalytic))
        }
        CatalysisCmd::MinK { pair, k_max } => {
            let k = catalysis::min_k_copy(&pair.p, &pair.q, &pair.context(), k_max)?;
            let json =
                json!({ "inputs": pair.inputs(), "result": k.is_some(), "k": k, "k_max": k_max });
            Ok(Report::decision(json, k.is_some()))
        }
        CatalysisCmd::Bounds(a) => bounds(a),
    }
}

fn bounds(a: BoundsArgs) -> Outcome {
    if a.d_s < 2 || a.d_c < 2 {
        return Err(Failure::Usage("--d-s and --d-c must be at least 2".into()));
    }
    let bound = catalysis::embezzlement_bound(a.d_s, a.d_c);
    let mut json = json!({
        "inputs": { "d_s": a.d_s, "d_c": a.d_c, "mu": a.mu },
        "bound": bound,
        "eps_c": a.mu * bound,
    });
    if let (Some(source), Some(target)) = (a.source, a.target) {
        let source_ctx = a
            .source_ctx
            .unwrap_or_else(|| ThermalContext::degenerate(source.dim()));
        let target_ctx = a
            .target_ctx
            .unwrap_or_else(|| ThermalContext::degenerate(target.dim()));
        let rate = catalysis::conversion_rate(&ConversionParams {
            kappa: a.kappa,
            n: a.n,
            source,
            target,
            source_ctx,
            target_ctx,
        })?;
        json["conversion"] = json!({ "n": a.n, "kappa": a.kappa, "rate": rate });
    }
    Ok(Report {
        json,
        text: None,
        code: 0,
    })
}

fn convex_split(cmd: ConvexSplitCmd) -> Outcome {
    let ConvexSplitCmd::Verify { rho, sigma, m_max } = cmd;
    if m_max == 0 {
        return Err(Failure::Usage("--m-max must be at least 1".into()));
    }
    let checks = (1..=m_max)
        .map(|m| verify_convex_split(&rho, &sigma, m))
        .collect::<catlab::Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["m", "empirical", "bound", "ratio"])
        .map_err(Error::from)?;
    for c in &checks {
        w.write_record([
            c.m.to_string(),
            c.empirical.to_string(),
            c.bound.to_string(),
            c.ratio().to_string(),
        ])
        .map_err(Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "m": c.m, "empirical": c.empirical, "bound": c.bound, "ratio": c.ratio(), "ok": c.ok }))
        .collect();
    let all_ok = checks.iter().all(|c| c.ok);
    Ok(Report {
        json: json!({ "rows": rows, "result": all_ok }),
        text: Some(String::from_utf8_lossy(&bytes).into_owned()),
        code: if all_ok { 0 } else { 1 },
    })
}

fn dilate(a: DilateArgs) -> Outcome {
    let ch = RationalChannel::from_json(&a.channel, &a.gibbs)?;
    let dil = build_dilation(&ch)?;
    // Every input is a mixture of basis states, so checking those suffices.
    let mut verified = dil.is_consistent();
    for i in 0..ch.dim() {
        let e = (0..ch.dim())
            .map(|j| parse_rational(if i == j { "1" } else { "0" }))
            .collect::<catlab::Result<Vec<_>>>()?;
        verified &= apply_dilation_exact(&dil, &e)? == ch.apply(&e)?;
    }
    let json = json!({
        "shell_size": dil.shell_size,
        "shell_factor": dil.shell_factor,
        "verified": verified,
    });
    Ok(Report::decision(json, verified))
}

fn load_config(a: &ExpArgs) -> Result<(SweepConfig, Option<&'static str>), Failure> {
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        return Ok((SweepConfig::from_json(&text)?, None));
    }
    let name = a.preset.as_deref().unwrap_or(a.experiment.name());
    let p = preset(name).ok_or_else(|| Failure::Usage(format!("unknown preset {name:?}")))?;
    if p.experiment != a.experiment {
        return Err(Failure::Usage(format!(
            "preset {name} belongs to {}, not {}",
            p.experiment, a.experiment
        )));
    }
    Ok((p.config, p.warning))
}

fn exp(a: ExpArgs) -> Outcome {
    let (mut cfg, warning) = load_config(&a)?;
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }
    cfg.seed = a.seed;
    if let Some(n) = a.n_c {
        cfg.n_c = n;
    }
    if let Some(n) = a.n_s {
        cfg.n_s = n;
    }
    if let Some(t) = &a.targets {
        cfg.targets = Some(t.clone());
    }
    if a.eps_c.is_some() {
        cfg.eps_c = a.eps_c;
    }
    cfg.validate()?;
    experiments::init_thread_pool();
    let summary = experiments::run_experiment(&cfg, a.experiment, &a.out)?;
    let mut text = String::new();
    for (file, rows) in summary.outputs.iter().zip(&summary.rows) {
        text.push_str(&format!("{}: {rows} rows\n", a.out.join(file).display()));
    }
    for w in &summary.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    Ok(Report {
        json: serde_json::to_value(&summary).map_err(Error::from)?,
        text: Some(text),
        code: 0,
    })
}

fn presets(cmd: PresetsCmd) -> Outcome {
    match cmd {
        PresetsCmd::List => {
            let all: Vec<_> = preset_names().iter().filter_map(|n| preset(n)).collect();
            let text = all
                .iter()
                .map(|p| {
                    format!(
                        "{:<12} {:<5} {}\n",
                        p.name,
                        p.experiment.name(),
                        p.description
                    )
                })
                .collect();
            let json: Vec<Value> = all
                .iter()
                .map(|p| {
                    json!({
                        "name": p.name,
                        "experiment": p.experiment.name(),
                        "description": p.description,
                        "warning": p.warning,
                    })
                })
                .collect();
            Ok(Report {
                json: Value::Array(json),
                text: Some(text),
                code: 0,
            })
        }
        PresetsCmd::Show { name } => {
            let p =
                preset(&name).ok_or_else(|| Failure::Usage(format!("unknown preset {name:?}")))?;
            Ok(Report {
                json: serde_json::to_value(&p).map_err(Error::from)?,
                text: None,
                code: 0,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let usage = !matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            if usage && std::env::args().any(|a| a == "--json") {
                let _ = e.print();
                println!(
                    "{}",
                    json!({ "error": e.kind().to_string(), "exit_code": 2 })
                );
                return ExitCode::from(2);
            }
            e.exit();
        }
    };
    if let Some(cap) = cli.dim_cap {
        catlab::simplex::set_dimension_cap(cap);
    }
    let outcome = match cli.cmd {
        Command::Check(c) => check(c),
        Command::Catalysis(c) => catalysis_cmd(c),
        Command::Convexsplit(c) => convex_split(c),
        Command::Dilate(a) => dilate(a),
        Command::Exp(a) => exp(a),
        Command::Presets(c) => presets(c),
    };
    match outcome {
        Ok(r) => {
            match (&r.text, cli.json) {
                (Some(t), false) => print!("{t}"),
                _ => println!("{}", r.json),
            }
            ExitCode::from(r.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            if cli.json {
                println!("{}", json!({ "error": f.message(), "exit_code": f.code() }));
            }
            ExitCode::from(f.code())
        }
    }
}
