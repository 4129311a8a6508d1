//! The `prophet-lab` binary. Every subcommand is a pure function of its
//! arguments: the output starts with the fully-resolved configuration
//! (defaults filled in), so a run can be reproduced from its own header.
//!
//! Exit codes: 0 on success, 1 when the inputs are structurally fine but
//! fail validation or a check suite reports failures, 2 on usage errors
//! (including malformed JSON config files, reported with line/column).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prophet_lab::bounds::{
    grid_maximize, observe_accept_surface, two_threshold_surface, BoundKind, BoundSurface,
};
use prophet_lab::dist::DistSpec;
use prophet_lab::fmt::sig;
use prophet_lab::frlp::{
    FrlpParams, KThresholdLpParams, ObserveAcceptLpParams, TwoThresholdLpParams,
    DEFAULT_OA_ZETA_GRID, DEFAULT_ZETA_GRID,
};
use prophet_lab::lp::{solve, LpStatus};
use prophet_lab::policy::PolicySpec;
use prophet_lab::sim::{estimate, estimate_ratio_to_empirical_max, estimate_select_max_probability};
use prophet_lab::tune::{optimize_params, sweep_c, sweep_to_csv, SearchConfig};
use prophet_lab_cli::checks;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "prophet-lab",
    version,
    about = "Prophet inequalities under a quantile oracle: simulate policies, \
             solve factor-revealing LPs, maximize hard-instance bounds, tune and check",
    arg_required_else_help = true
)]
struct Cli {
    /// Cap the worker-thread count (default: all logical cores; the
    /// PROPHET_LAB_THREADS variable is used when the flag is absent).
    /// Results never depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate a policy's expected payoff by Monte Carlo.
    Simulate(SimulateArgs),
    /// Build and solve a factor-revealing LP.
    #[command(subcommand)]
    Frlp(FrlpCmd),
    /// Maximize (or probe) a hard-instance upper-bound surface.
    Bounds(BoundsArgs),
    /// Improve LP parameters by coordinate descent from a seed.
    #[command(subcommand)]
    Tune(TuneCmd),
    /// Best observation fraction per rate, as CSV.
    Sweep(SweepArgs),
    /// Run a named check suite and print its scoreboard.
    Check {
        #[arg(value_enum)]
        suite: Suite,
    },
}

/// A failed run: `Run` exits 1 (valid request, bad outcome), `Usage` exits 2.
enum Failure {
    Run(String),
    Usage(String),
}

impl From<prophet_lab::Error> for Failure {
    fn from(e: prophet_lab::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.threads);
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(cap: Option<usize>) {
    let cap = cap.or_else(|| {
        std::env::var("PROPHET_LAB_THREADS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(threads) = cap.filter(|&t| t >= 1) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_cap: Option<usize>) {}

fn dispatch(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Simulate(args) => run_simulate(args),
        Cmd::Frlp(family) => run_frlp(family),
        Cmd::Bounds(args) => run_bounds(args),
        Cmd::Tune(family) => run_tune(family),
        Cmd::Sweep(args) => run_sweep(args),
        Cmd::Check { suite } => run_check(suite),
    }
}

/// Print the run as one JSON object: the resolved config first, then the
/// result. Key order within each map is alphabetical (serde_json's map),
/// so reruns are byte-identical.
fn emit(config: serde_json::Value, result: serde_json::Value) {
    let out = json!({ "config": config, "result": result });
    println!("{}", serde_json::to_string_pretty(&out).expect("value serializes"));
}

/// Parse a JSON config file, pointing at the offending line/column when it
/// is malformed or has unknown/missing keys.
fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::Usage(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

// ---------------------------------------------------------------- simulate

#[derive(Clone, Copy, ValueEnum)]
enum PolicyKind {
    /// One queried threshold, accepted from the start.
    Single,
    /// Zero queries: observe ⌊n/e⌋, then take the first record.
    Secretary,
    /// Multiple phases with queried thresholds (--c-list/--rho-list).
    K,
    /// One queried threshold, then the observed maximum (--c/--rho).
    Oa,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistKind {
    /// Uniform on [0, 1].
    Uniform01,
    /// A three-piece staircase mixture with gaps.
    Stairs,
    /// Rare huge prize (--dist-m sets the prize).
    D1,
    /// Near-point mass at one.
    D2,
    /// Two-level instance calibrated to --dist-c.
    D3,
}

#[derive(Args)]
struct SimulateArgs {
    /// Built-in policy shape; --policy-file overrides with a JSON spec.
    #[arg(long, value_enum, conflicts_with = "policy_file")]
    policy: Option<PolicyKind>,
    /// JSON policy spec ({"variant": "k_threshold", ...}).
    #[arg(long)]
    policy_file: Option<PathBuf>,
    /// Rate for --policy single or oa.
    #[arg(long)]
    c: Option<f64>,
    /// Comma-separated rates for --policy k.
    #[arg(long, value_delimiter = ',')]
    c_list: Option<Vec<f64>>,
    /// Observation fraction for --policy oa.
    #[arg(long)]
    rho: Option<f64>,
    /// Comma-separated phase fractions for --policy k.
    #[arg(long, value_delimiter = ',')]
    rho_list: Option<Vec<f64>>,
    /// Built-in distribution; --dist-file overrides with a JSON spec.
    #[arg(long, value_enum, conflicts_with = "dist_file")]
    dist: Option<DistKind>,
    /// JSON distribution spec ({"kind": "mixture", ...}).
    #[arg(long)]
    dist_file: Option<PathBuf>,
    /// Rate of the built-in d3 instance.
    #[arg(long, default_value_t = 1.2)]
    dist_c: f64,
    /// Prize height of the built-in d1 instance.
    #[arg(long, default_value_t = 1e6)]
    dist_m: f64,
    /// Width of the built-in d1/d2/d3 instances.
    #[arg(long, default_value_t = 1e-6)]
    dist_eps: f64,
    /// Sequence length.
    #[arg(long)]
    n: u32,
    /// Monte Carlo trials.
    #[arg(long)]
    trials: u64,
    /// Base RNG seed; trial t draws from an independent substream of it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Score each trial against its own realized maximum (paired samples)
    /// instead of the analytic E[max].
    #[arg(long)]
    paired: bool,
    /// Estimate Pr[pick the overall maximum] instead of the mean payoff.
    #[arg(long, conflicts_with = "paired")]
    max_probability: bool,
}

fn resolve_policy(a: &SimulateArgs) -> Result<PolicySpec, Failure> {
    if let Some(path) = &a.policy_file {
        return read_json(path);
    }
    let Some(kind) = a.policy else {
        return Err(Failure::Usage("pass --policy or --policy-file".into()));
    };
    let need = |opt: Option<f64>, what: &str| {
        opt.ok_or_else(|| Failure::Usage(format!("--policy needs {what}")))
    };
    Ok(match kind {
        PolicyKind::Secretary => PolicySpec::SecretaryZeroQuery,
        PolicyKind::Single => PolicySpec::SingleThreshold { c: need(a.c, "--c")? },
        PolicyKind::Oa => PolicySpec::ObserveAndAccept {
            c: need(a.c, "--c")?,
            rho: need(a.rho, "--rho")?,
        },
        PolicyKind::K => PolicySpec::KThreshold {
            c: a.c_list.clone().ok_or_else(|| Failure::Usage("--policy k needs --c-list".into()))?,
            rho: a
                .rho_list
                .clone()
                .ok_or_else(|| Failure::Usage("--policy k needs --rho-list".into()))?,
        },
    })
}

fn resolve_dist(a: &SimulateArgs) -> Result<DistSpec, Failure> {
    if let Some(path) = &a.dist_file {
        return read_json(path);
    }
    let Some(kind) = a.dist else {
        return Err(Failure::Usage("pass --dist or --dist-file".into()));
    };
    Ok(match kind {
        DistKind::Uniform01 => DistSpec::Uniform { lo: 0.0, hi: 1.0 },
        DistKind::Stairs => DistSpec::Mixture {
            components: vec![
                prophet_lab::dist::Component { w: 0.5, lo: 0.0, hi: 1.0 },
                prophet_lab::dist::Component { w: 0.3, lo: 1.5, hi: 2.0 },
                prophet_lab::dist::Component { w: 0.2, lo: 3.0, hi: 3.5 },
            ],
        },
        DistKind::D1 => DistSpec::HighValue { n: a.n, m: a.dist_m, eps: a.dist_eps },
        DistKind::D2 => DistSpec::PointLike { eps: a.dist_eps },
        DistKind::D3 => DistSpec::TwoLevel { n: a.n, c: a.dist_c, eps: a.dist_eps },
    })
}

fn run_simulate(a: SimulateArgs) -> Result<(), Failure> {
    let policy = resolve_policy(&a)?;
    let dist_spec = resolve_dist(&a)?;
    let dist = dist_spec.build()?;
    let estimator = if a.max_probability {
        "max_probability"
    } else if a.paired {
        "paired"
    } else {
        "mean"
    };
    let result = if a.max_probability {
        let rep = estimate_select_max_probability(&policy, &dist, a.n, a.trials, a.seed)?;
        serde_json::to_value(rep).expect("report serializes")
    } else if a.paired {
        let rep = estimate_ratio_to_empirical_max(&policy, &dist, a.n, a.trials, a.seed)?;
        serde_json::to_value(rep).expect("report serializes")
    } else {
        let rep = estimate(&policy, &dist, a.n, a.trials, a.seed)?;
        serde_json::to_value(rep).expect("report serializes")
    };
    emit(
        json!({
            "mode": "simulate",
            "policy": policy,
            "dist": dist_spec,
            "n": a.n,
            "trials": a.trials,
            "seed": a.seed,
            "estimator": estimator,
        }),
        result,
    );
    Ok(())
}

// -------------------------------------------------------------------- frlp

/// Inline two-threshold LP parameters, or --params FILE with the same
/// fields as JSON.
#[derive(Args)]
struct TwoParamArgs {
    /// First-phase acceptance rate (0 < c1 < c2).
    #[arg(long)]
    c1: Option<f64>,
    /// Second-phase acceptance rate.
    #[arg(long)]
    c2: Option<f64>,
    /// Fraction of the sequence run under the first threshold.
    #[arg(long)]
    rho: Option<f64>,
    /// Interior samples for the γ-cut family.
    #[arg(long, default_value_t = DEFAULT_ZETA_GRID)]
    zeta: usize,
    /// JSON file with {"c1": …, "c2": …, "rho": …[, "zeta_grid": …]}.
    #[arg(long, conflicts_with_all = ["c1", "c2", "rho"])]
    params: Option<PathBuf>,
}

impl TwoParamArgs {
    fn resolve(&self) -> Result<FrlpParams, Failure> {
        let p = if let Some(path) = &self.params {
            read_json(path)?
        } else {
            match (self.c1, self.c2, self.rho) {
                (Some(c1), Some(c2), Some(rho)) => {
                    TwoThresholdLpParams { c1, c2, rho, zeta_grid: self.zeta }
                }
                _ => return Err(Failure::Usage("pass --c1 --c2 --rho, or --params FILE".into())),
            }
        };
        Ok(FrlpParams::TwoThreshold(p))
    }
}

/// Inline k-threshold LP parameters, or --params FILE.
#[derive(Args)]
struct KParamArgs {
    /// Comma-separated strictly increasing rates.
    #[arg(long, value_delimiter = ',')]
    c_list: Option<Vec<f64>>,
    /// Comma-separated phase fractions summing to one.
    #[arg(long, value_delimiter = ',')]
    rho_list: Option<Vec<f64>>,
    /// Interior samples for the γ-cut family.
    #[arg(long, default_value_t = DEFAULT_ZETA_GRID)]
    zeta: usize,
    /// JSON file with {"c": […], "rho": […][, "zeta_grid": …]}.
    #[arg(long, conflicts_with_all = ["c_list", "rho_list"])]
    params: Option<PathBuf>,
}

impl KParamArgs {
    fn resolve(&self) -> Result<FrlpParams, Failure> {
        let p = if let Some(path) = &self.params {
            read_json(path)?
        } else {
            match (&self.c_list, &self.rho_list) {
                (Some(c), Some(rho)) => KThresholdLpParams {
                    c: c.clone(),
                    rho: rho.clone(),
                    zeta_grid: self.zeta,
                },
                _ => return Err(Failure::Usage("pass --c-list --rho-list, or --params FILE".into())),
            }
        };
        Ok(FrlpParams::KThreshold(p))
    }
}

/// Inline observe-and-accept LP parameters, or --params FILE.
#[derive(Args)]
struct OaParamArgs {
    /// Base rate.
    #[arg(long)]
    c: Option<f64>,
    /// Observation fraction.
    #[arg(long)]
    rho: Option<f64>,
    /// Threshold-ladder length.
    #[arg(long)]
    k: Option<usize>,
    /// Ladder growth factor (βᵢ = beta^i · c).
    #[arg(long, default_value_t = 1.03)]
    beta: f64,
    /// Interior samples for the γ-cut family.
    #[arg(long, default_value_t = DEFAULT_OA_ZETA_GRID)]
    zeta: usize,
    /// JSON file with {"c": …, "rho": …, "k": …, "beta_ratio": …[, "zeta_grid": …]}.
    #[arg(long, conflicts_with_all = ["c", "rho", "k"])]
    params: Option<PathBuf>,
}

impl OaParamArgs {
    fn resolve(&self) -> Result<FrlpParams, Failure> {
        let p = if let Some(path) = &self.params {
            read_json(path)?
        } else {
            match (self.c, self.rho, self.k) {
                (Some(c), Some(rho), Some(k)) => ObserveAcceptLpParams {
                    c,
                    rho,
                    k,
                    beta_ratio: self.beta,
                    zeta_grid: self.zeta,
                },
                _ => return Err(Failure::Usage("pass --c --rho --k, or --params FILE".into())),
            }
        };
        Ok(FrlpParams::ObserveAccept(p))
    }
}

#[derive(Subcommand)]
enum FrlpCmd {
    /// Two phases from one pair of queried thresholds.
    Two {
        #[command(flatten)]
        args: TwoParamArgs,
        /// Print the model rows instead of solving.
        #[arg(long)]
        dump: bool,
    },
    /// k phases with strictly increasing rates.
    K {
        #[command(flatten)]
        args: KParamArgs,
        /// Print the model rows instead of solving.
        #[arg(long)]
        dump: bool,
    },
    /// Observe-and-accept with a geometric threshold ladder.
    Oa {
        #[command(flatten)]
        args: OaParamArgs,
        /// Print the model rows instead of solving.
        #[arg(long)]
        dump: bool,
    },
}

fn run_frlp(cmd: FrlpCmd) -> Result<(), Failure> {
    let (params, dump) = match cmd {
        FrlpCmd::Two { args, dump } => (args.resolve()?, dump),
        FrlpCmd::K { args, dump } => (args.resolve()?, dump),
        FrlpCmd::Oa { args, dump } => (args.resolve()?, dump),
    };
    params.validate()?;
    let model = params.build()?;
    if dump {
        print!("{}", model.dump());
        return Ok(());
    }
    let sol = solve(&model)?;
    if sol.status != LpStatus::Optimal {
        return Err(Failure::Run(format!("LP finished {:?}", sol.status)));
    }
    let point: serde_json::Map<String, serde_json::Value> = model
        .names
        .iter()
        .zip(&sol.point)
        .map(|(name, &v)| (name.clone(), json!(v)))
        .collect();
    emit(
        json!({ "mode": "frlp", "params": params }),
        json!({
            "status": sol.status,
            "value": sol.value,
            "iterations": sol.iterations,
            "point": point,
        }),
    );
    Ok(())
}

// ------------------------------------------------------------------ bounds

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceKind {
    /// The two-threshold cap over (c1, c2, rho).
    Two,
    /// The observe-and-accept cap over (c, rho).
    Oa,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(value_enum)]
    surface: SurfaceKind,
    /// Interior sample count of the two-level cap (two-threshold only).
    #[arg(long, default_value_t = 2000)]
    c_grid: usize,
    /// Cells per axis.
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    /// Tenfold shrink-and-regrid passes around the incumbent.
    #[arg(long, default_value_t = 3)]
    rounds: usize,
    /// Evaluate the bound at one comma-separated point instead of maximizing.
    #[arg(long, value_delimiter = ',')]
    at: Option<Vec<f64>>,
    /// Also write the coarse grid as CSV (two-axis surfaces only).
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn axis_names(kind: BoundKind) -> &'static [&'static str] {
    match kind {
        BoundKind::TwoThreshold => &["c1", "c2", "rho"],
        BoundKind::ObserveAccept => &["c", "rho"],
    }
}

fn run_bounds(a: BoundsArgs) -> Result<(), Failure> {
    let surface = match a.surface {
        SurfaceKind::Two => two_threshold_surface(a.c_grid),
        SurfaceKind::Oa => observe_accept_surface(),
    };
    let c_grid = match a.surface {
        SurfaceKind::Two => Some(a.c_grid),
        SurfaceKind::Oa => None,
    };
    if let Some(point) = &a.at {
        if point.len() != surface.lo.len() {
            return Err(Failure::Usage(format!(
                "--at needs {} coordinates ({}), got {}",
                surface.lo.len(),
                axis_names(surface.kind).join(", "),
                point.len()
            )));
        }
        // An undefined point (e.g. c1 ≥ c2) evaluates to −∞, which JSON
        // renders as null.
        let value = surface.value(point);
        emit(
            json!({"mode": "bounds", "surface": surface.kind, "c_grid": c_grid, "at": point}),
            json!({ "value": value }),
        );
        return Ok(());
    }
    let config = json!({
        "mode": "bounds",
        "surface": surface.kind,
        "c_grid": c_grid,
        "resolution": a.resolution,
        "rounds": a.rounds,
    });
    if let Some(path) = &a.csv {
        write_grid_csv(&surface, a.resolution, path, &config)?;
    }
    let r = grid_maximize(&surface, a.resolution, a.rounds)?;
    emit(config, serde_json::to_value(&r).expect("result serializes"));
    Ok(())
}

/// Dump the coarse cell-center grid of a two-axis surface as CSV.
fn write_grid_csv(
    surface: &BoundSurface,
    resolution: usize,
    path: &Path,
    config: &serde_json::Value,
) -> Result<(), Failure> {
    let names = axis_names(surface.kind);
    if names.len() != 2 {
        return Err(Failure::Usage("--csv is only available for two-axis surfaces".into()));
    }
    let mut out = format!("# config: {config}\n{},{},value\n", names[0], names[1]);
    let center = |axis: usize, i: usize| {
        surface.lo[axis]
            + (surface.hi[axis] - surface.lo[axis]) * (i as f64 + 0.5) / resolution as f64
    };
    for i in 0..resolution {
        for j in 0..resolution {
            let p = [center(0, i), center(1, j)];
            let _ = writeln!(out, "{},{},{}", sig(p[0], 9), sig(p[1], 9), sig(surface.value(&p), 9));
        }
    }
    fs::write(path, out).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    Ok(())
}

// -------------------------------------------------------------------- tune

#[derive(Args)]
struct SearchArgs {
    /// Initial coordinate step.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Step halvings after each stall.
    #[arg(long, default_value_t = 5)]
    halvings: u32,
}

#[derive(Subcommand)]
enum TuneCmd {
    /// Improve a two-threshold seed.
    Two {
        #[command(flatten)]
        args: TwoParamArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Improve a k-threshold seed.
    K {
        #[command(flatten)]
        args: KParamArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Improve an observe-and-accept seed.
    Oa {
        #[command(flatten)]
        args: OaParamArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
}

fn run_tune(cmd: TuneCmd) -> Result<(), Failure> {
    let (seed, search) = match cmd {
        TuneCmd::Two { args, search } => (args.resolve()?, search),
        TuneCmd::K { args, search } => (args.resolve()?, search),
        TuneCmd::Oa { args, search } => (args.resolve()?, search),
    };
    let config = SearchConfig { initial_step: search.step, halvings: search.halvings };
    let (best, value) = optimize_params(&seed, &config)?;
    emit(
        json!({
            "mode": "tune",
            "seed": seed,
            "initial_step": config.initial_step,
            "halvings": config.halvings,
        }),
        json!({ "params": best, "value": value }),
    );
    Ok(())
}

// ------------------------------------------------------------------- sweep

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated rates to sweep.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["c_from", "c_to", "c_step"])]
    c_list: Option<Vec<f64>>,
    /// First rate of an arithmetic range (with --c-to/--c-step).
    #[arg(long, requires = "c_to")]
    c_from: Option<f64>,
    /// Last rate of the range (inclusive).
    #[arg(long, requires = "c_from")]
    c_to: Option<f64>,
    /// Range step.
    #[arg(long, default_value_t = 0.1)]
    c_step: f64,
    /// Threshold-ladder length scoring each (c, ρ) cell.
    #[arg(long, default_value_t = 100)]
    k: usize,
    /// Ladder growth factor.
    #[arg(long, default_value_t = 1.03)]
    beta: f64,
    /// Observation-fraction grid size on [0.01, 1].
    #[arg(long, default_value_t = 101)]
    rho_grid: usize,
    /// Interior samples for the γ-cut family.
    #[arg(long, default_value_t = 3)]
    zeta: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_sweep(a: SweepArgs) -> Result<(), Failure> {
    let cs: Vec<f64> = if let Some(list) = &a.c_list {
        list.clone()
    } else if let (Some(from), Some(to)) = (a.c_from, a.c_to) {
        if !(a.c_step > 0.0) || to < from {
            return Err(Failure::Usage("need c_from ≤ c_to and a positive --c-step".into()));
        }
        let count = ((to - from) / a.c_step + 1e-9).floor() as usize;
        (0..=count).map(|i| from + a.c_step * i as f64).collect()
    } else {
        return Err(Failure::Usage("pass --c-list, or --c-from with --c-to".into()));
    };
    let rows = sweep_c(&cs, a.k, a.beta, a.rho_grid, a.zeta)?;
    let config = json!({
        "mode": "sweep",
        "c": cs,
        "k": a.k,
        "beta_ratio": a.beta,
        "rho_grid": a.rho_grid,
        "zeta_grid": a.zeta,
    });
    let text = format!("# config: {config}\n{}", sweep_to_csv(&rows));
    match &a.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

// ------------------------------------------------------------------- check

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// Checks 1–6: headline LP optima, bound maxima, sweep crossings.
    Reproduce,
    /// Checks 7–10: simulation vs. closed forms, LP feasibility, baselines.
    Soundness,
}

fn run_check(suite: Suite) -> Result<(), Failure> {
    let outcomes = match suite {
        Suite::Reproduce => checks::reproduce_suite(),
        Suite::Soundness => checks::soundness_suite(),
    };
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    if failed > 0 {
        return Err(Failure::Run(format!("{failed} of {} checks failed", outcomes.len())));
    }
    Ok(())
}
