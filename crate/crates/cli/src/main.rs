//! `ucwarm` — the command-line front end of the warm-started unit-commitment
//! pipeline.
//!
//! Five subcommands mirror the stages of the workflow:
//!
//! * `generate` — draw scenarios around a base profile, solve each to
//!   optimality, and record the (features, strategy) pairs as JSON lines,
//!   stopping when the Good–Turing novelty bound meets the target δ.
//! * `train`    — fit one classifier per unit-hour (linear or Gaussian
//!   kernel, with cross-validated regularization) and write the predictor
//!   bundle as JSON.
//! * `predict`  — classify a scenario, triage the predicted strategy
//!   (use directly / warm start / recovered warm start), and print it.
//! * `solve`    — run branch and bound on a single scenario and print
//!   cost, gap, and status.
//! * `evaluate` — replay a directory of scenarios under cold/warm/fixed
//!   baselines and write the CSV report with its JSON config sidecar.
//!
//! Every failure exits nonzero after printing a single machine-readable
//! `error: …` line on stderr. The `UCWARM_THREADS` environment variable
//! caps evaluation parallelism.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ucwarm_core::bnb::{solve_mip, BnbSettings};
use ucwarm_core::grid::{
    load_grid, load_samples, save_samples, scenario_to_features, GridSpec, ScenarioInput, Strategy,
};
use ucwarm_core::pipeline::{
    evaluate, predict_strategy, triage, BaselineSet, EvalConfig, EvalMode, PredictorBundle,
    TriageDecision, TriagePolicy,
};
use ucwarm_core::sampler::{run_sampling, SamplerConfig, SamplingStatus};
use ucwarm_core::svm::{train_all, CvConfig, ModelKind};
use ucwarm_core::uc::{build_uc, extract_strategy, system_cost, UcOptions};

#[derive(Parser)]
#[command(
    name = "ucwarm",
    version,
    about = "Learned warm starts for mixed-integer second-order cone unit commitment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample scenarios, solve them, and write a labeled strategy set.
    Generate(GenerateArgs),
    /// Train per-unit-hour classifiers and write a predictor bundle.
    Train(TrainArgs),
    /// Predict a strategy for one scenario and print the triage decision.
    Predict(PredictArgs),
    /// Solve one scenario with branch and bound.
    Solve(SolveArgs),
    /// Replay scenarios under cold/warm/fixed baselines into a CSV report.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Grid description (JSON).
    #[arg(long)]
    grid: PathBuf,
    /// Base scenario profiles the sampler perturbs (JSON).
    #[arg(long)]
    base: PathBuf,
    /// Target novelty guarantee δ in (0, 1]; sampling stops once the
    /// missing-mass bound is at or below it.
    #[arg(long, default_value_t = 0.4)]
    delta: f64,
    /// Confidence parameter ε in (0, 1) inside the bound.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Seed of the scenario draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hard cap on accepted samples.
    #[arg(long, default_value_t = 1000)]
    max_samples: usize,
    /// Output sample file (JSON lines).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Linear,
    Kernel,
}

impl From<KindArg> for ModelKind {
    fn from(kind: KindArg) -> ModelKind {
        match kind {
            KindArg::Linear => ModelKind::Linear,
            KindArg::Kernel => ModelKind::Kernel,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Training samples (JSON lines, as written by `generate`).
    #[arg(long)]
    samples: PathBuf,
    /// Grid the samples were generated from; fixes units × horizon.
    #[arg(long)]
    grid: PathBuf,
    /// Classifier family.
    #[arg(long, value_enum, default_value_t = KindArg::Linear)]
    kind: KindArg,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 4)]
    folds: usize,
    /// Comma-separated λ grid (default: 7 log-spaced points in [1e-4, 1e1]).
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    /// Comma-separated γ grid (default: 6 log-spaced points in [1e-3, 1e2]).
    #[arg(long, value_delimiter = ',')]
    gamma_grid: Option<Vec<f64>>,
    /// Seed of the cross-validation fold shuffle.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Separate sample file to tune hyperparameters on (default:
    /// cross-validate on the training samples).
    #[arg(long)]
    cv_samples: Option<PathBuf>,
    /// Output bundle path (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Predictor bundle (JSON, as written by `train`).
    #[arg(long)]
    bundle: PathBuf,
    /// Scenario to classify (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Grid the bundle was trained for; needed to verify feasibility.
    #[arg(long)]
    grid: PathBuf,
    /// Sample file whose strategies form the recovery catalog.
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Largest acceptable classifier bound for direct use.
    #[arg(long, default_value_t = 1.0)]
    max_bound: f64,
    /// Slack added to the bound limit.
    #[arg(long, default_value_t = 0.0)]
    slack: f64,
    /// Judge the mean bound over all classifiers instead of each one.
    #[arg(long)]
    aggregate: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Grid description (JSON).
    #[arg(long)]
    grid: PathBuf,
    /// Scenario to solve (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Wall-clock budget in seconds (default: none).
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Solve every case to the gap tolerance.
    Unlimited,
    /// Stop each mixed-integer solve after `--time-limit` seconds.
    TimeLimited,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Predictor bundle (JSON).
    #[arg(long)]
    bundle: PathBuf,
    /// Grid description (JSON).
    #[arg(long)]
    grid: PathBuf,
    /// Directory of scenario JSON files; case ids follow filename order.
    #[arg(long)]
    cases: PathBuf,
    /// Budget mode for the mixed-integer solves.
    #[arg(long, value_enum, default_value_t = ModeArg::Unlimited)]
    mode: ModeArg,
    /// Per-solve budget in seconds (required with `--mode time-limited`).
    #[arg(long)]
    time_limit: Option<f64>,
    /// Comma-separated baselines to run.
    #[arg(long, value_delimiter = ',', default_value = "cold,warm,fixed")]
    baselines: Vec<String>,
    /// Sample file whose strategies form the recovery catalog.
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Output CSV path; the run config lands next to it as `.json`.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Evaluate(args) => cmd_evaluate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = format!("{e:#}").replace('\n', "; ");
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn load_scenario(path: &Path, grid: &GridSpec) -> Result<ScenarioInput> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading scenario `{}`", path.display()))?;
    let scenario: ScenarioInput = serde_json::from_str(&text)
        .with_context(|| format!("parsing scenario `{}`", path.display()))?;
    scenario
        .validate(grid)
        .with_context(|| format!("validating scenario `{}`", path.display()))?;
    Ok(scenario)
}

fn load_catalog(path: &Option<PathBuf>) -> Result<BTreeMap<Strategy, usize>> {
    Ok(match path {
        Some(path) => load_samples(path)
            .with_context(|| format!("reading samples `{}`", path.display()))?
            .catalog(),
        None => BTreeMap::new(),
    })
}

fn print_strategy(heading: &str, strategy: &Strategy, units: usize, horizon: usize) {
    println!("{heading}:");
    for g in 0..units {
        let hours: Vec<String> =
            (0..horizon).map(|t| strategy.get(g, t, horizon).to_string()).collect();
        println!("  unit {g}: {}", hours.join(" "));
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let grid = load_grid(&args.grid)?;
    let base = load_scenario(&args.base, &grid)?;
    let config = SamplerConfig {
        delta: args.delta,
        epsilon: args.epsilon,
        seed: args.seed,
        cap: args.max_samples,
        ..SamplerConfig::new(base)
    };
    let run = run_sampling(&grid, &config)?;
    save_samples(&run.samples, &args.out)?;
    println!("samples: {}", run.samples.len());
    println!("distinct strategies: {}", run.novelty.distinct());
    println!("novelty bound: {:.6} (target delta {})", run.final_bound, args.delta);
    println!(
        "status: {}",
        match run.status {
            SamplingStatus::Completed => "completed",
            SamplingStatus::CapReached => "cap reached",
        }
    );
    if run.skipped > 0 {
        println!("skipped solves: {}", run.skipped);
        for line in &run.diagnostics {
            println!("  {line}");
        }
    }
    println!("wrote: {}", args.out.display());
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let grid = load_grid(&args.grid)?;
    let samples = load_samples(&args.samples)
        .with_context(|| format!("reading samples `{}`", args.samples.display()))?;
    let validation = match &args.cv_samples {
        Some(path) => Some(
            load_samples(path).with_context(|| format!("reading samples `{}`", path.display()))?,
        ),
        None => None,
    };
    let mut cv = CvConfig { folds: args.folds, seed: args.seed, ..CvConfig::default() };
    if let Some(grid_points) = args.lambda_grid {
        cv.lambda_grid = grid_points;
    }
    if let Some(grid_points) = args.gamma_grid {
        cv.gamma_grid = grid_points;
    }
    let bundle = train_all(&samples, &grid, &cv, args.kind.into(), validation.as_ref())?;
    bundle.save(&args.out)?;
    let (worst, mean) = bundle.bound_summary();
    println!("models: {} ({} units x {} hours)", bundle.models.len(), bundle.units, bundle.horizon);
    println!("training samples: {}", bundle.metadata.training_size);
    println!("lambda: {}", bundle.metadata.lambda);
    match bundle.metadata.gamma {
        Some(gamma) => println!("gamma: {gamma}"),
        None => println!("gamma: n/a (linear)"),
    }
    println!("bound: worst {worst:.6}, mean {mean:.6}");
    println!("wrote: {}", args.out.display());
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let grid = load_grid(&args.grid)?;
    let bundle = PredictorBundle::load(&args.bundle)
        .with_context(|| format!("reading bundle `{}`", args.bundle.display()))?;
    let scenario = load_scenario(&args.scenario, &grid)?;
    let catalog = load_catalog(&args.samples)?;
    let features = scenario_to_features(&scenario, &bundle.schema)?;
    let prediction = predict_strategy(&bundle, &features)?;
    let policy =
        TriagePolicy { max_bound: args.max_bound, slack: args.slack, aggregate: args.aggregate };
    let outcome = triage(&prediction, &grid, &scenario, &bundle, &catalog, &policy);

    print_strategy("prediction", &prediction, bundle.units, bundle.horizon);
    println!("triage: {}", outcome.decision);
    if outcome.decision == TriageDecision::RecoveredWarmStart {
        print_strategy("recovered strategy", &outcome.strategy, bundle.units, bundle.horizon);
        if let Some(distance) = outcome.diagnostics.knn_distance {
            println!("knn distance: {distance}");
        }
    }
    println!(
        "judged bound: {:.6} (limit {:.6})",
        outcome.diagnostics.judged_bound, outcome.diagnostics.bound_limit
    );
    if outcome.diagnostics.updown_violations > 0 {
        println!("min up/down violations: {}", outcome.diagnostics.updown_violations);
    }
    for note in &outcome.diagnostics.notes {
        println!("note: {note}");
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let grid = load_grid(&args.grid)?;
    let scenario = load_scenario(&args.scenario, &grid)?;
    let model = build_uc(&grid, &scenario, &UcOptions::default())?;
    let settings = BnbSettings { time_limit: args.time_limit, ..BnbSettings::default() };
    let result = solve_mip(&model.mip, &settings, None)?;
    println!("status: {:?}", result.status);
    match &result.incumbent {
        Some(incumbent) => {
            println!("cost: {:.6}", system_cost(&incumbent.solution, &model.map));
            let strategy = extract_strategy(&incumbent.solution, &model.map)?;
            print_strategy("strategy", &strategy, grid.n_units(), grid.horizon);
        }
        None => println!("cost: none"),
    }
    println!("gap: {:.6e}", result.relative_gap);
    println!("nodes: {}", result.nodes);
    println!("time_s: {:.3}", result.wall_time);
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let grid = load_grid(&args.grid)?;
    let bundle = PredictorBundle::load(&args.bundle)
        .with_context(|| format!("reading bundle `{}`", args.bundle.display()))?;
    let catalog = load_catalog(&args.samples)?;

    let mut entries: Vec<PathBuf> = std::fs::read_dir(&args.cases)
        .with_context(|| format!("reading case directory `{}`", args.cases.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|path| path.extension().is_some_and(|ext| ext == "json"))
        .collect();
    entries.sort();
    if entries.is_empty() {
        bail!("no .json scenario files in `{}`", args.cases.display());
    }
    let mut cases = Vec::with_capacity(entries.len());
    for (id, path) in entries.iter().enumerate() {
        println!("case {id}: {}", path.display());
        cases.push(load_scenario(path, &grid)?);
    }

    let mode = match args.mode {
        ModeArg::Unlimited => EvalMode::Unlimited,
        ModeArg::TimeLimited => {
            let limit = args
                .time_limit
                .context("`--mode time-limited` requires `--time-limit <seconds>`")?;
            EvalMode::TimeLimited(limit)
        }
    };
    let mut baselines = BaselineSet { cold: false, warm: false, fixed: false };
    for name in &args.baselines {
        match name.as_str() {
            "cold" => baselines.cold = true,
            "warm" => baselines.warm = true,
            "fixed" => baselines.fixed = true,
            other => bail!("unknown baseline `{other}` (expected cold, warm, or fixed)"),
        }
    }
    let config = EvalConfig { mode, baselines, ..EvalConfig::default() };

    let report = evaluate(&bundle, &grid, &cases, &catalog, &config);
    report.save(&args.out, &config)?;
    println!(
        "{:<8} {:>6} {:>14} {:>12} {:>14}",
        "baseline", "solved", "mean_cost", "mean_time_s", "p50_cost"
    );
    for agg in &report.aggregates {
        println!(
            "{:<8} {:>6} {:>14.6} {:>12.4} {:>14.6}",
            agg.baseline.to_string(),
            agg.solved_cases,
            agg.mean_cost,
            agg.mean_wall_time_s,
            agg.cost_p50
        );
    }
    println!("wrote: {}", args.out.display());
    println!("wrote: {}", args.out.with_extension("json").display());
    Ok(())
}
