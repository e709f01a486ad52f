//! Prediction, triage, recovery, and the evaluation harness.
//!
//! A [`PredictorBundle`] holds one classifier per (unit, hour) entry and
//! maps a scenario's feature vector to a full commitment strategy. The
//! [`triage`] step decides what that prediction is worth: a prediction
//! that satisfies the minimum up/down rules, admits a feasible dispatch,
//! and comes from classifiers with desirable out-of-sample bounds can be
//! *used directly* (fixing the binaries turns the MISOCP into a plain
//! SOCP); an infeasible prediction is repaired by nearest-neighbor search
//! over the catalog of strategies seen in training; anything else is
//! handed to branch-and-bound as a warm start.
//!
//! The [`evaluate`] harness replays test scenarios under three baselines —
//! cold mixed-integer solves, warm-started solves, and fixed-binary
//! dispatches — with or without a wall-clock budget, and writes a CSV
//! report (plus a JSON sidecar of the exact configuration) whose
//! aggregates are recomputable from the per-case rows.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bnb::{
    evaluate_assignment_with, solve_mip, BnbError, BnbSettings, MixedIntegerConicProgram,
};
use crate::conic::{SolveStatus, SolverSettings};
use crate::grid::{
    scenario_to_features, FeatureSchema, FeatureVector, GridError, GridSpec, ScenarioInput,
    Strategy,
};
use crate::svm::{predict, ClassifierModel, KernelModel, LinearModel, ModelKind, SvmError};
use crate::uc::{
    assignment_from_strategy, build_uc, check_min_updown, system_cost, UcError, UcModel,
    UcOptions, UcVariableMap,
};

/// Errors of the prediction pipeline.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Uc(#[from] UcError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Bnb(#[from] BnbError),
    /// The bundle violates a structural invariant.
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    /// No catalog strategy is feasible for this scenario; rebuilding the
    /// model with elastic slacks (load shedding and curtailment) makes
    /// every commitment pattern dispatchable.
    #[error(
        "no feasible catalog strategy for this scenario; \
         enable corrective slacks (elastic mode) to guarantee feasibility"
    )]
    NoFeasibleRecovery,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("report error: {0}")]
    Csv(#[from] csv::Error),
}

/// Provenance and hyperparameters of a trained bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMetadata {
    pub kind: ModelKind,
    /// Number of training samples H.
    pub training_size: usize,
    /// Novelty target δ of the generating sampler run, when known.
    pub delta: Option<f64>,
    /// Confidence parameter ε of the generating sampler run, when known.
    pub epsilon: Option<f64>,
    /// Shared regularization weight of every model.
    pub lambda: f64,
    /// Shared kernel width (kernel bundles only).
    pub gamma: Option<f64>,
    /// Seed of the cross-validation fold assignment.
    pub cv_seed: u64,
}

/// The full map Φ from feature vectors to strategies: M×T classifiers
/// plus the feature schema and training metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorBundle {
    pub units: usize,
    pub horizon: usize,
    /// Schema the training features were extracted with; predictions
    /// re-extract features of new scenarios through the same rule.
    pub schema: FeatureSchema,
    /// Unit-major: the model of entry (g, t) sits at index `g·T + t`.
    pub models: Vec<ClassifierModel>,
    pub metadata: BundleMetadata,
}

/// Serialized form: kernel support vectors are stored once per bundle.
#[derive(Serialize, Deserialize)]
struct BundleRepr {
    kind: ModelKind,
    schema: FeatureSchema,
    units: usize,
    horizon: usize,
    metadata: BundleMetadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support: Option<Vec<Vec<f64>>>,
    models: Vec<ModelRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ModelRepr {
    Linear { w: Vec<f64>, b: f64, lambda: f64, j: f64, degenerate: bool },
    Kernel { beta: Vec<f64>, gamma: f64, lambda: f64, j: f64, degenerate: bool },
}

impl PredictorBundle {
    /// Checks the structural invariants: model count M·T, one model kind
    /// matching the metadata, a consistent schema tag, and kernel models
    /// sharing equal-length support.
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.models.len() != self.units * self.horizon {
            return Err(PipelineError::InvalidBundle(format!(
                "{} models for {} units × {} hours",
                self.models.len(),
                self.units,
                self.horizon
            )));
        }
        for (idx, model) in self.models.iter().enumerate() {
            if model.schema() != self.schema.name {
                return Err(PipelineError::InvalidBundle(format!(
                    "model {idx} tagged `{}`, bundle schema is `{}`",
                    model.schema(),
                    self.schema.name
                )));
            }
            let matches_kind = matches!(
                (&self.metadata.kind, model),
                (ModelKind::Linear, ClassifierModel::Linear(_))
                    | (ModelKind::Kernel, ClassifierModel::Kernel(_))
            );
            if !matches_kind {
                return Err(PipelineError::InvalidBundle(format!(
                    "model {idx} does not match bundle kind {:?}",
                    self.metadata.kind
                )));
            }
            if let ClassifierModel::Kernel(k) = model {
                if k.beta.len() != k.support.len() {
                    return Err(PipelineError::InvalidBundle(format!(
                        "model {idx}: {} coefficients for {} support vectors",
                        k.beta.len(),
                        k.support.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Serializes to JSON; kernel support vectors are emitted once and
    /// every model refers to that shared block implicitly.
    pub fn to_json(&self) -> Result<String, PipelineError> {
        self.validate()?;
        let mut support = None;
        let models = self
            .models
            .iter()
            .map(|model| match model {
                ClassifierModel::Linear(m) => ModelRepr::Linear {
                    w: m.w.clone(),
                    b: m.b,
                    lambda: m.lambda,
                    j: m.j,
                    degenerate: m.degenerate,
                },
                ClassifierModel::Kernel(m) => {
                    if support.is_none() {
                        support = Some(m.support.as_ref().clone());
                    }
                    ModelRepr::Kernel {
                        beta: m.beta.clone(),
                        gamma: m.gamma,
                        lambda: m.lambda,
                        j: m.j,
                        degenerate: m.degenerate,
                    }
                }
            })
            .collect();
        let repr = BundleRepr {
            kind: self.metadata.kind,
            schema: self.schema.clone(),
            units: self.units,
            horizon: self.horizon,
            metadata: self.metadata.clone(),
            support,
            models,
        };
        Ok(serde_json::to_string_pretty(&repr)?)
    }

    /// Parses a bundle; all kernel models re-attach to one shared support
    /// allocation.
    pub fn from_json(text: &str) -> Result<PredictorBundle, PipelineError> {
        let repr: BundleRepr = serde_json::from_str(text)?;
        let support = Arc::new(repr.support.unwrap_or_default());
        let models = repr
            .models
            .into_iter()
            .map(|model| match model {
                ModelRepr::Linear { w, b, lambda, j, degenerate } => {
                    ClassifierModel::Linear(LinearModel {
                        w,
                        b,
                        lambda,
                        j,
                        degenerate,
                        schema: repr.schema.name.clone(),
                    })
                }
                ModelRepr::Kernel { beta, gamma, lambda, j, degenerate } => {
                    ClassifierModel::Kernel(KernelModel {
                        support: support.clone(),
                        beta,
                        gamma,
                        lambda,
                        j,
                        degenerate,
                        schema: repr.schema.name.clone(),
                    })
                }
            })
            .collect();
        let bundle = PredictorBundle {
            units: repr.units,
            horizon: repr.horizon,
            schema: repr.schema,
            models,
            metadata: repr.metadata,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), PipelineError> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PredictorBundle, PipelineError> {
        PredictorBundle::from_json(&fs::read_to_string(path)?)
    }

    /// Largest stored classifier bound and the mean over all models.
    pub fn bound_summary(&self) -> (f64, f64) {
        let mut worst = f64::NEG_INFINITY;
        let mut total = 0.0;
        for model in &self.models {
            worst = worst.max(model.bound());
            total += model.bound();
        }
        (worst, total / self.models.len() as f64)
    }
}

/// Predicts the commitment strategy of a feature vector: entry (g, t) is
/// the ±1 output of model (g, t), decoded to {0, 1}.
pub fn predict_strategy(
    bundle: &PredictorBundle,
    x: &FeatureVector,
) -> Result<Strategy, PipelineError> {
    let mut plus_minus = Vec::with_capacity(bundle.models.len());
    for model in &bundle.models {
        plus_minus.push(predict(model, x)?.label);
    }
    Ok(Strategy::from_plus_minus(&plus_minus)?)
}

/// Thresholds deciding when a prediction is desirable enough to adopt
/// outright. A classifier is desirable when its stored out-of-sample
/// bound stays at or below `max_bound + slack`; a bound below 1 beats the
/// trivial always-wrong-by-one zero classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriagePolicy {
    pub max_bound: f64,
    pub slack: f64,
    /// Judge the mean bound over all classifiers instead of each one.
    pub aggregate: bool,
}

impl Default for TriagePolicy {
    fn default() -> Self {
        TriagePolicy { max_bound: 1.0, slack: 0.0, aggregate: false }
    }
}

/// What to do with a predicted strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriageDecision {
    /// Fix the binaries to the prediction and solve the remaining SOCP.
    UseDirectly,
    /// Hand the strategy to branch-and-bound as a warm start.
    WarmStart,
    /// The prediction was infeasible; warm-start with the recovered
    /// catalog strategy instead.
    RecoveredWarmStart,
}

impl fmt::Display for TriageDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriageDecision::UseDirectly => "use_directly",
            TriageDecision::WarmStart => "warm_start",
            TriageDecision::RecoveredWarmStart => "recovered_warm_start",
        })
    }
}

/// Evidence behind a triage decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriageDiagnostics {
    /// The bound the policy judged (worst or mean, per `aggregate`).
    pub judged_bound: f64,
    /// `max_bound + slack` at decision time.
    pub bound_limit: f64,
    pub bounds_desirable: bool,
    /// Minimum up/down violations of the raw prediction.
    pub updown_violations: usize,
    /// Whether the raw prediction admitted a feasible dispatch
    /// (`None` when the dispatch solve was skipped or unavailable).
    pub prediction_feasible: Option<bool>,
    /// Hamming distance of the recovered strategy, when recovery ran.
    pub knn_distance: Option<usize>,
    /// Human-readable notes on fallback paths (solver hiccups, empty
    /// catalog); empty in the common paths.
    pub notes: Vec<String>,
}

/// A triage decision together with the strategy it commits to.
#[derive(Debug, Clone, PartialEq)]
pub struct TriageOutcome {
    pub decision: TriageDecision,
    /// The strategy downstream steps should use. Passes the minimum
    /// up/down rules whenever the decision is not a plain warm start.
    pub strategy: Strategy,
    pub diagnostics: TriageDiagnostics,
}

/// Hamming distance between equal-length strategies.
fn hamming(a: &Strategy, b: &Strategy) -> usize {
    debug_assert_eq!(a.len(), b.len());
    a.values.iter().zip(&b.values).filter(|(x, y)| x != y).count()
}

/// True when the strategy passes the up/down rules and its fixed-binary
/// dispatch solves to optimality. Ambiguous solver outcomes count as
/// infeasible (conservative).
fn strategy_feasible(
    model: &UcModel,
    grid: &GridSpec,
    strategy: &Strategy,
    settings: &SolverSettings,
) -> Result<bool, PipelineError> {
    if !check_min_updown(strategy, grid).is_empty() {
        return Ok(false);
    }
    let assignment = assignment_from_strategy(strategy, grid);
    let solution = evaluate_assignment_with(&model.mip, &assignment, settings)?;
    Ok(solution.status == SolveStatus::Optimal)
}

/// Repairs an infeasible prediction: returns the feasible catalog strategy
/// with minimal Hamming distance (and that distance). Ties go to the
/// strategy observed more often in training, then to the
/// lexicographically smaller one. Candidates are scanned outward, so the
/// expensive dispatch solve runs only until the first feasible hit.
pub fn knn_recover(
    strategy: &Strategy,
    catalog: &BTreeMap<Strategy, usize>,
    grid: &GridSpec,
    scenario: &ScenarioInput,
) -> Result<(Strategy, usize), PipelineError> {
    let model = build_uc(grid, scenario, &UcOptions::default())?;
    knn_recover_in(&model, strategy, catalog, grid, &SolverSettings::default())
}

fn knn_recover_in(
    model: &UcModel,
    strategy: &Strategy,
    catalog: &BTreeMap<Strategy, usize>,
    grid: &GridSpec,
    settings: &SolverSettings,
) -> Result<(Strategy, usize), PipelineError> {
    if catalog.is_empty() {
        return Err(PipelineError::NoFeasibleRecovery);
    }
    for candidate in catalog.keys() {
        if candidate.len() != strategy.len() {
            return Err(PipelineError::InvalidBundle(format!(
                "catalog strategy length {} differs from prediction length {}",
                candidate.len(),
                strategy.len()
            )));
        }
    }
    // BTreeMap iterates keys in lexicographic order; the stable sort on
    // (distance, −count) therefore leaves exact ties lexicographic.
    let mut candidates: Vec<(usize, usize, &Strategy)> = catalog
        .iter()
        .map(|(s, &count)| (hamming(s, strategy), count, s))
        .collect();
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    for (distance, _, candidate) in candidates {
        if strategy_feasible(model, grid, candidate, settings)? {
            return Ok((candidate.clone(), distance));
        }
    }
    Err(PipelineError::NoFeasibleRecovery)
}

/// Decides how to use a predicted strategy. Total: every input yields a
/// decision; internal solver or model-building failures downgrade the
/// outcome to a warm start and are recorded in the diagnostics.
///
/// `catalog` is the multiset of training strategies used for recovery;
/// with an empty catalog an infeasible prediction falls back to a plain
/// warm start (branch-and-bound will discard it if unusable).
pub fn triage(
    strategy: &Strategy,
    grid: &GridSpec,
    scenario: &ScenarioInput,
    bundle: &PredictorBundle,
    catalog: &BTreeMap<Strategy, usize>,
    policy: &TriagePolicy,
) -> TriageOutcome {
    let (worst, mean) = bundle.bound_summary();
    let judged_bound = if policy.aggregate { mean } else { worst };
    let bound_limit = policy.max_bound + policy.slack;
    let bounds_desirable = judged_bound <= bound_limit;
    let mut diagnostics = TriageDiagnostics {
        judged_bound,
        bound_limit,
        bounds_desirable,
        updown_violations: 0,
        prediction_feasible: None,
        knn_distance: None,
        notes: Vec::new(),
    };
    let warm = |diagnostics: TriageDiagnostics| TriageOutcome {
        decision: TriageDecision::WarmStart,
        strategy: strategy.clone(),
        diagnostics,
    };

    if strategy.len() != grid.n_units() * grid.horizon {
        diagnostics.notes.push(format!(
            "prediction length {} does not match {} units × {} hours",
            strategy.len(),
            grid.n_units(),
            grid.horizon
        ));
        return warm(diagnostics);
    }
    let model = match build_uc(grid, scenario, &UcOptions::default()) {
        Ok(model) => model,
        Err(e) => {
            diagnostics.notes.push(format!("model build failed: {e}"));
            return warm(diagnostics);
        }
    };

    diagnostics.updown_violations = check_min_updown(strategy, grid).len();
    let mut feasible = diagnostics.updown_violations == 0;
    if feasible {
        match strategy_feasible(&model, grid, strategy, &SolverSettings::default()) {
            Ok(ok) => {
                feasible = ok;
                diagnostics.prediction_feasible = Some(ok);
            }
            Err(e) => {
                diagnostics.notes.push(format!("feasibility check failed: {e}"));
                return warm(diagnostics);
            }
        }
    } else {
        diagnostics.prediction_feasible = Some(false);
    }

    if feasible && bounds_desirable {
        return TriageOutcome {
            decision: TriageDecision::UseDirectly,
            strategy: strategy.clone(),
            diagnostics,
        };
    }
    if !feasible {
        match knn_recover_in(&model, strategy, catalog, grid, &SolverSettings::default()) {
            Ok((recovered, distance)) => {
                diagnostics.knn_distance = Some(distance);
                return TriageOutcome {
                    decision: TriageDecision::RecoveredWarmStart,
                    strategy: recovered,
                    diagnostics,
                };
            }
            Err(e) => {
                diagnostics.notes.push(format!("recovery unavailable: {e}"));
                return warm(diagnostics);
            }
        }
    }
    warm(diagnostics)
}

/// Wall-clock regime of an evaluation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Solve to the gap tolerance.
    Unlimited,
    /// Stop each mixed-integer solve after this many seconds.
    TimeLimited(f64),
}

/// Which baselines to run per test case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineSet {
    /// Branch-and-bound from scratch.
    pub cold: bool,
    /// Branch-and-bound warm-started with the triaged prediction.
    pub warm: bool,
    /// Binaries fixed to the (possibly recovered) prediction: one SOCP.
    pub fixed: bool,
}

impl Default for BaselineSet {
    fn default() -> Self {
        BaselineSet { cold: true, warm: true, fixed: true }
    }
}

/// Identifies a row's baseline in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    Cold,
    Warm,
    Fixed,
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Baseline::Cold => "cold",
            Baseline::Warm => "warm",
            Baseline::Fixed => "fixed",
        })
    }
}

/// Full configuration of an evaluation run; serialized as the JSON
/// sidecar so a report can be reproduced exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub mode: EvalMode,
    pub baselines: BaselineSet,
    pub policy: TriagePolicy,
    pub bnb: BnbSettings,
    pub uc: UcOptions,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            mode: EvalMode::Unlimited,
            baselines: BaselineSet::default(),
            policy: TriagePolicy::default(),
            bnb: BnbSettings::default(),
            uc: UcOptions::default(),
        }
    }
}

/// One baseline run on one test case. Field order is the CSV column
/// order: case_id, baseline, cost, wall_time_s, nodes, gap, status,
/// triage_decision, knn_distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub case_id: usize,
    pub baseline: Baseline,
    /// System cost (production + startup) of the returned solution;
    /// empty when the run produced none.
    pub cost: Option<f64>,
    pub wall_time_s: f64,
    /// Relaxations solved; 0 for fixed-binary rows.
    pub nodes: usize,
    /// Relative optimality gap; empty for fixed-binary rows.
    pub gap: Option<f64>,
    /// Terminal status, or `error: …` when the run failed outright.
    pub status: String,
    pub triage_decision: Option<TriageDecision>,
    pub knn_distance: Option<usize>,
}

/// Per-baseline summary; recomputable from the rows via [`aggregate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineAggregate {
    pub baseline: Baseline,
    /// Rows that produced a cost.
    pub solved_cases: usize,
    pub mean_cost: f64,
    pub mean_wall_time_s: f64,
    pub cost_p25: f64,
    pub cost_p50: f64,
    pub cost_p75: f64,
}

/// Scenario replay results: per-case rows plus per-baseline aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rows: Vec<EvalRow>,
    pub aggregates: Vec<BaselineAggregate>,
}

/// Nearest-rank percentile of a sorted slice (q in [0, 1]).
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Recomputes the per-baseline aggregates of a row set.
pub fn aggregate(rows: &[EvalRow]) -> Vec<BaselineAggregate> {
    [Baseline::Cold, Baseline::Warm, Baseline::Fixed]
        .into_iter()
        .filter_map(|baseline| {
            let mut costs: Vec<f64> = Vec::new();
            let mut times = 0.0;
            let mut rows_seen = 0usize;
            for row in rows.iter().filter(|r| r.baseline == baseline) {
                rows_seen += 1;
                times += row.wall_time_s;
                if let Some(cost) = row.cost {
                    costs.push(cost);
                }
            }
            if rows_seen == 0 {
                return None;
            }
            costs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mean_cost = if costs.is_empty() {
                f64::NAN
            } else {
                costs.iter().sum::<f64>() / costs.len() as f64
            };
            let (p25, p50, p75) = if costs.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                (percentile(&costs, 0.25), percentile(&costs, 0.50), percentile(&costs, 0.75))
            };
            Some(BaselineAggregate {
                baseline,
                solved_cases: costs.len(),
                mean_cost,
                mean_wall_time_s: times / rows_seen as f64,
                cost_p25: p25,
                cost_p50: p50,
                cost_p75: p75,
            })
        })
        .collect()
}

impl EvaluationReport {
    /// Renders the rows as CSV in the documented column order.
    pub fn to_csv(&self) -> Result<String, PipelineError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            writer.serialize(row)?;
        }
        let bytes = writer.into_inner().map_err(|e| {
            PipelineError::InvalidBundle(format!("csv buffer error: {e}"))
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes the CSV report and a `.json` sidecar holding the exact run
    /// configuration next to it.
    pub fn save(
        &self,
        csv_path: impl AsRef<Path>,
        config: &EvalConfig,
    ) -> Result<(), PipelineError> {
        let csv_path = csv_path.as_ref();
        fs::write(csv_path, self.to_csv()?)?;
        let sidecar = csv_path.with_extension("json");
        fs::write(sidecar, serde_json::to_string_pretty(config)?)?;
        Ok(())
    }
}

/// Replays test scenarios under the requested baselines.
///
/// Cases run in parallel (the `UCWARM_THREADS` environment variable caps
/// the worker count); every failure is recorded as an `error: …` row so a
/// bad case never aborts the batch.
pub fn evaluate(
    bundle: &PredictorBundle,
    grid: &GridSpec,
    cases: &[ScenarioInput],
    catalog: &BTreeMap<Strategy, usize>,
    config: &EvalConfig,
) -> EvaluationReport {
    let run = || -> Vec<Vec<EvalRow>> {
        cases
            .par_iter()
            .enumerate()
            .map(|(case_id, scenario)| one_case(bundle, grid, scenario, catalog, config, case_id))
            .collect()
    };
    let nested = match thread_cap() {
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    };
    let rows: Vec<EvalRow> = nested.into_iter().flatten().collect();
    let aggregates = aggregate(&rows);
    EvaluationReport { rows, aggregates }
}

/// Worker cap from `UCWARM_THREADS`, when set to a positive integer.
fn thread_cap() -> Option<usize> {
    std::env::var("UCWARM_THREADS").ok()?.parse().ok().filter(|&n| n > 0)
}

fn bnb_settings_for(config: &EvalConfig) -> BnbSettings {
    let mut settings = config.bnb;
    settings.time_limit = match config.mode {
        EvalMode::Unlimited => None,
        EvalMode::TimeLimited(limit) => Some(limit),
    };
    settings
}

fn error_row(case_id: usize, baseline: Baseline, message: &str) -> EvalRow {
    EvalRow {
        case_id,
        baseline,
        cost: None,
        wall_time_s: 0.0,
        nodes: 0,
        gap: None,
        status: format!("error: {message}"),
        triage_decision: None,
        knn_distance: None,
    }
}

fn mip_row(
    case_id: usize,
    baseline: Baseline,
    mip: &MixedIntegerConicProgram,
    map: &UcVariableMap,
    settings: &BnbSettings,
    warm_start: Option<&[u8]>,
    outcome: Option<&TriageOutcome>,
) -> EvalRow {
    match solve_mip(mip, settings, warm_start) {
        Ok(result) => EvalRow {
            case_id,
            baseline,
            cost: result.incumbent.as_ref().map(|inc| system_cost(&inc.solution, map)),
            wall_time_s: result.wall_time,
            nodes: result.nodes,
            gap: Some(result.relative_gap),
            status: format!("{:?}", result.status),
            triage_decision: outcome.map(|o| o.decision),
            knn_distance: outcome.and_then(|o| o.diagnostics.knn_distance),
        },
        Err(e) => {
            let mut row = error_row(case_id, baseline, &e.to_string());
            row.triage_decision = outcome.map(|o| o.decision);
            row
        }
    }
}

fn one_case(
    bundle: &PredictorBundle,
    grid: &GridSpec,
    scenario: &ScenarioInput,
    catalog: &BTreeMap<Strategy, usize>,
    config: &EvalConfig,
    case_id: usize,
) -> Vec<EvalRow> {
    let wanted = config.baselines;
    let each_requested = |message: &str| -> Vec<EvalRow> {
        let mut rows = Vec::new();
        if wanted.cold {
            rows.push(error_row(case_id, Baseline::Cold, message));
        }
        if wanted.warm {
            rows.push(error_row(case_id, Baseline::Warm, message));
        }
        if wanted.fixed {
            rows.push(error_row(case_id, Baseline::Fixed, message));
        }
        rows
    };

    let model = match build_uc(grid, scenario, &config.uc) {
        Ok(model) => model,
        Err(e) => return each_requested(&e.to_string()),
    };
    let settings = bnb_settings_for(config);
    let mut rows = Vec::new();

    if wanted.cold {
        rows.push(mip_row(case_id, Baseline::Cold, &model.mip, &model.map, &settings, None, None));
    }

    if wanted.warm || wanted.fixed {
        let outcome = scenario_to_features(scenario, &bundle.schema)
            .map_err(PipelineError::from)
            .and_then(|x| predict_strategy(bundle, &x))
            .map(|raw| triage(&raw, grid, scenario, bundle, catalog, &config.policy));
        match outcome {
            Ok(outcome) => {
                let assignment = assignment_from_strategy(&outcome.strategy, grid);
                if wanted.warm {
                    rows.push(mip_row(
                        case_id,
                        Baseline::Warm,
                        &model.mip,
                        &model.map,
                        &settings,
                        Some(&assignment),
                        Some(&outcome),
                    ));
                }
                if wanted.fixed {
                    let start = Instant::now();
                    let row = match evaluate_assignment_with(
                        &model.mip,
                        &assignment,
                        &settings.solver,
                    ) {
                        Ok(solution) => EvalRow {
                            case_id,
                            baseline: Baseline::Fixed,
                            cost: (solution.status == SolveStatus::Optimal)
                                .then(|| system_cost(&solution, &model.map)),
                            wall_time_s: start.elapsed().as_secs_f64(),
                            nodes: 0,
                            gap: None,
                            status: format!("{:?}", solution.status),
                            triage_decision: Some(outcome.decision),
                            knn_distance: outcome.diagnostics.knn_distance,
                        },
                        Err(e) => {
                            let mut row = error_row(case_id, Baseline::Fixed, &e.to_string());
                            row.triage_decision = Some(outcome.decision);
                            row
                        }
                    };
                    rows.push(row);
                }
            }
            Err(e) => {
                let message = e.to_string();
                if wanted.warm {
                    rows.push(error_row(case_id, Baseline::Warm, &message));
                }
                if wanted.fixed {
                    rows.push(error_row(case_id, Baseline::Fixed, &message));
                }
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnb::solve_mip;
    use crate::grid::{Bus, Generator};
    use crate::svm::LinearModel;
    use crate::uc::extract_strategy;

    /// Islanded single-bus grid with `units` generators and no network:
    /// every solve is tiny, which keeps the pipeline tests fast.
    fn island(units: usize, horizon: usize, p_min: f64) -> GridSpec {
        GridSpec {
            buses: vec![Bus {
                id: 0,
                v_min: 0.95,
                v_max: 1.05,
                reference: true,
                g_diag: 0.0,
                b_diag: 0.0,
            }],
            lines: vec![],
            generators: (0..units)
                .map(|g| Generator {
                    bus: 0,
                    p_min,
                    p_max: 1.5,
                    q_min: -1.0,
                    q_max: 1.0,
                    ramp_up: 2.0,
                    ramp_down: 2.0,
                    ramp_startstop: 2.0,
                    min_up: 1,
                    min_down: 1,
                    cost_production: 10.0 + 2.0 * g as f64,
                    cost_startup: 5.0,
                })
                .collect(),
            horizon,
        }
    }

    fn flat_scenario(grid: &GridSpec, demand: &[f64]) -> ScenarioInput {
        let n = grid.n_buses();
        let t = grid.horizon;
        assert_eq!(demand.len(), t);
        let zeros = vec![vec![0.0; t]; n];
        let mut demand_active = vec![vec![0.0; t]; n];
        demand_active[0] = demand.to_vec();
        ScenarioInput {
            wind_active: zeros.clone(),
            wind_reactive: zeros.clone(),
            demand_active,
            demand_reactive: zeros,
        }
    }

    fn constant_model(b: f64, dim: usize, j: f64) -> ClassifierModel {
        ClassifierModel::Linear(LinearModel {
            w: vec![0.0; dim],
            b,
            lambda: 0.0,
            j,
            degenerate: true,
            schema: "full".into(),
        })
    }

    fn constant_bundle(grid: &GridSpec, labels: &[f64], j: f64) -> PredictorBundle {
        let schema = FeatureSchema::full();
        let dim = schema.width(grid.n_buses(), grid.horizon);
        PredictorBundle {
            units: grid.n_units(),
            horizon: grid.horizon,
            schema,
            models: labels.iter().map(|&b| constant_model(b, dim, j)).collect(),
            metadata: BundleMetadata {
                kind: ModelKind::Linear,
                training_size: 1,
                delta: None,
                epsilon: None,
                lambda: 0.0,
                gamma: None,
                cv_seed: 0,
            },
        }
    }

    fn features_of(scenario: &ScenarioInput) -> FeatureVector {
        scenario_to_features(scenario, &FeatureSchema::full()).unwrap()
    }

    #[test]
    fn bundle_validate_catches_count_schema_and_kind_errors() {
        let grid = island(1, 2, 0.1);
        let mut bundle = constant_bundle(&grid, &[1.0, 1.0], 0.0);
        assert!(bundle.validate().is_ok());
        bundle.models.pop();
        assert!(matches!(bundle.validate(), Err(PipelineError::InvalidBundle(_))));

        let mut bundle = constant_bundle(&grid, &[1.0, 1.0], 0.0);
        bundle.metadata.kind = ModelKind::Kernel;
        assert!(matches!(bundle.validate(), Err(PipelineError::InvalidBundle(_))));

        let mut bundle = constant_bundle(&grid, &[1.0, 1.0], 0.0);
        if let ClassifierModel::Linear(m) = &mut bundle.models[0] {
            m.schema = "other".into();
        }
        assert!(matches!(bundle.validate(), Err(PipelineError::InvalidBundle(_))));
    }

    #[test]
    fn linear_bundle_round_trips_bit_exactly() {
        let grid = island(1, 2, 0.1);
        let mut bundle = constant_bundle(&grid, &[1.0, -1.0], 0.25);
        if let ClassifierModel::Linear(m) = &mut bundle.models[0] {
            m.w = vec![0.1 + 0.2, -1.0 / 3.0, f64::MIN_POSITIVE];
            m.b = std::f64::consts::PI;
            m.degenerate = false;
        }
        // Keep the widths consistent after the edit above.
        if let ClassifierModel::Linear(m) = &mut bundle.models[1] {
            m.w = vec![0.0; 3];
        }
        bundle.schema = FeatureSchema {
            name: "full".into(),
            extraction: crate::grid::Extraction::Full,
        };
        let json = bundle.to_json().unwrap();
        let back = PredictorBundle::from_json(&json).unwrap();
        assert_eq!(back, bundle, "serialization must be bit-exact");
    }

    #[test]
    fn kernel_bundle_round_trip_shares_support_storage() {
        let support = Arc::new(vec![vec![0.0, 1.0], vec![2.0, 3.0]]);
        let kernel = |beta: Vec<f64>| {
            ClassifierModel::Kernel(KernelModel {
                support: support.clone(),
                beta,
                gamma: 0.5,
                lambda: 0.1,
                j: 0.3,
                degenerate: false,
                schema: "pair".into(),
            })
        };
        let bundle = PredictorBundle {
            units: 1,
            horizon: 2,
            schema: FeatureSchema {
                name: "pair".into(),
                extraction: crate::grid::Extraction::Full,
            },
            models: vec![kernel(vec![1.0, -0.5]), kernel(vec![-0.25, 2.0])],
            metadata: BundleMetadata {
                kind: ModelKind::Kernel,
                training_size: 2,
                delta: Some(0.4),
                epsilon: Some(0.1),
                lambda: 0.1,
                gamma: Some(0.5),
                cv_seed: 7,
            },
        };
        let json = bundle.to_json().unwrap();
        assert_eq!(
            json.matches("\"support\"").count(),
            1,
            "support vectors are stored once per bundle"
        );
        let back = PredictorBundle::from_json(&json).unwrap();
        assert_eq!(back, bundle);
        let ptrs: Vec<_> = back
            .models
            .iter()
            .map(|m| match m {
                ClassifierModel::Kernel(k) => Arc::as_ptr(&k.support),
                ClassifierModel::Linear(_) => unreachable!(),
            })
            .collect();
        assert_eq!(ptrs[0], ptrs[1], "deserialized models share one support allocation");
    }

    #[test]
    fn predict_strategy_concatenates_per_entry_outputs() {
        let grid = island(1, 2, 0.1);
        let scenario = flat_scenario(&grid, &[0.5, 0.5]);
        let x = features_of(&scenario);

        let bundle = constant_bundle(&grid, &[1.0, 1.0], 0.0);
        let all_on = predict_strategy(&bundle, &x).unwrap();
        assert_eq!(all_on.values, vec![1, 1], "degenerate-on models predict all ones");

        let mixed = constant_bundle(&grid, &[1.0, -1.0], 0.0);
        let strategy = predict_strategy(&mixed, &x).unwrap();
        assert_eq!(strategy.values, vec![1, 0], "entries concatenate model outputs");

        let wrong = FeatureVector { values: x.values.clone(), schema: "other".into() };
        assert!(predict_strategy(&bundle, &wrong).is_err());
    }

    #[test]
    fn triage_uses_known_optimum_directly() {
        let grid = island(1, 2, 0.1);
        let scenario = flat_scenario(&grid, &[0.8, 0.8]);
        let model = build_uc(&grid, &scenario, &UcOptions::default()).unwrap();
        let result = solve_mip(&model.mip, &BnbSettings::default(), None).unwrap();
        let incumbent = result.incumbent.expect("instance is feasible");
        let optimal = extract_strategy(&incumbent.solution, &model.map).unwrap();

        let bundle = constant_bundle(&grid, &[1.0, 1.0], 0.0);
        let catalog = BTreeMap::from([(optimal.clone(), 3usize)]);
        let outcome =
            triage(&optimal, &grid, &scenario, &bundle, &catalog, &TriagePolicy::default());
        assert_eq!(outcome.decision, TriageDecision::UseDirectly);
        assert_eq!(outcome.strategy, optimal);
        assert_eq!(outcome.diagnostics.prediction_feasible, Some(true));
        assert!(outcome.diagnostics.bounds_desirable);
    }

    #[test]
    fn triage_downgrades_on_impossible_bounds() {
        let grid = island(1, 2, 0.1);
        let scenario = flat_scenario(&grid, &[0.8, 0.8]);
        // Feasible all-on prediction, but the models carry J = 0.5 and the
        // policy demands 0: feasible yet undesirable ⇒ warm start.
        let bundle = constant_bundle(&grid, &[1.0, 1.0], 0.5);
        let prediction = Strategy::new(vec![1, 1]).unwrap();
        let policy = TriagePolicy { max_bound: 0.0, slack: 0.0, aggregate: false };
        let outcome = triage(&prediction, &grid, &scenario, &bundle, &BTreeMap::new(), &policy);
        assert_eq!(outcome.decision, TriageDecision::WarmStart);
        assert_eq!(outcome.strategy, prediction);
        assert!(!outcome.diagnostics.bounds_desirable);
        assert_eq!(outcome.diagnostics.prediction_feasible, Some(true));
    }

    #[test]
    fn triage_recovers_rule_violations_from_the_catalog() {
        let mut grid = island(1, 3, 0.1);
        grid.generators[0].min_up = 2;
        let scenario = flat_scenario(&grid, &[0.0, 0.0, 0.0]);
        // (1, 0, 0) stops after a single hour on: a min-up violation.
        let prediction = Strategy::new(vec![1, 0, 0]).unwrap();
        let feasible = Strategy::new(vec![0, 0, 0]).unwrap();
        let catalog = BTreeMap::from([(feasible.clone(), 2usize)]);
        let bundle = constant_bundle(&grid, &[1.0, -1.0, -1.0], 0.0);
        let outcome =
            triage(&prediction, &grid, &scenario, &bundle, &catalog, &TriagePolicy::default());
        assert_eq!(outcome.decision, TriageDecision::RecoveredWarmStart);
        assert_eq!(outcome.strategy, feasible);
        assert_eq!(outcome.diagnostics.updown_violations, 1);
        assert_eq!(outcome.diagnostics.knn_distance, Some(1));
        assert!(check_min_updown(&outcome.strategy, &grid).is_empty());

        // With no catalog, the same prediction degrades to a warm start.
        let outcome =
            triage(&prediction, &grid, &scenario, &bundle, &BTreeMap::new(), &TriagePolicy::default());
        assert_eq!(outcome.decision, TriageDecision::WarmStart);
        assert!(!outcome.diagnostics.notes.is_empty());
    }

    #[test]
    fn knn_recover_picks_nearest_feasible_with_documented_ties() {
        // p_min = 0 keeps every commitment pattern dispatchable at zero
        // demand, so distance alone decides.
        let grid = island(1, 3, 0.0);
        let scenario = flat_scenario(&grid, &[0.0, 0.0, 0.0]);
        let strategy = |bits: &[u8]| Strategy::new(bits.to_vec()).unwrap();

        let catalog =
            BTreeMap::from([(strategy(&[1, 1, 0]), 1usize), (strategy(&[0, 0, 0]), 1usize)]);
        let (recovered, distance) =
            knn_recover(&strategy(&[1, 1, 1]), &catalog, &grid, &scenario).unwrap();
        assert_eq!(recovered, strategy(&[1, 1, 0]));
        assert_eq!(distance, 1);

        // A prediction already in the catalog recovers to itself.
        let (recovered, distance) =
            knn_recover(&strategy(&[0, 0, 0]), &catalog, &grid, &scenario).unwrap();
        assert_eq!(recovered, strategy(&[0, 0, 0]));
        assert_eq!(distance, 0);

        // Equidistant candidates: the higher occurrence count wins.
        let catalog =
            BTreeMap::from([(strategy(&[1, 0, 0]), 1usize), (strategy(&[0, 1, 0]), 4usize)]);
        let (recovered, _) =
            knn_recover(&strategy(&[0, 0, 0]), &catalog, &grid, &scenario).unwrap();
        assert_eq!(recovered, strategy(&[0, 1, 0]), "higher catalog count breaks the tie");

        // Equidistant and equal counts: lexicographically smaller wins.
        let catalog =
            BTreeMap::from([(strategy(&[1, 0, 0]), 2usize), (strategy(&[0, 1, 0]), 2usize)]);
        let (recovered, _) =
            knn_recover(&strategy(&[0, 0, 0]), &catalog, &grid, &scenario).unwrap();
        assert_eq!(recovered, strategy(&[0, 1, 0]));

        assert!(matches!(
            knn_recover(&strategy(&[0, 0, 0]), &BTreeMap::new(), &grid, &scenario),
            Err(PipelineError::NoFeasibleRecovery)
        ));
    }

    #[test]
    fn knn_recover_skips_infeasible_nearer_candidates() {
        // Positive p_min and zero demand: any committed hour is
        // undispatchable, so only the all-off strategy is feasible.
        let grid = island(1, 3, 0.2);
        let scenario = flat_scenario(&grid, &[0.0, 0.0, 0.0]);
        let strategy = |bits: &[u8]| Strategy::new(bits.to_vec()).unwrap();
        let catalog =
            BTreeMap::from([(strategy(&[1, 1, 1]), 9usize), (strategy(&[0, 0, 0]), 1usize)]);
        let (recovered, distance) =
            knn_recover(&strategy(&[1, 1, 0]), &catalog, &grid, &scenario).unwrap();
        assert_eq!(recovered, strategy(&[0, 0, 0]), "nearest candidate is infeasible here");
        assert_eq!(distance, 2);
    }

    #[test]
    fn knn_recovery_distance_is_minimal_over_feasible_catalog() {
        let grid = island(1, 3, 0.0);
        let scenario = flat_scenario(&grid, &[0.0, 0.0, 0.0]);
        let model = build_uc(&grid, &scenario, &UcOptions::default()).unwrap();
        let strategy = |bits: &[u8]| Strategy::new(bits.to_vec()).unwrap();
        let catalog = BTreeMap::from([
            (strategy(&[0, 0, 0]), 1usize),
            (strategy(&[1, 1, 1]), 2usize),
            (strategy(&[1, 0, 1]), 1usize),
            (strategy(&[0, 1, 1]), 3usize),
        ]);
        for prediction in [[1u8, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1]] {
            let prediction = strategy(&prediction);
            let (_, distance) = knn_recover(&prediction, &catalog, &grid, &scenario).unwrap();
            for candidate in catalog.keys() {
                if strategy_feasible(&model, &grid, candidate, &SolverSettings::default())
                    .unwrap()
                {
                    assert!(
                        distance <= hamming(candidate, &prediction),
                        "exhaustive scan found a closer feasible strategy"
                    );
                }
            }
        }
    }

    #[test]
    fn evaluate_warm_matches_cold_and_fixed_upper_bounds_it() {
        let grid = island(2, 2, 0.1);
        let scenarios =
            vec![flat_scenario(&grid, &[0.8, 1.2]), flat_scenario(&grid, &[1.4, 0.6])];
        // Predict the true optimum of each case through a shared catalog.
        let mut catalog: BTreeMap<Strategy, usize> = BTreeMap::new();
        for scenario in &scenarios {
            let model = build_uc(&grid, scenario, &UcOptions::default()).unwrap();
            let result = solve_mip(&model.mip, &BnbSettings::default(), None).unwrap();
            let optimal =
                extract_strategy(&result.incumbent.unwrap().solution, &model.map).unwrap();
            *catalog.entry(optimal).or_insert(0) += 1;
        }
        let bundle = constant_bundle(&grid, &[1.0, 1.0, 1.0, 1.0], 0.0);
        let config = EvalConfig::default();
        let report = evaluate(&bundle, &grid, &scenarios, &catalog, &config);

        assert_eq!(report.rows.len(), 6, "3 baselines × 2 cases");
        for case_id in 0..2 {
            let of = |baseline: Baseline| {
                report
                    .rows
                    .iter()
                    .find(|r| r.case_id == case_id && r.baseline == baseline)
                    .unwrap()
            };
            let cold = of(Baseline::Cold);
            let warm = of(Baseline::Warm);
            let fixed = of(Baseline::Fixed);
            assert_eq!(cold.status, "Optimal");
            assert_eq!(warm.status, "Optimal");
            let (c, w) = (cold.cost.unwrap(), warm.cost.unwrap());
            assert!(
                (c - w).abs() <= 1e-6 * c.abs().max(1.0),
                "warm and cold disagree: {c} vs {w}"
            );
            let f = fixed.cost.unwrap();
            assert!(f >= c - 1e-6 * c.abs(), "restriction bound violated: {f} < {c}");
            assert!(warm.triage_decision.is_some());
            assert!(fixed.nodes == 0 && fixed.gap.is_none());
        }
        assert_eq!(aggregate(&report.rows), report.aggregates, "aggregates are recomputable");
    }

    #[test]
    fn evaluate_time_limited_cold_hits_the_budget() {
        let grid = island(2, 3, 0.1);
        let scenarios = vec![flat_scenario(&grid, &[0.8, 1.2, 1.0])];
        let bundle = constant_bundle(&grid, &[1.0; 6], 0.0);
        let config = EvalConfig {
            mode: EvalMode::TimeLimited(0.0),
            baselines: BaselineSet { cold: true, warm: false, fixed: false },
            ..EvalConfig::default()
        };
        let report = evaluate(&bundle, &grid, &scenarios, &BTreeMap::new(), &config);
        assert_eq!(report.rows.len(), 1);
        let row = &report.rows[0];
        assert_eq!(row.status, "TimeLimit");
        assert!(row.gap.unwrap() > 0.0, "budgeted run must report a positive gap");
    }

    #[test]
    fn report_csv_has_documented_columns_and_sidecar_round_trips() {
        let rows = vec![
            EvalRow {
                case_id: 0,
                baseline: Baseline::Cold,
                cost: Some(12.5),
                wall_time_s: 0.25,
                nodes: 3,
                gap: Some(0.0),
                status: "Optimal".into(),
                triage_decision: None,
                knn_distance: None,
            },
            EvalRow {
                case_id: 0,
                baseline: Baseline::Warm,
                cost: Some(12.5),
                wall_time_s: 0.125,
                nodes: 1,
                gap: Some(0.0),
                status: "Optimal".into(),
                triage_decision: Some(TriageDecision::RecoveredWarmStart),
                knn_distance: Some(2),
            },
        ];
        let report = EvaluationReport { aggregates: aggregate(&rows), rows };
        let csv = report.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "case_id,baseline,cost,wall_time_s,nodes,gap,status,triage_decision,knn_distance"
        );
        assert_eq!(lines.next().unwrap(), "0,cold,12.5,0.25,3,0.0,Optimal,,");
        assert_eq!(
            lines.next().unwrap(),
            "0,warm,12.5,0.125,1,0.0,Optimal,recovered_warm_start,2"
        );

        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("report.csv");
        let config = EvalConfig::default();
        report.save(&csv_path, &config).unwrap();
        let sidecar = fs::read_to_string(dir.path().join("report.json")).unwrap();
        let parsed: EvalConfig = serde_json::from_str(&sidecar).unwrap();
        assert_eq!(parsed, config, "sidecar reproduces the exact configuration");
    }

    #[test]
    fn percentiles_use_nearest_rank() {
        let sorted = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&sorted, 0.25), 1.0);
        assert_eq!(percentile(&sorted, 0.5), 2.0);
        assert_eq!(percentile(&sorted, 0.75), 3.0);
        assert_eq!(percentile(&sorted, 1.0), 4.0);
        assert_eq!(percentile(&[7.0], 0.5), 7.0);
    }
}
