//! Support-vector-machine classifiers over commitment strategies.
//!
//! One binary classifier is trained per (unit, hour) entry of the strategy
//! vector, in four variants: linear or kernelized, each with or without a
//! quadratic regularizer. The regularized problems are the tractable
//! equivalents of distributionally robust classifiers over a Wasserstein
//! ball around the empirical distribution, which is what buys the
//! out-of-sample guarantee checked by [`check_guarantee`]:
//!
//! ```text
//!   linear:  min (1/H) Σ_h ζ_h + λ‖w‖²     s.t. y_h (wᵀx_h + b) ≥ 1 − ζ_h
//!   kernel:  min (1/H) Σ_h ζ_h + λ‖f^½β‖²  s.t. y_h Σ_k f(x_k,x_h) β_k ≥ 1 − ζ_h
//! ```
//!
//! with ζ ≥ 0, Gaussian kernel `f(x,x′) = exp(−γ‖x−x′‖²)`, and map
//! functions `sign(wᵀx̃ + b)` and `sign(Σ_h f(x̃,x_h) β_h)`. Both programs
//! are solved by the interior-point core; the regularizer enters through
//! the rotated-cone epigraph `ρ ≥ ‖·‖²`, so the λ = 0 case degrades to the
//! plain soft-margin LP. The optimal value `J(λ)`, recomputed exactly from
//! the returned weights, upper-bounds the expected hinge loss on any test
//! set whose distribution stays inside the robustness ball.
//!
//! The module also provides seeded k-fold cross-validation for (λ, γ), the
//! exact 2-Wasserstein distance between feature sets (an optimal-transport
//! LP on the conic core), and [`train_all`], which fits the full M×T model
//! bundle in parallel.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conic::{self, ConicSolution, ProgramBuilder, SolveStatus, SolverSettings};
use crate::grid::{FeatureSchema, FeatureVector, GridSpec, SampleSet};
use crate::pipeline::{BundleMetadata, PredictorBundle};

/// Errors from classifier training, evaluation, and dataset distances.
#[derive(Debug, Error)]
pub enum SvmError {
    /// Structurally invalid inputs (shape, alphabet, emptiness).
    #[error("invalid data: {0}")]
    InvalidData(String),
    /// A hyperparameter outside its domain.
    #[error("invalid parameter `{field}`: {detail}")]
    InvalidParameter { field: &'static str, detail: String },
    /// The conic core did not return an optimal solution.
    #[error("conic solve ended with status {status:?} (duality gap {gap:.2e})")]
    SolveFailed { status: SolveStatus, gap: f64 },
    /// Feature vector tagged with a different schema than the model.
    #[error("schema mismatch: model trained on `{expected}`, input tagged `{got}`")]
    SchemaMismatch { expected: String, got: String },
    /// Feature vector of the wrong width.
    #[error("feature dimension {got}, model expects {want}")]
    DimensionMismatch { got: usize, want: usize },
    /// Every cross-validation grid point failed to train.
    #[error("cross-validation failed: {0}")]
    CrossValidation(String),
}

/// A training or test set for one (unit, hour) classifier: feature vectors
/// sharing a schema, with labels in {−1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
    schema: String,
}

impl LabeledSet {
    /// Builds a set from raw rows, enforcing equal counts, a common
    /// dimension, finite entries, and the ±1 label alphabet.
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<f64>,
        schema: impl Into<String>,
    ) -> Result<LabeledSet, SvmError> {
        if features.is_empty() {
            return Err(SvmError::InvalidData("empty labeled set".into()));
        }
        if features.len() != labels.len() {
            return Err(SvmError::InvalidData(format!(
                "{} feature vectors but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let dim = features[0].len();
        for (idx, row) in features.iter().enumerate() {
            if row.len() != dim {
                return Err(SvmError::InvalidData(format!(
                    "feature {idx} has dimension {} (expected {dim})",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(SvmError::InvalidData(format!("feature {idx} has a non-finite entry")));
            }
        }
        for (idx, &y) in labels.iter().enumerate() {
            if y != 1.0 && y != -1.0 {
                return Err(SvmError::InvalidData(format!("label {idx} is {y}, not in {{−1, +1}}")));
            }
        }
        Ok(LabeledSet { features, labels, schema: schema.into() })
    }

    /// Builds a set from tagged feature vectors, enforcing a shared schema.
    pub fn from_feature_vectors(
        features: Vec<FeatureVector>,
        labels: Vec<f64>,
    ) -> Result<LabeledSet, SvmError> {
        let schema = match features.first() {
            Some(f) => f.schema.clone(),
            None => return Err(SvmError::InvalidData("empty labeled set".into())),
        };
        for f in &features {
            if f.schema != schema {
                return Err(SvmError::SchemaMismatch {
                    expected: schema,
                    got: f.schema.clone(),
                });
            }
        }
        LabeledSet::new(features.into_iter().map(|f| f.values).collect(), labels, schema)
    }

    /// Extracts the labeled set of entry (`unit`, `hour`) from solved
    /// samples: the label is the ±1 view of that strategy entry.
    pub fn from_samples(
        samples: &SampleSet,
        unit: usize,
        hour: usize,
        horizon: usize,
    ) -> Result<LabeledSet, SvmError> {
        let entry = unit * horizon + hour;
        let mut features = Vec::with_capacity(samples.len());
        let mut labels = Vec::with_capacity(samples.len());
        for (x, y) in &samples.samples {
            if entry >= y.len() {
                return Err(SvmError::InvalidData(format!(
                    "strategy has {} entries, entry ({unit}, {hour}) needs {}",
                    y.len(),
                    entry + 1
                )));
            }
            features.push(x.clone());
            labels.push(if y.values[entry] == 1 { 1.0 } else { -1.0 });
        }
        LabeledSet::from_feature_vectors(features, labels)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Feature dimension (well-defined: sets are never empty).
    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn schema(&self) -> &str {
        &self.schema
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

}

/// Hyperplane classifier `sign(wᵀx + b)` with its training optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b: f64,
    /// Regularization weight the model was trained with.
    pub lambda: f64,
    /// Training optimum J(λ) = mean hinge + λ‖w‖², the out-of-sample bound.
    pub j: f64,
    /// True when the training data held a single class and no program was
    /// solved; the model is the constant classifier of that class.
    pub degenerate: bool,
    /// Schema tag of the training features.
    pub schema: String,
}

/// Kernelized classifier `sign(Σ_h f(x̃, x_h) β_h)` over its support set.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelModel {
    /// Training feature vectors; shared between the models of a bundle.
    pub support: Arc<Vec<Vec<f64>>>,
    /// One coefficient per support vector.
    pub beta: Vec<f64>,
    /// Gaussian kernel width γ.
    pub gamma: f64,
    pub lambda: f64,
    /// Training optimum J′(λ) = mean hinge + λ‖f^½β‖².
    pub j: f64,
    pub degenerate: bool,
    pub schema: String,
}

/// Either classifier variant; the unit of storage inside a bundle.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierModel {
    Linear(LinearModel),
    Kernel(KernelModel),
}

impl ClassifierModel {
    pub fn schema(&self) -> &str {
        match self {
            ClassifierModel::Linear(m) => &m.schema,
            ClassifierModel::Kernel(m) => &m.schema,
        }
    }

    /// Feature dimension the model expects.
    pub fn dim(&self) -> usize {
        match self {
            ClassifierModel::Linear(m) => m.w.len(),
            ClassifierModel::Kernel(m) => m.support.first().map_or(0, Vec::len),
        }
    }

    /// The stored training optimum: the out-of-sample hinge bound.
    pub fn bound(&self) -> f64 {
        match self {
            ClassifierModel::Linear(m) => m.j,
            ClassifierModel::Kernel(m) => m.j,
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            ClassifierModel::Linear(m) => m.lambda,
            ClassifierModel::Kernel(m) => m.lambda,
        }
    }

    pub fn degenerate(&self) -> bool {
        match self {
            ClassifierModel::Linear(m) => m.degenerate,
            ClassifierModel::Kernel(m) => m.degenerate,
        }
    }

    /// Raw decision value on an untagged row (no schema check).
    fn score_raw(&self, x: &[f64]) -> f64 {
        match self {
            ClassifierModel::Linear(m) => {
                m.b + m.w.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            }
            ClassifierModel::Kernel(m) => m
                .support
                .iter()
                .zip(&m.beta)
                .map(|(s, beta)| beta * (-m.gamma * sq_dist(s, x)).exp())
                .sum(),
        }
    }
}

impl From<LinearModel> for ClassifierModel {
    fn from(m: LinearModel) -> Self {
        ClassifierModel::Linear(m)
    }
}

impl From<KernelModel> for ClassifierModel {
    fn from(m: KernelModel) -> Self {
        ClassifierModel::Kernel(m)
    }
}

/// A classified point: the ±1 label and the raw decision value behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// +1.0 or −1.0; ties (score exactly 0) commit the unit: +1.
    pub label: f64,
    pub score: f64,
}

/// Outcome of testing the out-of-sample guarantee on a concrete set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeCheck {
    /// `lhs ≤ bound`.
    pub holds: bool,
    /// Expected hinge loss over the test set.
    pub lhs: f64,
    /// The stored training optimum J(λ) or J′(λ).
    pub bound: f64,
}

/// Which classifier family to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Linear,
    Kernel,
}

/// Cross-validation layout: fold count, hyperparameter grids, fold seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub lambda_grid: Vec<f64>,
    /// Only consulted for kernel models.
    pub gamma_grid: Vec<f64>,
    /// Seed of the shuffled fold assignment.
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 4,
            lambda_grid: log_grid(1e-4, 1e1, 7),
            gamma_grid: log_grid(1e-3, 1e2, 6),
            seed: 0,
        }
    }
}

/// `points` geometrically spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && points >= 1, "grid needs 0 < lo ≤ hi and ≥ 1 point");
    if points == 1 {
        return vec![lo];
    }
    let mut grid: Vec<f64> = (0..points)
        .map(|k| lo * (hi / lo).powf(k as f64 / (points - 1) as f64))
        .collect();
    grid[0] = lo;
    grid[points - 1] = hi;
    grid
}

/// One evaluated grid point of a cross-validation sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvCell {
    pub lambda: f64,
    /// `None` for linear models.
    pub gamma: Option<f64>,
    /// Mean expected hinge loss over the validation folds; infinite when
    /// a fold failed to train at this grid point.
    pub mean_validation_hinge: f64,
}

/// Selected hyperparameters plus the full validation table behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSelection {
    pub lambda: f64,
    pub gamma: Option<f64>,
    pub table: Vec<CvCell>,
}

/// Hinge loss `L(z, z′) = max(0, 1 − z z′)` of label `z` and score `z′`.
pub fn hinge(z: f64, z_prime: f64) -> f64 {
    debug_assert!(z == 1.0 || z == -1.0, "hinge label must be ±1");
    (1.0 - z * z_prime).max(0.0)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Gaussian kernel `exp(−γ‖x_k − x_h‖²)`.
pub fn gaussian_kernel(x_k: &[f64], x_h: &[f64], gamma: f64) -> Result<f64, SvmError> {
    if x_k.len() != x_h.len() {
        return Err(SvmError::DimensionMismatch { got: x_h.len(), want: x_k.len() });
    }
    validate_gamma(gamma)?;
    Ok((-gamma * sq_dist(x_k, x_h)).exp())
}

/// Dense kernel matrix of a feature set: symmetric with unit diagonal.
pub fn kernel_matrix(xs: &[Vec<f64>], gamma: f64) -> Result<Vec<Vec<f64>>, SvmError> {
    validate_gamma(gamma)?;
    let h = xs.len();
    let dim = xs.first().map_or(0, Vec::len);
    let mut k = vec![vec![0.0; h]; h];
    for i in 0..h {
        if xs[i].len() != dim {
            return Err(SvmError::DimensionMismatch { got: xs[i].len(), want: dim });
        }
        k[i][i] = 1.0;
        for j in 0..i {
            let v = (-gamma * sq_dist(&xs[i], &xs[j])).exp();
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    Ok(k)
}

/// Eigenvalue floor applied when taking the kernel square root; absorbs
/// the tiny negative eigenvalues near-duplicate samples produce.
const EIGENVALUE_FLOOR: f64 = 1e-10;

/// Largest negative eigenvalue a kernel matrix may show before it is
/// rejected as numerically indefinite rather than floored.
const PSD_TOLERANCE: f64 = -1e-8;

/// Kernel matrix together with its symmetric PSD square root.
struct KernelPrecomp {
    k: Vec<Vec<f64>>,
    /// `f^½` with eigenvalues floored at [`EIGENVALUE_FLOOR`].
    sqrt: Vec<Vec<f64>>,
}

fn kernel_precompute(xs: &[Vec<f64>], gamma: f64) -> Result<KernelPrecomp, SvmError> {
    let k = kernel_matrix(xs, gamma)?;
    let h = k.len();
    let dense = DMatrix::from_fn(h, h, |i, j| k[i][j]);
    let eigen = dense.symmetric_eigen();
    let min_eigenvalue = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eigenvalue < PSD_TOLERANCE {
        return Err(SvmError::InvalidData(format!(
            "kernel matrix has eigenvalue {min_eigenvalue}, below the PSD tolerance"
        )));
    }
    let roots = DMatrix::from_diagonal(
        &eigen.eigenvalues.map(|v| v.max(EIGENVALUE_FLOOR).sqrt()),
    );
    let s = &eigen.eigenvectors * roots * eigen.eigenvectors.transpose();
    let sqrt = (0..h).map(|i| (0..h).map(|j| s[(i, j)]).collect()).collect();
    Ok(KernelPrecomp { k, sqrt })
}

/// Solver settings for training and transport programs: tighter than the
/// defaults so the recomputed optima satisfy the 1e-9-level monotonicity
/// and bound checks downstream.
pub fn training_settings() -> SolverSettings {
    SolverSettings { tolerance: 1e-9, max_iterations: 400, ..SolverSettings::default() }
}

fn validate_lambda(lambda: f64) -> Result<(), SvmError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(SvmError::InvalidParameter {
            field: "lambda",
            detail: format!("{lambda} is not a finite nonnegative weight"),
        });
    }
    Ok(())
}

fn validate_gamma(gamma: f64) -> Result<(), SvmError> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(SvmError::InvalidParameter {
            field: "gamma",
            detail: format!("{gamma} is not a finite positive width"),
        });
    }
    Ok(())
}

/// Trains the linear classifier at regularization weight `λ` with the
/// default training settings. See [`train_linear_with`].
pub fn train_linear(data: &LabeledSet, lambda: f64) -> Result<LinearModel, SvmError> {
    train_linear_with(data, lambda, &training_settings()).map(|(m, _)| m)
}

/// Trains the linear classifier, returning the raw conic solution next to
/// the model (`None` on the degenerate single-class path, which solves
/// nothing and returns the constant classifier of that class).
///
/// For λ > 0 the solved program is the regularized soft-margin SVM with
/// the epigraph cone `ρ ≥ ‖w‖²`; at λ = 0 it is the plain slack LP. The
/// stored optimum is recomputed from the returned hyperplane as
/// `J(λ) = mean hinge + λ‖w‖²`, which never undershoots the true optimum.
pub fn train_linear_with(
    data: &LabeledSet,
    lambda: f64,
    settings: &SolverSettings,
) -> Result<(LinearModel, Option<ConicSolution>), SvmError> {
    validate_lambda(lambda)?;
    train_linear_core(data.features(), data.labels(), data.schema(), lambda, settings)
}

fn train_linear_core(
    features: &[Vec<f64>],
    labels: &[f64],
    schema: &str,
    lambda: f64,
    settings: &SolverSettings,
) -> Result<(LinearModel, Option<ConicSolution>), SvmError> {
    let h = features.len();
    let d = features[0].len();
    if let Some(class) = single_class_of(labels) {
        let model = LinearModel {
            w: vec![0.0; d],
            b: class,
            lambda,
            j: 0.0,
            degenerate: true,
            schema: schema.to_string(),
        };
        return Ok((model, None));
    }

    let mut pb = ProgramBuilder::new();
    let w = pb.free_vars(d);
    let intercept = pb.free_vars(1).start;
    let zeta = pb.nonneg_vars(h);
    for k in zeta.clone() {
        pb.set_cost(k, 1.0 / h as f64);
    }
    let rho = (lambda > 0.0).then(|| {
        let r = pb.free_vars(1).start;
        pb.set_cost(r, lambda);
        r
    });
    for (s, (x, &y)) in features.iter().zip(labels).enumerate() {
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(d + 2);
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                entries.push((w.start + j, y * xj));
            }
        }
        entries.push((intercept, y));
        entries.push((zeta.start + s, 1.0));
        pb.geq_row(&entries, 1.0);
    }
    if let Some(r) = rho {
        // ρ ≥ ‖w‖²  ⇔  ‖(2w, ρ − 1)‖ ≤ ρ + 1.
        let mut exprs: Vec<(Vec<(usize, f64)>, f64)> = Vec::with_capacity(d + 2);
        exprs.push((vec![(r, 1.0)], 1.0));
        for j in w.clone() {
            exprs.push((vec![(j, 2.0)], 0.0));
        }
        exprs.push((vec![(r, 1.0)], -1.0));
        pb.soc_of_expressions(&exprs);
    }
    let program =
        pb.build().map_err(|e| SvmError::InvalidData(format!("training program: {e}")))?;
    let sol = conic::solve(&program, settings);
    if sol.status != SolveStatus::Optimal {
        return Err(SvmError::SolveFailed { status: sol.status, gap: sol.residuals.gap });
    }
    let wv: Vec<f64> = w.map(|j| sol.primal[j]).collect();
    let bv = sol.primal[intercept];
    let mean_hinge = features
        .iter()
        .zip(labels)
        .map(|(x, &y)| hinge(y, bv + wv.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()))
        .sum::<f64>()
        / h as f64;
    let j = mean_hinge + lambda * wv.iter().map(|v| v * v).sum::<f64>();
    let model =
        LinearModel { w: wv, b: bv, lambda, j, degenerate: false, schema: schema.to_string() };
    Ok((model, Some(sol)))
}

fn single_class_of(labels: &[f64]) -> Option<f64> {
    let first = labels[0];
    labels.iter().all(|&y| y == first).then_some(first)
}

/// Trains the kernelized classifier at weight `λ` and kernel width `γ`
/// with the default training settings. See [`train_kernel_with`].
pub fn train_kernel(data: &LabeledSet, lambda: f64, gamma: f64) -> Result<KernelModel, SvmError> {
    train_kernel_with(data, lambda, gamma, &training_settings()).map(|(m, _)| m)
}

/// Trains the kernelized classifier, returning the raw conic solution
/// (`None` on the degenerate single-class path).
///
/// The hinge constraints use the training constraint consistent with the
/// map function `sign(Σ_h f(x̃,x_h)β_h)`: `y_h · Σ_k f(x_k,x_h) β_k ≥
/// 1 − ζ_h`. The regularizer `λ‖f^½β‖²` enters through the epigraph cone
/// on the floored symmetric square root of the kernel matrix, and the
/// stored `J′(λ)` is recomputed from the returned coefficients.
pub fn train_kernel_with(
    data: &LabeledSet,
    lambda: f64,
    gamma: f64,
    settings: &SolverSettings,
) -> Result<(KernelModel, Option<ConicSolution>), SvmError> {
    validate_lambda(lambda)?;
    validate_gamma(gamma)?;
    let pre = kernel_precompute(data.features(), gamma)?;
    let support = Arc::new(data.features().to_vec());
    train_kernel_core(&support, data.schema(), data.labels(), lambda, gamma, &pre, settings)
}

fn train_kernel_core(
    support: &Arc<Vec<Vec<f64>>>,
    schema: &str,
    labels: &[f64],
    lambda: f64,
    gamma: f64,
    pre: &KernelPrecomp,
    settings: &SolverSettings,
) -> Result<(KernelModel, Option<ConicSolution>), SvmError> {
    let h = labels.len();
    if let Some(class) = single_class_of(labels) {
        // Constant classifier of the class: β = class·s·1 with s sized so
        // every kernel score clears the margin; kernel values are positive,
        // so the predicted sign is the class for every input.
        let row_sums: Vec<f64> = pre.k.iter().map(|row| row.iter().sum()).collect();
        let scale = 1.0 / row_sums.iter().copied().fold(f64::INFINITY, f64::min);
        let beta = vec![class * scale; h];
        let j = lambda * quad_form(&pre.k, &beta);
        let model = KernelModel {
            support: support.clone(),
            beta,
            gamma,
            lambda,
            j,
            degenerate: true,
            schema: schema.to_string(),
        };
        return Ok((model, None));
    }

    let mut pb = ProgramBuilder::new();
    let beta = pb.free_vars(h);
    let zeta = pb.nonneg_vars(h);
    for k in zeta.clone() {
        pb.set_cost(k, 1.0 / h as f64);
    }
    let rho = (lambda > 0.0).then(|| {
        let r = pb.free_vars(1).start;
        pb.set_cost(r, lambda);
        r
    });
    for (s, &y) in labels.iter().enumerate() {
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(h + 1);
        for k in 0..h {
            entries.push((beta.start + k, y * pre.k[s][k]));
        }
        entries.push((zeta.start + s, 1.0));
        pb.geq_row(&entries, 1.0);
    }
    if let Some(r) = rho {
        // ρ ≥ ‖f^½ β‖²  ⇔  ‖(2 f^½ β, ρ − 1)‖ ≤ ρ + 1.
        let mut exprs: Vec<(Vec<(usize, f64)>, f64)> = Vec::with_capacity(h + 2);
        exprs.push((vec![(r, 1.0)], 1.0));
        for i in 0..h {
            let row: Vec<(usize, f64)> =
                (0..h).map(|j| (beta.start + j, 2.0 * pre.sqrt[i][j])).collect();
            exprs.push((row, 0.0));
        }
        exprs.push((vec![(r, 1.0)], -1.0));
        pb.soc_of_expressions(&exprs);
    }
    let program =
        pb.build().map_err(|e| SvmError::InvalidData(format!("training program: {e}")))?;
    let sol = conic::solve(&program, settings);
    if sol.status != SolveStatus::Optimal {
        return Err(SvmError::SolveFailed { status: sol.status, gap: sol.residuals.gap });
    }
    let bv: Vec<f64> = beta.map(|j| sol.primal[j]).collect();
    let mean_hinge = labels
        .iter()
        .enumerate()
        .map(|(s, &y)| hinge(y, pre.k[s].iter().zip(&bv).map(|(k, b)| k * b).sum::<f64>()))
        .sum::<f64>()
        / h as f64;
    let reg: f64 = pre
        .sqrt
        .iter()
        .map(|row| row.iter().zip(&bv).map(|(s, b)| s * b).sum::<f64>().powi(2))
        .sum();
    let model = KernelModel {
        support: support.clone(),
        beta: bv,
        gamma,
        lambda,
        j: mean_hinge + lambda * reg,
        degenerate: false,
        schema: schema.to_string(),
    };
    Ok((model, Some(sol)))
}

fn quad_form(k: &[Vec<f64>], v: &[f64]) -> f64 {
    k.iter()
        .zip(v)
        .map(|(row, &vi)| vi * row.iter().zip(v).map(|(a, &vj)| a * vj).sum::<f64>())
        .sum()
}

/// Classifies a tagged feature vector; ties (`score = 0`) commit to +1.
pub fn predict(model: &ClassifierModel, x: &FeatureVector) -> Result<Prediction, SvmError> {
    if x.schema != model.schema() {
        return Err(SvmError::SchemaMismatch {
            expected: model.schema().to_string(),
            got: x.schema.clone(),
        });
    }
    if x.values.len() != model.dim() {
        return Err(SvmError::DimensionMismatch { got: x.values.len(), want: model.dim() });
    }
    let score = model.score_raw(&x.values);
    Ok(Prediction { label: if score >= 0.0 { 1.0 } else { -1.0 }, score })
}

/// Mean hinge loss of the model over a labeled set.
pub fn expected_hinge(model: &ClassifierModel, data: &LabeledSet) -> Result<f64, SvmError> {
    if data.schema() != model.schema() {
        return Err(SvmError::SchemaMismatch {
            expected: model.schema().to_string(),
            got: data.schema().to_string(),
        });
    }
    if data.dim() != model.dim() {
        return Err(SvmError::DimensionMismatch { got: data.dim(), want: model.dim() });
    }
    let total: f64 = data
        .features()
        .iter()
        .zip(data.labels())
        .map(|(x, &y)| hinge(y, model.score_raw(x)))
        .sum();
    Ok(total / data.len() as f64)
}

/// Tests the out-of-sample guarantee: expected hinge on `test` against the
/// model's stored training optimum.
pub fn check_guarantee(
    model: &ClassifierModel,
    test: &LabeledSet,
) -> Result<GuaranteeCheck, SvmError> {
    let lhs = expected_hinge(model, test)?;
    let bound = model.bound();
    Ok(GuaranteeCheck { holds: lhs <= bound, lhs, bound })
}

/// Deterministic shuffled fold assignment: entry `i` is the fold of
/// sample `i`.
fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut fold = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold[i] = pos % folds;
    }
    fold
}

fn fold_split(data: &LabeledSet, fold: &[usize], held_out: usize) -> (LabeledSet, LabeledSet) {
    let mut train = (Vec::new(), Vec::new());
    let mut val = (Vec::new(), Vec::new());
    for (i, (x, &y)) in data.features().iter().zip(data.labels()).enumerate() {
        let side = if fold[i] == held_out { &mut val } else { &mut train };
        side.0.push(x.clone());
        side.1.push(y);
    }
    let schema = data.schema().to_string();
    (
        LabeledSet { features: train.0, labels: train.1, schema: schema.clone() },
        LabeledSet { features: val.0, labels: val.1, schema },
    )
}

/// `candidate` beats `best` when its loss is strictly lower; exact ties go
/// to the larger λ (stronger robustness), then the smaller γ.
fn better_cell(candidate: &CvCell, best: &CvCell) -> bool {
    if candidate.mean_validation_hinge != best.mean_validation_hinge {
        return candidate.mean_validation_hinge < best.mean_validation_hinge;
    }
    if candidate.lambda != best.lambda {
        return candidate.lambda > best.lambda;
    }
    match (candidate.gamma, best.gamma) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    }
}

/// Enumerates the hyperparameter grid of a kind in deterministic order.
fn grid_points(cv: &CvConfig, kind: ModelKind) -> Vec<(f64, Option<f64>)> {
    match kind {
        ModelKind::Linear => cv.lambda_grid.iter().map(|&l| (l, None)).collect(),
        ModelKind::Kernel => cv
            .lambda_grid
            .iter()
            .flat_map(|&l| cv.gamma_grid.iter().map(move |&g| (l, Some(g))))
            .collect(),
    }
}

/// Seeded k-fold cross-validation over the hyperparameter grid.
///
/// Every sample lands in exactly one validation fold; the score of a grid
/// point is the mean expected hinge loss over the held-out folds. Grid
/// points whose training solve fails score infinity instead of aborting
/// the sweep; if every point fails, an error is returned.
pub fn cross_validate(
    data: &LabeledSet,
    cv: &CvConfig,
    kind: ModelKind,
) -> Result<CvSelection, SvmError> {
    if cv.folds < 2 {
        return Err(SvmError::InvalidParameter {
            field: "folds",
            detail: format!("{} folds, need at least 2", cv.folds),
        });
    }
    if data.len() < cv.folds {
        return Err(SvmError::InvalidData(format!(
            "{} samples cannot fill {} folds",
            data.len(),
            cv.folds
        )));
    }
    if cv.lambda_grid.is_empty() {
        return Err(SvmError::InvalidParameter {
            field: "lambda_grid",
            detail: "empty grid".into(),
        });
    }
    for &l in &cv.lambda_grid {
        validate_lambda(l)?;
    }
    if kind == ModelKind::Kernel {
        if cv.gamma_grid.is_empty() {
            return Err(SvmError::InvalidParameter {
                field: "gamma_grid",
                detail: "empty grid".into(),
            });
        }
        for &g in &cv.gamma_grid {
            validate_gamma(g)?;
        }
    }

    let fold = fold_assignment(data.len(), cv.folds, cv.seed);
    let mut table = Vec::new();
    for (lambda, gamma) in grid_points(cv, kind) {
        let mut losses = Vec::with_capacity(cv.folds);
        for held_out in 0..cv.folds {
            let (train, val) = fold_split(data, &fold, held_out);
            let trained = match kind {
                ModelKind::Linear => train_linear(&train, lambda).map(ClassifierModel::Linear),
                ModelKind::Kernel => {
                    train_kernel(&train, lambda, gamma.unwrap()).map(ClassifierModel::Kernel)
                }
            };
            match trained {
                Ok(model) => losses.push(expected_hinge(&model, &val)?),
                Err(SvmError::SolveFailed { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        let mean = if losses.len() == cv.folds {
            losses.iter().sum::<f64>() / cv.folds as f64
        } else {
            f64::INFINITY
        };
        table.push(CvCell { lambda, gamma, mean_validation_hinge: mean });
    }
    let mut best = table[0];
    for cell in &table[1..] {
        if better_cell(cell, &best) {
            best = *cell;
        }
    }
    if best.mean_validation_hinge.is_infinite() {
        return Err(SvmError::CrossValidation(
            "every grid point failed to train on some fold".into(),
        ));
    }
    Ok(CvSelection { lambda: best.lambda, gamma: best.gamma, table })
}

/// Exact 2-Wasserstein distance between two feature sets, each carrying
/// uniform weights: the square root of the optimal-transport LP value
/// under squared-Euclidean costs.
pub fn wasserstein2(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64, SvmError> {
    if a.is_empty() || b.is_empty() {
        return Err(SvmError::InvalidData("wasserstein2 of an empty set".into()));
    }
    let dim = a[0].len();
    for row in a.iter().chain(b) {
        if row.len() != dim {
            return Err(SvmError::DimensionMismatch { got: row.len(), want: dim });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::InvalidData("non-finite feature entry".into()));
        }
    }
    // Identical empirical distributions need no transport; answering
    // exactly zero here sidesteps the sqrt amplification of the solver's
    // tiny residual objective.
    if a.len() == b.len() {
        let key = |u: &Vec<f64>, v: &Vec<f64>| u.partial_cmp(v).unwrap();
        let mut sa = a.to_vec();
        let mut sb = b.to_vec();
        sa.sort_by(key);
        sb.sort_by(key);
        if sa == sb {
            return Ok(0.0);
        }
    }

    let m = a.len();
    let n = b.len();
    let mut pb = ProgramBuilder::new();
    let plan = pb.nonneg_vars(m * n);
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            pb.set_cost(plan.start + i * n + j, sq_dist(ai, bj));
        }
    }
    for i in 0..m {
        let row: Vec<(usize, f64)> = (0..n).map(|j| (plan.start + i * n + j, 1.0)).collect();
        pb.eq_row(&row, 1.0 / m as f64);
    }
    // The final column-marginal row is implied by the others and would
    // make the equality system rank-deficient.
    for j in 0..n.saturating_sub(1) {
        let col: Vec<(usize, f64)> = (0..m).map(|i| (plan.start + i * n + j, 1.0)).collect();
        pb.eq_row(&col, 1.0 / n as f64);
    }
    let program =
        pb.build().map_err(|e| SvmError::InvalidData(format!("transport program: {e}")))?;
    let sol = conic::solve(&program, &training_settings());
    if sol.status != SolveStatus::Optimal {
        return Err(SvmError::SolveFailed { status: sol.status, gap: sol.residuals.gap });
    }
    Ok(sol.objective.max(0.0).sqrt())
}

/// Trains the full bundle: one classifier per (unit, hour) entry.
///
/// Hyperparameters are shared across the bundle and picked once by
/// cross-validation aggregated over the (at most six) entries whose labels
/// are most balanced; entries that only ever take one value contribute
/// degenerate constant models and no validation signal. By default the
/// sweep runs on the training samples themselves; passing `validation`
/// reproduces the protocol of tuning on a held-out set instead. Singleton
/// grids pin the hyperparameters without any sweep solves.
pub fn train_all(
    samples: &SampleSet,
    grid: &GridSpec,
    cv: &CvConfig,
    kind: ModelKind,
    validation: Option<&SampleSet>,
) -> Result<PredictorBundle, SvmError> {
    if samples.is_empty() {
        return Err(SvmError::InvalidData("empty sample set".into()));
    }
    let tag = samples.schema().expect("non-empty sample set");
    if tag != "full" {
        return Err(SvmError::InvalidData(format!(
            "sample features carry schema tag `{tag}`; pass the matching schema \
             to `train_all_with_schema`"
        )));
    }
    train_all_with_schema(samples, grid, cv, kind, validation, FeatureSchema::full())
}

/// [`train_all`] with an explicit feature schema, for sample sets extracted
/// under a non-default [`FeatureSchema`]. The schema's name must match the
/// tag carried by the sample features.
pub fn train_all_with_schema(
    samples: &SampleSet,
    grid: &GridSpec,
    cv: &CvConfig,
    kind: ModelKind,
    validation: Option<&SampleSet>,
    schema: FeatureSchema,
) -> Result<PredictorBundle, SvmError> {
    if samples.is_empty() {
        return Err(SvmError::InvalidData("empty sample set".into()));
    }
    let tag = samples.schema().expect("non-empty sample set").to_string();
    if schema.name != tag {
        return Err(SvmError::SchemaMismatch { expected: schema.name.clone(), got: tag });
    }
    let units = grid.n_units();
    let horizon = grid.horizon;
    let entries = units * horizon;
    for (_, strategy) in &samples.samples {
        if strategy.len() != entries {
            return Err(SvmError::InvalidData(format!(
                "strategy length {} does not match {units} units × {horizon} hours",
                strategy.len()
            )));
        }
    }
    let features: Vec<Vec<f64>> = samples.samples.iter().map(|(x, _)| x.values.clone()).collect();

    let (lambda, gamma) = select_hyperparameters(samples, validation, entries, cv, kind)?;

    let labels_of = |set: &SampleSet, entry: usize| -> Vec<f64> {
        set.samples
            .iter()
            .map(|(_, s)| if s.values[entry] == 1 { 1.0 } else { -1.0 })
            .collect()
    };
    let models: Result<Vec<ClassifierModel>, SvmError> = match kind {
        ModelKind::Linear => (0..entries)
            .into_par_iter()
            .map(|entry| {
                let labels = labels_of(samples, entry);
                train_linear_core(&features, &labels, &tag, lambda, &training_settings())
                    .map(|(m, _)| ClassifierModel::Linear(m))
            })
            .collect(),
        ModelKind::Kernel => {
            let gamma = gamma.expect("kernel training selects a width");
            let pre = kernel_precompute(&features, gamma)?;
            let support = Arc::new(features.clone());
            (0..entries)
                .into_par_iter()
                .map(|entry| {
                    let labels = labels_of(samples, entry);
                    train_kernel_core(
                        &support,
                        &tag,
                        &labels,
                        lambda,
                        gamma,
                        &pre,
                        &training_settings(),
                    )
                    .map(|(m, _)| ClassifierModel::Kernel(m))
                })
                .collect()
        }
    };
    Ok(PredictorBundle {
        units,
        horizon,
        schema,
        models: models?,
        metadata: BundleMetadata {
            kind,
            training_size: samples.len(),
            delta: None,
            epsilon: None,
            lambda,
            gamma,
            cv_seed: cv.seed,
        },
    })
}

/// Shared (λ, γ) selection for [`train_all`]; see its contract.
fn select_hyperparameters(
    samples: &SampleSet,
    validation: Option<&SampleSet>,
    entries: usize,
    cv: &CvConfig,
    kind: ModelKind,
) -> Result<(f64, Option<f64>), SvmError> {
    // Singleton grids fully determine the choice; skip the sweep.
    let singleton = match kind {
        ModelKind::Linear => cv.lambda_grid.len() == 1,
        ModelKind::Kernel => cv.lambda_grid.len() == 1 && cv.gamma_grid.len() == 1,
    };
    let fallback = |kind: ModelKind| -> Result<(f64, Option<f64>), SvmError> {
        let lambda = cv.lambda_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        validate_lambda(lambda)?;
        let gamma = match kind {
            ModelKind::Linear => None,
            ModelKind::Kernel => {
                let g = cv.gamma_grid.iter().copied().fold(f64::INFINITY, f64::min);
                validate_gamma(g)?;
                Some(g)
            }
        };
        Ok((lambda, gamma))
    };
    if singleton {
        return fallback(kind);
    }

    let source = validation.unwrap_or(samples);
    if source.is_empty() {
        return Err(SvmError::InvalidData("empty validation set".into()));
    }
    // Rank entries by label balance and probe the most informative few.
    let mut balances: Vec<(usize, usize)> = (0..entries)
        .map(|entry| {
            let ones =
                source.samples.iter().filter(|(_, s)| s.values[entry] == 1).count();
            (entry, ones.min(source.len() - ones))
        })
        .filter(|&(_, balance)| balance > 0)
        .collect();
    balances.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    balances.truncate(6);
    if balances.is_empty() {
        // Every entry is single-class: all models are constant classifiers
        // and the sweep has no signal; the tie rule picks the extremes.
        return fallback(kind);
    }

    let sweeps: Result<Vec<CvSelection>, SvmError> = balances
        .par_iter()
        .map(|&(entry, _)| {
            let horizon = 1; // entry index is already flattened
            let set = LabeledSet::from_samples(source, entry, 0, horizon)?;
            cross_validate(&set, cv, kind)
        })
        .collect();
    let sweeps = sweeps?;
    let table_len = sweeps[0].table.len();
    let mut aggregate: Vec<CvCell> = sweeps[0].table.clone();
    for sweep in &sweeps[1..] {
        debug_assert_eq!(sweep.table.len(), table_len, "grid order is deterministic");
        for (cell, other) in aggregate.iter_mut().zip(&sweep.table) {
            cell.mean_validation_hinge += other.mean_validation_hinge;
        }
    }
    for cell in &mut aggregate {
        cell.mean_validation_hinge /= sweeps.len() as f64;
    }
    let mut best = aggregate[0];
    for cell in &aggregate[1..] {
        if better_cell(cell, &best) {
            best = *cell;
        }
    }
    Ok((best.lambda, best.gamma))
}
