//! Continuous conic programming: problem types and an interior-point solver.
//!
//! The module represents programs in the canonical form
//! `min cᵀx  s.t.  Ax = b,  x ∈ K` with `K` a product of free, nonnegative,
//! and second-order blocks, and solves them with a homogeneous self-dual
//! primal-dual path-following method. Solves either converge to the stated
//! tolerance, produce an infeasibility/unboundedness certificate, or report
//! the best iterate found under an `IterationLimit`/`NumericalFailure`
//! status — callers never have to handle panics on numerical trouble.
//!
//! Quadratic objectives are intentionally unsupported: callers epigraph-
//! reformulate them into second-order cone constraints.

mod cones;
mod ipm;
mod kkt;
mod program;
mod sparse;

pub use program::{
    validate, ConeBlock, ConeKind, ConeSpec, ConicProgram, ProgramBuilder, ProgramError,
    ValidationReport,
};
pub use sparse::CscMatrix;

/// Termination status of a conic solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SolveStatus {
    /// All three scaled residuals are at or below the tolerance.
    Optimal,
    /// A Farkas certificate of primal infeasibility was found.
    PrimalInfeasible,
    /// A ray certifying dual infeasibility (unbounded primal) was found.
    Unbounded,
    /// The iteration budget ran out; the best iterate is returned.
    IterationLimit,
    /// Scaling or factorization broke down; the best iterate is returned.
    NumericalFailure,
}

/// Scaled convergence measures of a returned solution.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Residuals {
    /// `‖A x − b‖₂ / (1 + ‖b‖₂)` at the scaled primal point.
    pub primal: f64,
    /// `‖c − Aᵀy − z‖₂ / (1 + ‖c‖₂)` at the scaled dual point.
    pub dual: f64,
    /// `|cᵀx − bᵀy| / max(1, |cᵀx|, |bᵀy|)`.
    pub gap: f64,
}

/// Outcome of a conic solve: status, primal/dual points, objectives, residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicSolution {
    pub status: SolveStatus,
    /// Primal point `x` (scaled by 1/τ), or a certificate ray when infeasible.
    pub primal: Vec<f64>,
    /// Equality multipliers `y`.
    pub dual_rows: Vec<f64>,
    /// Dual cone point `z` (zero on free coordinates).
    pub dual_cone: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
}

/// Knobs of the interior-point solve.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverSettings {
    /// Target for all three scaled residuals.
    pub tolerance: f64,
    /// Hard cap on Newton iterations.
    pub max_iterations: usize,
    /// Static diagonal shift making the KKT matrix quasi-definite.
    pub static_regularization: f64,
    /// Iterative-refinement rounds per KKT solve.
    pub refinement_steps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tolerance: 1e-7,
            max_iterations: 200,
            static_regularization: 1e-8,
            refinement_steps: 6,
        }
    }
}

impl SolverSettings {
    /// Settings tightened for classifier training, where downstream
    /// guarantees are checked at 1e-9.
    pub fn strict() -> Self {
        SolverSettings { tolerance: 1e-9, max_iterations: 400, ..Self::default() }
    }
}

/// Solves a conic program. Deterministic: identical inputs and settings give
/// bit-identical outputs. Statuses other than `Optimal` are reported in the
/// result rather than as errors so callers can inspect the best iterate.
pub fn solve(program: &ConicProgram, settings: &SolverSettings) -> ConicSolution {
    assert!(settings.tolerance > 0.0, "tolerance must be positive");
    ipm::solve(program, settings)
}
