//! ucwarm-core: learned warm starts for second-order cone unit commitment.
//!
//! The crate provides the full pipeline end to end:
//!
//! 1. [`conic`] — canonical conic programs and a homogeneous self-dual
//!    interior-point solver (linear + second-order cones).
//! 2. [`bnb`] — branch-and-bound over conic relaxations for mixed-integer
//!    programs, accepting warm-start incumbents.
//! 3. [`grid`] / [`uc`] — network data and the relaxed unit-commitment
//!    MISOCP formulation (features `x`, binary strategies `y`).
//! 4. [`sampler`] — scenario sampling with the Good–Turing novelty stopping
//!    rule.
//! 5. [`svm`] — linear and Gaussian-kernel support vector machines, plain or
//!    distributionally robust (Wasserstein-regularized), trained by conic
//!    programming with out-of-sample guarantees.
//! 6. [`pipeline`] — trained-model bundles, strategy prediction, triage,
//!    nearest-neighbor recovery, and the evaluation harness.

pub mod bnb;
pub mod conic;
pub mod grid;
pub mod pipeline;
pub mod sampler;
pub mod svm;
pub mod uc;
