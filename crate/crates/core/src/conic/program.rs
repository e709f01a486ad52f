//! Problem description types for continuous conic programs.
//!
//! A program is stated over a single variable vector `x` that is partitioned
//! into an ordered list of cone blocks:
//!
//! ```text
//!     minimize    cᵀ x
//!     subject to  A x = b
//!                 x ∈ K = K₁ × K₂ × … (free / nonnegative / second-order)
//! ```
//!
//! Inequalities are expressed by adding explicit nonnegative slack variables,
//! and quadratic terms must be epigraph-reformulated into second-order cone
//! blocks by the caller; the solver itself only ever sees the linear-conic
//! canonical form above.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::sparse::CscMatrix;

/// The kind of a single cone block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeKind {
    /// Unrestricted coordinates.
    Free,
    /// Componentwise nonnegative coordinates.
    Nonnegative,
    /// Second-order (Lorentz) cone: `x₀ ≥ ‖(x₁, …, x_{d−1})‖₂`.
    SecondOrder,
}

/// One block of the cone product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeBlock {
    pub kind: ConeKind,
    pub dim: usize,
}

/// Ordered list of cone blocks partitioning the variable vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSpec {
    blocks: Vec<ConeBlock>,
}

/// Errors raised while constructing or using a conic program.
#[derive(Debug, Error)]
pub enum ProgramError {
    #[error("cone block {index} has dimension 0")]
    EmptyBlock { index: usize },
    #[error("second-order block {index} has dimension {dim}, needs at least 2 (head + tail)")]
    SecondOrderTooSmall { index: usize, dim: usize },
    #[error("cone blocks cover {cone} variables but the program has {vars}")]
    ConeCountMismatch { cone: usize, vars: usize },
    #[error("constraint matrix has {rows} rows but b has {rhs} entries")]
    RowCountMismatch { rows: usize, rhs: usize },
    #[error("constraint matrix has {cols} columns but c has {vars} entries")]
    ColumnCountMismatch { cols: usize, vars: usize },
    #[error("candidate has {got} entries, the program has {want} variables")]
    DimensionMismatch { got: usize, want: usize },
    #[error("non-finite coefficient in {place}")]
    NonFinite { place: &'static str },
}

impl ConeSpec {
    /// Builds a spec, merging adjacent free/nonnegative blocks and rejecting
    /// empty or undersized blocks.
    pub fn new(blocks: Vec<ConeBlock>) -> Result<Self, ProgramError> {
        let mut merged: Vec<ConeBlock> = Vec::with_capacity(blocks.len());
        for (index, b) in blocks.into_iter().enumerate() {
            if b.dim == 0 {
                return Err(ProgramError::EmptyBlock { index });
            }
            if b.kind == ConeKind::SecondOrder && b.dim < 2 {
                return Err(ProgramError::SecondOrderTooSmall { index, dim: b.dim });
            }
            match merged.last_mut() {
                Some(last) if last.kind == b.kind && b.kind != ConeKind::SecondOrder => {
                    last.dim += b.dim;
                }
                _ => merged.push(b),
            }
        }
        Ok(ConeSpec { blocks: merged })
    }

    pub fn blocks(&self) -> &[ConeBlock] {
        &self.blocks
    }

    /// Total number of variables covered by the blocks.
    pub fn var_count(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// Iterates `(offset, block)` pairs in variable order.
    pub fn iter_offsets(&self) -> impl Iterator<Item = (usize, ConeBlock)> + '_ {
        self.blocks.iter().scan(0usize, |off, b| {
            let here = *off;
            *off += b.dim;
            Some((here, *b))
        })
    }

    /// Barrier degree of the cone product: one per nonnegative coordinate,
    /// one per second-order block, zero for free blocks.
    pub fn degree(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match b.kind {
                ConeKind::Free => 0,
                ConeKind::Nonnegative => b.dim,
                ConeKind::SecondOrder => 1,
            })
            .sum()
    }

    /// Largest violation of cone membership over all blocks (0 if inside).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (off, b) in self.iter_offsets() {
            let xs = &x[off..off + b.dim];
            match b.kind {
                ConeKind::Free => {}
                ConeKind::Nonnegative => {
                    for &v in xs {
                        worst = worst.max(-v);
                    }
                }
                ConeKind::SecondOrder => {
                    let tail: f64 = xs[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                    worst = worst.max(tail - xs[0]);
                }
            }
        }
        worst
    }
}

/// An immutable continuous conic program in canonical form.
#[derive(Debug, Clone)]
pub struct ConicProgram {
    c: Vec<f64>,
    a: CscMatrix,
    b: Vec<f64>,
    cones: ConeSpec,
    names: BTreeMap<usize, String>,
}

impl ConicProgram {
    /// Validates dimensions and builds the program.
    pub fn new(
        c: Vec<f64>,
        a: CscMatrix,
        b: Vec<f64>,
        cones: ConeSpec,
        names: BTreeMap<usize, String>,
    ) -> Result<Self, ProgramError> {
        if a.nrows() != b.len() {
            return Err(ProgramError::RowCountMismatch { rows: a.nrows(), rhs: b.len() });
        }
        if a.ncols() != c.len() {
            return Err(ProgramError::ColumnCountMismatch { cols: a.ncols(), vars: c.len() });
        }
        if cones.var_count() != c.len() {
            return Err(ProgramError::ConeCountMismatch { cone: cones.var_count(), vars: c.len() });
        }
        if !c.iter().all(|v| v.is_finite()) {
            return Err(ProgramError::NonFinite { place: "objective" });
        }
        if !b.iter().all(|v| v.is_finite()) {
            return Err(ProgramError::NonFinite { place: "right-hand side" });
        }
        Ok(ConicProgram { c, a, b, cones, names })
    }

    pub fn var_count(&self) -> usize {
        self.c.len()
    }

    pub fn row_count(&self) -> usize {
        self.b.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.c
    }

    pub fn matrix(&self) -> &CscMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn cones(&self) -> &ConeSpec {
        &self.cones
    }

    pub fn name_of(&self, var: usize) -> Option<&str> {
        self.names.get(&var).map(String::as_str)
    }

    /// New program with extra equality rows `coeffs · x = rhs` appended.
    ///
    /// Variables and cones are unchanged; this is how branch-and-bound fixes
    /// binaries without mutating the shared base program.
    pub fn with_equalities(&self, rows: &[(Vec<(usize, f64)>, f64)]) -> ConicProgram {
        let row_entries: Vec<Vec<(usize, f64)>> = rows.iter().map(|(e, _)| e.clone()).collect();
        let mut b = self.b.clone();
        b.extend(rows.iter().map(|&(_, rhs)| rhs));
        ConicProgram {
            c: self.c.clone(),
            a: self.a.with_appended_rows(&row_entries),
            b,
            cones: self.cones.clone(),
            names: self.names.clone(),
        }
    }

    /// Plain-text canonical form for diffing: objective, rows, cone blocks.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let name = |j: usize| {
            self.names.get(&j).cloned().unwrap_or_else(|| format!("x{j}"))
        };
        out.push_str("minimize");
        let mut first = true;
        for (j, &cj) in self.c.iter().enumerate() {
            if cj != 0.0 {
                let _ = write!(out, "{} {:+.12e} {}", if first { "" } else { " " }, cj, name(j));
                first = false;
            }
        }
        if first {
            out.push_str(" 0");
        }
        out.push('\n');
        // rows are reconstructed from the column storage
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.b.len()];
        for j in 0..self.a.ncols() {
            for (i, v) in self.a.col(j) {
                rows[i].push((j, v));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            let _ = write!(out, "row {i}:");
            for &(j, v) in row {
                let _ = write!(out, " {:+.12e} {}", v, name(j));
            }
            let _ = writeln!(out, " = {:+.12e}", self.b[i]);
        }
        for (off, b) in self.cones.iter_offsets() {
            let kind = match b.kind {
                ConeKind::Free => "free",
                ConeKind::Nonnegative => "nonneg",
                ConeKind::SecondOrder => "soc",
            };
            let _ = writeln!(out, "cone {kind} [{off}..{})", off + b.dim);
        }
        out
    }
}

/// Result of checking a candidate point against a program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    /// `max_i |(A x − b)_i|`.
    pub max_equality_residual: f64,
    /// Largest cone-membership violation over all blocks.
    pub max_cone_violation: f64,
    /// True iff both residuals are within the tolerance used for the check.
    pub feasible: bool,
}

/// Reports exact residuals of `candidate` against the program constraints.
pub fn validate(
    program: &ConicProgram,
    candidate: &[f64],
    tolerance: f64,
) -> Result<ValidationReport, ProgramError> {
    if candidate.len() != program.var_count() {
        return Err(ProgramError::DimensionMismatch {
            got: candidate.len(),
            want: program.var_count(),
        });
    }
    let max_equality_residual = program.a.residual_inf(candidate, &program.b);
    let max_cone_violation = program.cones.violation(candidate);
    Ok(ValidationReport {
        max_equality_residual,
        max_cone_violation,
        feasible: max_equality_residual <= tolerance && max_cone_violation <= tolerance,
    })
}

/// Incremental builder assembling variables, rows, and cone blocks.
#[derive(Debug, Default)]
pub struct ProgramBuilder {
    c: Vec<f64>,
    blocks: Vec<ConeBlock>,
    triplets: Vec<(usize, usize, f64)>,
    b: Vec<f64>,
    names: BTreeMap<usize, String>,
}

impl ProgramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var_count(&self) -> usize {
        self.c.len()
    }

    pub fn row_count(&self) -> usize {
        self.b.len()
    }

    fn push_block(&mut self, kind: ConeKind, dim: usize) -> std::ops::Range<usize> {
        let start = self.c.len();
        if dim == 0 {
            return start..start;
        }
        self.c.resize(start + dim, 0.0);
        self.blocks.push(ConeBlock { kind, dim });
        start..start + dim
    }

    /// Adds `count` unrestricted variables, returning their index range.
    pub fn free_vars(&mut self, count: usize) -> std::ops::Range<usize> {
        self.push_block(ConeKind::Free, count)
    }

    /// Adds `count` nonnegative variables, returning their index range.
    pub fn nonneg_vars(&mut self, count: usize) -> std::ops::Range<usize> {
        self.push_block(ConeKind::Nonnegative, count)
    }

    /// Adds one second-order block of dimension `dim` (head first).
    pub fn soc_vars(&mut self, dim: usize) -> std::ops::Range<usize> {
        self.push_block(ConeKind::SecondOrder, dim)
    }

    /// Sets the objective coefficient of a variable.
    pub fn set_cost(&mut self, var: usize, cost: f64) {
        self.c[var] = cost;
    }

    pub fn set_name(&mut self, var: usize, name: impl Into<String>) {
        self.names.insert(var, name.into());
    }

    /// Adds the equality row `Σ coeff·x = rhs`, returning its row index.
    pub fn eq_row(&mut self, entries: &[(usize, f64)], rhs: f64) -> usize {
        let row = self.b.len();
        for &(j, v) in entries {
            debug_assert!(j < self.c.len(), "row references unknown variable {j}");
            self.triplets.push((row, j, v));
        }
        self.b.push(rhs);
        row
    }

    /// Adds `Σ coeff·x ≤ rhs` by appending a fresh nonnegative slack.
    pub fn leq_row(&mut self, entries: &[(usize, f64)], rhs: f64) -> usize {
        let slack = self.nonneg_vars(1).start;
        let mut with_slack = entries.to_vec();
        with_slack.push((slack, 1.0));
        self.eq_row(&with_slack, rhs)
    }

    /// Adds `Σ coeff·x ≥ rhs` by appending a fresh nonnegative slack.
    pub fn geq_row(&mut self, entries: &[(usize, f64)], rhs: f64) -> usize {
        let slack = self.nonneg_vars(1).start;
        let mut with_slack = entries.to_vec();
        with_slack.push((slack, -1.0));
        self.eq_row(&with_slack, rhs)
    }

    /// Adds a second-order block whose coordinates are tied to affine
    /// expressions of existing variables:
    /// `block_k = Σ entries_k · x + constant_k`, `block ∈ SOC`.
    ///
    /// `exprs[0]` defines the head. Returns the block's variable range.
    pub fn soc_of_expressions(&mut self, exprs: &[(Vec<(usize, f64)>, f64)]) -> std::ops::Range<usize> {
        let range = self.soc_vars(exprs.len());
        for (k, (entries, constant)) in exprs.iter().enumerate() {
            let mut row = vec![(range.start + k, 1.0)];
            for &(j, v) in entries {
                row.push((j, -v));
            }
            self.eq_row(&row, *constant);
        }
        range
    }

    pub fn build(self) -> Result<ConicProgram, ProgramError> {
        let nrows = self.b.len();
        let ncols = self.c.len();
        let cones = ConeSpec::new(self.blocks)?;
        let a = CscMatrix::from_triplets(nrows, ncols, &self.triplets);
        ConicProgram::new(self.c, a, self.b, cones, self.names)
    }
}
