//! Sparse quasi-definite KKT system shared by every interior-point iteration.
//!
//! Each Newton step reduces to two solves with the symmetric indefinite matrix
//!
//! ```text
//!     M = [ −W⁻²   Aᵀ ]
//!         [  A     0  ]
//! ```
//!
//! where `W` is the current Nesterov–Todd scaling (free variables contribute
//! a zero block). `M` is factorized as a sparse LDLᵀ after adding static
//! regularization `−δ I` / `+δ I` to the two diagonal blocks, which makes the
//! matrix strictly quasi-definite so the factorization exists for any symmetric
//! permutation. Solves are then corrected by a few rounds of iterative
//! refinement against the *unregularized* operator, so the regularization does
//! not limit the achievable accuracy.
//!
//! The sparsity pattern is fixed across iterations (diagonals are always
//! stored, second-order blocks are dense within themselves), so the symbolic
//! analysis and fill-reducing ordering happen once per program.

use faer::dyn_stack::{GlobalPodBuffer, PodStack};
use faer::linalg::cholesky::ldlt_diagonal::compute::LdltRegularization;
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, CholeskySymbolicParams, LdltRef, SymbolicCholesky,
    SymmetricOrdering,
};
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{Conj, Parallelism, Side};
use thiserror::Error;

use super::cones::{BlockScaling, Scaling};
use super::program::{ConeKind, ConicProgram};

/// Errors raised by the KKT backend.
#[derive(Debug, Error)]
pub enum KktError {
    #[error("symbolic factorization failed: {0}")]
    Symbolic(String),
    #[error("numeric factorization produced a non-finite factor")]
    NumericBreakdown,
}

/// Factorization and solve engine for one program's KKT matrix.
pub struct KktSolver {
    n: usize,
    p: usize,
    dim: usize,
    kkt: SparseColMat<usize, f64>,
    symbolic: SymbolicCholesky<usize>,
    l_values: Vec<f64>,
    signs: Vec<i8>,
    static_reg: f64,
    refine_steps: usize,
    diag_slots: Vec<usize>,
    a_slots: Vec<usize>,
    /// `(offset, dim, slots)` per second-order block; `slots` holds the value
    /// positions of the strictly-lower entries, column-major within the block.
    soc_slots: Vec<(usize, usize, Vec<usize>)>,
    factor_mem: GlobalPodBuffer,
    solve_mem: GlobalPodBuffer,
    scratch: Vec<f64>,
    scratch2: Vec<f64>,
}

impl KktSolver {
    /// Builds the fixed pattern and runs the symbolic analysis.
    pub fn new(program: &ConicProgram, static_reg: f64, refine_steps: usize) -> Result<Self, KktError> {
        let n = program.var_count();
        let p = program.row_count();
        let dim = n + p;
        let a = program.matrix();

        // Map each variable to its second-order block, if any.
        let mut soc_of: Vec<Option<(usize, usize)>> = vec![None; n];
        for (off, b) in program.cones().iter_offsets() {
            if b.kind == ConeKind::SecondOrder {
                for j in off..off + b.dim {
                    soc_of[j] = Some((off, b.dim));
                }
            }
        }

        let mut col_ptr = Vec::with_capacity(dim + 1);
        let mut row_ind: Vec<usize> = Vec::new();
        let mut diag_slots = vec![0usize; dim];
        let mut a_slots = Vec::with_capacity(a.nnz());
        let mut soc_slots: Vec<(usize, usize, Vec<usize>)> = Vec::new();
        let mut soc_lower: std::collections::BTreeMap<usize, Vec<usize>> =
            std::collections::BTreeMap::new();

        col_ptr.push(0);
        for j in 0..n {
            diag_slots[j] = row_ind.len();
            row_ind.push(j);
            if let Some((off, d)) = soc_of[j] {
                for i in j + 1..off + d {
                    soc_lower.entry(off).or_default().push(row_ind.len());
                    row_ind.push(i);
                }
            }
            for (i, _) in a.col(j) {
                a_slots.push(row_ind.len());
                row_ind.push(n + i);
            }
            col_ptr.push(row_ind.len());
        }
        for i in 0..p {
            diag_slots[n + i] = row_ind.len();
            row_ind.push(n + i);
            col_ptr.push(row_ind.len());
        }
        for (off, b) in program.cones().iter_offsets() {
            if b.kind == ConeKind::SecondOrder {
                soc_slots.push((off, b.dim, soc_lower.remove(&off).unwrap_or_default()));
            }
        }

        let nnz = row_ind.len();
        let pattern = SymbolicSparseColMat::new_checked(dim, dim, col_ptr, None, row_ind);
        let kkt = SparseColMat::new(pattern, vec![0.0f64; nnz]);

        let symbolic = factorize_symbolic_cholesky(
            kkt.symbolic(),
            Side::Lower,
            SymmetricOrdering::Amd,
            CholeskySymbolicParams::default(),
        )
        .map_err(|e| KktError::Symbolic(format!("{e:?}")))?;

        let l_values = vec![0.0f64; symbolic.len_values()];
        let mut signs = vec![-1i8; dim];
        signs[n..].fill(1);

        let factor_mem = GlobalPodBuffer::new(
            symbolic
                .factorize_numeric_ldlt_req::<f64>(true, Parallelism::None)
                .map_err(|e| KktError::Symbolic(format!("{e:?}")))?,
        );
        let solve_mem = GlobalPodBuffer::new(
            symbolic
                .solve_in_place_req::<f64>(1)
                .map_err(|e| KktError::Symbolic(format!("{e:?}")))?,
        );

        Ok(KktSolver {
            n,
            p,
            dim,
            kkt,
            symbolic,
            l_values,
            signs,
            static_reg,
            refine_steps,
            diag_slots,
            a_slots,
            soc_slots,
            factor_mem,
            solve_mem,
            scratch: vec![0.0; dim],
            scratch2: vec![0.0; dim],
        })
    }

    /// Refreshes the numeric values for the given scaling and refactorizes.
    ///
    /// `free_shift` is the magnitude placed on free-variable diagonals of the
    /// exact operator: `0` during interior-point iterations (free variables
    /// have no scaling block), `1` for the well-posed initialization solves,
    /// which use the full identity metric.
    pub fn refactor(
        &mut self,
        program: &ConicProgram,
        scaling: &Scaling,
        free_shift: f64,
    ) -> Result<(), KktError> {
        {
            let values = self.kkt.values_mut();
            values.fill(0.0);

            // Constraint block (constant, but the array was just zeroed).
            let a = program.matrix();
            let mut k = 0usize;
            for j in 0..self.n {
                for (_, v) in a.col(j) {
                    values[self.a_slots[k]] = v;
                    k += 1;
                }
            }

            // Diagonal blocks.
            for i in 0..self.p {
                values[self.diag_slots[self.n + i]] = self.static_reg;
            }
            let mut soc_idx = 0usize;
            for ((off, b), sc) in program.cones().iter_offsets().zip(&scaling.blocks) {
                match sc {
                    BlockScaling::Free => {
                        for j in off..off + b.dim {
                            values[self.diag_slots[j]] = -free_shift - self.static_reg;
                        }
                    }
                    BlockScaling::Nonnegative { w, .. } => {
                        for (j, &wi) in (off..off + b.dim).zip(w) {
                            values[self.diag_slots[j]] = -1.0 / (wi * wi) - self.static_reg;
                        }
                    }
                    BlockScaling::SecondOrder { eta, wbar, .. } => {
                        let (s_off, d, ref lower) = self.soc_slots[soc_idx];
                        debug_assert_eq!(s_off, off);
                        soc_idx += 1;
                        let w2 = soc_w_inv2(*eta, wbar);
                        let mut slot = 0usize;
                        for jj in 0..d {
                            values[self.diag_slots[off + jj]] =
                                -w2[jj * d + jj] - self.static_reg;
                            for ii in jj + 1..d {
                                values[lower[slot]] = -w2[jj * d + ii];
                                slot += 1;
                            }
                        }
                    }
                }
            }
        }

        let ldlt_result = self.symbolic.factorize_numeric_ldlt::<f64>(
            self.l_values.as_mut_slice(),
            self.kkt.as_ref(),
            Side::Lower,
            LdltRegularization {
                dynamic_regularization_signs: Some(&self.signs),
                dynamic_regularization_delta: 1e-13,
                dynamic_regularization_epsilon: 1e-13,
            },
            Parallelism::None,
            PodStack::new(&mut self.factor_mem),
        );
        let _ = ldlt_result;
        if self.l_values.iter().any(|v| !v.is_finite()) {
            return Err(KktError::NumericBreakdown);
        }
        Ok(())
    }

    fn raw_solve(&mut self, rhs: &mut [f64]) {
        debug_assert_eq!(rhs.len(), self.dim);
        let ldlt = LdltRef::<usize, f64>::new(&self.symbolic, self.l_values.as_slice());
        let mat = faer::mat::from_column_major_slice_mut::<f64>(rhs, self.dim, 1);
        ldlt.solve_in_place_with_conj(
            Conj::No,
            mat,
            Parallelism::None,
            PodStack::new(&mut self.solve_mem),
        );
    }

    /// Solves `M [dx; dy] = rhs` in place, refining against the exact
    /// (unregularized) operator. `free_shift` must match the last `refactor`.
    pub fn solve(
        &mut self,
        program: &ConicProgram,
        scaling: &Scaling,
        free_shift: f64,
        rhs: &mut [f64],
    ) {
        let rhs_norm = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut residual = std::mem::take(&mut self.scratch);
        let mut correction = std::mem::take(&mut self.scratch2);
        residual.copy_from_slice(rhs);

        self.raw_solve(rhs);
        // Iterative refinement against the unregularized operator. The
        // exact system may be singular (redundant rows), in which case a
        // round can make things worse; keep the best iterate seen.
        let mut best: Option<(Vec<f64>, f64)> = None;
        for _ in 0..self.refine_steps {
            // residual = original rhs − M_exact · current solution
            let mut res = residual.clone();
            apply_exact_neg_acc(program, scaling, free_shift, rhs, &mut res);
            let err = res.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if err <= 1e-14 * (1.0 + rhs_norm) {
                best = None;
                break;
            }
            match &best {
                Some((_, best_err)) if err >= *best_err => break,
                _ => best = Some((rhs.to_vec(), err)),
            }
            correction.copy_from_slice(&res);
            self.raw_solve(&mut correction);
            for (x, d) in rhs.iter_mut().zip(&correction) {
                *x += d;
            }
        }
        if let Some((best_x, best_err)) = best {
            // The loop may have ended right after a correction; revert if
            // that last step regressed.
            let mut res = residual.clone();
            apply_exact_neg_acc(program, scaling, free_shift, rhs, &mut res);
            let err = res.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if err > best_err {
                rhs.copy_from_slice(&best_x);
            }
        }

        self.scratch = residual;
        self.scratch2 = correction;
    }

}

/// Dense `W⁻²` for one second-order block, row-major `d × d`.
///
/// `W⁻¹ = η⁻¹ V(v̄)` with `v̄ = J w̄`, and `V(v̄)² = 2 v̄ v̄ᵀ − J` because `v̄`
/// is unit-hyperbolic, so `W⁻² = η⁻² (2 v̄ v̄ᵀ − J)`.
fn soc_w_inv2(eta: f64, wbar: &[f64]) -> Vec<f64> {
    let d = wbar.len();
    let mut vbar = wbar.to_vec();
    for v in &mut vbar[1..] {
        *v = -*v;
    }
    let s = 1.0 / (eta * eta);
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let jj = if i != j {
                0.0
            } else if i == 0 {
                1.0
            } else {
                -1.0
            };
            out[i * d + j] = s * (2.0 * vbar[i] * vbar[j] - jj);
        }
    }
    out
}

/// Accumulates `out −= M_exact · v` for the unregularized KKT operator,
/// whose variable block is `−W⁻²` on cone coordinates and `−free_shift` on
/// free coordinates.
pub(crate) fn apply_exact_neg_acc(
    program: &ConicProgram,
    scaling: &Scaling,
    free_shift: f64,
    v: &[f64],
    out: &mut [f64],
) {
    let n = program.var_count();
    let (vx, vy) = v.split_at(n);
    let a = program.matrix();
    let spec = program.cones();

    // out_x −= (−D vx + Aᵀ vy) with D = W⁻² on cones, free_shift on free.
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    scaling.apply_w_inv(spec, vx, &mut w1);
    scaling.apply_w_inv(spec, &w1, &mut w2);
    for (off, b) in spec.iter_offsets() {
        if b.kind == ConeKind::Free {
            for j in off..off + b.dim {
                w2[j] = free_shift * vx[j];
            }
        }
    }
    let mut atv = vec![0.0; n];
    a.tr_matvec_acc(vy, &mut atv);
    for j in 0..n {
        out[j] -= atv[j] - w2[j];
    }

    // out_y −= A vx
    let mut av = vec![0.0; program.row_count()];
    a.matvec_acc(vx, &mut av);
    for (o, &r) in out[n..].iter_mut().zip(&av) {
        *o -= r;
    }
}
