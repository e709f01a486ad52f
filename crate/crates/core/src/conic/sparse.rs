//! Minimal compressed-sparse-column matrix used for constraint storage.
//!
//! The solver only needs three things from the constraint matrix: `y += A x`,
//! `x += Aᵀ y`, and ordered per-column access while assembling KKT systems.
//! A small purpose-built CSC type keeps those operations allocation-free and
//! deterministic.

/// Sparse matrix in compressed-sparse-column layout.
///
/// Entries within a column are sorted by row index and duplicate coordinates
/// are merged (summed) at construction time.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_ind: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    /// Builds a matrix from unordered `(row, col, value)` triplets.
    ///
    /// Duplicate coordinates are summed; explicit zeros are kept so callers
    /// may rely on a stable sparsity pattern.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        for &(r, c, _) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].1, triplets[k].0));

        let mut col_ptr = vec![0usize; ncols + 1];
        let mut row_ind: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for &k in &order {
            let (r, c, v) = triplets[k];
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_ind.push(r);
                values.push(v);
                col_ptr[c + 1] += 1;
                last = Some((r, c));
            }
        }
        for c in 0..ncols {
            col_ptr[c + 1] += col_ptr[c];
        }
        CscMatrix { nrows, ncols, col_ptr, row_ind, values }
    }

    /// Matrix with no rows (used by programs without equality constraints).
    pub fn empty(ncols: usize) -> Self {
        CscMatrix { nrows: 0, ncols, col_ptr: vec![0; ncols + 1], row_ind: Vec::new(), values: Vec::new() }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.row_ind.len()
    }

    /// Sorted `(row, value)` pairs of column `j`.
    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.col_ptr[j];
        let hi = self.col_ptr[j + 1];
        self.row_ind[lo..hi].iter().copied().zip(self.values[lo..hi].iter().copied())
    }

    /// `y += A x`.
    pub fn matvec_acc(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for j in 0..self.ncols {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for (i, v) in self.col(j) {
                y[i] += v * xj;
            }
        }
    }

    /// `out += Aᵀ y`.
    pub fn tr_matvec_acc(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.nrows);
        debug_assert_eq!(out.len(), self.ncols);
        for j in 0..self.ncols {
            let mut acc = 0.0;
            for (i, v) in self.col(j) {
                acc += v * y[i];
            }
            out[j] += acc;
        }
    }

    /// Returns a copy with extra rows appended at the bottom.
    ///
    /// Each new row is given as a list of `(column, coefficient)` entries.
    pub fn with_appended_rows(&self, rows: &[Vec<(usize, f64)>]) -> Self {
        let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(self.nnz() + rows.len() * 2);
        for j in 0..self.ncols {
            for (i, v) in self.col(j) {
                triplets.push((i, j, v));
            }
        }
        for (k, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                assert!(j < self.ncols, "appended row references column {j} out of bounds");
                triplets.push((self.nrows + k, j, v));
            }
        }
        CscMatrix::from_triplets(self.nrows + rows.len(), self.ncols, &triplets)
    }

    /// Infinity norm of the residual `A x - b`.
    pub fn residual_inf(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut r: Vec<f64> = b.iter().map(|v| -v).collect();
        self.matvec_acc(x, &mut r);
        r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}
