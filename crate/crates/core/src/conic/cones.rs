//! Nesterov–Todd scaling and Jordan-algebra kernels for the cone product.
//!
//! For each non-free block the interior-point method maintains a scaling
//! matrix `W` with `W z = W⁻¹ s = λ`. Nonnegative blocks scale coordinatewise
//! with `W = diag(√(s/z))`; second-order blocks use `W = η V(w̄)`, where `w̄`
//! is the unit-hyperbolic scaling point built from the normalized iterates,
//! `V(w̄)` is the square root of its quadratic representation
//! (`V(w̄)² = 2 w̄ w̄ᵀ − J`, `J = diag(1, −1, …, −1)`), and `η² = res_s/res_z`
//! balances the two points. Free blocks carry no scaling: their dual
//! coordinates are pinned to zero by the solver and never enter the
//! complementarity system.

use super::program::{ConeKind, ConeSpec};

/// Scaling data for one cone block at the current iterate.
#[derive(Debug, Clone)]
pub enum BlockScaling {
    /// Free block; no scaling applies.
    Free,
    /// Nonnegative block: `w[i] = √(s_i/z_i)`, `lambda[i] = √(s_i z_i)`.
    Nonnegative { w: Vec<f64>, lambda: Vec<f64> },
    /// Second-order block: `W = η V(w̄)`, `W⁻¹ = η⁻¹ V(J w̄)`.
    SecondOrder { eta: f64, wbar: Vec<f64>, lambda: Vec<f64> },
}

/// Full scaling state: one entry per cone block, in variable order.
#[derive(Debug, Clone)]
pub struct Scaling {
    pub blocks: Vec<BlockScaling>,
}

/// `J x = (x₀, −x₁, …, −x_{d−1})`.
fn reflect(x: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    for v in &mut out[1..] {
        *v = -*v;
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Second-order cone residual `√(x₀² − ‖x_t‖²)`; NaN-free only for interior points.
fn soc_res(x: &[f64]) -> f64 {
    let tail: f64 = x[1..].iter().map(|v| v * v).sum();
    (x[0] * x[0] - tail).sqrt()
}

impl Scaling {
    /// Identity scaling (`W = I`, `λ` unset) used to seed the start point.
    pub fn identity(spec: &ConeSpec) -> Scaling {
        let blocks = spec
            .blocks()
            .iter()
            .map(|b| match b.kind {
                ConeKind::Free => BlockScaling::Free,
                ConeKind::Nonnegative => BlockScaling::Nonnegative {
                    w: vec![1.0; b.dim],
                    lambda: vec![0.0; b.dim],
                },
                ConeKind::SecondOrder => {
                    let mut wbar = vec![0.0; b.dim];
                    wbar[0] = 1.0;
                    BlockScaling::SecondOrder { eta: 1.0, wbar, lambda: vec![0.0; b.dim] }
                }
            })
            .collect();
        Scaling { blocks }
    }

    /// Computes the Nesterov–Todd scaling at strictly interior `(s, z)`.
    ///
    /// Returns `None` when a block is numerically on the boundary, which the
    /// caller treats as a numerical failure of the current iterate.
    pub fn compute(spec: &ConeSpec, s: &[f64], z: &[f64]) -> Option<Scaling> {
        let mut blocks = Vec::with_capacity(spec.blocks().len());
        for (off, b) in spec.iter_offsets() {
            let sb = &s[off..off + b.dim];
            let zb = &z[off..off + b.dim];
            match b.kind {
                ConeKind::Free => blocks.push(BlockScaling::Free),
                ConeKind::Nonnegative => {
                    let mut w = Vec::with_capacity(b.dim);
                    let mut lambda = Vec::with_capacity(b.dim);
                    for (&si, &zi) in sb.iter().zip(zb) {
                        if si <= 0.0 || zi <= 0.0 {
                            return None;
                        }
                        w.push((si / zi).sqrt());
                        lambda.push((si * zi).sqrt());
                    }
                    blocks.push(BlockScaling::Nonnegative { w, lambda });
                }
                ConeKind::SecondOrder => {
                    let rs = soc_res(sb);
                    let rz = soc_res(zb);
                    if !(rs > 0.0) || !(rz > 0.0) {
                        return None;
                    }
                    let sbar: Vec<f64> = sb.iter().map(|v| v / rs).collect();
                    let zbar: Vec<f64> = zb.iter().map(|v| v / rz).collect();
                    let gamma = ((1.0 + dot(&sbar, &zbar)) / 2.0).sqrt();
                    if !(gamma > 0.0) {
                        return None;
                    }
                    let jz = reflect(&zbar);
                    let wbar: Vec<f64> = sbar
                        .iter()
                        .zip(&jz)
                        .map(|(a, b)| (a + b) / (2.0 * gamma))
                        .collect();
                    let eta = (rs / rz).sqrt();
                    // λ = W z evaluated via the rank-one form.
                    let lambda = apply_soc(eta, &wbar, zb);
                    blocks.push(BlockScaling::SecondOrder { eta, wbar, lambda });
                }
            }
        }
        Some(Scaling { blocks })
    }

    /// Applies `W` blockwise; free coordinates are copied unchanged.
    pub fn apply_w(&self, spec: &ConeSpec, x: &[f64], out: &mut [f64]) {
        for ((off, b), sc) in spec.iter_offsets().zip(&self.blocks) {
            let xb = &x[off..off + b.dim];
            let ob = &mut out[off..off + b.dim];
            match sc {
                BlockScaling::Free => ob.copy_from_slice(xb),
                BlockScaling::Nonnegative { w, .. } => {
                    for ((o, &xi), &wi) in ob.iter_mut().zip(xb).zip(w) {
                        *o = wi * xi;
                    }
                }
                BlockScaling::SecondOrder { eta, wbar, .. } => {
                    ob.copy_from_slice(&apply_soc(*eta, wbar, xb));
                }
            }
        }
    }

    /// Applies `W⁻¹` blockwise; free coordinates are copied unchanged.
    pub fn apply_w_inv(&self, spec: &ConeSpec, x: &[f64], out: &mut [f64]) {
        for ((off, b), sc) in spec.iter_offsets().zip(&self.blocks) {
            let xb = &x[off..off + b.dim];
            let ob = &mut out[off..off + b.dim];
            match sc {
                BlockScaling::Free => ob.copy_from_slice(xb),
                BlockScaling::Nonnegative { w, .. } => {
                    for ((o, &xi), &wi) in ob.iter_mut().zip(xb).zip(w) {
                        *o = xi / wi;
                    }
                }
                BlockScaling::SecondOrder { eta, wbar, .. } => {
                    let vbar = reflect(wbar);
                    ob.copy_from_slice(&apply_soc(1.0 / eta, &vbar, xb));
                }
            }
        }
    }

    /// Concatenated scaling point `λ` over non-free coordinates (zeros on free).
    pub fn lambda(&self, spec: &ConeSpec, out: &mut [f64]) {
        for ((off, b), sc) in spec.iter_offsets().zip(&self.blocks) {
            let ob = &mut out[off..off + b.dim];
            match sc {
                BlockScaling::Free => ob.fill(0.0),
                BlockScaling::Nonnegative { lambda, .. }
                | BlockScaling::SecondOrder { lambda, .. } => ob.copy_from_slice(lambda),
            }
        }
    }
}

/// Applies `η V(w̄)` where `V(w̄) = [w̄₀, w̄_tᵀ; w̄_t, I + w̄_t w̄_tᵀ/(1+w̄₀)]`
/// is the square root of the quadratic representation of the unit-hyperbolic
/// point `w̄` (so `V(w̄)² = 2 w̄ w̄ᵀ − J`, and `V(J w̄) = V(w̄)⁻¹`).
fn apply_soc(eta: f64, wbar: &[f64], x: &[f64]) -> Vec<f64> {
    let w0 = wbar[0];
    let wt_x = dot(&wbar[1..], &x[1..]);
    let mut out = vec![0.0; x.len()];
    out[0] = eta * (w0 * x[0] + wt_x);
    let coef = x[0] + wt_x / (1.0 + w0);
    for k in 1..x.len() {
        out[k] = eta * (x[k] + coef * wbar[k]);
    }
    out
}

/// Jordan product `u ∘ v` per block: componentwise on nonnegative blocks,
/// `(uᵀv, u₀ v_t + v₀ u_t)` on second-order blocks, zero on free blocks.
pub fn jordan_mul(spec: &ConeSpec, u: &[f64], v: &[f64], out: &mut [f64]) {
    for (off, b) in spec.iter_offsets() {
        let ub = &u[off..off + b.dim];
        let vb = &v[off..off + b.dim];
        let ob = &mut out[off..off + b.dim];
        match b.kind {
            ConeKind::Free => ob.fill(0.0),
            ConeKind::Nonnegative => {
                for ((o, &ui), &vi) in ob.iter_mut().zip(ub).zip(vb) {
                    *o = ui * vi;
                }
            }
            ConeKind::SecondOrder => {
                ob[0] = dot(ub, vb);
                for k in 1..b.dim {
                    ob[k] = ub[0] * vb[k] + vb[0] * ub[k];
                }
            }
        }
    }
}

/// Jordan division `λ \ v` per block (the solution `u` of `λ ∘ u = v`).
///
/// Returns `None` when a block's `λ` is singular in the Jordan sense.
pub fn jordan_div(spec: &ConeSpec, lambda: &[f64], v: &[f64], out: &mut [f64]) -> Option<()> {
    for (off, b) in spec.iter_offsets() {
        let lb = &lambda[off..off + b.dim];
        let vb = &v[off..off + b.dim];
        let ob = &mut out[off..off + b.dim];
        match b.kind {
            ConeKind::Free => ob.fill(0.0),
            ConeKind::Nonnegative => {
                for ((o, &li), &vi) in ob.iter_mut().zip(lb).zip(vb) {
                    if li == 0.0 {
                        return None;
                    }
                    *o = vi / li;
                }
            }
            ConeKind::SecondOrder => {
                // Solve the arrow system
                //   λ₀ u₀ + λ_tᵀ u_t        = v₀
                //   λ_t u₀ + λ₀ u_t          = v_t
                // by eliminating u_t = (v_t − λ_t u₀)/λ₀.
                let l0 = lb[0];
                let lt2: f64 = lb[1..].iter().map(|x| x * x).sum();
                let det = l0 * l0 - lt2;
                if det == 0.0 || l0 == 0.0 {
                    return None;
                }
                let ltv: f64 = dot(&lb[1..], &vb[1..]);
                let u0 = (l0 * vb[0] - ltv) / det;
                ob[0] = u0;
                for k in 1..b.dim {
                    ob[k] = (vb[k] - lb[k] * u0) / l0;
                }
            }
        }
    }
    Some(())
}

/// Largest `α ∈ [0, cap]` with `x + α dx` inside every non-free block.
///
/// Free blocks impose no limit. For nonnegative coordinates the limit is the
/// classic ratio test; for second-order blocks the boundary crossing solves a
/// scalar quadratic in `α`.
pub fn max_step(spec: &ConeSpec, x: &[f64], dx: &[f64], cap: f64) -> f64 {
    let mut alpha = cap;
    for (off, b) in spec.iter_offsets() {
        let xb = &x[off..off + b.dim];
        let db = &dx[off..off + b.dim];
        match b.kind {
            ConeKind::Free => {}
            ConeKind::Nonnegative => {
                for (&xi, &di) in xb.iter().zip(db) {
                    if di < 0.0 {
                        alpha = alpha.min(-xi / di);
                    }
                }
            }
            ConeKind::SecondOrder => {
                // q(α) = (x₀+αd₀)² − ‖x_t+αd_t‖² must stay ≥ 0 with head > 0.
                let a = db[0] * db[0] - dot(&db[1..], &db[1..]);
                let bq = x[off] * db[0] - dot(&xb[1..], &db[1..]);
                let c = xb[0] * xb[0] - dot(&xb[1..], &xb[1..]);
                let mut block_alpha = cap;
                // Roots of a α² + 2 b α + c = 0; pick the smallest positive.
                let disc = bq * bq - a * c;
                if a.abs() > 0.0 {
                    if disc >= 0.0 {
                        let sq = disc.sqrt();
                        for root in [(-bq - sq) / a, (-bq + sq) / a] {
                            if root > 0.0 {
                                block_alpha = block_alpha.min(root);
                            }
                        }
                    }
                } else if bq < 0.0 {
                    block_alpha = block_alpha.min(-c / (2.0 * bq));
                }
                // Head must stay positive too.
                if db[0] < 0.0 {
                    block_alpha = block_alpha.min(-xb[0] / db[0]);
                }
                alpha = alpha.min(block_alpha);
            }
        }
    }
    alpha.max(0.0)
}

/// The cone's unit element `e`: ones on nonnegative coordinates, `(1, 0, …)`
/// on each second-order block, zeros on free coordinates.
pub fn unit_e(spec: &ConeSpec, out: &mut [f64]) {
    for (off, b) in spec.iter_offsets() {
        let ob = &mut out[off..off + b.dim];
        match b.kind {
            ConeKind::Free => ob.fill(0.0),
            ConeKind::Nonnegative => ob.fill(1.0),
            ConeKind::SecondOrder => {
                ob.fill(0.0);
                ob[0] = 1.0;
            }
        }
    }
}

/// Worst-case interior margin of `x`: the minimum over non-free blocks of
/// the distance to the boundary (coordinates for nonnegative, `x₀ − ‖x_t‖`
/// for second-order). `+∞` when the cone has no non-free blocks.
pub fn interior_margin(spec: &ConeSpec, x: &[f64]) -> f64 {
    let mut margin = f64::INFINITY;
    for (off, b) in spec.iter_offsets() {
        let xb = &x[off..off + b.dim];
        match b.kind {
            ConeKind::Free => {}
            ConeKind::Nonnegative => {
                for &v in xb {
                    margin = margin.min(v);
                }
            }
            ConeKind::SecondOrder => {
                let tail: f64 = xb[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                margin = margin.min(xb[0] - tail);
            }
        }
    }
    margin
}
