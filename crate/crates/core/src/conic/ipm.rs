//! Homogeneous self-dual interior-point method for conic programs.
//!
//! The solver embeds the primal-dual pair into the homogeneous self-dual
//! model over variables `(x, y, z, τ, κ)`:
//!
//! ```text
//!     A x − b τ           = 0        (primal)
//!     −Aᵀ y − z + c τ     = 0        (dual; z ≡ 0 on free coordinates)
//!     cᵀ x − bᵀ y + κ     = 0        (gap)
//!     x ∈ K, z ∈ K*, τ ≥ 0, κ ≥ 0
//! ```
//!
//! A strictly feasible point of the embedding always exists, and the τ/κ
//! split at convergence distinguishes optimality (τ → positive) from primal
//! or dual infeasibility certificates (κ → positive). Search directions are
//! Mehrotra predictor-corrector steps in the Nesterov–Todd scaling; each
//! direction costs two solves with the quasi-definite KKT matrix, which is
//! factorized once per iteration.

use super::cones::{interior_margin, jordan_div, jordan_mul, max_step, unit_e, Scaling};
use super::kkt::KktSolver;
use super::program::ConicProgram;
use super::{ConicSolution, Residuals, SolveStatus, SolverSettings};

/// Fraction of the distance to the cone boundary taken by combined steps.
const STEP_FRACTION: f64 = 0.99;
/// Floor on τ below which the embedding is declared numerically stuck.
const TAU_FLOOR: f64 = 1e-14;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// One full iterate of the embedding plus its merit for best-point tracking.
struct Iterate {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    tau: f64,
    kappa: f64,
}

struct Metrics {
    pres: f64,
    dres: f64,
    gap: f64,
    pobj: f64,
    dobj: f64,
}

impl Metrics {
    fn merit(&self) -> f64 {
        self.pres.max(self.dres).max(self.gap)
    }
}

/// Scaled (x/τ, y/τ, z/τ) convergence measures of an iterate.
fn measure(program: &ConicProgram, it: &Iterate, norm_b: f64, norm_c: f64) -> Metrics {
    let a = program.matrix();
    let c = program.objective();
    let b = program.rhs();
    let inv_tau = 1.0 / it.tau;

    let xs: Vec<f64> = it.x.iter().map(|v| v * inv_tau).collect();
    let ys: Vec<f64> = it.y.iter().map(|v| v * inv_tau).collect();
    let zs: Vec<f64> = it.z.iter().map(|v| v * inv_tau).collect();

    let mut rp: Vec<f64> = b.iter().map(|v| -v).collect();
    a.matvec_acc(&xs, &mut rp);
    let pres = norm2(&rp) / (1.0 + norm_b);

    let mut rd: Vec<f64> = c.iter().zip(&zs).map(|(ci, zi)| ci - zi).collect();
    let mut aty = vec![0.0; program.var_count()];
    a.tr_matvec_acc(&ys, &mut aty);
    for (r, v) in rd.iter_mut().zip(&aty) {
        *r -= v;
    }
    let dres = norm2(&rd) / (1.0 + norm_c);

    let pobj = dot(c, &xs);
    let dobj = dot(b, &ys);
    let gap = (pobj - dobj).abs() / 1.0f64.max(pobj.abs()).max(dobj.abs());

    Metrics { pres, dres, gap, pobj, dobj }
}

fn build_solution(
    program: &ConicProgram,
    it: &Iterate,
    status: SolveStatus,
    iterations: usize,
    norm_b: f64,
    norm_c: f64,
) -> ConicSolution {
    let m = measure(program, it, norm_b, norm_c);
    let inv_tau = 1.0 / it.tau;
    ConicSolution {
        status,
        primal: it.x.iter().map(|v| v * inv_tau).collect(),
        dual_rows: it.y.iter().map(|v| v * inv_tau).collect(),
        dual_cone: it.z.iter().map(|v| v * inv_tau).collect(),
        objective: m.pobj,
        dual_objective: m.dobj,
        residuals: Residuals { primal: m.pres, dual: m.dres, gap: m.gap },
        iterations,
    }
}

/// Certificate-shaped solution for the two infeasibility outcomes.
fn certificate_solution(
    status: SolveStatus,
    primal: Vec<f64>,
    dual_rows: Vec<f64>,
    dual_cone: Vec<f64>,
    residual: f64,
    iterations: usize,
) -> ConicSolution {
    let objective = match status {
        SolveStatus::PrimalInfeasible => f64::INFINITY,
        SolveStatus::Unbounded => f64::NEG_INFINITY,
        _ => f64::NAN,
    };
    ConicSolution {
        status,
        primal,
        dual_rows,
        dual_cone,
        objective,
        dual_objective: objective,
        residuals: Residuals { primal: residual, dual: residual, gap: residual },
        iterations,
    }
}

/// Solves the program; never panics on numerical trouble — failures are
/// reported through the status, carrying the best iterate found.
pub fn solve(program: &ConicProgram, settings: &SolverSettings) -> ConicSolution {
    let n = program.var_count();
    let p = program.row_count();
    let spec = program.cones();
    let c = program.objective();
    let b = program.rhs();
    let norm_b = norm2(b);
    let norm_c = norm2(c);
    let degree = spec.degree();
    let tol = settings.tolerance;

    let mut kkt = match KktSolver::new(program, settings.static_regularization, settings.refinement_steps)
    {
        Ok(k) => k,
        Err(_) => {
            let it = Iterate {
                x: vec![0.0; n],
                y: vec![0.0; p],
                z: vec![0.0; n],
                tau: 1.0,
                kappa: 1.0,
            };
            return build_solution(program, &it, SolveStatus::NumericalFailure, 0, norm_b, norm_c);
        }
    };

    // ----- initialization: identity-metric least-squares points -------------
    let identity = Scaling::identity(spec);
    let mut it = Iterate {
        x: vec![0.0; n],
        y: vec![0.0; p],
        z: vec![0.0; n],
        tau: 1.0,
        kappa: 1.0,
    };
    let mut e = vec![0.0; n];
    unit_e(spec, &mut e);

    if kkt.refactor(program, &identity, 1.0).is_ok() {
        // Primal: min-norm solution of A x = b, pushed into the cone interior.
        let mut rhs = vec![0.0; n + p];
        rhs[n..].copy_from_slice(b);
        kkt.solve(program, &identity, 1.0, &mut rhs);
        it.x.copy_from_slice(&rhs[..n]);
        let margin = interior_margin(spec, &it.x);
        if margin.is_finite() && margin < 1.0 {
            let shift = 1.0 - margin;
            for (xi, ei) in it.x.iter_mut().zip(&e) {
                *xi += shift * ei;
            }
        }

        // Dual: least-squares multipliers, residual pushed into the dual cone.
        let mut rhs = vec![0.0; n + p];
        rhs[..n].copy_from_slice(c);
        kkt.solve(program, &identity, 1.0, &mut rhs);
        it.y.copy_from_slice(&rhs[n..]);
        it.z.copy_from_slice(c);
        let mut aty = vec![0.0; n];
        program.matrix().tr_matvec_acc(&it.y, &mut aty);
        for (zi, v) in it.z.iter_mut().zip(&aty) {
            *zi -= v;
        }
        zero_free(program, &mut it.z);
        let margin = interior_margin(spec, &it.z);
        if margin.is_finite() && margin < 1.0 {
            let shift = 1.0 - margin;
            for (zi, ei) in it.z.iter_mut().zip(&e) {
                *zi += shift * ei;
            }
        }
    } else {
        // Fall back to the canonical cold start e, e.
        it.x.copy_from_slice(&e);
        it.z.copy_from_slice(&e);
    }
    if degree == 0 {
        // No cone coordinates at all: x stays at the least-squares point.
    }

    let mut best: Option<(Iterate, f64)> = None;
    let mut iterations = 0usize;

    // Workspaces reused across iterations.
    let mut lambda = vec![0.0; n];
    let mut ds = vec![0.0; n];
    let mut lam_lam = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut tmp2 = vec![0.0; n];

    loop {
        // ----- progress metrics, stopping tests ----------------------------
        if !state_is_finite(&it) || it.tau < TAU_FLOOR {
            let (bi, _) = best.unwrap_or((it, f64::INFINITY));
            return build_solution(program, &bi, SolveStatus::NumericalFailure, iterations, norm_b, norm_c);
        }
        let m = measure(program, &it, norm_b, norm_c);
        let is_best = best.as_ref().map_or(true, |&(_, merit)| m.merit() < merit);
        if is_best {
            best = Some((clone_iterate(&it), m.merit()));
        }

        if m.pres <= tol && m.dres <= tol && m.gap <= tol {
            return build_solution(program, &it, SolveStatus::Optimal, iterations, norm_b, norm_c);
        }

        // Primal infeasibility: y with bᵀy > 0 and Aᵀy + z ≈ 0, z ∈ K*.
        let by = dot(b, &it.y);
        if by > 0.0 {
            let yh: Vec<f64> = it.y.iter().map(|v| v / by).collect();
            let zh: Vec<f64> = it.z.iter().map(|v| v / by).collect();
            let mut r = zh.clone();
            program.matrix().tr_matvec_acc(&yh, &mut r);
            let res = norm2(&r);
            if res <= tol * (1.0 + norm2(&yh) + norm2(&zh)) {
                return certificate_solution(
                    SolveStatus::PrimalInfeasible,
                    vec![0.0; n],
                    yh,
                    zh,
                    res,
                    iterations,
                );
            }
        }

        // Dual infeasibility / unboundedness: x ∈ K with cᵀx < 0, A x ≈ 0.
        let cx = dot(c, &it.x);
        if cx < 0.0 {
            let xh: Vec<f64> = it.x.iter().map(|v| v / -cx).collect();
            let mut r = vec![0.0; p];
            program.matrix().matvec_acc(&xh, &mut r);
            let res = norm2(&r);
            if res <= tol * (1.0 + norm2(&xh)) {
                return certificate_solution(
                    SolveStatus::Unbounded,
                    xh,
                    vec![0.0; p],
                    vec![0.0; n],
                    res,
                    iterations,
                );
            }
        }

        if iterations >= settings.max_iterations {
            let (bi, _) = best.unwrap();
            return build_solution(program, &bi, SolveStatus::IterationLimit, iterations, norm_b, norm_c);
        }

        // ----- Newton machinery at the current point ------------------------
        let scaling = match Scaling::compute(spec, &it.x, &it.z) {
            Some(s) => s,
            None => {
                let (bi, _) = best.unwrap();
                return build_solution(program, &bi, SolveStatus::NumericalFailure, iterations, norm_b, norm_c);
            }
        };
        if kkt.refactor(program, &scaling, 0.0).is_err() {
            let (bi, _) = best.unwrap();
            return build_solution(program, &bi, SolveStatus::NumericalFailure, iterations, norm_b, norm_c);
        }
        scaling.lambda(spec, &mut lambda);

        let mu = (dot(&it.x, &it.z) + it.tau * it.kappa) / (degree + 1) as f64;

        // Unscaled residuals of the embedding.
        let mut rp: Vec<f64> = b.iter().map(|v| -v * it.tau).collect();
        program.matrix().matvec_acc(&it.x, &mut rp);
        let mut rd: Vec<f64> = c.iter().zip(&it.z).map(|(ci, zi)| ci * it.tau - zi).collect();
        let mut aty = vec![0.0; n];
        program.matrix().tr_matvec_acc(&it.y, &mut aty);
        for (r, v) in rd.iter_mut().zip(&aty) {
            *r -= v;
        }
        let rg = dot(c, &it.x) - dot(b, &it.y) + it.kappa;

        // Constant solve of the iteration: (x1, y1) = M⁻¹ [c; b].
        let mut sol1 = vec![0.0; n + p];
        sol1[..n].copy_from_slice(c);
        sol1[n..].copy_from_slice(b);
        kkt.solve(program, &scaling, 0.0, &mut sol1);
        let den_lhs = dot(c, &sol1[..n]) - dot(b, &sol1[n..]) - it.kappa / it.tau;
        if den_lhs == 0.0 || !den_lhs.is_finite() {
            let (bi, _) = best.unwrap();
            return build_solution(program, &bi, SolveStatus::NumericalFailure, iterations, norm_b, norm_c);
        }

        jordan_mul(spec, &lambda, &lambda, &mut lam_lam);

        // Shared direction computation for both passes.
        let direction = |kkt: &mut KktSolver,
                             ds: &[f64],
                             d_kappa: f64,
                             eta: f64,
                             tmp: &mut Vec<f64>,
                             tmp2: &mut Vec<f64>|
         -> Option<(Vec<f64>, Vec<f64>, Vec<f64>, f64, f64)> {
            // u_x = η rd − W⁻¹ (λ \ ds);  u_y = −η rp.
            jordan_div(spec, &lambda, ds, tmp)?;
            let mut rhs = vec![0.0; n + p];
            let lam_div = tmp.clone();
            let winv_ld = {
                scaling.apply_w_inv(spec, &lam_div, tmp2);
                tmp2.clone()
            };
            for j in 0..n {
                rhs[j] = eta * rd[j] - winv_ld[j];
            }
            for i in 0..p {
                rhs[n + i] = -eta * rp[i];
            }
            kkt.solve(program, &scaling, 0.0, &mut rhs);

            let dtau = (-eta * rg - dot(c, &rhs[..n]) + dot(b, &rhs[n..]) - d_kappa / it.tau)
                / den_lhs;
            if !dtau.is_finite() {
                return None;
            }
            let mut dx: Vec<f64> = rhs[..n].to_vec();
            for (d, &s1) in dx.iter_mut().zip(&sol1[..n]) {
                *d += dtau * s1;
            }
            let mut dy: Vec<f64> = rhs[n..].to_vec();
            for (d, &s1) in dy.iter_mut().zip(&sol1[n..]) {
                *d += dtau * s1;
            }
            // dz = W⁻¹ (λ\ds − W⁻¹ dx) on cone coordinates; 0 on free.
            scaling.apply_w_inv(spec, &dx, tmp);
            let mut inner = lam_div;
            for (v, w) in inner.iter_mut().zip(tmp.iter()) {
                *v -= w;
            }
            let mut dz = vec![0.0; n];
            scaling.apply_w_inv(spec, &inner, &mut dz);
            zero_free(program, &mut dz);
            let dkappa = (d_kappa - it.kappa * dtau) / it.tau;
            Some((dx, dy, dz, dtau, dkappa))
        };

        // ----- affine (predictor) pass --------------------------------------
        for (d, &l) in ds.iter_mut().zip(&lam_lam) {
            *d = -l;
        }
        let affine = direction(&mut kkt, &ds, -it.tau * it.kappa, 1.0, &mut tmp, &mut tmp2);
        let (dx_a, _dy_a, dz_a, dtau_a, dkappa_a) = match affine {
            Some(d) => d,
            None => {
                let (bi, _) = best.unwrap();
                return build_solution(program, &bi, SolveStatus::NumericalFailure, iterations, norm_b, norm_c);
            }
        };
        let alpha_aff = step_limit(program, &it, &dx_a, &dz_a, dtau_a, dkappa_a).min(1.0);

        // Mehrotra heuristics from the predictor outcome.
        let mu_aff = {
            let xz: f64 = it
                .x
                .iter()
                .zip(&dx_a)
                .zip(it.z.iter().zip(&dz_a))
                .map(|((&xi, &dxi), (&zi, &dzi))| (xi + alpha_aff * dxi) * (zi + alpha_aff * dzi))
                .sum();
            let tk = (it.tau + alpha_aff * dtau_a) * (it.kappa + alpha_aff * dkappa_a);
            (xz + tk) / (degree + 1) as f64
        };
        let sigma = if mu > 0.0 { ((mu_aff / mu).max(0.0)).powi(3).clamp(0.0, 1.0) } else { 0.0 };

        // ----- combined (corrector) pass ------------------------------------
        // ds = σμ e − λ∘λ − (W⁻¹ dx_aff) ∘ (W dz_aff)
        scaling.apply_w_inv(spec, &dx_a, &mut tmp);
        let winv_dx = tmp.clone();
        scaling.apply_w(spec, &dz_a, &mut tmp2);
        let mut corr = vec![0.0; n];
        jordan_mul(spec, &winv_dx, &tmp2, &mut corr);
        for j in 0..n {
            ds[j] = sigma * mu * e[j] - lam_lam[j] - corr[j];
        }
        let d_kappa = sigma * mu - it.tau * it.kappa - dtau_a * dkappa_a;
        let eta = 1.0 - sigma;
        let combined = direction(&mut kkt, &ds, d_kappa, eta, &mut tmp, &mut tmp2);
        let (dx, dy, dz, dtau, dkappa) = match combined {
            Some(d) => d,
            None => {
                let (bi, _) = best.unwrap();
                return build_solution(program, &bi, SolveStatus::NumericalFailure, iterations, norm_b, norm_c);
            }
        };

        let mut alpha = (STEP_FRACTION * step_limit(program, &it, &dx, &dz, dtau, dkappa)).min(1.0);
        // Cancellation in the cone ratio test can land the damped step on
        // (or just past) the boundary on hard degenerate problems; back
        // off until the new point is strictly interior again.
        let mut stepped = false;
        for _ in 0..30 {
            let trial = apply_step(&it, &dx, &dy, &dz, dtau, dkappa, alpha);
            if trial.tau > 0.0
                && trial.kappa > 0.0
                && Scaling::compute(program.cones(), &trial.x, &trial.z).is_some()
            {
                it = trial;
                stepped = true;
                break;
            }
            alpha *= 0.5;
        }
        if !stepped {
            let (bi, _) = best.unwrap();
            return build_solution(program, &bi, SolveStatus::NumericalFailure, iterations, norm_b, norm_c);
        }
        iterations += 1;
    }
}

fn apply_step(
    it: &Iterate,
    dx: &[f64],
    dy: &[f64],
    dz: &[f64],
    dtau: f64,
    dkappa: f64,
    alpha: f64,
) -> Iterate {
    Iterate {
        x: it.x.iter().zip(dx).map(|(v, d)| v + alpha * d).collect(),
        y: it.y.iter().zip(dy).map(|(v, d)| v + alpha * d).collect(),
        z: it.z.iter().zip(dz).map(|(v, d)| v + alpha * d).collect(),
        tau: it.tau + alpha * dtau,
        kappa: it.kappa + alpha * dkappa,
    }
}

fn zero_free(program: &ConicProgram, v: &mut [f64]) {
    for (off, b) in program.cones().iter_offsets() {
        if b.kind == super::program::ConeKind::Free {
            v[off..off + b.dim].fill(0.0);
        }
    }
}

fn clone_iterate(it: &Iterate) -> Iterate {
    Iterate {
        x: it.x.clone(),
        y: it.y.clone(),
        z: it.z.clone(),
        tau: it.tau,
        kappa: it.kappa,
    }
}

fn state_is_finite(it: &Iterate) -> bool {
    it.tau.is_finite()
        && it.kappa.is_finite()
        && it.x.iter().all(|v| v.is_finite())
        && it.y.iter().all(|v| v.is_finite())
        && it.z.iter().all(|v| v.is_finite())
}

/// Largest step keeping x, z strictly conic and τ, κ positive.
fn step_limit(
    program: &ConicProgram,
    it: &Iterate,
    dx: &[f64],
    dz: &[f64],
    dtau: f64,
    dkappa: f64,
) -> f64 {
    let spec = program.cones();
    let mut alpha = f64::INFINITY;
    alpha = max_step(spec, &it.x, dx, alpha);
    alpha = max_step(spec, &it.z, dz, alpha);
    if dtau < 0.0 {
        alpha = alpha.min(-it.tau / dtau);
    }
    if dkappa < 0.0 {
        alpha = alpha.min(-it.kappa / dkappa);
    }
    alpha
}

#[cfg(test)]
mod tests {
    use super::super::program::ProgramBuilder;
    use super::super::{solve, SolveStatus, SolverSettings};
    use approx::assert_relative_eq;

    fn settings() -> SolverSettings {
        SolverSettings::default()
    }

    #[test]
    fn scalar_lp_reaches_its_bound() {
        // min x s.t. x − s = 1, s ≥ 0 → x* = 1.
        let mut pb = ProgramBuilder::new();
        let x = pb.free_vars(1).start;
        pb.set_cost(x, 1.0);
        pb.geq_row(&[(x, 1.0)], 1.0);
        let prog = pb.build().unwrap();
        let sol = solve(&prog, &settings());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_relative_eq!(sol.objective, 1.0, epsilon = 1e-6);
        assert_relative_eq!(sol.primal[x], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn norm_minimization_gives_the_euclidean_norm() {
        // min t s.t. (t, 3, 4) ∈ SOC → t* = 5.
        let mut pb = ProgramBuilder::new();
        let t = pb.soc_vars(3);
        pb.set_cost(t.start, 1.0);
        pb.eq_row(&[(t.start + 1, 1.0)], 3.0);
        pb.eq_row(&[(t.start + 2, 1.0)], 4.0);
        let prog = pb.build().unwrap();
        let sol = solve(&prog, &settings());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_relative_eq!(sol.objective, 5.0, epsilon = 1e-6);
    }

    #[test]
    fn contradictory_bounds_are_primal_infeasible() {
        // x ≥ 1 and x ≤ 0 cannot hold together.
        let mut pb = ProgramBuilder::new();
        let x = pb.free_vars(1).start;
        pb.set_cost(x, 1.0);
        pb.geq_row(&[(x, 1.0)], 1.0);
        pb.leq_row(&[(x, 1.0)], 0.0);
        let prog = pb.build().unwrap();
        let sol = solve(&prog, &settings());
        assert_eq!(sol.status, SolveStatus::PrimalInfeasible);
    }

    #[test]
    fn unbounded_direction_is_certified() {
        // min −x, x ≥ 0, no other rows → unbounded below.
        let mut pb = ProgramBuilder::new();
        let x = pb.nonneg_vars(1).start;
        pb.set_cost(x, -1.0);
        // Tie a dummy equality so the program has at least one row.
        let y = pb.nonneg_vars(1).start;
        pb.eq_row(&[(y, 1.0)], 1.0);
        let prog = pb.build().unwrap();
        let sol = solve(&prog, &settings());
        assert_eq!(sol.status, SolveStatus::Unbounded);
    }

    #[test]
    fn optimal_solutions_satisfy_weak_duality_and_cone_membership() {
        // A small mixed LP/SOC program with a known flavor: minimize the
        // norm of (x−2, y+1) subject to x + y = 1.
        let mut pb = ProgramBuilder::new();
        let xy = pb.free_vars(2);
        let (x, y) = (xy.start, xy.start + 1);
        pb.eq_row(&[(x, 1.0), (y, 1.0)], 1.0);
        let t = pb.soc_of_expressions(&[
            (vec![], 0.0), // head: a fresh epigraph variable (expression 0 + const 0)
            (vec![(x, 1.0)], -2.0),
            (vec![(y, 1.0)], 1.0),
        ]);
        let prog = {
            // head must be free to move: re-add with cost
            pb.set_cost(t.start, 1.0);
            pb.build().unwrap()
        };
        let sol = solve(&prog, &settings());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - sol.dual_objective).abs() <= 1e-6);
        assert!(prog.cones().violation(&sol.primal) <= 1e-7);
        assert!(prog.cones().violation(&sol.dual_cone) <= 1e-7);
        // Analytic optimum: distance from the line x+y=1 to the point (2,−1):
        // |2 + (−1) − 1|/√2 = 0.
        assert_relative_eq!(sol.objective, 0.0, epsilon = 1e-5);
    }

    #[test]
    fn repeated_solves_are_bit_identical() {
        let mut pb = ProgramBuilder::new();
        let t = pb.soc_vars(4);
        pb.set_cost(t.start, 1.0);
        pb.eq_row(&[(t.start + 1, 2.0)], 3.0);
        pb.eq_row(&[(t.start + 2, 1.0), (t.start + 3, -1.0)], 0.5);
        pb.leq_row(&[(t.start + 3, 1.0)], 0.2);
        let prog = pb.build().unwrap();
        let a = solve(&prog, &settings());
        let b = solve(&prog, &settings());
        assert_eq!(a.status, b.status);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        assert_eq!(a.iterations, b.iterations);
        for (u, v) in a.primal.iter().zip(&b.primal) {
            assert_eq!(u.to_bits(), v.to_bits());
        }
    }
}
