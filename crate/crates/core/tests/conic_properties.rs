//! Property tests for the conic solver on randomly generated programs that
//! are feasible by construction: a strictly interior primal point and a
//! strictly interior dual pair are drawn first, and the data (b, c) are
//! manufactured from them, so strong duality holds and the optimum exists.

use proptest::prelude::*;
use ucwarm_core::conic::{
    solve, validate, ConeBlock, ConeKind, ConeSpec, ConicProgram, CscMatrix, SolveStatus,
    SolverSettings,
};

#[derive(Debug, Clone)]
struct FeasibleCase {
    program: ConicProgram,
    primal_objective_at_seed: f64,
}

fn spec_strategy() -> impl Strategy<Value = Vec<(ConeKind, usize)>> {
    (
        0usize..=2,                                   // free vars
        1usize..=6,                                   // nonneg vars
        proptest::collection::vec(2usize..=4, 0..=2), // SOC dims
    )
        .prop_map(|(nf, nn, socs)| {
            let mut blocks = Vec::new();
            if nf > 0 {
                blocks.push((ConeKind::Free, nf));
            }
            blocks.push((ConeKind::Nonnegative, nn));
            for d in socs {
                blocks.push((ConeKind::SecondOrder, d));
            }
            blocks
        })
}

fn case_strategy() -> impl Strategy<Value = FeasibleCase> {
    spec_strategy()
        .prop_flat_map(|blocks| {
            let n: usize = blocks.iter().map(|&(_, d)| d).sum();
            let p = 1usize..=n.min(5);
            (
                Just(blocks),
                p,
                proptest::collection::vec(-1.5f64..1.5, n),     // tail/free seeds
                proptest::collection::vec(0.2f64..2.0, n),      // interior margins
                proptest::collection::vec(-1.5f64..1.5, n),     // dual tail seeds
                proptest::collection::vec(0.2f64..2.0, n),      // dual margins
                proptest::collection::vec(-2.0f64..2.0, 5),     // y seed (truncated to p)
                proptest::collection::vec(-2.0f64..2.0, 5 * 32),// A entries
                proptest::collection::vec(0.0f64..1.0, 5 * 32), // A sparsity draws
            )
        })
        .prop_map(
            |(blocks, p, seed_x, margin_x, seed_z, margin_z, y_seed, a_vals, a_keep)| {
                let spec = ConeSpec::new(
                    blocks
                        .iter()
                        .map(|&(kind, dim)| ConeBlock { kind, dim })
                        .collect(),
                )
                .unwrap();
                let n = spec.var_count();

                // Strictly interior primal/dual points on each block.
                let mut x0 = vec![0.0; n];
                let mut z0 = vec![0.0; n];
                for (off, b) in spec.iter_offsets() {
                    match b.kind {
                        ConeKind::Free => {
                            for j in off..off + b.dim {
                                x0[j] = seed_x[j];
                                z0[j] = 0.0;
                            }
                        }
                        ConeKind::Nonnegative => {
                            for j in off..off + b.dim {
                                x0[j] = margin_x[j];
                                z0[j] = margin_z[j];
                            }
                        }
                        ConeKind::SecondOrder => {
                            let mut tx = 0.0;
                            let mut tz = 0.0;
                            for j in off + 1..off + b.dim {
                                x0[j] = seed_x[j];
                                z0[j] = seed_z[j];
                                tx += x0[j] * x0[j];
                                tz += z0[j] * z0[j];
                            }
                            x0[off] = tx.sqrt() + margin_x[off];
                            z0[off] = tz.sqrt() + margin_z[off];
                        }
                    }
                }

                // Sparse-ish random A; b and c manufactured for feasibility.
                let mut triplets = Vec::new();
                for i in 0..p {
                    let mut any = false;
                    for j in 0..n {
                        let idx = i * n + j;
                        if a_keep[idx % a_keep.len()] < 0.45 {
                            triplets.push((i, j, a_vals[idx % a_vals.len()]));
                            any = true;
                        }
                    }
                    if !any {
                        triplets.push((i, i % n, 1.0));
                    }
                }
                let a = CscMatrix::from_triplets(p, n, &triplets);

                let mut b = vec![0.0; p];
                a.matvec_acc(&x0, &mut b);
                let y0: Vec<f64> = y_seed.iter().take(p).copied().collect();
                let mut c = z0.clone();
                a.tr_matvec_acc(&y0, &mut c);

                let objective_at_seed: f64 = c.iter().zip(&x0).map(|(ci, xi)| ci * xi).sum();
                let program =
                    ConicProgram::new(c, a, b, spec, Default::default()).unwrap();
                FeasibleCase { program, primal_objective_at_seed: objective_at_seed }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn constructed_feasible_socps_solve_to_optimality(case in case_strategy()) {
        let settings = SolverSettings::default();
        let sol = solve(&case.program, &settings);
        prop_assert_eq!(sol.status, SolveStatus::Optimal, "residuals: {:?}", sol.residuals);

        // The seed point is feasible, so the optimum cannot exceed it.
        let scale = 1.0 + case.primal_objective_at_seed.abs();
        prop_assert!(
            sol.objective <= case.primal_objective_at_seed + 1e-6 * scale,
            "objective {} exceeds seed objective {}",
            sol.objective,
            case.primal_objective_at_seed
        );

        // Weak duality at the reported tolerance.
        let obj_scale = 1.0f64.max(sol.objective.abs()).max(sol.dual_objective.abs());
        prop_assert!((sol.objective - sol.dual_objective).abs() <= 1e-6 * obj_scale);

        // Returned points live in their cones (primal) and dual cones.
        prop_assert!(case.program.cones().violation(&sol.primal) <= 1e-7);
        prop_assert!(case.program.cones().violation(&sol.dual_cone) <= 1e-7);

        // Equality residuals at the reported point match the report.
        let report = validate(&case.program, &sol.primal, 1e-5).unwrap();
        prop_assert!(report.max_equality_residual <= 1e-5 * (1.0 + case.primal_objective_at_seed.abs()));
    }
}
