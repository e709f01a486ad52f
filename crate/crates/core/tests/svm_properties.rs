//! Property tests for the classifier layer: loss identities, kernel matrix
//! positive-semidefiniteness, the in-sample bound `mean hinge ≤ J(λ)` for
//! trained models, prediction-label membership, and transport-distance
//! axioms on randomly generated data sets.

use proptest::prelude::*;
use ucwarm_core::grid::FeatureVector;
use ucwarm_core::svm::{
    expected_hinge, gaussian_kernel, hinge, kernel_matrix, predict, train_kernel, train_linear,
    wasserstein2, ClassifierModel, LabeledSet,
};

fn labeled_set_strategy() -> impl Strategy<Value = LabeledSet> {
    (2usize..=6, 1usize..=3)
        .prop_flat_map(|(h, d)| {
            (
                proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, d), h),
                proptest::collection::vec(proptest::bool::ANY, h),
            )
        })
        .prop_map(|(xs, flips)| {
            let labels = flips.iter().map(|&f| if f { 1.0 } else { -1.0 }).collect();
            LabeledSet::new(xs, labels, "prop").expect("generated set is well formed")
        })
}

fn lambda_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 1e-3..1.0f64]
}

fn point_cloud(max_n: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, dim), 1..=max_n)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn hinge_is_nonnegative_and_vanishes_exactly_when_the_margin_is_met(
        flip in proptest::bool::ANY,
        z_prime in -5.0f64..5.0,
    ) {
        let z = if flip { 1.0 } else { -1.0 };
        let loss = hinge(z, z_prime);
        prop_assert!(loss >= 0.0);
        prop_assert_eq!(loss, (1.0 - z * z_prime).max(0.0));
        prop_assert_eq!(loss == 0.0, z * z_prime >= 1.0);
    }

    #[test]
    fn gaussian_kernel_is_symmetric_positive_and_at_most_one(
        x in proptest::collection::vec(-4.0f64..4.0, 1..=4),
        y in proptest::collection::vec(-4.0f64..4.0, 1..=4),
        gamma in 0.05f64..5.0,
    ) {
        prop_assume!(x.len() == y.len());
        let k_xy = gaussian_kernel(&x, &y, gamma).unwrap();
        let k_yx = gaussian_kernel(&y, &x, gamma).unwrap();
        prop_assert_eq!(k_xy, k_yx);
        prop_assert!(k_xy > 0.0 && k_xy <= 1.0);
        prop_assert_eq!(gaussian_kernel(&x, &x, gamma).unwrap(), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn kernel_matrices_are_positive_semidefinite_within_tolerance(
        xs in point_cloud(6, 2),
        gamma in 0.05f64..5.0,
        probes in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 6), 4),
    ) {
        let k = kernel_matrix(&xs, gamma).unwrap();
        let h = xs.len();
        for v in &probes {
            let v = &v[..h];
            let quad: f64 = (0..h)
                .map(|i| (0..h).map(|j| v[i] * k[i][j] * v[j]).sum::<f64>())
                .sum();
            let norm: f64 = v.iter().map(|a| a * a).sum();
            prop_assert!(
                quad >= -1e-8 * norm.max(1.0),
                "quadratic form {quad} negative beyond tolerance"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn trained_optimum_bounds_the_in_sample_hinge_loss(
        data in labeled_set_strategy(),
        lambda in lambda_strategy(),
        gamma in 0.2f64..2.0,
    ) {
        let linear = train_linear(&data, lambda).unwrap();
        prop_assert!(linear.j.is_finite() && linear.j >= -1e-12);
        let linear_model = ClassifierModel::from(linear);
        prop_assert!(expected_hinge(&linear_model, &data).unwrap() <= linear_model.bound() + 1e-7);

        let kernel = train_kernel(&data, lambda, gamma).unwrap();
        prop_assert!(kernel.j.is_finite() && kernel.j >= -1e-12);
        let kernel_model = ClassifierModel::from(kernel);
        prop_assert!(expected_hinge(&kernel_model, &data).unwrap() <= kernel_model.bound() + 1e-7);

        // Predictions are deterministic functions into {−1, +1}.
        for x in data.features() {
            let fx = FeatureVector { values: x.clone(), schema: "prop".into() };
            for model in [&linear_model, &kernel_model] {
                let p = predict(model, &fx).unwrap();
                prop_assert!(p.label == 1.0 || p.label == -1.0);
                prop_assert!(p.score.is_finite());
                prop_assert_eq!(predict(model, &fx).unwrap(), p);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn transport_distance_is_a_symmetric_nonnegative_zero_on_equals(
        a in point_cloud(4, 2),
        b in point_cloud(4, 2),
    ) {
        let d_ab = wasserstein2(&a, &b).unwrap();
        let d_ba = wasserstein2(&b, &a).unwrap();
        prop_assert!(d_ab >= 0.0);
        prop_assert!((d_ab - d_ba).abs() <= 1e-7, "asymmetry {d_ab} vs {d_ba}");
        prop_assert_eq!(wasserstein2(&a, &a).unwrap(), 0.0);
    }
}
