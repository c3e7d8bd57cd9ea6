use approx::assert_abs_diff_eq;
use lpsens::linalg::rank;
use lpsens::{
    leverage_exact, lewis_weights, max_sensitivity, sensitivities_exact, sensitivities_rowwise, sensitivity_one,
    total_lewis_oneshot, DenseMatrix, LewisConfig, MaxConfig, RandomSource, RowwiseConfig, TotalConfig, TotalMethod,
};
use proptest::prelude::*;

/// Tall matrices with bounded entries, up to `max_n × max_d`.
fn tall_matrix(max_n: usize, max_d: usize) -> impl Strategy<Value = DenseMatrix> {
    tall_matrix_from(0, max_n, max_d)
}

/// As [`tall_matrix`], with at least `min_n` rows.
fn tall_matrix_from(min_n: usize, max_n: usize, max_d: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_d)
        .prop_flat_map(move |d| (Just(d), (d + 1).max(min_n)..=max_n))
        .prop_flat_map(|(d, n)| prop::collection::vec(-8.0f64..8.0, n * d).prop_map(move |v| (n, d, v)))
        .prop_map(|(n, d, v)| DenseMatrix::new(n, d, v).unwrap())
}

fn full_rank(a: &DenseMatrix) -> bool {
    rank(a) == a.n_cols()
}

fn p_value() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leverage_sums_to_rank_and_stays_in_unit_interval(a in tall_matrix(30, 5)) {
        let tau = leverage_exact(&a);
        prop_assert!((tau.total() - rank(&a) as f64).abs() < 1e-8);
        prop_assert!(tau.as_slice().iter().all(|&t| (0.0..=1.0).contains(&t)));
    }

    #[test]
    fn l1_sensitivity_is_sandwiched_by_leverage(a in tall_matrix(20, 4)) {
        prop_assume!(full_rank(&a));
        let n = a.n_rows() as f64;
        let tau = leverage_exact(&a);
        let s = sensitivities_exact(&a, 1.0).unwrap();
        for i in 0..a.n_rows() {
            prop_assert!(s[i] >= (tau[i] / n).sqrt() - 1e-9);
            prop_assert!(s[i] <= tau[i].sqrt() + 1e-9);
        }
    }

    #[test]
    fn appending_a_row_follows_the_harmonic_identity(a in tall_matrix(20, 3), p in p_value()) {
        let n = a.n_rows();
        let b = a.select_rows(&(0..n - 1).collect::<Vec<_>>());
        prop_assume!(full_rank(&b));
        let last = a.row(n - 1);
        let without = sensitivity_one(last, &b, p).unwrap();
        let with = sensitivity_one(last, &a, p).unwrap();
        prop_assert!((with - 1.0 / (1.0 + 1.0 / without)).abs() < 1e-7 * (1.0 + with));
    }

    #[test]
    fn sensitivities_are_invariant_under_column_transforms(a in tall_matrix(15, 3), p in p_value(), c in 0.5f64..4.0) {
        prop_assume!(full_rank(&a));
        let d = a.n_cols();
        // Upper-triangular T with diagonal c is invertible.
        let t = DenseMatrix::new(d, d, (0..d * d).map(|k| {
            let (i, j) = (k / d, k % d);
            if i == j { c } else if i < j { 0.5 } else { 0.0 }
        }).collect()).unwrap();
        let at = a.matmul(&t).unwrap();
        let s = sensitivities_exact(&a, p).unwrap();
        let st = sensitivities_exact(&at, p).unwrap();
        for i in 0..a.n_rows() {
            prop_assert!((s[i] - st[i]).abs() < 1e-6 * (1.0 + s[i]));
        }
    }

    #[test]
    fn adding_rows_never_raises_a_sensitivity(a in tall_matrix(15, 3), extra in prop::collection::vec(-5.0f64..5.0, 3), p in p_value()) {
        prop_assume!(full_rank(&a));
        let row: Vec<f64> = extra[..a.n_cols()].to_vec();
        let grown = a.with_row(&row).unwrap();
        let before = sensitivities_exact(&a, p).unwrap();
        let after = sensitivities_exact(&grown, p).unwrap();
        for i in 0..a.n_rows() {
            prop_assert!(after[i] <= before[i] + 1e-7);
        }
    }

    #[test]
    fn lewis_weights_sum_to_dimension(a in tall_matrix(25, 4), p in prop::sample::select(vec![1.0, 1.5, 3.0])) {
        prop_assume!(full_rank(&a));
        let w = lewis_weights(&a, &LewisConfig::new(p)).unwrap();
        prop_assert!((w.total() - a.n_cols() as f64).abs() < 1e-3);
        prop_assert!(w.as_slice().iter().all(|&v| v > 0.0 && v <= 1.0 + 1e-9));
    }

    #[test]
    fn estimators_are_deterministic_per_seed(a in tall_matrix_from(8, 24, 2), seed in any::<u64>()) {
        prop_assume!(full_rank(&a));
        let rng = RandomSource::new(seed);
        let cfg = RowwiseConfig { signs_per_block: 3, repetitions: 1, ..RowwiseConfig::new(1.0, 4) };
        prop_assert_eq!(sensitivities_rowwise(&a, &cfg, &rng).unwrap(), sensitivities_rowwise(&a, &cfg, &rng).unwrap());
        let tcfg = TotalConfig::new(1.5, 0.5, TotalMethod::LewisOneshot);
        prop_assert_eq!(total_lewis_oneshot(&a, &tcfg, &rng).unwrap(), total_lewis_oneshot(&a, &tcfg, &rng).unwrap());
        let mcfg = MaxConfig::new(3.0);
        prop_assert_eq!(max_sensitivity(&a, &mcfg, &rng).unwrap(), max_sensitivity(&a, &mcfg, &rng).unwrap());
    }

    #[test]
    fn rowwise_estimates_share_a_value_within_each_block(a in tall_matrix_from(8, 24, 2), seed in any::<u64>()) {
        prop_assume!(full_rank(&a));
        // With one repetition every row of a block receives that block's maximum,
        // so the number of distinct values is at most the number of blocks.
        let alpha = 5;
        let cfg = RowwiseConfig { signs_per_block: 3, repetitions: 1, ..RowwiseConfig::new(1.0, alpha) };
        let est = sensitivities_rowwise(&a, &cfg, &RandomSource::new(seed)).unwrap();
        let mut values: Vec<f64> = est.weights.values.clone();
        values.sort_by(f64::total_cmp);
        values.dedup();
        prop_assert!(values.len() <= a.n_rows().div_ceil(alpha));
        prop_assert_eq!(est.oracle_calls, 3 * a.n_rows().div_ceil(alpha));
    }

    #[test]
    fn max_estimate_applies_the_spanner_multiplier(a in tall_matrix(20, 3), seed in any::<u64>()) {
        prop_assume!(full_rank(&a));
        let d = a.n_cols() as f64;
        let est = max_sensitivity(&a, &MaxConfig::new(1.0), &RandomSource::new(seed)).unwrap();
        assert_abs_diff_eq!(est.multiplier, (2.0 * d).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(est.estimate, est.raw_max * est.multiplier, epsilon = 1e-12);
        prop_assert!(est.spanner_rows.len() <= a.n_cols());
    }
}
