use approx::{assert_abs_diff_eq, assert_relative_eq};
use lpsens::generate::{gaussian, heavy_tailed, identity_stack};
use lpsens::{
    leave_one_out_multiregression, linf_embedding, lp_embedding, lp_norm, max_sensitivity, min_lp_on_hyperplane,
    regression_via_sensitivity, sensitivities_exact, sensitivities_rowwise, total_lewis_oneshot, total_recursive_l1,
    DenseMatrix, Error, MaxConfig, RandomSource, RowwiseConfig, TotalConfig, TotalMethod,
};

#[test]
fn toy_matrix_sensitivities() {
    let a = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
    // For p = 1 every row has sensitivity 1/2.
    let s1 = sensitivities_exact(&a, 1.0).unwrap();
    for i in 0..3 {
        assert_abs_diff_eq!(s1[i], 0.5, epsilon = 1e-9);
    }
    // For p = 2 they are the leverage scores 2/3.
    let s2 = sensitivities_exact(&a, 2.0).unwrap();
    for i in 0..3 {
        assert_abs_diff_eq!(s2[i], 2.0 / 3.0, epsilon = 1e-12);
    }
}

#[test]
fn identity_stack_has_uniform_sensitivity() {
    let a = identity_stack(3, 4);
    for p in [1.0, 1.5, 2.0, 3.0] {
        let s = sensitivities_exact(&a, p).unwrap();
        for &v in s.as_slice() {
            assert_relative_eq!(v, 0.25, max_relative = 1e-7);
        }
    }
}

#[test]
fn embeddings_preserve_norms_on_random_directions() {
    let a = heavy_tailed(200, 3, 1);
    let emb = lp_embedding(&a, 1.0, 0.5, &RandomSource::new(2)).unwrap();
    let sa = emb.materialize(&a);
    for k in 0..20 {
        let x: Vec<f64> = gaussian(1, 3, 100 + k).row(0).to_vec();
        let ratio = lp_norm(&sa.matvec(&x), 1.0).unwrap() / lp_norm(&a.matvec(&x), 1.0).unwrap();
        assert!((0.5..=1.5).contains(&ratio), "ratio {ratio}");
    }
    let spanner = linf_embedding(&a).unwrap();
    assert!(spanner.len() <= 3);
}

#[test]
fn rowwise_estimates_bracket_the_truth() {
    let a = gaussian(120, 3, 4);
    let exact = sensitivities_exact(&a, 1.0).unwrap();
    let cfg = RowwiseConfig { signs_per_block: 20, repetitions: 3, ..RowwiseConfig::new(1.0, 4) };
    let est = sensitivities_rowwise(&a, &cfg, &RandomSource::new(5)).unwrap();
    let inside = (0..120).filter(|&i| exact[i] <= 4.0 * est.weights[i] && est.weights[i] <= 4.0 * 4.0 * exact[i] + 16.0 / 120.0 * exact.total()).count();
    assert!(inside >= 114, "{inside}/120");
}

#[test]
fn total_estimators_agree_with_the_oracle() {
    let a = gaussian(200, 4, 6);
    for p in [1.0, 3.0] {
        let truth = sensitivities_exact(&a, p).unwrap().total();
        let est = total_lewis_oneshot(&a, &TotalConfig::new(p, 0.2, TotalMethod::LewisOneshot), &RandomSource::new(7))
            .unwrap()
            .estimate;
        assert!(est > truth / 1.5 && est < 3.0 * truth, "p = {p}: {est} vs {truth}");
    }
    let truth = sensitivities_exact(&a, 1.0).unwrap().total();
    let cfg = TotalConfig { recursion_constant: 0.002, ..TotalConfig::new(1.0, 0.2, TotalMethod::RecursiveL1) };
    let est = total_recursive_l1(&a, &cfg, &RandomSource::new(8)).unwrap().estimate;
    assert!(est >= truth && est <= 3.0 * truth, "{est} vs {truth}");
}

#[test]
fn max_estimate_brackets_the_largest_sensitivity() {
    let a = heavy_tailed(100, 3, 9);
    for p in [1.0, 3.0] {
        let truth = sensitivities_exact(&a, p).unwrap().max();
        let est = max_sensitivity(&a, &MaxConfig::new(p), &RandomSource::new(10)).unwrap().estimate;
        let ratio = est / truth;
        assert!(ratio >= 0.5 && ratio <= 2.0 * 6f64.powf(p / 2.0), "p = {p}: ratio {ratio}");
    }
}

#[test]
fn regression_reduction_matches_least_squares() {
    let a = gaussian(30, 2, 11);
    let b: Vec<f64> = gaussian(30, 1, 12).column(0);
    // Normal equations for the 2×2 case.
    let g = a.gram();
    let atb = [a.column(0).iter().zip(&b).map(|(x, y)| x * y).sum::<f64>(), a.column(1).iter().zip(&b).map(|(x, y)| x * y).sum::<f64>()];
    let det = g.get(0, 0) * g.get(1, 1) - g.get(0, 1) * g.get(1, 0);
    let y = [(g.get(1, 1) * atb[0] - g.get(0, 1) * atb[1]) / det, (g.get(0, 0) * atb[1] - g.get(1, 0) * atb[0]) / det];
    let residual: f64 = a.rows().zip(&b).map(|(r, bi)| (r[0] * y[0] + r[1] * y[1] - bi).powi(2)).sum();
    let via = regression_via_sensitivity(&a, &b, 2.0, 0.3).unwrap();
    assert_relative_eq!(via, residual, max_relative = 1e-9);
}

#[test]
fn leave_one_out_values_upper_bound_the_column_regressions() {
    let a = gaussian(25, 3, 13);
    let lambda = 0.01;
    let values = leave_one_out_multiregression(&a, 1.0, lambda).unwrap();
    for (i, &v) in values.iter().enumerate() {
        let others: Vec<Vec<f64>> = a.rows().map(|r| (0..3).filter(|&j| j != i).map(|j| r[j]).chain([r[i]]).collect()).collect();
        let m = DenseMatrix::from_rows(&others).unwrap();
        let opt = min_lp_on_hyperplane(&m, &[0.0, 0.0, 1.0], 1.0).unwrap();
        let y_norm: f64 = opt.x_opt[..2].iter().map(|v| v.abs()).sum();
        assert!(v >= opt.value - 1e-9 && v <= opt.value + lambda * (1.0 + y_norm) + 1e-9);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let wide = gaussian(2, 3, 14);
    assert!(matches!(sensitivities_exact(&wide, 1.0), Err(Error::NotTall { .. })));
    let a = gaussian(10, 2, 15);
    assert!(matches!(sensitivities_exact(&a, 0.5), Err(Error::InvalidNorm(_))));
    let cfg = TotalConfig::new(2.0, 0.2, TotalMethod::RecursiveL1);
    assert!(matches!(total_recursive_l1(&a, &cfg, &RandomSource::new(0)), Err(Error::InvalidConfig(_))));
}
