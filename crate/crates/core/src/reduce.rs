//! ℓp regression answered by single sensitivity computations.
//!
//! With `A′ = [A −b; 0ᵀ −λ]`, the last row's sensitivity is
//! `λ^p / (min_y ‖Ay − b‖_p^p + λ^p)`, so one sensitivity gives the regression
//! optimum. With `A′ = [A; λI]`, the sensitivity of the appended row `λe_i`
//! gives a regularized leave-one-column-out regression value.

use crate::error::{Error, Result};
use crate::linalg::require_full_column_rank;
use crate::matrix::DenseMatrix;
use crate::norm::check_finite_p;
use crate::regress::SensitivityOracle;

/// `1e-2·‖A‖_F/√(nd)`.
pub fn default_lambda(a: &DenseMatrix) -> f64 {
    1e-2 * a.frobenius_norm() / ((a.n_rows() * a.n_cols()) as f64).sqrt()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// `min_y ‖Ay − b‖_p^p`, computed as `λ^p/σ − λ^p` with `σ` the sensitivity
/// of the last row of `[A −b; 0ᵀ −λ]`.
pub fn regression_via_sensitivity(a: &DenseMatrix, b: &[f64], p: f64, lambda: f64) -> Result<f64> {
    check_finite_p(p)?;
    check_lambda(lambda)?;
    let (n, d) = a.shape();
    if b.len() != n {
        return Err(Error::InvalidInput(format!("b has {} entries, A has {n} rows", b.len())));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("b is not finite".into()));
    }
    require_full_column_rank(a)?;
    let mut data = Vec::with_capacity((n + 1) * (d + 1));
    for (row, bi) in a.rows().zip(b) {
        data.extend_from_slice(row);
        data.push(-bi);
    }
    data.extend(std::iter::repeat_n(0.0, d));
    data.push(-lambda);
    let augmented = DenseMatrix::new(n + 1, d + 1, data)?;
    let oracle = SensitivityOracle::new(&augmented, p)?;
    let sigma = oracle.sensitivity(augmented.row(n))?;
    if !(sigma > 0.0) {
        return Err(Error::ZeroSensitivity);
    }
    let lp = lambda.powf(p);
    Ok((lp / sigma - lp).max(0.0))
}

/// For each column `i`, `λ^p/σ_p(λe_i)` with respect to `[A; λI]`, which
/// brackets `OPT_i = min_y ‖A_{:−i}y + A_{:i}‖_p^p` from above within
/// `λ^p(1 + ‖y*‖_p^p)`.
pub fn leave_one_out_multiregression(a: &DenseMatrix, p: f64, lambda: f64) -> Result<Vec<f64>> {
    check_finite_p(p)?;
    check_lambda(lambda)?;
    // [A; λI] has full column rank for any A, so A itself may be deficient.
    let d = a.n_cols();
    let reg = DenseMatrix::identity(d).scale_rows(&vec![lambda; d]);
    let augmented = a.vstack(&reg)?;
    let oracle = SensitivityOracle::new(&augmented, p)?;
    let lp = lambda.powf(p);
    (0..d)
        .map(|i| {
            let sigma = oracle.sensitivity(reg.row(i))?;
            if !(sigma > 0.0) {
                return Err(Error::ZeroSensitivity);
            }
            Ok(lp / sigma)
        })
        .collect()
}
