//! ℓp Lewis weights: the unique weights with `w_i = τ_i(W^{1/2−1/p}A)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::leverage::leverage_exact;
use crate::linalg::require_full_column_rank;
use crate::matrix::DenseMatrix;
use crate::norm::check_finite_p;
use crate::weights::{WeightKind, WeightVector};

const FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LewisConfig {
    pub p: f64,
    pub max_iters: usize,
    pub tol: f64,
    /// Exponent `β` of the geometric update `w ← w^{1−β}·τ^β`.
    pub damping: f64,
}

impl LewisConfig {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            max_iters: 200,
            tol: 1e-6,
            damping: default_damping(p),
        }
    }

    fn validate(&self) -> Result<()> {
        check_finite_p(self.p)?;
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        Ok(())
    }
}

/// Step size for which the update is a contraction near the fixed point.
///
/// In log coordinates the Jacobian of `w ↦ τ(W^{1/2−1/p}A)` at the fixed
/// point is `(1 − 2/p)(I − P)` with `P_ij = τ_ij²/τ_i`, whose spectrum lies in
/// `(1 − 2/p)·[0, 1]`. The damped map therefore has eigenvalues in
/// `[1 − 2β/p, 1 − β]` for `p < 2`; `β = 2p/(p + 2)` balances the two ends
/// (radius `(2 − p)/(2 + p)`, i.e. 1/3 at `p = 1`, where the undamped map
/// sits on the edge at −1). For `2 ≤ p < 4` the plain update is used; beyond
/// that, half steps guard against the non-local behaviour of large `p`.
pub fn default_damping(p: f64) -> f64 {
    if p >= 4.0 {
        0.5
    } else {
        (2.0 * p / (p + 2.0)).min(1.0)
    }
}

/// Result of the fixed-point iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct LewisOutcome {
    pub weights: WeightVector,
    pub iterations: usize,
    pub residual: f64,
}

/// Lewis weights from the uniform start `w_i = d/n`.
pub fn lewis_weights(a: &DenseMatrix, cfg: &LewisConfig) -> Result<WeightVector> {
    require_full_column_rank(a)?;
    let start = vec![a.n_cols() as f64 / a.n_rows() as f64; a.n_rows()];
    Ok(lewis_iterate(a, cfg, start)?.weights)
}

/// Runs the damped iteration from `start`, stopping as soon as the relative
/// fixed-point residual `max_i |w_i − τ_i(W^{1/2−1/p}A)| / max(w_i, 1e-12)`
/// is at most `cfg.tol`.
pub fn lewis_iterate(a: &DenseMatrix, cfg: &LewisConfig, start: Vec<f64>) -> Result<LewisOutcome> {
    cfg.validate()?;
    if start.len() != a.n_rows() {
        return Err(Error::InvalidInput(format!(
            "start has {} weights for {} rows",
            start.len(),
            a.n_rows()
        )));
    }
    let p = cfg.p;
    let exponent = 0.5 - 1.0 / p;
    let beta = cfg.damping;
    let mut w: Vec<f64> = start.into_iter().map(|v| v.max(FLOOR)).collect();
    let mut residual = f64::INFINITY;
    for it in 0..=cfg.max_iters {
        let scales: Vec<f64> = w.iter().map(|v| v.powf(exponent)).collect();
        let tau = leverage_exact(&a.scale_rows(&scales));
        residual = w
            .iter()
            .zip(tau.as_slice())
            .map(|(wi, ti)| (wi - ti).abs() / wi.max(FLOOR))
            .fold(0.0, f64::max);
        if residual <= cfg.tol {
            return Ok(LewisOutcome {
                weights: WeightVector::new(w, WeightKind::Lewis { p }),
                iterations: it,
                residual,
            });
        }
        if it == cfg.max_iters {
            break;
        }
        for (wi, ti) in w.iter_mut().zip(tau.as_slice()) {
            *wi = (wi.powf(1.0 - beta) * ti.max(FLOOR).powf(beta)).max(FLOOR);
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iters,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gaussian;

    #[test]
    fn p2_gives_leverage_after_one_step() {
        let a = gaussian(25, 3, 2);
        let out = lewis_iterate(&a, &LewisConfig::new(2.0), vec![3.0 / 25.0; 25]).unwrap();
        assert_eq!(out.iterations, 1);
        let lev = leverage_exact(&a);
        for i in 0..25 {
            assert!((out.weights[i] - lev[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_has_unit_weights() {
        for p in [1.0, 1.5, 3.0, 5.0] {
            let w = lewis_weights(&DenseMatrix::identity(4), &LewisConfig::new(p)).unwrap();
            assert!(w.as_slice().iter().all(|v| (v - 1.0).abs() < 1e-6), "p={p}");
        }
    }

    /// Reference: the same recurrence written out by hand for a 3×2 matrix,
    /// with the 2×2 inverse in closed form, half steps and 1e5 iterations.
    #[test]
    fn toy_p1_matches_long_reference_run() {
        let rows = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let mut w = [2.0 / 3.0; 3];
        for _ in 0..100_000 {
            let s: Vec<f64> = w.iter().map(|v: &f64| v.powf(-1.0)).collect();
            let (mut g00, mut g01, mut g11) = (0.0, 0.0, 0.0);
            for (r, si) in rows.iter().zip(&s) {
                g00 += si * r[0] * r[0];
                g01 += si * r[0] * r[1];
                g11 += si * r[1] * r[1];
            }
            let det = g00 * g11 - g01 * g01;
            let tau: Vec<f64> = rows
                .iter()
                .zip(&s)
                .map(|(r, si)| si * (g11 * r[0] * r[0] - 2.0 * g01 * r[0] * r[1] + g00 * r[1] * r[1]) / det)
                .collect();
            for k in 0..3 {
                w[k] = (w[k] * tau[k]).sqrt();
            }
        }
        let a = DenseMatrix::from_rows(&rows).unwrap();
        let got = lewis_weights(&a, &LewisConfig::new(1.0)).unwrap();
        for k in 0..3 {
            assert!((got[k] - w[k]).abs() < 1e-5, "{} vs {}", got[k], w[k]);
        }
        assert!((got.total() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn sums_to_dimension_and_is_idempotent() {
        let a = gaussian(40, 5, 9);
        for p in [1.0, 1.5, 2.5, 3.0, 4.5] {
            let cfg = LewisConfig::new(p);
            let w = lewis_weights(&a, &cfg).unwrap();
            assert!((w.total() - 5.0).abs() < 1e-4, "p={p}: {}", w.total());
            let again = lewis_iterate(&a, &cfg, w.values.clone()).unwrap();
            assert_eq!(again.iterations, 0);
            for i in 0..40 {
                assert!((again.weights[i] - w[i]).abs() <= cfg.tol);
            }
        }
    }

    #[test]
    fn reports_non_convergence() {
        let a = gaussian(30, 3, 1);
        let cfg = LewisConfig { max_iters: 1, ..LewisConfig::new(1.0) };
        match lewis_weights(&a, &cfg) {
            Err(Error::NonConvergence { iterations, residual }) => {
                assert_eq!(iterations, 1);
                assert!(residual > cfg.tol);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_config_and_rank_deficiency() {
        let a = gaussian(10, 2, 0);
        assert!(lewis_weights(&a, &LewisConfig { tol: 0.0, ..LewisConfig::new(1.0) }).is_err());
        assert!(lewis_weights(&a, &LewisConfig { damping: 1.5, ..LewisConfig::new(1.0) }).is_err());
        let deficient = DenseMatrix::from_rows(&[[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]).unwrap();
        assert!(matches!(
            lewis_weights(&deficient, &LewisConfig::new(1.0)),
            Err(Error::RankDeficient { .. })
        ));
    }
}
