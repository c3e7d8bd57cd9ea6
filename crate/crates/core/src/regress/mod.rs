//! Constrained ℓp minimization and exact sensitivities.
//!
//! By scale invariance, `1/σ^B_p(a) = min_{aᵀx = 1} ‖Bx‖_p^p`. The minimum
//! is computed exactly by linear programming for `p = 1`, in closed form for
//! `p = 2`, and by a smoothed Newton method otherwise.

pub mod irls;
pub(crate) mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::leverage::leverage_exact;
use crate::linalg::{pivoted_qr, require_tall_full_rank, GramPinvFactor};
use crate::matrix::{dot, DenseMatrix};
use crate::norm::{check_finite_p, lp_norm_pow};
use crate::weights::{WeightKind, WeightVector};

use simplex::{LpProblem, LpStatus};

/// Normalized minima below this are treated as zero, i.e. the row lies
/// outside the row space of the reference matrix.
const UNBOUNDED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    IterLimit,
}

/// Minimizer of `‖Bx‖_p^p` over the hyperplane `aᵀx = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSolution {
    pub x_opt: Vec<f64>,
    /// The attained `‖B·x_opt‖_p^p`.
    pub value: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

/// Reusable solver for many hyperplane problems against one matrix `B`.
///
/// `B` is rescaled to unit max-abs entry once; each query vector is rescaled
/// the same way, so tolerances are independent of the input units.
#[derive(Debug, Clone)]
pub struct SensitivityOracle {
    b: DenseMatrix,
    scale: f64,
    p: f64,
    full_rank: bool,
    /// `(BᵀB)†` factor; present for `p = 2` and for rank-deficient `B`.
    pinv: Option<GramPinvFactor>,
    gram: Option<DenseMatrix>,
}

impl SensitivityOracle {
    pub fn new(b: &DenseMatrix, p: f64) -> Result<Self> {
        check_finite_p(p)?;
        let scale = b.max_abs();
        let normalized = if scale > 0.0 {
            b.scale_rows(&vec![1.0 / scale; b.n_rows()])
        } else {
            b.clone()
        };
        let full_rank = scale > 0.0 && pivoted_qr(&normalized).rank == b.n_cols();
        let (pinv, gram) = if p == 2.0 || !full_rank {
            (
                Some(GramPinvFactor::new(&normalized)),
                (!full_rank).then(|| normalized.gram()),
            )
        } else {
            (None, None)
        };
        Ok(Self {
            b: normalized,
            scale: if scale > 0.0 { scale } else { 1.0 },
            p,
            full_rank,
            pinv,
            gram,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n_rows(&self) -> usize {
        self.b.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.b.n_cols()
    }

    /// `min ‖Bx‖_p^p` subject to `aᵀx = 1`.
    pub fn minimize(&self, a: &[f64]) -> Result<RegressionSolution> {
        let d = self.b.n_cols();
        if a.len() != d {
            return Err(Error::InvalidInput(format!(
                "query has {} entries, matrix has {d} columns",
                a.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("query vector is not finite".into()));
        }
        let sa = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if sa == 0.0 {
            return Err(Error::InvalidInput("hyperplane normal must be nonzero".into()));
        }
        let an: Vec<f64> = a.iter().map(|v| v / sa).collect();
        let mut sol = match self.null_direction(&an) {
            Some(x) => RegressionSolution {
                x_opt: x,
                value: 0.0,
                status: SolveStatus::Optimal,
                iterations: 0,
            },
            None if self.p == 2.0 => self.minimize_l2(&an),
            None if self.p == 1.0 => self.minimize_l1(&an),
            None => {
                let out = irls::solve(&self.b, &an, self.p);
                RegressionSolution {
                    x_opt: out.x,
                    value: out.value,
                    status: out.status,
                    iterations: out.iterations,
                }
            }
        };
        // Undo the normalization: x = x'/s_a, value = (s_B/s_a)^p · value'.
        for v in sol.x_opt.iter_mut() {
            *v /= sa;
        }
        sol.value *= (self.scale / sa).powf(self.p);
        Ok(sol)
    }

    /// `σ^B_p(a) = 1 / min_{aᵀx=1} ‖Bx‖_p^p`; zero for `a = 0`.
    pub fn sensitivity(&self, a: &[f64]) -> Result<f64> {
        let sa = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if sa == 0.0 {
            return Ok(0.0);
        }
        let sol = self.minimize(a)?;
        // Compare in normalized units, where both B and a have unit max-abs.
        let normalized = sol.value * (sa / self.scale).powf(self.p);
        if normalized < UNBOUNDED_TOL {
            return Err(Error::UnboundedSensitivity);
        }
        Ok(1.0 / sol.value)
    }

    /// For rank-deficient `B`: a vector with `Bx = 0` and `aᵀx = 1` when
    /// `a` is outside the row space.
    fn null_direction(&self, a: &[f64]) -> Option<Vec<f64>> {
        if self.full_rank {
            return None;
        }
        let (Some(f), Some(g)) = (&self.pinv, &self.gram) else {
            return None;
        };
        // G·M is the orthogonal projector onto the row space of B.
        let m = f.to_matrix();
        let proj = g.matvec(&m.matvec(a));
        let resid: Vec<f64> = a.iter().zip(&proj).map(|(u, v)| u - v).collect();
        let along = dot(a, &resid);
        if along.abs() <= 1e-9 * dot(a, a).max(1e-300) {
            return None;
        }
        Some(resid.iter().map(|v| v / along).collect())
    }

    fn minimize_l2(&self, a: &[f64]) -> RegressionSolution {
        let f = self.pinv.as_ref().expect("factor built for p = 2");
        let q = f.quadratic_form(a);
        let ma = f.to_matrix().matvec(a);
        let x: Vec<f64> = ma.iter().map(|v| v / q).collect();
        let value = lp_norm_pow(&self.b.matvec(&x), 2.0);
        RegressionSolution {
            x_opt: x,
            value,
            status: SolveStatus::Optimal,
            iterations: 1,
        }
    }

    /// Exact ℓ1 minimum through the dual LP
    /// `max μ  s.t.  Bᵀy = μa, ‖y‖_∞ ≤ 1`, written with `z = y + 1 ∈ [0, 2]`.
    /// The optimal simplex multipliers are the primal minimizer.
    fn minimize_l1(&self, a: &[f64]) -> RegressionSolution {
        let (n, d) = self.b.shape();
        let mut cols: Vec<Vec<f64>> = self.b.rows().map(|r| r.to_vec()).collect();
        cols.push(a.iter().map(|v| -v).collect());
        let mut rhs = vec![0.0; d];
        for row in self.b.rows() {
            for (r, v) in rhs.iter_mut().zip(row) {
                *r += v;
            }
        }
        let mut upper = vec![2.0; n];
        upper.push(f64::INFINITY);
        let mut cost = vec![0.0; n];
        cost.push(-1.0);
        let lp = simplex::solve(&LpProblem { cols, rhs, cost, upper }, 50 * (n + d) + 1000);
        if lp.status == LpStatus::Optimal {
            let along = dot(a, &lp.duals);
            if along > 0.0 {
                let x: Vec<f64> = lp.duals.iter().map(|v| v / along).collect();
                let value = lp_norm_pow(&self.b.matvec(&x), 1.0);
                return RegressionSolution {
                    x_opt: x,
                    value,
                    status: SolveStatus::Optimal,
                    iterations: lp.iterations,
                };
            }
        }
        let out = irls::solve(&self.b, a, 1.0);
        RegressionSolution {
            x_opt: out.x,
            value: out.value,
            status: SolveStatus::IterLimit,
            iterations: lp.iterations + out.iterations,
        }
    }
}

/// `min ‖Bx‖_p^p` subject to `aᵀx = 1`.
pub fn min_lp_on_hyperplane(b: &DenseMatrix, a: &[f64], p: f64) -> Result<RegressionSolution> {
    SensitivityOracle::new(b, p)?.minimize(a)
}

/// Generalized sensitivity `σ^B_p(a) = max_x |aᵀx|^p / ‖Bx‖_p^p`.
///
/// Returns [`Error::UnboundedSensitivity`] when `a` is outside the row space
/// of `B`, and 0 when `a = 0`.
pub fn sensitivity_one(a: &[f64], b: &DenseMatrix, p: f64) -> Result<f64> {
    SensitivityOracle::new(b, p)?.sensitivity(a)
}

/// Brute-force ℓp sensitivities of every row of `A` with respect to `A`.
pub fn sensitivities_exact(a: &DenseMatrix, p: f64) -> Result<WeightVector> {
    check_finite_p(p)?;
    require_tall_full_rank(a)?;
    if p == 2.0 {
        let lev = leverage_exact(a);
        return Ok(WeightVector::new(lev.values, WeightKind::Sensitivity { p }));
    }
    let oracle = SensitivityOracle::new(a, p)?;
    let values = a
        .rows()
        .map(|row| oracle.sensitivity(row).map(|s| s.min(1.0)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(WeightVector::new(values, WeightKind::Sensitivity { p }))
}
