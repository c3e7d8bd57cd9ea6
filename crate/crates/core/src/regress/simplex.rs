//! Dense bounded-variable primal simplex for small equality-form LPs:
//!
//! minimize `cᵀx` subject to `Σ_j x_j·col_j = rhs`, `0 ≤ x_j ≤ upper_j`.
//!
//! The basis is refactorized from scratch every iteration, which is cheap
//! because the number of equality rows is the column count of the input
//! matrix. Pricing is Dantzig's rule until a run of degenerate pivots is
//! seen, after which Bland's lowest-index rule takes over for good and
//! guarantees termination.

use crate::linalg::Lu;
use crate::matrix::{dot, DenseMatrix};

const COST_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-11;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 50;

#[derive(Debug, Clone)]
pub(crate) struct LpProblem {
    pub cols: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub cost: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
    Singular,
}

#[derive(Debug, Clone)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    /// Simplex multipliers `π = B^{-T} c_B` of the final basis.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub status: LpStatus,
}

struct State {
    basis: Vec<usize>,
    in_basis: Vec<Option<usize>>,
    at_upper: Vec<bool>,
    iterations: usize,
}

impl State {
    fn factor(&self, cols: &[Vec<f64>]) -> Option<Lu> {
        let m = self.basis.len();
        let mut data = vec![0.0; m * m];
        for (r, &j) in self.basis.iter().enumerate() {
            for (i, v) in cols[j].iter().enumerate() {
                data[i * m + r] = *v;
            }
        }
        Lu::new(&DenseMatrix::new(m, m, data).ok()?).ok()
    }

    fn basic_values(&self, lu: &Lu, cols: &[Vec<f64>], rhs: &[f64], upper: &[f64]) -> Vec<f64> {
        let mut r = rhs.to_vec();
        for (j, col) in cols.iter().enumerate() {
            if self.in_basis[j].is_none() && self.at_upper[j] {
                for (ri, c) in r.iter_mut().zip(col) {
                    *ri -= upper[j] * c;
                }
            }
        }
        lu.solve(&r)
    }
}

fn run(
    cols: &[Vec<f64>],
    rhs: &[f64],
    cost: &[f64],
    upper: &[f64],
    st: &mut State,
    max_iter: usize,
) -> (LpStatus, Vec<f64>) {
    let m = rhs.len();
    let mut degenerate_run = 0;
    let mut bland = false;
    loop {
        let Some(lu) = st.factor(cols) else {
            return (LpStatus::Singular, vec![0.0; m]);
        };
        let xb = st.basic_values(&lu, cols, rhs, upper);
        let cb: Vec<f64> = st.basis.iter().map(|&j| cost[j]).collect();
        let pi = lu.solve_transpose(&cb);
        if st.iterations >= max_iter {
            return (LpStatus::IterLimit, pi);
        }

        let mut entering = None;
        let mut best = COST_TOL;
        for (j, col) in cols.iter().enumerate() {
            if st.in_basis[j].is_some() || upper[j] == 0.0 {
                continue;
            }
            let dj = cost[j] - dot(&pi, col);
            let gain = if st.at_upper[j] { dj } else { -dj };
            if gain > best {
                entering = Some(j);
                if bland {
                    break;
                }
                best = gain;
            }
        }
        let Some(q) = entering else {
            return (LpStatus::Optimal, pi);
        };

        let dir = if st.at_upper[q] { -1.0 } else { 1.0 };
        let w = lu.solve(&cols[q]);
        let mut step = upper[q];
        let mut leave: Option<(usize, bool)> = None;
        for r in 0..m {
            let delta = dir * w[r];
            let j = st.basis[r];
            let (limit, to_upper) = if delta > PIVOT_TOL {
                (xb[r].max(0.0) / delta, false)
            } else if delta < -PIVOT_TOL && upper[j].is_finite() {
                ((upper[j] - xb[r]).max(0.0) / -delta, true)
            } else {
                continue;
            };
            let better = if limit < step - 1e-13 {
                true
            } else if limit <= step + 1e-13 {
                // ties go to the lowest variable index; a bound flip wins
                // ties against any basis change
                matches!(leave, Some((lr, _)) if j < st.basis[lr])
            } else {
                false
            };
            if better {
                step = limit;
                leave = Some((r, to_upper));
            }
        }
        if step.is_infinite() {
            return (LpStatus::Unbounded, pi);
        }

        st.iterations += 1;
        if step <= 1e-13 {
            degenerate_run += 1;
            if degenerate_run > DEGENERATE_RUN_BEFORE_BLAND {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
        match leave {
            None => st.at_upper[q] = !st.at_upper[q],
            Some((r, to_upper)) => {
                let j = st.basis[r];
                st.in_basis[j] = None;
                st.at_upper[j] = to_upper;
                st.basis[r] = q;
                st.in_basis[q] = Some(r);
                st.at_upper[q] = false;
            }
        }
    }
}

/// Two-phase solve. Phase one starts every variable at its lower bound and
/// drives one artificial per row to zero; phase two keeps the artificials
/// fixed at zero.
pub(crate) fn solve(problem: &LpProblem, max_iter: usize) -> LpSolution {
    let m = problem.rhs.len();
    let nv = problem.cols.len();
    let mut cols = problem.cols.clone();
    let mut upper = problem.upper.clone();
    for (k, &r) in problem.rhs.iter().enumerate() {
        let mut e = vec![0.0; m];
        e[k] = if r < 0.0 { -1.0 } else { 1.0 };
        cols.push(e);
        upper.push(f64::INFINITY);
    }
    let total = nv + m;
    let mut st = State {
        basis: (nv..total).collect(),
        in_basis: (0..total)
            .map(|j| if j >= nv { Some(j - nv) } else { None })
            .collect(),
        at_upper: vec![false; total],
        iterations: 0,
    };

    let phase1_cost: Vec<f64> = (0..total).map(|j| if j >= nv { 1.0 } else { 0.0 }).collect();
    let (status, _) = run(&cols, &problem.rhs, &phase1_cost, &upper, &mut st, max_iter);
    let scale = problem.rhs.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let infeasibility = {
        let lu = st.factor(&cols);
        match lu {
            Some(lu) => {
                let xb = st.basic_values(&lu, &cols, &problem.rhs, &upper);
                st.basis
                    .iter()
                    .zip(&xb)
                    .filter(|(&j, _)| j >= nv)
                    .map(|(_, v)| v.abs())
                    .sum::<f64>()
            }
            None => f64::INFINITY,
        }
    };
    if status != LpStatus::Optimal || infeasibility > 1e-9 * scale {
        let status = if status == LpStatus::Optimal { LpStatus::Infeasible } else { status };
        return LpSolution {
            x: vec![0.0; nv],
            duals: vec![0.0; m],
            objective: f64::NAN,
            iterations: st.iterations,
            status,
        };
    }
    for u in upper.iter_mut().skip(nv) {
        *u = 0.0;
    }

    let mut cost = problem.cost.clone();
    cost.extend(std::iter::repeat_n(0.0, m));
    let (status, duals) = run(&cols, &problem.rhs, &cost, &upper, &mut st, max_iter);

    let mut x = vec![0.0; total];
    for j in 0..total {
        if st.in_basis[j].is_none() && st.at_upper[j] {
            x[j] = upper[j];
        }
    }
    if let Some(lu) = st.factor(&cols) {
        let xb = st.basic_values(&lu, &cols, &problem.rhs, &upper);
        for (&j, v) in st.basis.iter().zip(xb) {
            x[j] = v.clamp(0.0, upper[j]);
        }
    }
    x.truncate(nv);
    let objective = dot(&x, &problem.cost);
    LpSolution {
        x,
        duals,
        objective,
        iterations: st.iterations,
        status,
    }
}
