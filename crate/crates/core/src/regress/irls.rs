//! Smoothed Newton ("IRLS") solver for `min ‖Bx‖_p^p` subject to `aᵀx = 1`.
//!
//! The constraint is removed by solving for the coordinate `k` with the
//! largest `|a_k|`: `x = e_k/a_k + N·z`. The smoothed objective
//! `Σ (r_j² + δ²)^{p/2}` is minimized over `z` by damped Newton steps,
//! with `δ` shrinking geometrically from `1e-2` to `1e-10` (relative to the
//! residual scale) and each stage warm-started from the previous one.

use crate::linalg::cholesky_solve;
use crate::matrix::{dot, DenseMatrix};
use crate::norm::lp_norm_pow;

use super::SolveStatus;

const DELTA_START: f64 = 1e-2;
const DELTA_END: f64 = 1e-10;
const NEWTON_STEPS_PER_STAGE: usize = 100;

#[derive(Debug, Clone)]
pub struct IrlsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

/// Index of the largest `|a_j|`, lowest index on ties.
pub(crate) fn pivot_index(a: &[f64]) -> usize {
    let mut k = 0;
    for (j, v) in a.iter().enumerate() {
        if v.abs() > a[k].abs() {
            k = j;
        }
    }
    k
}

pub fn solve(b: &DenseMatrix, a: &[f64], p: f64) -> IrlsOutcome {
    let (n, d) = b.shape();
    let k = pivot_index(a);
    let ak = a[k];
    let free: Vec<usize> = (0..d).filter(|&j| j != k).collect();
    let m = free.len();

    // r0 = B e_k / a_k,  C = B N with N e_j = e_j − (a_j/a_k) e_k.
    let r0: Vec<f64> = b.rows().map(|row| row[k] / ak).collect();
    let mut c = vec![0.0; n * m];
    for (i, row) in b.rows().enumerate() {
        for (t, &j) in free.iter().enumerate() {
            c[i * m + t] = row[j] - a[j] / ak * row[k];
        }
    }
    let assemble = |z: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; d];
        x[k] = 1.0 / ak;
        for (t, &j) in free.iter().enumerate() {
            x[j] = z[t];
            x[k] -= a[j] / ak * z[t];
        }
        x
    };

    if m == 0 {
        let x = assemble(&[]);
        let value = lp_norm_pow(&b.matvec(&x), p);
        return IrlsOutcome { x, value, status: SolveStatus::Optimal, iterations: 0 };
    }

    let residual = |z: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| r0[i] + dot(&c[i * m..(i + 1) * m], z))
            .collect()
    };

    // Least-squares start: the exact answer when p = 2.
    let unit = vec![1.0; n];
    let mut z = newton_direction(&c, n, m, &unit, &r0).unwrap_or_else(|| vec![0.0; m]);
    for v in z.iter_mut() {
        *v = -*v;
    }
    let mut iterations = 0;
    let mut converged = true;
    if p != 2.0 {
        let r = residual(&z);
        let scale = r.iter().fold(0.0_f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut delta_rel = DELTA_START;
        loop {
            let delta2 = (delta_rel * scale).powi(2);
            let (stage_iters, ok) = newton_stage(&c, n, m, &r0, &mut z, p, delta2);
            iterations += stage_iters;
            converged = ok;
            if delta_rel <= DELTA_END * 1.000_001 {
                break;
            }
            delta_rel *= 0.1;
        }
    } else {
        iterations = 1;
    }

    let x = assemble(&z);
    let value = lp_norm_pow(&b.matvec(&x), p);
    IrlsOutcome {
        x,
        value,
        status: if converged { SolveStatus::Optimal } else { SolveStatus::IterLimit },
        iterations,
    }
}

/// Solves `(CᵀDC) s = Cᵀ g` with a tiny ridge if `CᵀDC` is singular.
fn newton_direction(c: &[f64], n: usize, m: usize, diag: &[f64], g: &[f64]) -> Option<Vec<f64>> {
    let mut h = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for i in 0..n {
        let row = &c[i * m..(i + 1) * m];
        let w = diag[i];
        for s in 0..m {
            rhs[s] += row[s] * g[i];
            let ws = w * row[s];
            if ws == 0.0 {
                continue;
            }
            for t in s..m {
                h[s * m + t] += ws * row[t];
            }
        }
    }
    for s in 0..m {
        for t in 0..s {
            h[s * m + t] = h[t * m + s];
        }
    }
    if let Some(x) = cholesky_solve(&h, &rhs) {
        return Some(x);
    }
    let trace: f64 = (0..m).map(|s| h[s * m + s]).sum::<f64>().max(f64::MIN_POSITIVE);
    for s in 0..m {
        h[s * m + s] += 1e-12 * trace / m as f64;
    }
    cholesky_solve(&h, &rhs)
}

fn smoothed(r: &[f64], p: f64, delta2: f64) -> f64 {
    r.iter().map(|v| (v * v + delta2).powf(0.5 * p)).sum()
}

/// Damped Newton iterations at a fixed smoothing level; returns the step
/// count and whether the Newton decrement fell below tolerance.
fn newton_stage(
    c: &[f64],
    n: usize,
    m: usize,
    r0: &[f64],
    z: &mut Vec<f64>,
    p: f64,
    delta2: f64,
) -> (usize, bool) {
    let residual = |z: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| r0[i] + dot(&c[i * m..(i + 1) * m], z))
            .collect()
    };
    let mut r = residual(z);
    let mut f = smoothed(&r, p, delta2);
    for it in 0..NEWTON_STEPS_PER_STAGE {
        let mut grad_w = vec![0.0; n];
        let mut hess_w = vec![0.0; n];
        for i in 0..n {
            let s = r[i] * r[i] + delta2;
            let base = s.powf(0.5 * p - 2.0);
            grad_w[i] = p * base * s * r[i];
            hess_w[i] = p * base * ((p - 1.0) * r[i] * r[i] + delta2);
        }
        let Some(step) = newton_direction(c, n, m, &hess_w, &grad_w) else {
            return (it, false);
        };
        // gradient g = Cᵀ grad_w; decrement = gᵀ H⁻¹ g
        let mut g = vec![0.0; m];
        for i in 0..n {
            for (gs, cs) in g.iter_mut().zip(&c[i * m..(i + 1) * m]) {
                *gs += cs * grad_w[i];
            }
        }
        let decrement = dot(&g, &step);
        if !(decrement > 1e-13 * f) {
            return (it, true);
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = z.iter().zip(&step).map(|(zi, si)| zi - t * si).collect();
            let rc = residual(&cand);
            let fc = smoothed(&rc, p, delta2);
            if fc <= f - 1e-4 * t * decrement {
                *z = cand;
                r = rc;
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // No descent possible at working precision: stationary to
            // rounding error.
            return (it + 1, decrement <= 1e-8 * f);
        }
    }
    (NEWTON_STEPS_PER_STAGE, false)
}
