//! Leverage scores `τ_i(A) = a_iᵀ(AᵀA)†a_i`, exact and sketched.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{pivoted_qr, require_full_column_rank, GramPinvFactor};
use crate::matrix::{dot, DenseMatrix};
use crate::rng::{stage, RandomSource};
use crate::weights::{WeightKind, WeightVector};

/// Exact leverage scores through a factor of `(AᵀA)†`. Zero rows get 0.
pub fn leverage_exact(a: &DenseMatrix) -> WeightVector {
    let f = GramPinvFactor::new(a);
    let values = a
        .rows()
        .map(|row| f.quadratic_form(row).clamp(0.0, 1.0))
        .collect();
    WeightVector::new(values, WeightKind::Leverage)
}

/// Number of sketch rows used by [`leverage_approx`].
pub fn sketch_rows(n: usize, d: usize, eps: f64) -> usize {
    (8.0 * (d as f64 + (n as f64).ln()) / (eps * eps)).ceil() as usize
}

/// Sketched leverage scores: with `G` an `r × n` Gaussian matrix scaled by
/// `1/√r` and `G·A = Q·R`, returns `τ̃_i = ‖a_i R^{-1}‖²`, capped at 1.
pub fn leverage_approx(a: &DenseMatrix, eps: f64, rng: &RandomSource) -> Result<WeightVector> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidConfig(format!("eps must lie in (0, 1), got {eps}")));
    }
    require_full_column_rank(a)?;
    let (n, d) = a.shape();
    let r = sketch_rows(n, d, eps);
    let mut gen = rng.split(stage::SKETCH).rng();
    let inv_sqrt_r = 1.0 / (r as f64).sqrt();
    let mut sketched = vec![0.0; r * d];
    for out in sketched.chunks_exact_mut(d) {
        for row in a.rows() {
            let g: f64 = StandardNormal.sample(&mut gen);
            let g = g * inv_sqrt_r;
            for (o, v) in out.iter_mut().zip(row) {
                *o += g * v;
            }
        }
    }
    let ga = DenseMatrix::new(r, d, sketched)?;
    let qr = pivoted_qr(&ga);
    if qr.rank < d {
        return Err(Error::RankDeficient { rank: qr.rank, n_cols: d });
    }
    let values = a
        .rows()
        .map(|row| {
            // z R = a_i P, solved left to right since R is upper triangular.
            let mut z = vec![0.0; d];
            for j in 0..d {
                let mut s = row[qr.perm[j]];
                for k in 0..j {
                    s -= z[k] * qr.r.get(k, j);
                }
                z[j] = s / qr.r.get(j, j);
            }
            dot(&z, &z).min(1.0)
        })
        .collect();
    Ok(WeightVector::new(values, WeightKind::Leverage))
}
