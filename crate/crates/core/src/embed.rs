//! Row-sampling subspace embeddings.
//!
//! [`lp_embedding`] keeps row `i` independently with a probability
//! proportional to its Lewis weight and rescales it by `1/p_i^{1/p}`.
//! [`linf_embedding`] selects `d` rows forming a 2-approximate barycentric
//! spanner, which is an ℓ∞ embedding with distortion at most `2d`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::leverage::leverage_exact;
use crate::lewis::{lewis_weights, LewisConfig};
use crate::linalg::{require_full_column_rank, Lu};
use crate::matrix::DenseMatrix;
use crate::norm::check_finite_p;
use crate::rng::RandomSource;
use crate::weights::WeightVector;

/// Tunable constant of the inclusion probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    pub constant: f64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self { constant: 4.0 }
    }
}

/// `S·A` represented by the kept row indices and their rescaling factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingEmbedding {
    pub source_rows: Vec<usize>,
    pub scales: Vec<f64>,
    pub p: f64,
    pub target_distortion: f64,
}

impl SamplingEmbedding {
    pub fn len(&self) -> usize {
        self.source_rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source_rows.is_empty()
    }

    /// The embedded matrix `S·A`.
    pub fn materialize(&self, a: &DenseMatrix) -> DenseMatrix {
        a.select_rows(&self.source_rows).scale_rows(&self.scales)
    }
}

/// `min(1, c·eps^{-2}·d^{max(0, p/2−1)}·w_i·L²·ln(d/eps))` with `L = max(ln d, 1)`.
pub fn inclusion_probability(w: f64, d: usize, p: f64, eps: f64, cfg: &EmbedConfig) -> f64 {
    let df = d as f64;
    let log_d = df.ln().max(1.0);
    let factor = cfg.constant / (eps * eps)
        * df.powf((0.5 * p - 1.0).max(0.0))
        * log_d
        * log_d
        * (df / eps).ln();
    (factor * w).min(1.0)
}

/// ℓp subspace embedding by Lewis-weight sampling.
pub fn lp_embedding(a: &DenseMatrix, p: f64, eps: f64, rng: &RandomSource) -> Result<SamplingEmbedding> {
    lp_embedding_with(a, p, eps, &EmbedConfig::default(), rng)
}

pub fn lp_embedding_with(
    a: &DenseMatrix,
    p: f64,
    eps: f64,
    cfg: &EmbedConfig,
    rng: &RandomSource,
) -> Result<SamplingEmbedding> {
    check_finite_p(p)?;
    require_full_column_rank(a)?;
    let weights = if p == 2.0 {
        leverage_exact(a)
    } else {
        lewis_weights(a, &LewisConfig::new(p))?
    };
    embedding_from_weights(a.n_cols(), &weights, p, eps, cfg, rng)
}

/// Samples rows given precomputed Lewis weights (leverage scores for p = 2).
pub fn embedding_from_weights(
    d: usize,
    weights: &WeightVector,
    p: f64,
    eps: f64,
    cfg: &EmbedConfig,
    rng: &RandomSource,
) -> Result<SamplingEmbedding> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidConfig(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(cfg.constant > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "embedding constant must be positive, got {}",
            cfg.constant
        )));
    }
    let mut gen = rng.rng();
    let mut source_rows = Vec::new();
    let mut scales = Vec::new();
    for (i, &w) in weights.as_slice().iter().enumerate() {
        let prob = inclusion_probability(w, d, p, eps, cfg);
        // Draw for every row so the stream position does not depend on
        // earlier outcomes.
        let u: f64 = gen.gen();
        if prob >= 1.0 || (prob > 0.0 && u < prob) {
            source_rows.push(i);
            scales.push(prob.powf(-1.0 / p));
        }
    }
    Ok(SamplingEmbedding {
        source_rows,
        scales,
        p,
        target_distortion: eps,
    })
}

/// Coefficients `c` with `a = cᵀB` for every row `a` of `A`, where the rows
/// of `B` are `basis`. Row `k` of the result holds the coefficients of row
/// `k` of `A`.
fn spanner_coefficients(a: &DenseMatrix, basis: &DenseMatrix) -> Option<Vec<Vec<f64>>> {
    // a = Bᵀc  ⇔  Bᵀ c = aᵀ
    let lu = Lu::new(basis).ok()?;
    Some(a.rows().map(|row| lu.solve_transpose(row)).collect())
}

/// Rows of `A` forming a 2-approximate barycentric spanner: every row of `A`
/// is a combination of them with coefficients of magnitude at most 2, hence
/// `‖Bx‖_∞ ≤ ‖Ax‖_∞ ≤ 2d·‖Bx‖_∞`.
pub fn linf_embedding(a: &DenseMatrix) -> Result<SamplingEmbedding> {
    require_full_column_rank(a)?;
    let d = a.n_cols();
    let mut chosen: Vec<Option<usize>> = vec![None; d];
    let mut basis = DenseMatrix::identity(d);

    // Replacing basis row j by x scales |det| by |c_j(x)|, where x = cᵀB.
    for j in 0..d {
        let coeffs = spanner_coefficients(a, &basis)
            .ok_or_else(|| Error::InvalidInput("spanner basis became singular".into()))?;
        let mut best = 0;
        for (k, c) in coeffs.iter().enumerate() {
            if c[j].abs() > coeffs[best][j].abs() {
                best = k;
            }
        }
        basis.row_mut(j).copy_from_slice(a.row(best));
        chosen[j] = Some(best);
    }

    let limit = 2.0 * (1.0 + 1e-9);
    let max_swaps = 64 * d * d + 64;
    for _ in 0..max_swaps {
        let coeffs = spanner_coefficients(a, &basis)
            .ok_or_else(|| Error::InvalidInput("spanner basis became singular".into()))?;
        let mut swap = None;
        let mut worst = limit;
        for (k, c) in coeffs.iter().enumerate() {
            for (j, v) in c.iter().enumerate() {
                if v.abs() > worst {
                    worst = v.abs();
                    swap = Some((k, j));
                }
            }
        }
        let Some((k, j)) = swap else {
            let source_rows: Vec<usize> = chosen.into_iter().map(|c| c.expect("all set")).collect();
            return Ok(SamplingEmbedding {
                scales: vec![1.0; d],
                source_rows,
                p: f64::INFINITY,
                target_distortion: 2.0 * d as f64,
            });
        };
        basis.row_mut(j).copy_from_slice(a.row(k));
        chosen[j] = Some(k);
    }
    Err(Error::InvalidInput("barycentric spanner swaps did not terminate".into()))
}
