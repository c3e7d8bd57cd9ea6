//! Importance sampling of rows by Lewis weight.
//!
//! With `v_i = w_i/Σw`, draw `m` rows with replacement from `v` and average
//! `σ^{S_pA}(a_i)/v_i`. The average is an unbiased estimate of the total
//! sensitivity with respect to the embedding `S_pA`, and the Lewis weights
//! bound each ratio, which bounds the variance.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};

use crate::embed::embedding_from_weights;
use crate::error::{Error, Result};
use crate::leverage::leverage_exact;
use crate::lewis::{lewis_weights, LewisConfig};
use crate::linalg::require_tall_full_rank;
use crate::matrix::DenseMatrix;
use crate::regress::SensitivityOracle;
use crate::rng::{stage, RandomSource};
use crate::weights::WeightVector;

use super::{TotalConfig, TotalEstimate, TotalMethod};

/// `m = ceil(c_m·d^{|1−p/2|}/γ²)`.
pub fn oneshot_sample_count(d: usize, p: f64, gamma: f64, c_m: f64) -> usize {
    (c_m * (d as f64).powf((1.0 - 0.5 * p).abs()) / (gamma * gamma)).ceil() as usize
}

pub fn total_lewis_oneshot(a: &DenseMatrix, cfg: &TotalConfig, rng: &RandomSource) -> Result<TotalEstimate> {
    cfg.validate()?;
    require_tall_full_rank(a)?;
    let weights = if cfg.p == 2.0 {
        leverage_exact(a)
    } else {
        lewis_weights(a, &LewisConfig::new(cfg.p))?
    };
    let emb = embedding_from_weights(
        a.n_cols(),
        &weights,
        cfg.p,
        cfg.embed_eps,
        &cfg.embed,
        &rng.split(stage::EMBEDDING),
    )?;
    let oracle = SensitivityOracle::new(&emb.materialize(a), cfg.p)?;
    total_oneshot_fixed(a, cfg, &oracle, &weights, rng)
}

/// The sampling stage alone, against a fixed embedding oracle and fixed
/// weights; repeated calls with different sources are independent draws of
/// the same estimator.
pub fn total_oneshot_fixed(
    a: &DenseMatrix,
    cfg: &TotalConfig,
    oracle: &SensitivityOracle,
    weights: &WeightVector,
    rng: &RandomSource,
) -> Result<TotalEstimate> {
    cfg.validate()?;
    let total_w = weights.total();
    if weights.len() != a.n_rows() || !(total_w > 0.0) {
        return Err(Error::InvalidInput("need one positive weight per row".into()));
    }
    let m = oneshot_sample_count(a.n_cols(), cfg.p, cfg.gamma, cfg.sample_constant);
    let dist = WeightedIndex::new(weights.as_slice())
        .map_err(|e| Error::InvalidInput(format!("invalid sampling weights: {e}")))?;
    let mut gen = rng.split(stage::SAMPLING).rng();
    let mut memo: BTreeMap<usize, f64> = BTreeMap::new();
    let mut sum = 0.0;
    for _ in 0..m {
        let i = dist.sample(&mut gen);
        let s = match memo.get(&i) {
            Some(&s) => s,
            None => {
                let s = oracle.sensitivity(a.row(i))?;
                memo.insert(i, s);
                s
            }
        };
        sum += s / (weights[i] / total_w);
    }
    Ok(TotalEstimate {
        estimate: sum / m as f64,
        method: TotalMethod::LewisOneshot,
        oracle_calls: memo.len(),
        samples: m,
        embedding_rows: oracle.n_rows(),
        depth: 0,
    })
}
