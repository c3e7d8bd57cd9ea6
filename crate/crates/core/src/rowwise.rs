//! Approximating every row's ℓp sensitivity with far fewer oracle calls.
//!
//! Rows are randomly partitioned into blocks of `alpha` rows. Each block is
//! compressed into `signs_per_block` random ±1 combinations of its rows, and
//! each row's estimate is the largest sensitivity (with respect to an ℓp
//! embedding `S_pA`) among its block's combinations. The per-row median over
//! independent repetitions amplifies the success probability.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{lp_embedding_with, EmbedConfig};
use crate::error::{Error, Result};
use crate::linalg::require_tall_full_rank;
use crate::matrix::DenseMatrix;
use crate::norm::check_finite_p;
use crate::regress::SensitivityOracle;
use crate::rng::{stage, RandomSource};
use crate::weights::{WeightKind, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowwiseConfig {
    pub p: f64,
    pub alpha: usize,
    pub signs_per_block: usize,
    pub repetitions: usize,
    pub embed_eps: f64,
    pub embed: EmbedConfig,
}

impl RowwiseConfig {
    pub fn new(p: f64, alpha: usize) -> Self {
        Self {
            p,
            alpha,
            signs_per_block: 100,
            repetitions: 9,
            embed_eps: 0.5,
            embed: EmbedConfig::default(),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        check_finite_p(self.p)?;
        if self.alpha == 0 || self.alpha > n {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in [1, {n}], got {}",
                self.alpha
            )));
        }
        if self.signs_per_block == 0 {
            return Err(Error::InvalidConfig("signs_per_block must be at least 1".into()));
        }
        if self.repetitions == 0 || self.repetitions.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "repetitions must be odd, got {}",
                self.repetitions
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowwiseEstimate {
    pub weights: WeightVector,
    /// Number of sensitivity evaluations against the embedding:
    /// `repetitions · signs_per_block · ceil(n / alpha)`.
    pub oracle_calls: usize,
    pub embedding_rows: usize,
}

pub fn sensitivities_rowwise(
    a: &DenseMatrix,
    cfg: &RowwiseConfig,
    rng: &RandomSource,
) -> Result<RowwiseEstimate> {
    let (n, d) = a.shape();
    cfg.validate(n)?;
    require_tall_full_rank(a)?;
    let emb = lp_embedding_with(a, cfg.p, cfg.embed_eps, &cfg.embed, &rng.split(stage::EMBEDDING))?;
    let sa = emb.materialize(a);
    let oracle = SensitivityOracle::new(&sa, cfg.p)?;

    let mut per_rep: Vec<Vec<f64>> = Vec::with_capacity(cfg.repetitions);
    let mut oracle_calls = 0;
    let reps = rng.split(stage::REPETITION);
    for rep in 0..cfg.repetitions {
        let src = reps.split(rep as u64);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut src.split(stage::PARTITION).rng());
        let mut signs = src.split(stage::SIGNS).rng();
        let mut est = vec![0.0; n];
        let mut combo = vec![0.0; d];
        for block in order.chunks(cfg.alpha) {
            let mut best = 0.0_f64;
            for _ in 0..cfg.signs_per_block {
                combo.iter_mut().for_each(|v| *v = 0.0);
                for &i in block {
                    let s = if signs.gen::<bool>() { 1.0 } else { -1.0 };
                    for (c, v) in combo.iter_mut().zip(a.row(i)) {
                        *c += s * v;
                    }
                }
                best = best.max(oracle.sensitivity(&combo)?);
                oracle_calls += 1;
            }
            for &i in block {
                est[i] = best;
            }
        }
        per_rep.push(est);
    }

    let values = (0..n)
        .map(|i| {
            let mut col: Vec<f64> = per_rep.iter().map(|r| r[i]).collect();
            col.sort_by(|x, y| x.total_cmp(y));
            col[col.len() / 2]
        })
        .collect();
    Ok(RowwiseEstimate {
        weights: WeightVector::new(values, WeightKind::Sensitivity { p: cfg.p }),
        oracle_calls,
        embedding_rows: emb.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gaussian, identity_stack};
    use crate::regress::sensitivities_exact;

    fn quick(p: f64, alpha: usize) -> RowwiseConfig {
        RowwiseConfig {
            signs_per_block: 10,
            repetitions: 3,
            ..RowwiseConfig::new(p, alpha)
        }
    }

    #[test]
    fn counts_oracle_calls_exactly() {
        let a = gaussian(53, 3, 1);
        let est = sensitivities_rowwise(&a, &quick(1.0, 10), &RandomSource::new(0)).unwrap();
        assert_eq!(est.oracle_calls, 3 * 10 * 6);
        assert_eq!(est.weights.len(), 53);
        assert!(est.weights.as_slice().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn unit_blocks_recover_embedded_sensitivities() {
        let a = gaussian(60, 3, 4);
        let exact = sensitivities_exact(&a, 1.0).unwrap();
        let est = sensitivities_rowwise(&a, &quick(1.0, 1), &RandomSource::new(2)).unwrap();
        for i in 0..60 {
            let ratio = est.weights[i] / exact[i];
            assert!((0.5..=2.0).contains(&ratio), "row {i}: {ratio}");
        }
    }

    #[test]
    fn identity_stack_bracket() {
        let k = 8;
        let a = identity_stack(3, k);
        let mut lower_ok = 0;
        for seed in 0..20 {
            let est = sensitivities_rowwise(&a, &quick(1.0, k), &RandomSource::new(seed)).unwrap();
            let all_lower = est.weights.as_slice().iter().all(|&v| v >= 1.0 / k as f64 - 1e-9);
            lower_ok += all_lower as usize;
            assert!(est.weights.as_slice().iter().all(|&v| v <= 4.0));
        }
        assert!(lower_ok >= 19, "{lower_ok}/20");
    }

    #[test]
    fn deterministic_under_seed() {
        let a = gaussian(40, 3, 8);
        let cfg = quick(1.5, 5);
        let x = sensitivities_rowwise(&a, &cfg, &RandomSource::new(9)).unwrap();
        let y = sensitivities_rowwise(&a, &cfg, &RandomSource::new(9)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn rejects_bad_config() {
        let a = gaussian(20, 2, 0);
        let r = RandomSource::new(0);
        assert!(sensitivities_rowwise(&a, &quick(1.0, 0), &r).is_err());
        assert!(sensitivities_rowwise(&a, &quick(1.0, 21), &r).is_err());
        let even = RowwiseConfig { repetitions: 4, ..quick(1.0, 4) };
        assert!(sensitivities_rowwise(&a, &even, &r).is_err());
    }
}
