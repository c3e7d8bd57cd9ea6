//! Recursive ℓ1 total-sensitivity estimator based on leverage buckets.
//!
//! Rows whose leverage scores (with respect to the node's rows stacked on a
//! coarse embedding `SA`) lie within a factor of two of each other have ℓ1
//! sensitivities within a bounded ratio, so each bucket's total can be
//! estimated from a uniform subsample, which is itself handled recursively.
//! Leaves compute sensitivities exactly against a fine embedding `S′A`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{embedding_from_weights, EmbedConfig};
use crate::error::{Error, Result};
use crate::leverage::leverage_exact;
use crate::lewis::{lewis_weights, LewisConfig};
use crate::linalg::require_tall_full_rank;
use crate::matrix::DenseMatrix;
use crate::regress::SensitivityOracle;
use crate::rng::{stage, RandomSource};

use super::{TotalConfig, TotalEstimate, TotalMethod};

/// Derived parameters of the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionParams {
    /// Accuracy of the fine embedding, `γ / max(1, ln ln(n + d))`.
    pub rho: f64,
    /// Number of leverage buckets, `ceil(20·log2 n)`, covering `[n^{-20}, 1]`.
    pub buckets: usize,
    /// Per-node failure probability `0.01 / B^D`.
    pub delta: f64,
    /// `c_r·(1 + ρ)·ρ^{-2}·ln(1/δ)`; a node with `|C|` rows samples
    /// `ceil(β·√|C|)` rows per bucket.
    pub beta: f64,
    /// Nodes with at most this many rows are evaluated exactly.
    pub base_case: usize,
    /// Deepest admissible level (root = 1).
    pub depth_limit: usize,
}

impl RecursionParams {
    /// `coarse_rows` is the row count `d′` of the coarse embedding.
    pub fn new(n: usize, d: usize, coarse_rows: usize, gamma: f64, c_r: f64) -> Self {
        let nf = n as f64;
        let dp = coarse_rows as f64;
        let rho = gamma / (nf + d as f64).ln().ln().max(1.0);
        let buckets = ((20.0 * nf.log2()).ceil() as usize).max(1);
        let depth = 1.0 + (2.0 * nf + 2.0 * dp).ln().ln().max(0.0);
        let delta = 0.01 / (buckets as f64).powf(depth);
        let beta = c_r * (1.0 + rho) / (rho * rho) * (1.0 / delta).ln();
        let base_case = (7.0 * beta * (beta + dp.sqrt())).ceil() as usize;
        // Starting from n + d′ rows, node sizes fall below the base case
        // within 1 + 2·ln ln(2(n + d′)) levels.
        let depth_limit = (2 + (2.0 * (2.0 * (nf + dp)).ln().ln().max(0.0)).ceil() as usize).max(2);
        Self {
            rho,
            buckets,
            delta,
            beta,
            base_case,
            depth_limit,
        }
    }
}

/// Bucket `k ≥ 1` holds leverage scores in `[2^{-k}, 2^{-k+1})`; bucket 1 is
/// closed at 1, and scores below `2^{-B}` fall into the last bucket.
pub fn bucket_of(tau: f64, buckets: usize) -> usize {
    if tau >= 0.5 {
        return 1;
    }
    if !(tau > 0.0) {
        return buckets;
    }
    ((-tau.log2()).ceil() as usize).clamp(1, buckets)
}

struct Context<'a> {
    a: &'a DenseMatrix,
    coarse: DenseMatrix,
    fine: SensitivityOracle,
    params: RecursionParams,
    memo: BTreeMap<usize, f64>,
    samples: usize,
    max_depth: usize,
}

impl Context<'_> {
    fn exact_sum(&mut self, rows: &[usize]) -> Result<f64> {
        let mut sum = 0.0;
        for &i in rows {
            let s = match self.memo.get(&i) {
                Some(&s) => s,
                None => {
                    let s = self.fine.sensitivity(self.a.row(i))?;
                    self.memo.insert(i, s);
                    s
                }
            };
            sum += s;
        }
        Ok(sum)
    }

    fn node(&mut self, rows: &[usize], depth: usize, rng: &RandomSource) -> Result<f64> {
        self.max_depth = self.max_depth.max(depth);
        if rows.len() <= self.params.base_case {
            return self.exact_sum(rows);
        }
        if depth >= self.params.depth_limit {
            return Err(Error::RecursionDepth {
                depth: depth + 1,
                limit: self.params.depth_limit,
            });
        }
        let c = self.a.select_rows(rows).vstack(&self.coarse)?;
        let tau = leverage_exact(&c);
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); self.params.buckets];
        for (pos, &i) in rows.iter().enumerate() {
            buckets[bucket_of(tau[pos], self.params.buckets) - 1].push(i);
        }
        let r = (self.params.beta * (c.n_rows() as f64).sqrt()).ceil() as usize;
        let mut total = 0.0;
        for (k, bucket) in buckets.iter().enumerate() {
            if bucket.is_empty() {
                continue;
            }
            if r >= bucket.len() {
                total += self.exact_sum(bucket)?;
                continue;
            }
            let child_src = rng.split(k as u64 + 1);
            let mut gen = child_src.split(stage::SAMPLING).rng();
            let sample: Vec<usize> = (0..r).map(|_| bucket[gen.gen_range(0..bucket.len())]).collect();
            self.samples += r;
            let s = self.node(&sample, depth + 1, &child_src)?;
            total += bucket.len() as f64 / r as f64 * s;
        }
        Ok((1.0 + self.params.rho) * total)
    }
}

pub fn total_recursive_l1(a: &DenseMatrix, cfg: &TotalConfig, rng: &RandomSource) -> Result<TotalEstimate> {
    run(a, cfg, None, rng)
}

pub(crate) fn run(
    a: &DenseMatrix,
    cfg: &TotalConfig,
    params_override: Option<RecursionParams>,
    rng: &RandomSource,
) -> Result<TotalEstimate> {
    let cfg = TotalConfig {
        method: TotalMethod::RecursiveL1,
        ..*cfg
    };
    cfg.validate()?;
    require_tall_full_rank(a)?;
    let (n, d) = a.shape();
    let weights = lewis_weights(a, &LewisConfig::new(1.0))?;
    let embed: &EmbedConfig = &cfg.embed;
    let coarse = embedding_from_weights(d, &weights, 1.0, cfg.embed_eps, embed, &rng.split(stage::COARSE_EMBEDDING))?;
    let params = params_override
        .unwrap_or_else(|| RecursionParams::new(n, d, coarse.len(), cfg.gamma, cfg.recursion_constant));
    let fine = embedding_from_weights(d, &weights, 1.0, params.rho, embed, &rng.split(stage::FINE_EMBEDDING))?;
    let fine_matrix = fine.materialize(a);

    let lev = leverage_exact(a);
    let floor = (n as f64).powi(-10);
    let kept: Vec<usize> = (0..n).filter(|&i| lev[i] >= floor).collect();

    let mut ctx = Context {
        a,
        coarse: coarse.materialize(a),
        fine: SensitivityOracle::new(&fine_matrix, 1.0)?,
        params,
        memo: BTreeMap::new(),
        samples: 0,
        max_depth: 0,
    };
    let s = ctx.node(&kept, 1, &rng.split(stage::SAMPLING))?;
    let dropped = (n - kept.len()) as f64;
    let estimate = (1.0 + cfg.gamma) * (s + dropped / (n as f64).powi(5));
    Ok(TotalEstimate {
        estimate,
        method: TotalMethod::RecursiveL1,
        oracle_calls: ctx.memo.len(),
        samples: ctx.samples,
        embedding_rows: fine_matrix.n_rows(),
        depth: ctx.max_depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gaussian, identity_stack, repeat_rows};
    use crate::regress::sensitivities_exact;

    fn cfg(gamma: f64, c_r: f64) -> TotalConfig {
        TotalConfig {
            recursion_constant: c_r,
            ..TotalConfig::new(1.0, gamma, TotalMethod::RecursiveL1)
        }
    }

    #[test]
    fn buckets_partition_the_unit_interval() {
        assert_eq!(bucket_of(1.0, 10), 1);
        assert_eq!(bucket_of(0.5, 10), 1);
        assert_eq!(bucket_of(0.499, 10), 2);
        assert_eq!(bucket_of(0.25, 10), 2);
        assert_eq!(bucket_of(0.125, 10), 3);
        assert_eq!(bucket_of(1e-30, 10), 10);
        assert_eq!(bucket_of(0.0, 10), 10);
        // every score lands in exactly the bucket whose interval contains it
        for k in 1..10 {
            let lo = 2f64.powi(-(k as i32));
            assert_eq!(bucket_of(lo, 10), k);
            assert_eq!(bucket_of(2.0 * lo * (1.0 - 1e-12), 10), k);
        }
    }

    #[test]
    fn parameters_follow_formulas() {
        let p = RecursionParams::new(1000, 4, 100, 0.2, 1.0);
        assert_eq!(p.buckets, 200);
        let rho = 0.2 / (1004f64).ln().ln();
        assert!((p.rho - rho).abs() < 1e-15);
        let d = 1.0 + (2200f64).ln().ln();
        assert!((p.delta - 0.01 / 200f64.powf(d)).abs() < 1e-30);
        assert!(p.base_case as f64 >= 7.0 * p.beta * (p.beta + 10.0));
        assert!(p.depth_limit >= 2);
    }

    #[test]
    fn small_input_is_a_single_base_case() {
        let a = gaussian(60, 3, 2);
        let est = total_recursive_l1(&a, &cfg(0.2, 1.0), &RandomSource::new(4)).unwrap();
        assert_eq!(est.depth, 1);
        assert_eq!(est.samples, 0);
        // the fine embedding keeps every row at this size, so the base case
        // is the exact total
        let truth = sensitivities_exact(&a, 1.0).unwrap().total();
        assert!((est.estimate - 1.2 * truth).abs() < 1e-6 * truth);
    }

    #[test]
    fn identical_rows_estimated_exactly_up_to_factors() {
        let a = repeat_rows(&DenseMatrix::identity(2), 300);
        let est = total_recursive_l1(&a, &cfg(0.2, 0.002), &RandomSource::new(1)).unwrap();
        assert!(est.depth >= 2, "recursion not exercised");
        let truth = 2.0;
        let params = RecursionParams::new(600, 2, est.embedding_rows, 0.2, 0.002);
        let factor = (1.0 + 0.2) * (1.0 + params.rho).powi(est.depth as i32 - 1);
        assert!(est.estimate >= truth);
        assert!(est.estimate <= factor * truth * (1.0 + 1e-9) + 1e-9, "{}", est.estimate);
    }

    #[test]
    fn identity_stack_overestimates_modestly() {
        let a = identity_stack(4, 100);
        for seed in 0..3 {
            let est = total_recursive_l1(&a, &cfg(0.2, 0.002), &RandomSource::new(seed)).unwrap();
            assert!(est.estimate >= 4.0 - 1e-9 && est.estimate <= 4.0 * 1.6, "{}", est.estimate);
        }
    }

    #[test]
    fn depth_limit_is_enforced() {
        let a = identity_stack(2, 200);
        let mut params = RecursionParams::new(400, 2, 400, 0.2, 0.002);
        params.base_case = 5;
        params.depth_limit = 1;
        let err = run(&a, &cfg(0.2, 0.002), Some(params), &RandomSource::new(0)).unwrap_err();
        assert_eq!(err, Error::RecursionDepth { depth: 2, limit: 1 });
    }
}
