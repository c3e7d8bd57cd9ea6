//! Estimating the largest ℓp sensitivity from a handful of rows.
//!
//! A 2-approximate barycentric spanner `B` of `A` spans every row with
//! coefficients of magnitude at most 2, so the maximum sensitivity is
//! attained, up to the spanner's distortion `D = 2d`, on one of its `d` rows.
//! Those rows' sensitivities are evaluated against an ℓp embedding and the
//! largest is multiplied by `D^{p/2}`.

use serde::{Deserialize, Serialize};

use crate::embed::{lp_embedding_with, linf_embedding, EmbedConfig};
use crate::error::Result;
use crate::leverage::leverage_exact;
use crate::linalg::require_tall_full_rank;
use crate::matrix::DenseMatrix;
use crate::norm::check_finite_p;
use crate::regress::SensitivityOracle;
use crate::rng::{stage, RandomSource};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxConfig {
    pub p: f64,
    pub embed_eps: f64,
    pub embed: EmbedConfig,
}

impl MaxConfig {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            embed_eps: 0.5,
            embed: EmbedConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEstimate {
    /// `multiplier · raw_max`.
    pub estimate: f64,
    /// Largest embedded sensitivity among the spanner rows.
    pub raw_max: f64,
    /// `(2d)^{p/2}`, or 1 for the exact `p = 2` path.
    pub multiplier: f64,
    /// Rows of `A` that were evaluated.
    pub spanner_rows: Vec<usize>,
}

pub fn max_sensitivity(a: &DenseMatrix, cfg: &MaxConfig, rng: &RandomSource) -> Result<MaxEstimate> {
    check_finite_p(cfg.p)?;
    require_tall_full_rank(a)?;
    if cfg.p == 2.0 {
        let lev = leverage_exact(a);
        let (arg, max) = lev
            .as_slice()
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
        return Ok(MaxEstimate {
            estimate: max,
            raw_max: max,
            multiplier: 1.0,
            spanner_rows: vec![arg],
        });
    }
    let spanner = linf_embedding(a)?;
    let emb = lp_embedding_with(a, cfg.p, cfg.embed_eps, &cfg.embed, &rng.split(stage::EMBEDDING))?;
    let oracle = SensitivityOracle::new(&emb.materialize(a), cfg.p)?;
    let mut raw_max = 0.0_f64;
    for &i in &spanner.source_rows {
        raw_max = raw_max.max(oracle.sensitivity(a.row(i))?);
    }
    let multiplier = spanner.target_distortion.powf(cfg.p / 2.0);
    Ok(MaxEstimate {
        estimate: multiplier * raw_max,
        raw_max,
        multiplier,
        spanner_rows: spanner.source_rows,
    })
}
