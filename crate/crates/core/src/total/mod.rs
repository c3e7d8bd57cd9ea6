//! Estimators of the total sensitivity `S_p(A) = Σ_i σ_p(a_i)`.

mod bounded_ratio;
mod oneshot;
mod recursive;

use serde::{Deserialize, Serialize};

use crate::embed::EmbedConfig;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::norm::check_finite_p;
use crate::rng::RandomSource;

pub use bounded_ratio::{bounded_ratio_mean, bounded_ratio_sample_size};
pub use oneshot::{oneshot_sample_count, total_lewis_oneshot, total_oneshot_fixed};
pub use recursive::{total_recursive_l1, RecursionParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TotalMethod {
    LewisOneshot,
    RecursiveL1,
}

impl std::str::FromStr for TotalMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lewis_oneshot" => Ok(Self::LewisOneshot),
            "recursive_l1" => Ok(Self::RecursiveL1),
            other => Err(Error::InvalidConfig(format!(
                "unknown method {other:?}; expected lewis_oneshot or recursive_l1"
            ))),
        }
    }
}

impl std::fmt::Display for TotalMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::LewisOneshot => "lewis_oneshot",
            Self::RecursiveL1 => "recursive_l1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalConfig {
    pub p: f64,
    pub gamma: f64,
    pub method: TotalMethod,
    /// `c_m` in the one-shot sample count `m = ceil(c_m·d^{|1−p/2|}/γ²)`.
    pub sample_constant: f64,
    /// Accuracy of the coarse embedding (one-shot and recursive).
    pub embed_eps: f64,
    pub embed: EmbedConfig,
    /// `c_r` in the per-bucket sample count of the recursive estimator.
    pub recursion_constant: f64,
}

impl TotalConfig {
    pub fn new(p: f64, gamma: f64, method: TotalMethod) -> Self {
        Self {
            p,
            gamma,
            method,
            sample_constant: 10.0,
            embed_eps: 0.5,
            embed: EmbedConfig::default(),
            recursion_constant: 1.0,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        check_finite_p(self.p)?;
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma must lie in (0, 1), got {}",
                self.gamma
            )));
        }
        if self.method == TotalMethod::RecursiveL1 && self.p != 1.0 {
            return Err(Error::InvalidConfig(format!(
                "recursive_l1 requires p = 1, got p = {}",
                self.p
            )));
        }
        if !(self.sample_constant > 0.0) || !(self.recursion_constant > 0.0) {
            return Err(Error::InvalidConfig("sampling constants must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotalEstimate {
    pub estimate: f64,
    pub method: TotalMethod,
    /// Sensitivity evaluations performed (distinct rows for the one-shot
    /// estimator, base-case rows for the recursive one).
    pub oracle_calls: usize,
    /// Draws made: `m` for the one-shot estimator, rows sampled into child
    /// nodes for the recursive one.
    pub samples: usize,
    pub embedding_rows: usize,
    /// Deepest recursion level reached (1 = root); 0 for the one-shot method.
    pub depth: usize,
}

/// Dispatches on `cfg.method`.
pub fn total_sensitivity(a: &DenseMatrix, cfg: &TotalConfig, rng: &RandomSource) -> Result<TotalEstimate> {
    match cfg.method {
        TotalMethod::LewisOneshot => total_lewis_oneshot(a, cfg, rng),
        TotalMethod::RecursiveL1 => total_recursive_l1(a, cfg, rng),
    }
}
