//! Exact and randomized estimators for ℓp sensitivities of tall matrices.
//!
//! The ℓp sensitivity of row `a_i` of `A` is
//! `σ_p(a_i) = max_x |a_iᵀx|^p / ‖Ax‖_p^p`, and the total sensitivity is
//! their sum. The crate provides brute-force oracles ([`sensitivities_exact`])
//! alongside fast approximations of every row ([`sensitivities_rowwise`]),
//! of the total ([`total_lewis_oneshot`], [`total_recursive_l1`]) and of the
//! maximum ([`max_sensitivity`]).

// Dense kernels index several arrays in lockstep, and `!(x > 0.0)` style
// checks are deliberate: they also reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod embed;
pub mod error;
pub mod generate;
pub mod leverage;
pub mod lewis;
pub mod linalg;
pub mod matrix;
pub mod maxsens;
pub mod norm;
pub mod reduce;
pub mod regress;
pub mod rng;
pub mod rowwise;
pub mod total;
pub mod weights;

pub use embed::{linf_embedding, lp_embedding, EmbedConfig, SamplingEmbedding};
pub use error::{Error, Result};
pub use leverage::{leverage_approx, leverage_exact};
pub use lewis::{lewis_weights, LewisConfig};
pub use linalg::{pivoted_qr, pseudoinverse_gram, PivotedQr};
pub use matrix::DenseMatrix;
pub use maxsens::{max_sensitivity, MaxConfig, MaxEstimate};
pub use norm::lp_norm;
pub use reduce::{leave_one_out_multiregression, regression_via_sensitivity};
pub use regress::{
    min_lp_on_hyperplane, sensitivities_exact, sensitivity_one, RegressionSolution, SolveStatus,
};
pub use rng::RandomSource;
pub use rowwise::{sensitivities_rowwise, RowwiseConfig, RowwiseEstimate};
pub use total::{
    bounded_ratio_mean, total_lewis_oneshot, total_recursive_l1, TotalConfig, TotalEstimate,
    TotalMethod,
};
pub use weights::{WeightKind, WeightVector};

#[cfg(test)]
pub(crate) mod test_util {
    pub use crate::generate::gaussian as random_matrix;
}
