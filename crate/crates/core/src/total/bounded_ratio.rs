//! Uniform-sampling estimate of a sum of positive numbers whose ratio
//! `max/min` is at most `r`.

use rand::Rng;

use crate::rng::RandomSource;

/// `ceil(10·r·(1+γ)·γ^{-2}·ln(1/δ))`: enough uniform draws for a
/// `(1 ± γ)` estimate with probability at least `1 − δ`.
pub fn bounded_ratio_sample_size(r: f64, gamma: f64, delta: f64) -> usize {
    (10.0 * r * (1.0 + gamma) / (gamma * gamma) * (1.0 / delta).ln()).ceil() as usize
}

/// `(m/|S|)·Σ_{j∈S} value(j)` for `|S|` indices drawn uniformly with
/// replacement from `0..m`.
pub fn bounded_ratio_mean<F>(m: usize, mut value: F, r: f64, gamma: f64, delta: f64, rng: &RandomSource) -> f64
where
    F: FnMut(usize) -> f64,
{
    if m == 0 {
        return 0.0;
    }
    let s = bounded_ratio_sample_size(r, gamma, delta).max(1);
    let mut gen = rng.rng();
    let total: f64 = (0..s).map(|_| value(gen.gen_range(0..m))).sum();
    m as f64 / s as f64 * total
}
