//! Seeded test-matrix generators shared by tests, the CLI and benchmarks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};

use crate::matrix::DenseMatrix;
use crate::rng::RandomSource;

/// i.i.d. standard normal entries.
pub fn gaussian(n: usize, d: usize, seed: u64) -> DenseMatrix {
    let mut rng = RandomSource::new(seed).rng();
    let data: Vec<f64> = (0..n * d)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    DenseMatrix::new(n, d, data).expect("gaussian entries are finite")
}

/// Student-t (3 degrees of freedom) entries with per-row log-normal scales,
/// giving a few rows that dominate the ℓp objective.
pub fn heavy_tailed(n: usize, d: usize, seed: u64) -> DenseMatrix {
    let mut rng = RandomSource::new(seed).rng();
    let t = StudentT::new(3.0).expect("valid degrees of freedom");
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        let g: f64 = StandardNormal.sample(&mut rng);
        let scale = g.exp();
        for _ in 0..d {
            data.push(scale * t.sample(&mut rng));
        }
    }
    DenseMatrix::new(n, d, data).expect("heavy-tailed entries are finite")
}

/// `I_d` stacked `k` times (`n = k·d`); every ℓp sensitivity equals `1/k`.
pub fn identity_stack(d: usize, k: usize) -> DenseMatrix {
    let mut data = Vec::with_capacity(k * d * d);
    for _ in 0..k {
        data.extend_from_slice(DenseMatrix::identity(d).as_slice());
    }
    DenseMatrix::new(k * d, d, data).expect("identity entries are finite")
}

/// The rows of `base` each repeated `k` times consecutively.
pub fn repeat_rows(base: &DenseMatrix, k: usize) -> DenseMatrix {
    let idx: Vec<usize> = (0..base.n_rows())
        .flat_map(|i| std::iter::repeat_n(i, k))
        .collect();
    base.select_rows(&idx)
}

/// Gaussian rows of scale `small` plus one row of norm `big` in a random
/// direction, placed at a random position.
pub fn one_outlier(n: usize, d: usize, small: f64, big: f64, seed: u64) -> DenseMatrix {
    let mut rng = RandomSource::new(seed).rng();
    let pos = rng.gen_range(0..n);
    let mut data = Vec::with_capacity(n * d);
    for i in 0..n {
        let row: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s = if i == pos {
            big / row.iter().map(|v: &f64| v * v).sum::<f64>().sqrt()
        } else {
            small
        };
        data.extend(row.iter().map(|v| v * s));
    }
    DenseMatrix::new(n, d, data).expect("finite entries")
}
