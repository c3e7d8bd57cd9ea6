//! Row-major dense matrix used as the input type of every estimator.

use crate::error::{Error, Result};

/// A dense real matrix stored row-major: `data[i * n_cols + j] = A[i, j]`.
///
/// Construction rejects empty shapes and non-finite entries, so every
/// downstream routine can assume a finite `n_rows × n_cols` matrix with
/// `n_rows, n_cols ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    data: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
}

impl DenseMatrix {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix must be at least 1x1, got {n_rows}x{n_cols}"
            )));
        }
        if data.len() != n_rows * n_cols {
            return Err(Error::InvalidInput(format!(
                "data length {} does not match shape {n_rows}x{n_cols}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                pos / n_cols,
                pos % n_cols
            )));
        }
        Ok(Self {
            data,
            n_rows,
            n_cols,
        })
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {n_cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), n_cols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            data,
            n_rows: n,
            n_cols: n,
        }
    }

    pub(crate) fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            data: vec![0.0; n_rows * n_cols],
            n_rows,
            n_cols,
        }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.n_cols)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.n_cols != other.n_rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut out = Self::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            let out_row = &mut out.data[i * other.n_cols..(i + 1) * other.n_cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `A x` for a vector `x` of length `n_cols`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n_cols);
        self.rows().map(|r| dot(r, x)).collect()
    }

    /// The Gram matrix `AᵀA`.
    pub fn gram(&self) -> Self {
        let d = self.n_cols;
        let mut out = Self::zeros(d, d);
        for row in self.rows() {
            for j in 0..d {
                let rj = row[j];
                if rj == 0.0 {
                    continue;
                }
                for k in j..d {
                    out.data[j * d + k] += rj * row[k];
                }
            }
        }
        for j in 0..d {
            for k in 0..j {
                out.data[j * d + k] = out.data[k * d + j];
            }
        }
        out
    }

    /// Copies the listed rows, in order; indices may repeat.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            data,
            n_rows: indices.len(),
            n_cols: self.n_cols,
        }
    }

    /// Row `i` multiplied by `scales[i]`.
    pub fn scale_rows(&self, scales: &[f64]) -> Self {
        assert_eq!(scales.len(), self.n_rows, "one scale per row");
        let mut out = self.clone();
        for (i, &s) in scales.iter().enumerate() {
            out.row_mut(i).iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &DenseMatrix) -> Result<Self> {
        if self.n_cols != other.n_cols {
            return Err(Error::InvalidInput(format!(
                "cannot stack {} columns over {} columns",
                self.n_cols, other.n_cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            data,
            n_rows: self.n_rows + other.n_rows,
            n_cols: self.n_cols,
        })
    }

    /// Appends one row.
    pub fn with_row(&self, row: &[f64]) -> Result<Self> {
        if row.len() != self.n_cols {
            return Err(Error::InvalidInput(format!(
                "row has {} entries, expected {}",
                row.len(),
                self.n_cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(row);
        Ok(Self {
            data,
            n_rows: self.n_rows + 1,
            n_cols: self.n_cols,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
