//! Dense factorizations: Householder QR with column pivoting, the
//! pseudoinverse of a Gram matrix, and small square solvers.

use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};

/// Relative tolerance on `|R_kk| / |R_00|` below which a pivot counts as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Thin pivoted QR factorization `A·P = Q·R`.
///
/// `Q` is `n × k` with orthonormal columns, `R` is `k × d` upper triangular
/// with non-increasing diagonal magnitudes, `k = min(n, d)`. Column `j` of
/// `A·P` is column `perm[j]` of `A`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
    pub perm: Vec<usize>,
    pub rank: usize,
}

impl PivotedQr {
    /// `A·P` reassembled from the factors; used by reconstruction checks.
    pub fn reconstruct(&self) -> DenseMatrix {
        self.q.matmul(&self.r).expect("factor shapes agree")
    }
}

pub fn pivoted_qr(a: &DenseMatrix) -> PivotedQr {
    pivoted_qr_with_tol(a, RANK_TOL)
}

pub fn pivoted_qr_with_tol(a: &DenseMatrix, rel_tol: f64) -> PivotedQr {
    let (n, d) = a.shape();
    let k = n.min(d);
    // Column-major working copy: columns are contiguous, which is what the
    // Householder updates touch.
    let mut cols: Vec<Vec<f64>> = (0..d).map(|j| a.column(j)).collect();
    let mut perm: Vec<usize> = (0..d).collect();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut diag = vec![0.0; k];

    for step in 0..k {
        let mut best = step;
        let mut best_norm = -1.0;
        for (j, col) in cols.iter().enumerate().skip(step) {
            let nrm: f64 = col[step..].iter().map(|v| v * v).sum();
            if nrm > best_norm {
                best_norm = nrm;
                best = j;
            }
        }
        cols.swap(step, best);
        perm.swap(step, best);

        let x = &cols[step][step..];
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            reflectors.push(Vec::new());
            diag[step] = 0.0;
            continue;
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 > 0.0 {
            for col in cols.iter_mut().skip(step + 1) {
                let tail = &mut col[step..];
                let s = 2.0 * dot(&v, tail) / vnorm2;
                for (t, vi) in tail.iter_mut().zip(&v) {
                    *t -= s * vi;
                }
            }
        }
        diag[step] = alpha;
        let c = &mut cols[step];
        c[step] = alpha;
        for t in c[step + 1..].iter_mut() {
            *t = 0.0;
        }
        reflectors.push(if vnorm2 > 0.0 { v } else { Vec::new() });
    }

    let mut r = DenseMatrix::zeros(k, d);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..k.min(j + 1) {
            r.set(i, j, col[i]);
        }
    }

    // Q = H_0 H_1 ... H_{k-1} applied to the first k columns of the identity.
    let mut q_cols: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    for step in (0..k).rev() {
        let v = &reflectors[step];
        if v.is_empty() {
            continue;
        }
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        for col in q_cols.iter_mut() {
            let tail = &mut col[step..];
            let s = 2.0 * dot(v, tail) / vnorm2;
            if s != 0.0 {
                for (t, vi) in tail.iter_mut().zip(v) {
                    *t -= s * vi;
                }
            }
        }
    }
    let mut q = DenseMatrix::zeros(n, k);
    for (j, col) in q_cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            q.set(i, j, v);
        }
    }

    let lead = diag.first().map(|v| v.abs()).unwrap_or(0.0);
    let rank = if lead == 0.0 {
        0
    } else {
        diag.iter().take_while(|v| v.abs() > rel_tol * lead).count()
    };

    PivotedQr { q, r, perm, rank }
}

/// Numerical rank by pivoted QR at the default tolerance.
pub fn rank(a: &DenseMatrix) -> usize {
    pivoted_qr(a).rank
}

/// Rejects matrices that are not full column rank.
pub fn require_full_column_rank(a: &DenseMatrix) -> Result<()> {
    let r = rank(a);
    if r < a.n_cols() {
        return Err(Error::RankDeficient {
            rank: r,
            n_cols: a.n_cols(),
        });
    }
    Ok(())
}

/// Rejects wide or rank-deficient matrices.
pub fn require_tall_full_rank(a: &DenseMatrix) -> Result<()> {
    if a.n_rows() < a.n_cols() {
        return Err(Error::NotTall {
            n_rows: a.n_rows(),
            n_cols: a.n_cols(),
        });
    }
    require_full_column_rank(a)
}

/// A factor `W` (`d × rank`) with `(AᵀA)† = W·Wᵀ`.
///
/// From `A·P = Q·R` with `R_r` the leading `rank` rows of `R`,
/// `(AᵀA)† = P·(R_rᵀR_r)†·Pᵀ`. A second QR, `R_rᵀ·Π = Z·L`, gives
/// `(R_rᵀR_r)† = (Z·L^{-T})(Z·L^{-T})ᵀ` without ever forming `AᵀA`.
#[derive(Debug, Clone)]
pub struct GramPinvFactor {
    pub w: DenseMatrix,
    pub rank: usize,
}

impl GramPinvFactor {
    pub fn new(a: &DenseMatrix) -> Self {
        let d = a.n_cols();
        let qr = pivoted_qr(a);
        let r = qr.rank;
        if r == 0 {
            return Self {
                w: DenseMatrix::zeros(d, 1),
                rank: 0,
            };
        }
        let rr = DenseMatrix::new(r, d, qr.r.as_slice()[..r * d].to_vec())
            .expect("leading rows of R are finite");
        let second = pivoted_qr_with_tol(&rr.transpose(), 0.0);
        // second.q: d × r (Z), second.r: r × r (L, upper triangular)
        let l = &second.r;
        let mut w0 = DenseMatrix::zeros(d, r);
        for i in 0..d {
            let z = second.q.row(i);
            let sol = solve_upper_triangular(l, z);
            w0.row_mut(i).copy_from_slice(&sol);
        }
        let mut w = DenseMatrix::zeros(d, r);
        for j in 0..d {
            w.row_mut(qr.perm[j]).copy_from_slice(w0.row(j));
        }
        Self { w, rank: r }
    }

    /// `aᵀ(AᵀA)†a` for a vector `a`.
    pub fn quadratic_form(&self, a: &[f64]) -> f64 {
        let mut acc = vec![0.0; self.w.n_cols()];
        for (ai, wrow) in a.iter().zip(self.w.rows()) {
            if *ai == 0.0 {
                continue;
            }
            for (t, wv) in acc.iter_mut().zip(wrow) {
                *t += ai * wv;
            }
        }
        acc.iter().map(|t| t * t).sum()
    }

    pub fn to_matrix(&self) -> DenseMatrix {
        let d = self.w.n_rows();
        let mut m = DenseMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, dot(self.w.row(i), self.w.row(j)));
            }
        }
        m
    }
}

/// `(AᵀA)†`, equal to `(AᵀA)^{-1}` when `A` has full column rank.
pub fn pseudoinverse_gram(a: &DenseMatrix) -> DenseMatrix {
    GramPinvFactor::new(a).to_matrix()
}

/// Solves `U x = b` for upper-triangular `U` (square, leading block used).
/// Zero pivots produce a zero component.
pub fn solve_upper_triangular(u: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= u.get(i, j) * x[j];
        }
        let piv = u.get(i, i);
        x[i] = if piv != 0.0 { s / piv } else { 0.0 };
    }
    x
}

/// LU factorization with partial pivoting of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DenseMatrix,
    piv: Vec<usize>,
}

impl Lu {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        let n = m.n_rows();
        if m.n_cols() != n {
            return Err(Error::InvalidInput(format!(
                "LU needs a square matrix, got {}x{}",
                n,
                m.n_cols()
            )));
        }
        let mut lu = m.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let mut p = k;
            let mut best = lu.get(k, k).abs();
            for i in k + 1..n {
                let v = lu.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= 1e-14 * scale {
                return Err(Error::InvalidInput("singular matrix".into()));
            }
            if p != k {
                piv.swap(p, k);
                for j in 0..n {
                    let t = lu.get(k, j);
                    lu.set(k, j, lu.get(p, j));
                    lu.set(p, j, t);
                }
            }
            let pivot = lu.get(k, k);
            for i in k + 1..n {
                let f = lu.get(i, k) / pivot;
                lu.set(i, k, f);
                if f != 0.0 {
                    for j in k + 1..n {
                        lu.set(i, j, lu.get(i, j) - f * lu.get(k, j));
                    }
                }
            }
        }
        Ok(Self { lu, piv })
    }

    /// Solves `M x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut y: Vec<f64> = self.piv.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu.get(i, j) * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu.get(i, j) * y[j];
            }
            y[i] = s / self.lu.get(i, i);
        }
        y
    }

    /// Solves `Mᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        // Uᵀ z = b
        let mut z = b.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for j in 0..i {
                s -= self.lu.get(j, i) * z[j];
            }
            z[i] = s / self.lu.get(i, i);
        }
        // Lᵀ w = z
        for i in (0..n).rev() {
            let mut s = z[i];
            for j in i + 1..n {
                s -= self.lu.get(j, i) * z[j];
            }
            z[i] = s;
        }
        let mut x = vec![0.0; n];
        for (k, &i) in self.piv.iter().enumerate() {
            x[i] = z[k];
        }
        x
    }
}

/// Solves the symmetric positive definite system `H x = g` by Cholesky.
/// Returns `None` when `H` is not numerically positive definite.
pub fn cholesky_solve(h: &[f64], g: &[f64]) -> Option<Vec<f64>> {
    let n = g.len();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = h[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = g.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    Some(y)
}
