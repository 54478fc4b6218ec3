//! Dense matrix primitives used by the fitting code.
//!
//! The problems this crate solves are small (tens of rows, a handful of
//! selected descriptors), so a plain row-major `Vec<f64>` matrix with a
//! Householder-QR least-squares solver and a cyclic Jacobi symmetric
//! eigensolver covers everything without pulling in a BLAS.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is rank deficient near column {column}")]
    RankDeficient { column: usize },
    #[error("square system is singular")]
    Singular,
}

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row-major data. Panics if the length does not
    /// match `rows * cols`; callers construct shapes they already know.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            assert_eq!(r.len(), m, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: n,
            cols: m,
            data,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    /// Row `r` as a contiguous slice.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(idx.len(), self.cols);
        for (i, &r) in idx.iter().enumerate() {
            out.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(self.row(r));
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// `A v` for a vector `v` of length `cols`.
    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "mat_vec dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ v` for a vector `v` of length `rows`.
    pub fn tr_mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "tr_mat_vec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            let row = self.row(r);
            let s = v[r];
            for (o, a) in out.iter_mut().zip(row) {
                *o += s * a;
            }
        }
        out
    }

    /// `AᵀA`, the Gram matrix.
    pub fn gram(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..self.cols {
                for j in i..self.cols {
                    let v = row[i] * row[j];
                    out.data[i * self.cols + j] += v;
                }
            }
        }
        for i in 0..self.cols {
            for j in 0..i {
                out.data[i * self.cols + j] = out.data[j * self.cols + i];
            }
        }
        out
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Relative pivot threshold below which a QR column is declared dependent.
const RANK_TOL: f64 = 1e-10;

/// Least-squares solution of `A x ≈ b` for a tall full-rank `A` via
/// Householder QR. Rank deficiency is reported against the offending column.
pub fn lstsq(a: &Matrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = a.rows();
    let m = a.cols();
    if b.len() != n {
        return Err(LinalgError::Dimension(format!(
            "rhs length {} does not match {} rows",
            b.len(),
            n
        )));
    }
    if n < m {
        return Err(LinalgError::Dimension(format!(
            "system is underdetermined: {n} rows, {m} columns"
        )));
    }

    let mut r = a.clone();
    let mut y = b.to_vec();

    for k in 0..m {
        // Householder vector for column k below the diagonal.
        let mut norm = 0.0;
        for i in k..n {
            norm += r.get(i, k) * r.get(i, k);
        }
        norm = norm.sqrt();
        if norm == 0.0 {
            return Err(LinalgError::RankDeficient { column: k });
        }
        let alpha = if r.get(k, k) >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n - k];
        v[0] = r.get(k, k) - alpha;
        for i in k + 1..n {
            v[i - k] = r.get(i, k);
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv > 0.0 {
            let beta = 2.0 / vtv;
            for j in k..m {
                let mut dot = 0.0;
                for i in k..n {
                    dot += v[i - k] * r.get(i, j);
                }
                let scale = beta * dot;
                for i in k..n {
                    let val = r.get(i, j) - scale * v[i - k];
                    r.set(i, j, val);
                }
            }
            let mut dot = 0.0;
            for i in k..n {
                dot += v[i - k] * y[i];
            }
            let scale = beta * dot;
            for i in k..n {
                y[i] -= scale * v[i - k];
            }
        }
        r.set(k, k, alpha);
    }

    let max_diag = (0..m).map(|i| r.get(i, i).abs()).fold(0.0_f64, f64::max);
    for k in 0..m {
        if r.get(k, k).abs() <= RANK_TOL * max_diag {
            return Err(LinalgError::RankDeficient { column: k });
        }
    }

    // Back substitution on the upper-triangular system R x = y.
    let mut x = vec![0.0; m];
    for k in (0..m).rev() {
        let mut s = y[k];
        for j in k + 1..m {
            s -= r.get(k, j) * x[j];
        }
        x[k] = s / r.get(k, k);
    }
    Ok(x)
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order with eigenvectors as the columns of
/// the returned matrix, aligned to the eigenvalue order. Eigenvector signs are
/// fixed so the entry of largest magnitude is positive, which makes the
/// decomposition deterministic.
pub fn sym_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix), LinalgError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(LinalgError::Dimension(format!(
            "sym_eigen needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let mut w = a.clone();
    let mut v = Matrix::identity(n);

    let frob: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| w.get(i, j) * w.get(i, j))
        .sum::<f64>()
        .sqrt();
    let tol = 1e-14 * frob.max(1.0);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += w.get(i, j) * w.get(i, j);
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w.get(p, q);
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = w.get(p, p);
                let aqq = w.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let wkp = w.get(k, p);
                    let wkq = w.get(k, q);
                    w.set(k, p, c * wkp - s * wkq);
                    w.set(k, q, s * wkp + c * wkq);
                }
                for k in 0..n {
                    let wpk = w.get(p, k);
                    let wqk = w.get(q, k);
                    w.set(p, k, c * wpk - s * wqk);
                    w.set(q, k, s * wpk + c * wqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        w.get(j, j)
            .partial_cmp(&w.get(i, i))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| w.get(i, i)).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        // Sign convention: largest-magnitude entry positive.
        let mut best = 0;
        for k in 1..n {
            if v.get(k, src).abs() > v.get(best, src).abs() {
                best = k;
            }
        }
        let sign = if v.get(best, src) < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            vectors.set(k, dst, sign * v.get(k, src));
        }
    }
    Ok((eigenvalues, vectors))
}

/// Solves a small square system `A x = b` by Gaussian elimination with
/// partial pivoting.
pub fn solve_square(a: &Matrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(LinalgError::Dimension(
            "solve_square needs a square system".into(),
        ));
    }
    let mut w = a.clone();
    let mut y = b.to_vec();
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if w.get(i, k).abs() > w.get(piv, k).abs() {
                piv = i;
            }
        }
        if w.get(piv, k).abs() < 1e-300 {
            return Err(LinalgError::Singular);
        }
        if piv != k {
            for j in 0..n {
                let tmp = w.get(k, j);
                w.set(k, j, w.get(piv, j));
                w.set(piv, j, tmp);
            }
            y.swap(k, piv);
        }
        for i in k + 1..n {
            let f = w.get(i, k) / w.get(k, k);
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                let val = w.get(i, j) - f * w.get(k, j);
                w.set(i, j, val);
            }
            y[i] -= f * y[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = y[k];
        for j in k + 1..n {
            s -= w.get(k, j) * x[j];
        }
        x[k] = s / w.get(k, k);
    }
    Ok(x)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Euclidean distance between two rows.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lstsq_recovers_exact_solution() {
        // y = 2 + 3x on x = 0,1,2
        let a = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]]);
        let x = lstsq(&a, &[2.0, 5.0, 8.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lstsq_matches_overdetermined_normal_equations() {
        let a = Matrix::from_rows(&[
            vec![1.0, 0.3, -0.2],
            vec![1.0, -1.1, 0.9],
            vec![1.0, 2.2, 0.4],
            vec![1.0, 0.5, -1.7],
            vec![1.0, -0.6, 1.2],
            vec![1.0, 1.4, 0.8],
        ]);
        let b = vec![0.7, -0.3, 2.9, -1.2, 1.0, 2.4];
        let x = lstsq(&a, &b).unwrap();

        // Normal equations solved independently.
        let ata = a.gram();
        let atb = a.tr_mat_vec(&b);
        let x2 = solve_square(&ata, &atb).unwrap();
        for (u, v) in x.iter().zip(&x2) {
            assert!((u - v).abs() < 1e-10, "{u} vs {v}");
        }
    }

    #[test]
    fn lstsq_detects_duplicate_column() {
        let a = Matrix::from_rows(&[
            vec![1.0, 1.0],
            vec![2.0, 2.0],
            vec![3.0, 3.0],
            vec![4.0, 4.0],
        ]);
        assert!(matches!(
            lstsq(&a, &[1.0, 2.0, 3.0, 4.0]),
            Err(LinalgError::RankDeficient { .. })
        ));
    }

    #[test]
    fn jacobi_diagonalizes_known_matrix() {
        // Eigenvalues of [[2,1],[1,2]] are 3 and 1.
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (vals, vecs) = sym_eigen(&a).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((vecs.get(0, 0) - inv_sqrt2).abs() < 1e-10);
        assert!((vecs.get(1, 0) - inv_sqrt2).abs() < 1e-10);
    }

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        let mut a = Matrix::zeros(5, 5);
        let mut state = 88172645463325252u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..5 {
            for j in i..5 {
                let v = next();
                a.set(i, j, v);
                a.set(j, i, v);
            }
        }
        let (vals, vecs) = sym_eigen(&a).unwrap();
        // A ≈ V diag(vals) Vᵀ
        let mut lam = Matrix::zeros(5, 5);
        for i in 0..5 {
            lam.set(i, i, vals[i]);
        }
        let approx = vecs.matmul(&lam).matmul(&vecs.transpose());
        for i in 0..5 {
            for j in 0..5 {
                assert!((approx.get(i, j) - a.get(i, j)).abs() < 1e-9);
            }
        }
        // Sorted descending.
        for w in vals.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }

    #[test]
    fn solve_square_singular_is_reported() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(solve_square(&a, &[1.0, 2.0]), Err(LinalgError::Singular));
    }
}
