//! Small dense-matrix kernels.
//!
//! The solvers never factorize anything large; these routines back the ADMM
//! subproblem solve, the least-squares conjugate, and rank checks at desk
//! scale (hundreds of columns).

use crate::error::{PdError, Result};
use crate::vector::Vector;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(PdError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(PdError::NonFiniteEntry { index: i });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec: dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "matvec_t: dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let yi = y[i];
            for (j, a) in self.row(i).iter().enumerate() {
                out[j] += a * yi;
            }
        }
        out
    }

    /// Gram matrix A^T A (cols x cols).
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let mut g = DenseMatrix::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                if row[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    g.data[i * n + j] += row[i] * row[j];
                }
            }
        }
        g
    }

    /// Outer Gram matrix A A^T (rows x rows).
    pub fn gram_t(&self) -> DenseMatrix {
        let k = self.rows;
        let mut g = DenseMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                g.data[i * k + j] = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| a * b)
                    .sum();
            }
        }
        g
    }

    pub fn add_scaled_identity(&mut self, alpha: f64) {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            self.data[i * self.cols + i] += alpha;
        }
    }

    /// Matrix rank by Gaussian elimination with partial pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.data.clone();
        let (m, n) = (self.rows, self.cols);
        let scale = self.data.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
        let mut rank = 0;
        let mut row = 0;
        for col in 0..n {
            // Pivot search in this column below `row`.
            let (mut best, mut best_abs) = (row, 0.0);
            for r in row..m {
                let v = a[r * n + col].abs();
                if v > best_abs {
                    best_abs = v;
                    best = r;
                }
            }
            if best_abs <= tol * scale {
                continue;
            }
            for j in col..n {
                a.swap(row * n + j, best * n + j);
            }
            for r in (row + 1)..m {
                let factor = a[r * n + col] / a[row * n + col];
                for j in col..n {
                    a[r * n + j] -= factor * a[row * n + j];
                }
            }
            rank += 1;
            row += 1;
            if row == m {
                break;
            }
        }
        rank
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Cholesky factor (lower triangular) of a symmetric positive-definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        assert_eq!(a.rows, a.cols, "cholesky: matrix must be square");
        let n = a.rows;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[(i, j)];
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(PdError::SingularSubproblem {
                            reason: format!("non-positive pivot {sum:.3e} at row {i}"),
                        });
                    }
                    l[i * n + i] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n, "cholesky solve: dimension mismatch");
        let n = self.n;
        // Forward: L y = b
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        // Backward: L^T x = y
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }

    pub fn solve_vec(&self, b: &Vector) -> Vector {
        Vector::from_raw(self.solve(b.as_slice()))
    }
}

/// Solves a general square system by Gaussian elimination with partial
/// pivoting. Errors when the pivot falls below `tol` times the matrix scale.
pub fn solve_square(a: &DenseMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    assert_eq!(a.rows, a.cols, "solve_square: matrix must be square");
    assert_eq!(b.len(), a.rows, "solve_square: rhs dimension mismatch");
    let n = a.rows;
    let mut m = a.data.clone();
    let mut rhs = b.to_vec();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    for col in 0..n {
        let (mut best, mut best_abs) = (col, 0.0);
        for r in col..n {
            let v = m[r * n + col].abs();
            if v > best_abs {
                best_abs = v;
                best = r;
            }
        }
        if best_abs <= tol * scale {
            return Err(PdError::SingularSubproblem {
                reason: format!("pivot {best_abs:.3e} below tolerance in column {col}"),
            });
        }
        if best != col {
            for j in 0..n {
                m.swap(col * n + j, best * n + j);
            }
            rhs.swap(col, best);
        }
        for r in (col + 1)..n {
            let factor = m[r * n + col] / m[col * n + col];
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[r * n + j] -= factor * m[col * n + j];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..n {
            s -= m[i * n + j] * x[j];
        }
        x[i] = s / m[i * n + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_and_adjoint() {
        let a = DenseMatrix::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(a.matvec(&[1.0, 0.0, -1.0]), vec![-2.0, -2.0]);
        assert_eq!(a.matvec_t(&[1.0, 1.0]), vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn cholesky_solves_spd() {
        // A = [[4, 2], [2, 3]]
        let a = DenseMatrix::new(2, 2, vec![4.0, 2.0, 2.0, 3.0]).unwrap();
        let f = Cholesky::factor(&a).unwrap();
        let x = f.solve(&[8.0, 7.0]);
        // Check residual
        let r = a.matvec(&x);
        assert!((r[0] - 8.0).abs() < 1e-12);
        assert!((r[1] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DenseMatrix::new(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(Cholesky::factor(&a).is_err());
    }

    #[test]
    fn rank_detects_deficiency() {
        let full = DenseMatrix::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(full.rank(1e-12), 2);
        let def = DenseMatrix::new(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(def.rank(1e-12), 1);
        let wide = DenseMatrix::new(2, 3, vec![1.0, 0.0, 1.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(wide.rank(1e-12), 2);
    }

    #[test]
    fn solve_square_matches_manual() {
        let a = DenseMatrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let x = solve_square(&a, &[3.0, 5.0], 1e-14).unwrap();
        assert_eq!(x, vec![5.0, 3.0]);
    }
}
