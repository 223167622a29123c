//! Thin helpers over nalgebra's dense symmetric eigensolver and SVD.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenpairs of a symmetric matrix, eigenvalues sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    /// Symmetrizes `(M + M^T)/2` before decomposing.
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Eigen(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix passed to eigensolver".into()));
        }
        let sym = (m + m.transpose()) * 0.5;
        let eig = sym
            .try_symmetric_eigen(f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(SymEigen { values, vectors })
    }

    /// `V diag(f(mu)) V^T`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |r, c| {
            self.vectors[(r, c)] * f(self.values[c])
        });
        scaled * self.vectors.transpose()
    }

    /// `V diag(f(mu)) V^T x` without forming the matrix.
    pub fn apply_to(&self, f: impl Fn(f64) -> f64, x: &DVector<f64>) -> DVector<f64> {
        let mut coeff = self.vectors.tr_mul(x);
        for (c, mu) in coeff.iter_mut().zip(&self.values) {
            *c *= f(*mu);
        }
        &self.vectors * coeff
    }

    /// Clamps eigenvalues in `[-tol, 0)` to zero; errors below `-tol`.
    pub fn clamp_psd(&mut self, tol: f64) -> Result<()> {
        for v in self.values.iter_mut() {
            if *v < -tol {
                return Err(Error::Eigen(format!(
                    "matrix expected positive semidefinite has eigenvalue {v:e} below -{tol:e}"
                )));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(())
    }
}

/// Largest singular value.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

/// `diag(w) M` in place.
pub fn scale_rows(m: &mut DMatrix<f64>, w: &[f64]) {
    for (r, wr) in w.iter().enumerate() {
        m.row_mut(r).scale_mut(*wr);
    }
}

/// `M diag(w)` in place.
pub fn scale_cols(m: &mut DMatrix<f64>, w: &[f64]) {
    for (c, wc) in w.iter().enumerate() {
        m.column_mut(c).scale_mut(*wc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0]);
        let e = SymEigen::new(&m).unwrap();
        assert!((e.values[0] - 5.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
        assert!((e.values[2] - 1.0).abs() < 1e-12);
        let back = e.apply(|x| x);
        assert!((back - m).norm() < 1e-12);
    }

    #[test]
    fn clamp_and_reject() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-15]);
        let mut e = SymEigen::new(&m).unwrap();
        e.clamp_psd(1e-12).unwrap();
        assert_eq!(e.values[1], 0.0);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-3]);
        let mut e = SymEigen::new(&bad).unwrap();
        assert!(e.clamp_psd(1e-12).is_err());
    }

    #[test]
    fn norms() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 4.0]);
        assert!((op_norm(&m) - 4.0).abs() < 1e-12);
        assert!((hs_norm(&m) - 5.0).abs() < 1e-12);
    }
}
