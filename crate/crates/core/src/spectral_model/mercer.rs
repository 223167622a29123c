//! Nystrom (quadrature) Mercer decomposition on the midpoint grid of `[0, 1]`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::SymEigen;

/// Eigenvalues below `CLAMP_REL * max` are set to zero.
pub const CLAMP_REL: f64 = 1e-12;

pub enum Kernel {
    /// `K1(x, x') = x x' + exp(-8 (x - x')^2)`.
    K1,
    /// Brownian bridge `K2(x, x') = min(x, x') - x x'`.
    K2,
    Custom(Box<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl Kernel {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Kernel::K1 => x * y + (-8.0 * (x - y).powi(2)).exp(),
            Kernel::K2 => x.min(y) - x * y,
            Kernel::Custom(f) => f(x, y),
        }
    }
}

impl std::fmt::Debug for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::K1 => write!(f, "K1"),
            Kernel::K2 => write!(f, "K2"),
            Kernel::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MercerDecomposition {
    pub grid: Vec<f64>,
    /// Nonincreasing, nonnegative.
    pub eigenvalues: Vec<f64>,
    /// Column `k` holds `phi_k` on the grid, orthonormal under weights `1/n`.
    pub eigenfunctions: DMatrix<f64>,
}

impl MercerDecomposition {
    pub fn weight(&self) -> f64 {
        1.0 / self.grid.len() as f64
    }

    /// `max_ij |K_ij - sum_k lambda_k phi_k(x_i) phi_k(x_j)|`.
    pub fn reconstruction_error(&self, gram: &DMatrix<f64>) -> f64 {
        let mut scaled = self.eigenfunctions.clone();
        for (k, lam) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(*lam);
        }
        let recon = scaled * self.eigenfunctions.transpose();
        (gram - recon).amax()
    }

    /// Number of eigenvalues that survived clamping.
    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().filter(|v| **v > 0.0).count()
    }
}

pub fn midpoint_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
}

pub fn kernel_gram(kernel: &Kernel, grid: &[f64]) -> DMatrix<f64> {
    let n = grid.len();
    DMatrix::from_fn(n, n, |i, j| kernel.eval(grid[i], grid[j]))
}

pub fn mercer_decompose(kernel: &Kernel, grid_n: usize) -> Result<MercerDecomposition> {
    if grid_n < 16 {
        return Err(Error::Precondition(format!("grid_n must be >= 16, got {grid_n}")));
    }
    let grid = midpoint_grid(grid_n);
    let gram = kernel_gram(kernel, &grid);
    mercer_decompose_gram(grid, &gram)
}

/// Decomposes a kernel already evaluated on the midpoint grid.
pub fn mercer_decompose_gram(grid: Vec<f64>, gram: &DMatrix<f64>) -> Result<MercerDecomposition> {
    let n = grid.len();
    if gram.nrows() != n || gram.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: gram.nrows() });
    }
    let scale = gram.amax();
    let asym = (gram - gram.transpose()).amax();
    if asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!("kernel matrix is not symmetric (max asymmetry {asym:e})")));
    }
    let eig = SymEigen::new(&(gram / n as f64))?;
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let eigenvalues: Vec<f64> = eig.values.iter().map(|&v| if v < CLAMP_REL * top { 0.0 } else { v }).collect();
    let eigenfunctions = eig.vectors * (n as f64).sqrt();
    Ok(MercerDecomposition { grid, eigenvalues, eigenfunctions })
}
