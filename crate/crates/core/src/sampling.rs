//! Data generation, the empirical operators `B_x` and `T_x`, and the spectral
//! estimator `f = L^{-1} g_lambda(T_x) B_x^* y`.
//!
//! Randomness: ChaCha20 keyed by the 64-bit seed; stream 0 drives the design
//! points and stream 1 the standard normal noise, consumed in index order.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, domain, Error, Result};
use crate::filters::{FilterFamily, FilterId};
use crate::index_fn::IndexFunctionSpec;
use crate::linalg::SymEigen;
use crate::spectral_model::{cosine_gram_entry, cosine_moments, Basis, SpectralProblem};
use crate::textfmt::fmt_sig;

/// Relative threshold (times `kappa^2`) below which negative eigenvalues of
/// `T_x` are treated as rounding noise.
pub const PSD_CLAMP_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    #[default]
    RandomUniform,
    MidpointGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub seed: u64,
    pub design: Design,
}

impl Dataset {
    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in self.x.iter().zip(&self.y) {
            out.push_str(&fmt_sig(*x, 15));
            out.push(',');
            out.push_str(&fmt_sig(*y, 15));
            out.push('\n');
        }
        out
    }

    fn validate(&self) -> Result<()> {
        check_len(self.x.len(), self.y.len())?;
        if self.x.is_empty() {
            return domain("dataset is empty");
        }
        if let Some(x) = self.x.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return domain(format!("design point {x} outside [0, 1]"));
        }
        if self.y.iter().any(|y| !y.is_finite()) {
            return Err(Error::NonFinite("observations y".into()));
        }
        Ok(())
    }
}

/// SplitMix64 mix of a base seed with two counters, used to derive
/// independent per-cell seeds for Monte Carlo runs.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z =
        seed.wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15)).wrapping_add(b.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng_stream(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn sample_dataset(problem: &SpectralProblem, m: usize, seed: u64, design: Design) -> Result<Dataset> {
    if m == 0 {
        return domain("sample size m must be at least 1");
    }
    let x: Vec<f64> = match design {
        Design::MidpointGrid => (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect(),
        Design::RandomUniform => {
            let mut rng = rng_stream(seed, 0);
            (0..m).map(|_| rng.gen::<f64>()).collect()
        }
    };
    let sigma = problem.noise().sigma;
    let mut noise = rng_stream(seed, 1);
    let y = regression_values(problem, &x)
        .into_iter()
        .map(|g| {
            let z: f64 = noise.sample(StandardNormal);
            if sigma == 0.0 {
                g
            } else {
                g + sigma * z
            }
        })
        .collect();
    Ok(Dataset { x, y, seed, design })
}

/// Noise-free values `g(x_i) = (A f_true)(x_i)`; points must lie in `[0, 1]`.
pub fn regression_values(problem: &SpectralProblem, x: &[f64]) -> Vec<f64> {
    let coef: Vec<f64> = problem.a().iter().zip(problem.f_true()).map(|(a, f)| a * f).collect();
    let mut row = vec![0.0; problem.d()];
    x.iter()
        .map(|&xi| {
            problem.basis().fill_row(xi, &mut row);
            row.iter().zip(&coef).map(|(e, c)| e * c).sum()
        })
        .collect()
}

/// `w_j = a_j / l_j`, the diagonal of `A L^{-1}`.
fn weights(problem: &SpectralProblem) -> Vec<f64> {
    problem.a().iter().zip(problem.l()).map(|(a, l)| a / l).collect()
}

fn check_points(x: &[f64]) -> Result<()> {
    match x.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        Some(x) => domain(format!("design point {x} outside [0, 1]")),
        None => Ok(()),
    }
}

/// `Phi_ij = (a_j / l_j) e_j(x_i)`, the matrix of `B_x = S_x A L^{-1}`.
pub fn design_matrix(problem: &SpectralProblem, x: &[f64]) -> Result<DMatrix<f64>> {
    check_points(x)?;
    Ok(weighted_design(problem.basis(), &weights(problem), x))
}

fn weighted_design(basis: Basis, w: &[f64], x: &[f64]) -> DMatrix<f64> {
    let d = w.len();
    let mut phi = DMatrix::zeros(x.len(), d);
    let mut row = vec![0.0; d];
    for (i, &xi) in x.iter().enumerate() {
        basis.fill_row(xi, &mut row);
        for j in 0..d {
            phi[(i, j)] = w[j] * row[j];
        }
    }
    phi
}

/// `(1/m) sum_i w_j w_k e_j(x_i) e_k(x_i)` via cosine moments, `O(m d + d^2)`.
fn weighted_gram(w: &[f64], x: &[f64]) -> DMatrix<f64> {
    let d = w.len();
    let moments = cosine_moments(x, 2 * d.saturating_sub(1));
    DMatrix::from_fn(d, d, |j, k| w[j] * w[k] * cosine_gram_entry(&moments, j, k))
}

/// `T_x = B_x^* B_x = (1/m) Phi^T Phi`.
pub fn empirical_cov(problem: &SpectralProblem, x: &[f64]) -> Result<DMatrix<f64>> {
    check_points(x)?;
    if x.is_empty() {
        return domain("empty design");
    }
    Ok(weighted_gram(&weights(problem), x))
}

/// `L_x = S_x^* S_x` in the `A`-weighted basis: `(1/m) sum a_j a_k e_j e_k`.
pub fn empirical_l_cov(problem: &SpectralProblem, x: &[f64]) -> Result<DMatrix<f64>> {
    check_points(x)?;
    if x.is_empty() {
        return domain("empty design");
    }
    Ok(weighted_gram(problem.a(), x))
}

/// `B_x^* y = (1/m) Phi^T y`.
pub fn adjoint_apply(problem: &SpectralProblem, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_len(x.len(), y.len())?;
    check_points(x)?;
    let w = weights(problem);
    let d = w.len();
    let mut acc = vec![0.0; d];
    let mut row = vec![0.0; d];
    for (&xi, &yi) in x.iter().zip(y) {
        problem.basis().fill_row(xi, &mut row);
        for (a, e) in acc.iter_mut().zip(&row) {
            *a += yi * e;
        }
    }
    let m = x.len() as f64;
    Ok(acc.iter().zip(&w).map(|(a, w)| a * w / m).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub f_hat: Vec<f64>,
    pub u_hat: Vec<f64>,
    pub lambda: f64,
    pub filter_id: FilterId,
    pub m: usize,
}

#[derive(Serialize, Deserialize)]
struct EstimateExport {
    lambda: f64,
    filter: FilterId,
    f_hat: Vec<f64>,
}

impl Estimate {
    /// `{"lambda": ..., "filter": ..., "f_hat": [...]}`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&EstimateExport {
            lambda: self.lambda,
            filter: self.filter_id,
            f_hat: self.f_hat.clone(),
        })?)
    }
}

/// Spectral decomposition of `T_x` and the projected data `B_x^* y`, reusable
/// across filters and regularization parameters.
#[derive(Debug, Clone)]
pub struct SpectralSolver {
    l: Vec<f64>,
    kappa_sq: f64,
    m: usize,
    /// Eigenvectors of `T_x` with nonzero weight, as columns (`d x k`).
    vectors: DMatrix<f64>,
    /// Matching eigenvalues of `T_x`, clamped to be nonnegative.
    mu: Vec<f64>,
    /// `V^T B_x^* y`.
    coef: Vec<f64>,
}

impl SpectralSolver {
    pub fn new(problem: &SpectralProblem, data: &Dataset) -> Result<Self> {
        data.validate()?;
        let d = problem.d();
        let m = data.m();
        let kappa_sq = problem.kappa_sq();
        let tol = PSD_CLAMP_REL * kappa_sq;
        let (vectors, mu, coef) = if d <= m {
            let tx = empirical_cov(problem, &data.x)?;
            let mut eig = SymEigen::new(&tx)?;
            eig.clamp_psd(tol)?;
            let b = DVector::from_vec(adjoint_apply(problem, &data.x, &data.y)?);
            let coef = eig.vectors.tr_mul(&b);
            (eig.vectors, eig.values, coef.iter().copied().collect())
        } else {
            let mut phi = design_matrix(problem, &data.x)?;
            let root_m = (m as f64).sqrt();
            phi /= root_m;
            let svd = phi
                .try_svd(true, true, f64::EPSILON, 10_000)
                .ok_or_else(|| Error::Eigen("SVD of the design matrix did not converge".into()))?;
            let u = svd.u.expect("requested U");
            let vt = svd.v_t.expect("requested V^T");
            let y = DVector::from_column_slice(&data.y) / root_m;
            let uty = u.tr_mul(&y);
            let coef: Vec<f64> = svd.singular_values.iter().zip(uty.iter()).map(|(s, c)| s * c).collect();
            let mu: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
            (vt.transpose(), mu, coef)
        };
        Ok(SpectralSolver { l: problem.l().to_vec(), kappa_sq, m, vectors, mu, coef })
    }

    /// Eigenvalues of `T_x` seen by the filter (nonzero part when `m < d`).
    pub fn spectrum(&self) -> &[f64] {
        &self.mu
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Applies `g_lambda` to the spectrum. Landweber is run on `T_x / kappa^2`
    /// so that its spectrum stays inside `[0, 1]`.
    fn filter_values(&self, filter: &FilterFamily, lambda: f64) -> Result<Vec<f64>> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return domain(format!("lambda must be positive, got {lambda}"));
        }
        if filter.id == FilterId::Landweber {
            let c = self.kappa_sq;
            let scaled: Vec<f64> = self.mu.iter().map(|v| (v / c).min(filter.t_max)).collect();
            let g = crate::filters::apply_filter(filter, lambda, &scaled)?;
            Ok(g.iter().map(|g| g / c).collect())
        } else {
            crate::filters::apply_filter(filter, lambda, &self.mu)
        }
    }

    pub fn solve(&self, filter: &FilterFamily, lambda: f64) -> Result<Estimate> {
        let g = self.filter_values(filter, lambda)?;
        let scaled = DVector::from_iterator(self.coef.len(), self.coef.iter().zip(&g).map(|(c, g)| c * g));
        let u = &self.vectors * scaled;
        let u_hat: Vec<f64> = u.iter().copied().collect();
        let f_hat = u_hat.iter().zip(&self.l).map(|(u, l)| u / l).collect();
        Ok(Estimate { f_hat, u_hat, lambda, filter_id: filter.id, m: self.m })
    }

    /// `r_lambda(T_x)` as a dense `d x d` matrix (identity on the null space).
    pub fn residual_operator(&self, filter: &FilterFamily, lambda: f64) -> Result<DMatrix<f64>> {
        let g = self.filter_values(filter, lambda)?;
        let d = self.vectors.nrows();
        let mut vr = self.vectors.clone();
        for (k, (mu, g)) in self.mu.iter().zip(&g).enumerate() {
            vr.column_mut(k).scale_mut(mu * g);
        }
        Ok(DMatrix::identity(d, d) - vr * self.vectors.transpose())
    }
}

pub fn estimate(problem: &SpectralProblem, data: &Dataset, filter: &FilterFamily, lambda: f64) -> Result<Estimate> {
    if !(lambda > 0.0) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    SpectralSolver::new(problem, data)?.solve(filter, lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub h_norm: f64,
    pub prediction_norm: f64,
    pub zeta_norm: Option<f64>,
}

pub fn errors(problem: &SpectralProblem, est: &Estimate, zeta: Option<&IndexFunctionSpec>) -> Result<ErrorNorms> {
    check_len(problem.d(), est.f_hat.len())?;
    let diff: Vec<f64> = est.f_hat.iter().zip(problem.f_true()).map(|(a, b)| a - b).collect();
    let h_norm = diff.iter().map(|e| e * e).sum::<f64>().sqrt();
    let prediction_norm = diff.iter().zip(problem.a()).map(|(e, a)| (a * e).powi(2)).sum::<f64>().sqrt();
    let zeta_norm = zeta.map(|z| {
        diff.iter()
            .zip(problem.t_spectrum())
            .zip(problem.l())
            .map(|((e, t), l)| (z.eval(*t) * l * e).powi(2))
            .sum::<f64>()
            .sqrt()
    });
    Ok(ErrorNorms { h_norm, prediction_norm, zeta_norm })
}
