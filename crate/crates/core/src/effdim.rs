//! Effective dimensions `N(lambda) = Tr((T + lambda)^{-1} T)` of the population
//! operators and the checks built on them.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::index_fn::{log_grid, IndexFunctionSpec};
use crate::spectral_model::SpectralProblem;
use crate::textfmt::fmt_sig;

/// Report threshold for `N_L(lambda / rho^2(lambda)) / N_T(lambda)`.
pub const DEFAULT_RELATION_CEILING: f64 = 8.0;

/// Points per decade of the default lambda grids.
pub const POINTS_PER_DECADE: usize = 40;

pub fn effdim(spectrum: &[f64], lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    Ok(effdim_unchecked(spectrum, lambda))
}

pub(crate) fn effdim_unchecked(spectrum: &[f64], lambda: f64) -> f64 {
    spectrum.iter().map(|t| t / (t + lambda)).sum()
}

/// Log-spaced grid on `[lo, hi]` with [`POINTS_PER_DECADE`] points per decade.
pub fn default_lambda_grid(lo: f64, hi: f64) -> Vec<f64> {
    let decades = (hi / lo).log10().max(0.0);
    let n = ((decades * POINTS_PER_DECADE as f64).ceil() as usize).max(1) + 1;
    log_grid(lo, hi, n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffDimCurve {
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub spectrum_id: String,
}

impl EffDimCurve {
    pub fn compute(spectrum: &[f64], lambdas: &[f64], spectrum_id: impl Into<String>) -> Result<Self> {
        let values = lambdas.iter().map(|&l| effdim(spectrum, l)).collect::<Result<_>>()?;
        Ok(EffDimCurve { lambdas: lambdas.to_vec(), values, spectrum_id: spectrum_id.into() })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,n_effective\n");
        for (l, v) in self.lambdas.iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", fmt_sig(*l, 15), fmt_sig(*v, 15)));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffDimFit {
    pub b_hat: f64,
    pub stderr: f64,
    /// Intercept of `log N = intercept - b log lambda`.
    pub intercept: f64,
    /// Slopes over the lower and upper halves of the range disagree, i.e. the
    /// curve is not a clean power law (log-type effective dimension).
    pub poor_power_fit: bool,
}

/// Ordinary least squares `y = alpha + beta x`; returns `(alpha, beta, stderr(beta))`.
pub(crate) fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let beta = sxy / sxx;
    let alpha = my - beta * mx;
    let stderr = if x.len() > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - alpha - beta * a).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (alpha, beta, stderr)
}

/// Least-squares decay exponent of `N(lambda)` on a log grid of `n_points`.
pub fn fit_effdim_exponent(spectrum: &[f64], lambda_lo: f64, lambda_hi: f64, n_points: usize) -> Result<EffDimFit> {
    if !(lambda_lo > 0.0 && lambda_lo < lambda_hi && lambda_hi <= 1.0) {
        return domain(format!("need 0 < lambda_lo < lambda_hi <= 1, got [{lambda_lo}, {lambda_hi}]"));
    }
    if n_points < 4 {
        return domain(format!("need at least 4 fit points, got {n_points}"));
    }
    let d = spectrum.len();
    let n_lo = effdim(spectrum, lambda_lo)?;
    if n_lo >= d as f64 / 2.0 {
        return Err(Error::Precondition(format!(
            "truncation binds: N({lambda_lo:e}) = {n_lo:.3} >= d/2 = {}; increase d or raise lambda_lo",
            d as f64 / 2.0
        )));
    }
    let lambdas = log_grid(lambda_lo, lambda_hi, n_points);
    let x: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let y: Vec<f64> = lambdas.iter().map(|&l| effdim_unchecked(spectrum, l).ln()).collect();
    let (alpha, beta, stderr) = ols(&x, &y);
    let half = n_points / 2;
    let (_, beta_lo, _) = ols(&x[..=half], &y[..=half]);
    let (_, beta_hi, _) = ols(&x[half..], &y[half..]);
    let spread = (beta_lo - beta_hi).abs();
    let poor_power_fit = spread > 0.02 && spread > 0.25 * beta.abs();
    Ok(EffDimFit { b_hat: -beta, stderr, intercept: alpha, poor_power_fit })
}

/// Prefactor `c` in `N(lambda) ~ c lambda^{-b}` for a fixed exponent `b`,
/// the geometric mean of `N(lambda) lambda^b` over the grid.
pub fn effdim_prefactor(spectrum: &[f64], b: f64, lambdas: &[f64]) -> Result<f64> {
    if lambdas.is_empty() {
        return domain("empty lambda grid");
    }
    let mut acc = 0.0;
    for &l in lambdas {
        acc += effdim(spectrum, l)?.ln() + b * l.ln();
    }
    Ok((acc / lambdas.len() as f64).exp())
}

/// Smallest `C` with `t^{-1} sum_{s_j < t} s_j <= C #{j : s_j >= t}` over the
/// grid points where the count is positive.
pub fn check_tail_condition(spectrum: &[f64], t_grid: &[f64]) -> Result<f64> {
    let mut sorted: Vec<f64> = spectrum.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    // suffix sums of the descending spectrum
    let mut tail = vec![0.0; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        tail[i] = tail[i + 1] + sorted[i];
    }
    let mut c_min: Option<f64> = None;
    for &t in t_grid {
        if !(t > 0.0) {
            continue;
        }
        let count = sorted.partition_point(|s| *s >= t);
        if count == 0 {
            continue;
        }
        let ratio = tail[count] / t / count as f64;
        c_min = Some(c_min.map_or(ratio, |c: f64| c.max(ratio)));
    }
    c_min.ok_or_else(|| Error::Precondition("no grid point lies in (0, max spectrum]".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffDimRelation {
    pub max_ratio: f64,
    pub pass: bool,
    pub ceiling: f64,
    /// `(lambda, ratio)` for every evaluated cell.
    pub cells: Vec<(f64, f64)>,
    pub skipped: usize,
}

/// Grid check of `N_L(lambda / rho^2(lambda)) <= C N_T(lambda)`.
pub fn check_effdim_relation(
    problem: &SpectralProblem,
    rho: &IndexFunctionSpec,
    lambda_grid: &[f64],
    ceiling: f64,
) -> Result<EffDimRelation> {
    let t = problem.t_spectrum();
    let l_nu = problem.l_nu_spectrum();
    let l_norm = l_nu.iter().copied().fold(0.0, f64::max);
    let mut cells = Vec::with_capacity(lambda_grid.len());
    let mut skipped = 0;
    for &lambda in lambda_grid {
        let rho_l = rho.eval(lambda);
        let arg = lambda / (rho_l * rho_l);
        if !(arg > 0.0) || !arg.is_finite() || arg > l_norm {
            log::warn!(
                "effective dimension relation: lambda = {lambda:e} maps to {arg:e} outside (0, ||L_nu||], skipped"
            );
            skipped += 1;
            continue;
        }
        let ratio = effdim(&l_nu, arg)? / effdim(t, lambda)?;
        cells.push((lambda, ratio));
    }
    if cells.is_empty() {
        return Err(Error::Precondition("every lambda cell was skipped".into()));
    }
    let max_ratio = cells.iter().map(|c| c.1).fold(0.0, f64::max);
    Ok(EffDimRelation { max_ratio, pass: max_ratio <= ceiling, ceiling, cells, skipped })
}
