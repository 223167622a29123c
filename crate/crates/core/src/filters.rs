//! Spectral regularization families `g_lambda` and grid checks of their
//! defining constants, qualification and covering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_fn::{linear_grid, log_grid, IndexFunctionSpec};

/// Absolute slack used when comparing observed suprema with declared constants.
pub const CONSTANT_TOL: f64 = 1e-9;

/// Landweber iteration cap used when none is configured.
pub const DEFAULT_NU_MAX: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterId {
    #[serde(rename = "tikhonov")]
    Tikhonov,
    #[serde(rename = "cutoff")]
    SpectralCutoff,
    #[serde(rename = "landweber")]
    Landweber,
}

impl FilterId {
    pub fn name(self) -> &'static str {
        match self {
            FilterId::Tikhonov => "tikhonov",
            FilterId::SpectralCutoff => "cutoff",
            FilterId::Landweber => "landweber",
        }
    }
}

impl std::str::FromStr for FilterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tikhonov" => Ok(FilterId::Tikhonov),
            "cutoff" => Ok(FilterId::SpectralCutoff),
            "landweber" => Ok(FilterId::Landweber),
            other => Err(Error::Parse(format!("unknown filter id {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Qualification {
    Finite(f64),
    Infinite,
}

impl Qualification {
    pub fn finite(self) -> Option<f64> {
        match self {
            Qualification::Finite(p) => Some(p),
            Qualification::Infinite => None,
        }
    }
}

/// A regularization scheme with its declared constants `D, B, gamma, p, gamma_p`
/// valid on `[0, t_max]` for `0 < lambda <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterFamily {
    pub id: FilterId,
    #[serde(rename = "D")]
    pub d_const: f64,
    #[serde(rename = "B")]
    pub b_const: f64,
    pub gamma: f64,
    pub qualification: Qualification,
    pub gamma_p: f64,
    pub t_max: f64,
    pub nu_max: u64,
}

impl FilterFamily {
    pub fn tikhonov(t_max: f64) -> Self {
        FilterFamily {
            id: FilterId::Tikhonov,
            d_const: 1.0,
            b_const: 1.0,
            gamma: 1.0,
            qualification: Qualification::Finite(1.0),
            gamma_p: 1.0,
            t_max,
            nu_max: 0,
        }
    }

    pub fn spectral_cutoff(t_max: f64) -> Self {
        FilterFamily {
            id: FilterId::SpectralCutoff,
            d_const: 1.0,
            b_const: 1.0,
            gamma: 1.0,
            qualification: Qualification::Infinite,
            gamma_p: 1.0,
            t_max,
            nu_max: 0,
        }
    }

    /// Landweber on `[0, 1]` with declared qualification `p` and the envelope
    /// `gamma_p = (p/e)^p`.
    pub fn landweber(p: f64, nu_max: u64) -> Self {
        FilterFamily {
            id: FilterId::Landweber,
            d_const: 1.0,
            b_const: 2.0,
            gamma: 1.0,
            qualification: Qualification::Finite(p),
            gamma_p: landweber_gamma_p(p),
            t_max: 1.0,
            nu_max,
        }
    }

    /// Default family for an id; Landweber is declared with qualification 1.
    pub fn from_id(id: FilterId, t_max: f64, nu_max: Option<u64>) -> Self {
        match id {
            FilterId::Tikhonov => Self::tikhonov(t_max),
            FilterId::SpectralCutoff => Self::spectral_cutoff(t_max),
            FilterId::Landweber => Self::landweber(1.0, nu_max.unwrap_or(DEFAULT_NU_MAX)),
        }
    }

    /// Declared `gamma_p` for an arbitrary `p` (used when `p` differs from the
    /// declared qualification, e.g. cutoff at any `p`).
    pub fn gamma_p_for(&self, p: f64) -> f64 {
        match self.id {
            FilterId::Tikhonov => 1.0,
            FilterId::SpectralCutoff => 1.0,
            FilterId::Landweber => landweber_gamma_p(p),
        }
    }

    /// Landweber iteration count `nu = ceil(1/lambda)`, capped at `nu_max`.
    pub fn landweber_steps(&self, lambda: f64) -> u64 {
        ((1.0 / lambda).ceil() as u64).clamp(1, self.nu_max.max(1))
    }

    /// `g_lambda(t)` without argument checks.
    pub fn g(&self, lambda: f64, t: f64) -> f64 {
        match self.id {
            FilterId::Tikhonov => 1.0 / (t + lambda),
            FilterId::SpectralCutoff => {
                if t >= lambda {
                    1.0 / t
                } else {
                    0.0
                }
            }
            FilterId::Landweber => {
                let nu = self.landweber_steps(lambda) as f64;
                if t == 0.0 {
                    nu
                } else {
                    -(nu * (-t).ln_1p()).exp_m1() / t
                }
            }
        }
    }

    /// `r_lambda(t) = 1 - t g_lambda(t)` without argument checks.
    pub fn r(&self, lambda: f64, t: f64) -> f64 {
        match self.id {
            FilterId::Tikhonov => lambda / (t + lambda),
            FilterId::SpectralCutoff => {
                if t >= lambda {
                    0.0
                } else {
                    1.0
                }
            }
            FilterId::Landweber => {
                let nu = self.landweber_steps(lambda) as f64;
                (nu * (-t).ln_1p()).exp()
            }
        }
    }

    fn check_args(&self, lambda: f64, spectrum: &[f64]) -> Result<()> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        for &t in spectrum {
            if !(t >= 0.0) {
                return Err(Error::Domain(format!("spectrum entry {t} is negative")));
            }
            if self.id == FilterId::Landweber && t > self.t_max * (1.0 + 1e-12) {
                return Err(Error::Domain(format!(
                    "spectrum entry {t} exceeds t_max = {} (Landweber diverges)",
                    self.t_max
                )));
            }
        }
        Ok(())
    }
}

fn landweber_gamma_p(p: f64) -> f64 {
    (p / std::f64::consts::E).powf(p)
}

pub fn apply_filter(filter: &FilterFamily, lambda: f64, spectrum: &[f64]) -> Result<Vec<f64>> {
    filter.check_args(lambda, spectrum)?;
    Ok(spectrum.iter().map(|&t| filter.g(lambda, t)).collect())
}

pub fn residual(filter: &FilterFamily, lambda: f64, spectrum: &[f64]) -> Result<Vec<f64>> {
    filter.check_args(lambda, spectrum)?;
    Ok(spectrum.iter().map(|&t| filter.r(lambda, t)).collect())
}

/// 400 log-spaced values in `[1e-6, 1]`.
pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(1e-6, 1.0, 400)
}

/// 1000 equally spaced values in `[0, t_max]`.
pub fn default_t_grid(t_max: f64) -> Vec<f64> {
    linear_grid(0.0, t_max, 1000)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    /// `sup |t g(t)|`.
    pub d_obs: f64,
    /// `sup_lambda lambda * sup_t |g(t)|`.
    pub b_obs: f64,
    /// `sup |r(t)|`.
    pub gamma_obs: f64,
    pub pass: bool,
}

pub fn check_regularization_constants(filter: &FilterFamily, lambda_grid: &[f64], t_grid: &[f64]) -> ConstantsReport {
    let (mut d_obs, mut b_obs, mut gamma_obs) = (0.0_f64, 0.0_f64, 0.0_f64);
    for &lambda in lambda_grid {
        let mut g_sup = 0.0_f64;
        for &t in t_grid {
            let g = filter.g(lambda, t);
            d_obs = d_obs.max((t * g).abs());
            g_sup = g_sup.max(g.abs());
            gamma_obs = gamma_obs.max(filter.r(lambda, t).abs());
        }
        b_obs = b_obs.max(lambda * g_sup);
    }
    let pass = d_obs <= filter.d_const + CONSTANT_TOL
        && b_obs <= filter.b_const + CONSTANT_TOL
        && gamma_obs <= filter.gamma + CONSTANT_TOL;
    ConstantsReport { d_obs, b_obs, gamma_obs, pass }
}

/// `max |r_lambda(t)| t^p / lambda^p` over the grids.
pub fn check_qualification(filter: &FilterFamily, p: f64, lambda_grid: &[f64], t_grid: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for &lambda in lambda_grid {
        for &t in t_grid {
            let v = filter.r(lambda, t).abs() * (t / lambda).powf(p);
            worst = worst.max(v);
        }
    }
    worst
}

/// Whether `t^p / phi(t)` is nondecreasing on the positive part of the grid.
pub fn check_covering(p: f64, phi: &IndexFunctionSpec, t_grid: &[f64]) -> bool {
    let mut prev = f64::NEG_INFINITY;
    let mut pts: Vec<f64> = t_grid.iter().copied().filter(|t| *t > 0.0).collect();
    pts.sort_by(f64::total_cmp);
    for t in pts {
        let ratio = t.powf(p) / phi.eval(t);
        if ratio < prev * (1.0 - 1e-12) {
            return false;
        }
        prev = ratio;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropRegularizationReport {
    /// `max |r_lambda(s)| phi(s) / phi(lambda)`.
    pub max_ratio_1: f64,
    /// `max |r_lambda(s)| phi(lambda + s) / phi(lambda)`.
    pub max_ratio_2: f64,
    /// `c_p = max(gamma, gamma_p)`.
    pub bound_1: f64,
    /// `2^p c_p`.
    pub bound_2: f64,
    /// Qualification exponent used for the bounds.
    pub p: f64,
    pub pass: bool,
}

/// Checks `|r(s)| phi(s) <= c_p phi(lambda)` and
/// `|r(s)| phi(lambda + s) <= 2^p c_p phi(lambda)` on the grids. For infinite
/// qualification the smallest integer `p >= 1` covering `phi` is used.
pub fn check_prop_regularization(
    filter: &FilterFamily,
    phi: &IndexFunctionSpec,
    lambda_grid: &[f64],
    t_grid: &[f64],
) -> Result<PropRegularizationReport> {
    let cover_grid: Vec<f64> = if t_grid.iter().filter(|t| **t > 0.0).count() >= 2 {
        t_grid.to_vec()
    } else {
        linear_grid(0.0, filter.t_max, 1000)
    };
    let p = match filter.qualification {
        Qualification::Finite(p) => {
            if !check_covering(p, phi, &cover_grid) {
                return Err(Error::Precondition(format!(
                    "qualification p = {p} of {} does not cover {phi:?}",
                    filter.id.name()
                )));
            }
            p
        }
        Qualification::Infinite => (1..=64)
            .map(f64::from)
            .find(|&p| check_covering(p, phi, &cover_grid))
            .ok_or_else(|| Error::Precondition(format!("no integer p <= 64 covers {phi:?}")))?,
    };
    let c_p = filter.gamma.max(filter.gamma_p_for(p));
    let (bound_1, bound_2) = (c_p, 2f64.powf(p) * c_p);

    let (mut r1, mut r2) = (0.0_f64, 0.0_f64);
    for &lambda in lambda_grid {
        let phi_l = phi.eval(lambda);
        for &s in t_grid {
            let r = filter.r(lambda, s).abs();
            r1 = r1.max(r * phi.eval(s) / phi_l);
            r2 = r2.max(r * phi.eval(lambda + s) / phi_l);
        }
    }
    let pass = r1 <= bound_1 + CONSTANT_TOL && r2 <= bound_2 + CONSTANT_TOL;
    Ok(PropRegularizationReport { max_ratio_1: r1, max_ratio_2: r2, bound_1, bound_2, p, pass })
}
