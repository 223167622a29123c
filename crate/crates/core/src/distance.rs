//! Distance functions measuring how far the truth is from a smoothness ball,
//! computed exactly in the diagonal model through a one-dimensional KKT root.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::index_fn::IndexFunctionSpec;
use crate::spectral_model::{SmoothnessSpec, SpectralProblem};
use crate::textfmt::fmt_sig;

const ROOT_TOL: f64 = 1e-12;
const MAX_BISECT: usize = 200;
const MAX_DOUBLINGS: usize = 2100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub d_value: f64,
    pub minimizer_v: Vec<f64>,
    /// KKT multiplier; zero when the constraint is inactive.
    pub mu: f64,
}

/// Solves `||v(mu)|| = R` for a `v(mu)` whose norm strictly decreases in `mu`.
fn kkt_root(radius: f64, v_of: impl Fn(f64) -> Vec<f64>) -> Result<(f64, Vec<f64>)> {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let v0 = v_of(0.0);
    if norm(&v0) <= radius {
        return Ok((0.0, v0));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut doublings = 0;
    while norm(&v_of(hi)) >= radius {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::NoConvergence(format!("could not bracket the multiplier for R = {radius}")));
        }
    }
    let tol = ROOT_TOL * radius.max(1.0);
    for _ in 0..MAX_BISECT {
        let mid = 0.5 * (lo + hi);
        let v = v_of(mid);
        let gap = norm(&v) - radius;
        if gap.abs() <= tol || hi - lo <= f64::EPSILON * hi {
            return Ok((mid, v));
        }
        if gap > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let v = v_of(mid);
    let gap = norm(&v) - radius;
    if gap.abs() <= tol {
        Ok((mid, v))
    } else {
        Err(Error::NoConvergence(format!("multiplier bisection stalled with gap {gap:e}")))
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return domain(format!("radius R must be positive, got {radius}"));
    }
    Ok(())
}

/// `d(R) = inf { ||f_true - L^{-1} v|| : ||v|| <= R }`.
pub fn distance_fn(problem: &SpectralProblem, radius: f64) -> Result<DistanceResult> {
    check_radius(radius)?;
    let (l, f) = (problem.l(), problem.f_true());
    let (mu, v) = kkt_root(radius, |mu| l.iter().zip(f).map(|(l, f)| l * f / (1.0 + mu * l * l)).collect())?;
    let d_value = if mu == 0.0 {
        0.0
    } else {
        f.iter().zip(&v).zip(l).map(|((f, v), l)| (f - v / l).powi(2)).sum::<f64>().sqrt()
    };
    Ok(DistanceResult { d_value, minimizer_v: v, mu })
}

/// `d_q(R) = inf { ||L (f - f_true)|| : f = L^{-q} v, ||v|| <= R }`.
pub fn distance_fn_q(problem: &SpectralProblem, q: f64, radius: f64) -> Result<DistanceResult> {
    check_radius(radius)?;
    if !(q > 1.0) {
        return domain(format!("q must exceed 1, got {q}"));
    }
    let (l, f) = (problem.l(), problem.f_true());
    let (mu, v) = kkt_root(radius, |mu| {
        l.iter().zip(f).map(|(l, f)| l.powf(2.0 - q) * f / (l.powf(2.0 - 2.0 * q) + mu)).collect()
    })?;
    let d_value = if mu == 0.0 {
        0.0
    } else {
        f.iter().zip(&v).zip(l).map(|((f, v), l)| (l * (l.powf(-q) * v - f)).powi(2)).sum::<f64>().sqrt()
    };
    Ok(DistanceResult { d_value, minimizer_v: v, mu })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceBound {
    pub value: f64,
    /// `theta_r >= 1`: the benchmark smoothness holds and the bound is zero.
    pub benchmark_attained: bool,
}

/// `R (R_dagger / R)^{1/(1-r)}` for `theta(t) = t^r`.
pub fn distance_bound(theta_r: f64, r_dagger: f64, radius: f64) -> Result<DistanceBound> {
    if !(theta_r > 0.0) || !(r_dagger > 0.0) {
        return domain(format!("need theta_r > 0 and R_dagger > 0, got {theta_r}, {r_dagger}"));
    }
    if radius < r_dagger {
        return domain(format!("radius {radius} is below R_dagger = {r_dagger}"));
    }
    if theta_r >= 1.0 {
        return Ok(DistanceBound { value: 0.0, benchmark_attained: true });
    }
    let value = radius * (r_dagger / radius).powf(1.0 / (1.0 - theta_r));
    Ok(DistanceBound { value, benchmark_attained: false })
}

/// `R (iota/theta)^{-1}(R_dagger / R)` for a general sub-linear `theta`, via the
/// numeric inverse on `(0, t_hi]`.
pub fn distance_bound_general(theta: &IndexFunctionSpec, r_dagger: f64, radius: f64, t_hi: f64) -> Result<f64> {
    if radius < r_dagger {
        return domain(format!("radius {radius} is below R_dagger = {r_dagger}"));
    }
    let quotient = theta.complement();
    let arg = quotient
        .inverse(r_dagger / radius, t_hi)
        .ok_or_else(|| Error::Precondition(format!("(t/theta)^-1 undefined at {}", r_dagger / radius)))?;
    Ok(radius * arg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoothnessCase {
    Oversmoothing,
    Regular,
}

/// Balancing radius `R(lambda) = R_dagger theta(rho(lambda)) / rho(lambda)^k`
/// with `k = 1` (oversmoothing) or `k = q` (regular).
pub fn r_of_lambda(spec: &SmoothnessSpec, lambda: f64, case: SmoothnessCase) -> f64 {
    let k = match case {
        SmoothnessCase::Oversmoothing => 1.0,
        SmoothnessCase::Regular => spec.q,
    };
    spec.r_dagger * lambda.powf(spec.a_link * (spec.r - k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistanceKind {
    D,
    Dq { q: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceCurve {
    pub rs: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: DistanceKind,
}

impl DistanceCurve {
    pub fn compute(problem: &SpectralProblem, rs: &[f64], kind: DistanceKind) -> Result<Self> {
        let values = rs
            .iter()
            .map(|&r| match kind {
                DistanceKind::D => distance_fn(problem, r).map(|d| d.d_value),
                DistanceKind::Dq { q } => distance_fn_q(problem, q, r).map(|d| d.d_value),
            })
            .collect::<Result<_>>()?;
        Ok(DistanceCurve { rs: rs.to_vec(), values, kind })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("R,d_value\n");
        for (r, v) in self.rs.iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", fmt_sig(*r, 15), fmt_sig(*v, 15)));
        }
        out
    }
}
