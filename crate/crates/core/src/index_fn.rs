//! Index functions: continuous, strictly increasing, vanishing at zero.
//!
//! Powers, logarithmic factors and their products cover every function the
//! rest of the crate needs (source functions, link functions, benchmark
//! smoothness, and quotients like `t / rho(t)` written as products of powers).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IndexFunctionSpec {
    /// `t^exponent`. Negative exponents are allowed as factors of a product.
    Power {
        exponent: f64,
    },
    /// `t^p * log(1/t)^(-nu)`, meaningful for `0 < t < 1`.
    Log {
        p: f64,
        nu: f64,
    },
    Product {
        factors: Vec<IndexFunctionSpec>,
    },
}

impl IndexFunctionSpec {
    pub fn power(exponent: f64) -> Self {
        IndexFunctionSpec::Power { exponent }
    }

    pub fn identity() -> Self {
        Self::power(1.0)
    }

    pub fn log(p: f64, nu: f64) -> Self {
        IndexFunctionSpec::Log { p, nu }
    }

    /// `t / self(t)`.
    pub fn complement(&self) -> Self {
        match self.power_exponent() {
            Some(e) => Self::power(1.0 - e),
            None => IndexFunctionSpec::Product { factors: vec![Self::power(1.0), self.reciprocal()] },
        }
    }

    /// `1 / self(t)`; only usable as a factor.
    pub fn reciprocal(&self) -> Self {
        match self {
            IndexFunctionSpec::Power { exponent } => Self::power(-exponent),
            IndexFunctionSpec::Log { p, nu } => IndexFunctionSpec::Product { factors: vec![Self::log(-p, -nu)] },
            IndexFunctionSpec::Product { factors } => {
                IndexFunctionSpec::Product { factors: factors.iter().map(|f| f.reciprocal()).collect() }
            }
        }
    }

    /// `self(t)^k`.
    pub fn powf(&self, k: f64) -> Self {
        match self {
            IndexFunctionSpec::Power { exponent } => Self::power(exponent * k),
            IndexFunctionSpec::Log { p, nu } => Self::log(p * k, nu * k),
            IndexFunctionSpec::Product { factors } => {
                IndexFunctionSpec::Product { factors: factors.iter().map(|f| f.powf(k)).collect() }
            }
        }
    }

    /// Exponent when the function is a pure power (products of powers fold).
    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            IndexFunctionSpec::Power { exponent } => Some(*exponent),
            IndexFunctionSpec::Log { .. } => None,
            IndexFunctionSpec::Product { factors } => {
                factors.iter().map(|f| f.power_exponent()).try_fold(0.0, |acc, e| e.map(|e| acc + e))
            }
        }
    }

    fn leading_exponent(&self) -> f64 {
        match self {
            IndexFunctionSpec::Power { exponent } => *exponent,
            IndexFunctionSpec::Log { p, .. } => *p,
            IndexFunctionSpec::Product { factors } => factors.iter().map(|f| f.leading_exponent()).sum(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t == 0.0 {
            let lead = self.leading_exponent();
            return if lead > 0.0 {
                0.0
            } else if lead == 0.0 && matches!(self, IndexFunctionSpec::Power { .. }) {
                1.0
            } else if lead == 0.0 {
                // t^0 log(1/t)^(-nu) -> 0 for nu > 0
                0.0
            } else {
                f64::INFINITY
            };
        }
        match self {
            IndexFunctionSpec::Power { exponent } => t.powf(*exponent),
            IndexFunctionSpec::Log { p, nu } => t.powf(*p) * (1.0 / t).ln().powf(-nu),
            IndexFunctionSpec::Product { factors } => {
                if let Some(e) = self.power_exponent() {
                    t.powf(e)
                } else {
                    factors.iter().map(|f| f.eval(t)).product()
                }
            }
        }
    }

    /// Verifies `phi(0) = 0` and strict increase on the (sorted) grid.
    pub fn check_valid(&self, grid: &[f64]) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return Err(Error::Precondition(format!("index function {self:?} does not vanish at 0")));
        }
        let mut prev: Option<(f64, f64)> = None;
        for &t in grid.iter().filter(|t| **t > 0.0) {
            let v = self.eval(t);
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Precondition(format!(
                    "index function {self:?} is not positive and finite at t={t}"
                )));
            }
            if let Some((pt, pv)) = prev {
                if t > pt && v <= pv {
                    return Err(Error::Precondition(format!(
                        "index function {self:?} is not strictly increasing near t={t}"
                    )));
                }
            }
            prev = Some((t, v));
        }
        Ok(())
    }

    /// `t / phi(t)` nondecreasing on the grid.
    pub fn is_sub_linear(&self, grid: &[f64]) -> bool {
        let mut prev = f64::NEG_INFINITY;
        for &t in grid.iter().filter(|t| **t > 0.0) {
            let q = t / self.eval(t);
            if q < prev * (1.0 - 1e-12) {
                return false;
            }
            prev = q;
        }
        true
    }

    /// Numeric inverse on `(0, t_hi]` by bisection; `None` outside the range.
    pub fn inverse(&self, value: f64, t_hi: f64) -> Option<f64> {
        if value <= 0.0 {
            return Some(0.0);
        }
        if self.eval(t_hi) < value {
            return None;
        }
        let (mut lo, mut hi) = (0.0_f64, t_hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < value {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// `n` log-spaced points in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// `n` equally spaced points in `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
