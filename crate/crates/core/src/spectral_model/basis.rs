use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orthonormal basis of L2([0,1], uniform).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `e_1 = 1`, `e_j(x) = sqrt(2) cos((j-1) pi x)`.
    #[default]
    Cosine,
}

impl Basis {
    /// Evaluates the 1-based basis function `e_j` at `x`.
    pub fn eval(self, j: usize, x: f64) -> Result<f64> {
        if j == 0 {
            return Err(Error::IndexOutOfRange { index: j, max: usize::MAX });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
        }
        Ok(self.eval_unchecked(j, x))
    }

    pub(crate) fn eval_unchecked(self, j: usize, x: f64) -> f64 {
        match self {
            Basis::Cosine => {
                if j == 1 {
                    1.0
                } else {
                    std::f64::consts::SQRT_2 * ((j - 1) as f64 * std::f64::consts::PI * x).cos()
                }
            }
        }
    }

    /// Writes `e_1(x), ..., e_d(x)` into `out` (len d).
    pub(crate) fn fill_row(self, x: f64, out: &mut [f64]) {
        match self {
            Basis::Cosine => {
                let (s1, c1) = (std::f64::consts::PI * x).sin_cos();
                let (mut c, mut s) = (1.0_f64, 0.0_f64);
                for (k, o) in out.iter_mut().enumerate() {
                    *o = if k == 0 { 1.0 } else { std::f64::consts::SQRT_2 * c };
                    let cn = c * c1 - s * s1;
                    s = s * c1 + c * s1;
                    c = cn;
                    // re-anchor periodically to bound rotation drift
                    if k % 64 == 63 {
                        let (sk, ck) = ((k + 1) as f64 * std::f64::consts::PI * x).sin_cos();
                        c = ck;
                        s = sk;
                    }
                }
            }
        }
    }
}

/// `c_n = (1/m) sum_i cos(n pi x_i)` for `n = 0..=n_max`.
pub(crate) fn cosine_moments(xs: &[f64], n_max: usize) -> Vec<f64> {
    let mut acc = vec![0.0; n_max + 1];
    let mut row = vec![0.0; n_max + 1];
    for &x in xs {
        Basis::Cosine.fill_row(x, &mut row);
        acc[0] += 1.0;
        for n in 1..=n_max {
            acc[n] += row[n] * std::f64::consts::FRAC_1_SQRT_2;
        }
    }
    let m = xs.len() as f64;
    acc.iter_mut().for_each(|v| *v /= m);
    acc
}

/// `(1/m) sum_i e_j(x_i) e_k(x_i)` for the cosine basis, from the moments.
pub(crate) fn cosine_gram_entry(moments: &[f64], j: usize, k: usize) -> f64 {
    match (j, k) {
        (0, 0) => 1.0,
        (0, k) => std::f64::consts::SQRT_2 * moments[k],
        (j, 0) => std::f64::consts::SQRT_2 * moments[j],
        (j, k) => moments[j.abs_diff(k)] + moments[j + k],
    }
}
