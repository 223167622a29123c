//! Synthetic inverse problem realized diagonally in a fixed orthonormal basis.
//!
//! `A e_j = a_j e_j` and `L e_j = l_j e_j`, with the design measure uniform on
//! `[0, 1]`. Under that measure the population covariance operators are
//! diagonal: `T_nu` has eigenvalues `(a_j / l_j)^2` and `L_nu` has `a_j^2`.
//! Everything is truncated to `d` modes.

mod basis;
mod mercer;

pub use basis::Basis;
pub(crate) use basis::{cosine_gram_entry, cosine_moments};
pub use mercer::{kernel_gram, mercer_decompose, mercer_decompose_gram, midpoint_grid, Kernel, MercerDecomposition};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, domain, Error, Result};
use crate::index_fn::IndexFunctionSpec;

/// Gaussian observation noise together with the Bernstein constants reported
/// to the probabilistic bounds. For `N(0, sigma^2)` the pair `M = Sigma = sigma`
/// is the documented sufficient choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    #[serde(rename = "M")]
    pub bernstein_m: f64,
    #[serde(rename = "Sigma")]
    pub bernstein_sigma: f64,
}

impl NoiseModel {
    pub fn gaussian(sigma: f64) -> Self {
        NoiseModel { sigma, bernstein_m: sigma, bernstein_sigma: sigma }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return domain(format!("noise sigma must be finite and >= 0, got {}", self.sigma));
        }
        if self.bernstein_m < self.sigma || self.bernstein_sigma < self.sigma {
            return domain(format!(
                "Bernstein constants (M={}, Sigma={}) must dominate sigma={}",
                self.bernstein_m, self.bernstein_sigma, self.sigma
            ));
        }
        Ok(())
    }
}

/// Power-type smoothness: `theta(t) = t^r`, `rho(t) = t^a_link`, `l_j = j^s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessSpec {
    pub r: f64,
    pub a_link: f64,
    pub q: f64,
    #[serde(rename = "R_dagger")]
    pub r_dagger: f64,
    pub s: f64,
}

impl SmoothnessSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.a_link > 0.0 && self.a_link <= 0.5) {
            return domain(format!("a_link must lie in (0, 1/2], got {}", self.a_link));
        }
        if !(self.r > 0.0) {
            return domain(format!("source exponent r must be positive, got {}", self.r));
        }
        if !(self.q >= 1.0) {
            return domain(format!("benchmark exponent q must be >= 1, got {}", self.q));
        }
        if !(self.r_dagger > 0.0) {
            return domain(format!("R_dagger must be positive, got {}", self.r_dagger));
        }
        if !(self.s > 0.0) {
            return domain(format!("scale exponent s must be positive, got {}", self.s));
        }
        Ok(())
    }

    pub fn theta(&self) -> IndexFunctionSpec {
        IndexFunctionSpec::power(self.r)
    }

    pub fn rho(&self) -> IndexFunctionSpec {
        IndexFunctionSpec::power(self.a_link)
    }

    /// `phi = rho^(q-1)`.
    pub fn phi(&self) -> IndexFunctionSpec {
        IndexFunctionSpec::power(self.a_link * (self.q - 1.0))
    }

    /// Polynomial decay exponent `b` of the effective dimension.
    pub fn effdim_exponent(&self) -> f64 {
        self.a_link / self.s
    }
}

/// How the source element `v` (with `f = L^{-r} v`) is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VPattern {
    /// `v_j = R / sqrt(d)`.
    Constant,
    /// `v_j = (-1)^(j-1) R / sqrt(d)`.
    Alternating,
    /// i.i.d. Gaussian, rescaled to norm `R`.
    Seeded(u64),
    /// `v_j` proportional to `j^(-1/2)`, rescaled to norm `R`: the slowest
    /// decay that stays square summable, so the source condition is tight.
    #[default]
    Decaying,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerProblemParams {
    pub s: f64,
    pub a_link: f64,
    pub r: f64,
    pub q: f64,
    #[serde(rename = "R_dagger")]
    pub r_dagger: f64,
    pub d: usize,
    pub sigma: f64,
    #[serde(default)]
    pub v_pattern: VPattern,
}

impl PowerProblemParams {
    /// Regular-case default: `a = 1/4, r = 2, q = 4, s = 1/2` so that `b = 1/2`.
    pub fn default_regular() -> Self {
        PowerProblemParams {
            s: 0.5,
            a_link: 0.25,
            r: 2.0,
            q: 4.0,
            r_dagger: 1.0,
            d: 256,
            sigma: 0.05,
            v_pattern: VPattern::Decaying,
        }
    }

    /// Oversmoothing default: `a = 1/2, r = 1/2, q = 1, s = 1` so that `b = 1/2`.
    pub fn default_oversmoothing() -> Self {
        PowerProblemParams {
            s: 1.0,
            a_link: 0.5,
            r: 0.5,
            q: 1.0,
            r_dagger: 1.0,
            d: 512,
            sigma: 0.05,
            v_pattern: VPattern::Decaying,
        }
    }

    pub fn smoothness(&self) -> SmoothnessSpec {
        SmoothnessSpec { r: self.r, a_link: self.a_link, q: self.q, r_dagger: self.r_dagger, s: self.s }
    }
}

/// Truncated diagonal inverse problem. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct SpectralProblem {
    basis: Basis,
    a: Vec<f64>,
    l: Vec<f64>,
    f_true: Vec<f64>,
    noise: NoiseModel,
    smoothness: Option<SmoothnessSpec>,
    t: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawProblem {
    d: usize,
    basis: Basis,
    a: Vec<f64>,
    l: Vec<f64>,
    f_true: Vec<f64>,
    noise: NoiseModel,
    smoothness: Option<SmoothnessSpec>,
}

impl TryFrom<RawProblem> for SpectralProblem {
    type Error = Error;

    fn try_from(raw: RawProblem) -> Result<Self> {
        check_len(raw.d, raw.a.len())?;
        SpectralProblem::new(raw.basis, raw.a, raw.l, raw.f_true, raw.noise, raw.smoothness)
    }
}

impl From<SpectralProblem> for RawProblem {
    fn from(p: SpectralProblem) -> Self {
        RawProblem {
            d: p.d(),
            basis: p.basis,
            a: p.a,
            l: p.l,
            f_true: p.f_true,
            noise: p.noise,
            smoothness: p.smoothness,
        }
    }
}

impl SpectralProblem {
    pub fn new(
        basis: Basis,
        a: Vec<f64>,
        l: Vec<f64>,
        f_true: Vec<f64>,
        noise: NoiseModel,
        smoothness: Option<SmoothnessSpec>,
    ) -> Result<Self> {
        let d = a.len();
        if d == 0 {
            return domain("truncation dimension must be positive");
        }
        check_len(d, l.len())?;
        check_len(d, f_true.len())?;
        if let Some(j) = a.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return domain(format!("a_{} = {} must be positive and finite", j + 1, a[j]));
        }
        if let Some(j) = l.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return domain(format!("l_{} = {} must be positive and finite", j + 1, l[j]));
        }
        if let Some(j) = l.windows(2).position(|w| w[1] < w[0]) {
            return domain(format!("l must be nondecreasing (l_{} > l_{})", j + 1, j + 2));
        }
        if f_true.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("f_true".into()));
        }
        noise.validate()?;
        if let Some(s) = &smoothness {
            s.validate()?;
        }
        let t: Vec<f64> = a.iter().zip(&l).map(|(a, l)| (a / l).powi(2)).collect();
        if t.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::NonFinite("T_nu eigenvalues".into()));
        }
        Ok(SpectralProblem { basis, a, l, f_true, noise, smoothness, t })
    }

    pub fn d(&self) -> usize {
        self.a.len()
    }
    pub fn basis(&self) -> Basis {
        self.basis
    }
    pub fn a(&self) -> &[f64] {
        &self.a
    }
    pub fn l(&self) -> &[f64] {
        &self.l
    }
    pub fn f_true(&self) -> &[f64] {
        &self.f_true
    }
    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }
    pub fn smoothness(&self) -> Option<&SmoothnessSpec> {
        self.smoothness.as_ref()
    }

    /// Eigenvalues `t_j = (a_j / l_j)^2` of `T_nu`.
    pub fn t_spectrum(&self) -> &[f64] {
        &self.t
    }

    /// Eigenvalues `a_j^2` of `L_nu`.
    pub fn l_nu_spectrum(&self) -> Vec<f64> {
        self.a.iter().map(|a| a * a).collect()
    }

    /// Same problem with a different noise level (Bernstein constants follow).
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        let noise = NoiseModel::gaussian(sigma);
        noise.validate()?;
        Ok(SpectralProblem { noise, ..self.clone() })
    }

    /// Same operators, different true solution.
    pub fn with_f_true(&self, f_true: Vec<f64>) -> Result<Self> {
        SpectralProblem::new(self.basis, self.a.clone(), self.l.clone(), f_true, self.noise, self.smoothness)
    }

    /// `sup_x sum_j w_j e_j(x)^2`; for the cosine basis the sup sits at `x = 0`.
    fn sup_weighted_diag(&self, w: impl Iterator<Item = f64>) -> f64 {
        w.enumerate().map(|(j, w)| w * self.basis.eval_unchecked(j + 1, 0.0).powi(2)).sum()
    }

    /// `kappa^2`: bound on `||B_x||^2` and on the spectrum of `T_x`.
    pub fn kappa_sq(&self) -> f64 {
        self.sup_weighted_diag(self.t.iter().copied())
    }

    /// `kappa_tilde^2 = kappa'^2 = sup_x K(x, x)` with `K = sum_j a_j^2 e_j e_j`.
    pub fn kappa_tilde_sq(&self) -> f64 {
        self.sup_weighted_diag(self.a.iter().map(|a| a * a))
    }

    /// Exponent `b = a_link / s` when the problem carries a smoothness spec.
    pub fn effdim_exponent(&self) -> Option<f64> {
        self.smoothness.map(|s| s.effdim_exponent())
    }

    pub fn eval_basis(&self, j: usize, x: f64) -> Result<f64> {
        if j == 0 || j > self.d() {
            return Err(Error::IndexOutOfRange { index: j, max: self.d() });
        }
        self.basis.eval(j, x)
    }

    /// `g(x) = (A f)(x) = sum_j a_j f_j e_j(x)`.
    pub fn forward_eval(&self, f: &[f64], x: f64) -> Result<f64> {
        check_len(self.d(), f.len())?;
        if !(0.0..=1.0).contains(&x) {
            return domain(format!("x = {x} outside [0, 1]"));
        }
        let mut row = vec![0.0; self.d()];
        self.basis.fill_row(x, &mut row);
        Ok(row.iter().zip(&self.a).zip(f).map(|((e, a), f)| e * a * f).sum())
    }

    /// `||L^s f|| = sqrt(sum_j l_j^(2s) f_j^2)`.
    pub fn hilbert_scale_norm(&self, f: &[f64], s_exp: f64) -> Result<f64> {
        check_len(self.d(), f.len())?;
        Ok(self.l.iter().zip(f).map(|(l, f)| l.powf(2.0 * s_exp) * f * f).sum::<f64>().sqrt())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Builds a problem where the link condition holds with equality:
/// `l_j = j^s`, `a_j = j^(s (1 - 1/(2 a_link)))`, hence `t_j^a_link = l_j^{-1}`,
/// and `f_true = L^{-r} v` with `||v|| = R_dagger`.
pub fn build_power_problem(p: &PowerProblemParams) -> Result<SpectralProblem> {
    if !(p.a_link > 0.0 && p.a_link <= 0.5) {
        return domain(format!("a_link must lie in (0, 1/2], got {}", p.a_link));
    }
    if !(p.s > 0.0) {
        return domain(format!("s must be positive, got {}", p.s));
    }
    if p.d < 2 {
        return domain(format!("d must be at least 2, got {}", p.d));
    }
    let spec = p.smoothness();
    spec.validate()?;

    let d = p.d;
    let a_exp = p.s * (1.0 - 1.0 / (2.0 * p.a_link));
    let l: Vec<f64> = (1..=d).map(|j| (j as f64).powf(p.s)).collect();
    let a: Vec<f64> = (1..=d).map(|j| (j as f64).powf(a_exp)).collect();

    let raw: Vec<f64> = match p.v_pattern {
        VPattern::Constant => vec![1.0; d],
        VPattern::Alternating => (0..d).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        VPattern::Seeded(seed) => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            (0..d).map(|_| StandardNormal.sample(&mut rng)).collect()
        }
        VPattern::Decaying => (1..=d).map(|j| (j as f64).powf(-0.5)).collect(),
    };
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let v: Vec<f64> = raw.iter().map(|v| v * p.r_dagger / norm).collect();
    let f_true: Vec<f64> = v.iter().zip(&l).map(|(v, l)| v * l.powf(-p.r)).collect();

    SpectralProblem::new(Basis::Cosine, a, l, f_true, NoiseModel::gaussian(p.sigma), Some(spec))
}

/// `d(m) = min(2000, max(64, 4 ceil(m^(1/(2s)))))`.
pub fn truncation_rule(m: usize, s: f64) -> usize {
    let raw = 4.0 * (m as f64).powf(1.0 / (2.0 * s)).ceil();
    (raw.min(2000.0) as usize).max(64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: f64, a: f64, r: f64, q: f64, d: usize) -> PowerProblemParams {
        PowerProblemParams { s, a_link: a, r, q, r_dagger: 1.0, d, sigma: 0.0, v_pattern: VPattern::Constant }
    }

    #[test]
    fn power_problem_half_link() {
        let p = build_power_problem(&params(1.0, 0.5, 0.5, 1.0, 4)).unwrap();
        assert_eq!(p.a(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(p.l(), &[1.0, 2.0, 3.0, 4.0]);
        let t = p.t_spectrum();
        for (j, tj) in t.iter().enumerate() {
            let want = 1.0 / ((j + 1) as f64).powi(2);
            assert!((tj - want).abs() < 1e-15);
        }
        // v_j = 1/2, f_j = j^{-1/2} / 2
        for (j, f) in p.f_true().iter().enumerate() {
            let want = 0.5 / ((j + 1) as f64).sqrt();
            assert!((f - want).abs() < 1e-15);
        }
        assert!((p.hilbert_scale_norm(p.f_true(), 0.5).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(p.effdim_exponent(), Some(0.5));
    }

    #[test]
    fn power_problem_quarter_link() {
        let p = build_power_problem(&params(1.0, 0.25, 2.0, 4.0, 3)).unwrap();
        for j in 0..3 {
            let jj = (j + 1) as f64;
            assert!((p.a()[j] - 1.0 / jj).abs() < 1e-15);
            assert!((p.t_spectrum()[j] - jj.powi(-4)).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_link_holds_to_machine_precision() {
        for &(s, a) in &[(1.0, 0.5), (0.5, 0.25), (2.0, 0.1), (1.3, 0.37)] {
            let p = build_power_problem(&params(s, a, 1.0, 2.0, 500)).unwrap();
            for (t, l) in p.t_spectrum().iter().zip(p.l()) {
                let lhs = 1.0 / l;
                let rhs = t.powf(a);
                assert!((lhs - rhs).abs() <= 1e-13 * lhs, "s={s} a={a}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn source_norm_equals_r_dagger_for_every_pattern() {
        for pat in [VPattern::Constant, VPattern::Alternating, VPattern::Seeded(9), VPattern::Decaying] {
            let mut pp = params(0.5, 0.25, 2.0, 4.0, 64);
            pp.r_dagger = 2.5;
            pp.v_pattern = pat;
            let p = build_power_problem(&pp).unwrap();
            let n = p.hilbert_scale_norm(p.f_true(), pp.r).unwrap();
            assert!((n - 2.5).abs() < 1e-12, "{pat:?}: {n}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(build_power_problem(&params(1.0, 0.6, 1.0, 1.0, 4)).is_err());
        assert!(build_power_problem(&params(1.0, 0.0, 1.0, 1.0, 4)).is_err());
        assert!(build_power_problem(&params(0.0, 0.5, 1.0, 1.0, 4)).is_err());
        assert!(build_power_problem(&params(1.0, 0.5, 1.0, 1.0, 1)).is_err());
    }

    #[test]
    fn forward_eval_examples() {
        let p = build_power_problem(&params(1.0, 0.5, 0.5, 1.0, 4)).unwrap();
        assert_eq!(p.forward_eval(&[0.0; 4], 0.3).unwrap(), 0.0);
        let one = SpectralProblem::new(Basis::Cosine, vec![2.0], vec![1.0], vec![3.0], NoiseModel::gaussian(0.0), None)
            .unwrap();
        assert!((one.forward_eval(&[3.0], 0.9).unwrap() - 6.0).abs() < 1e-15);
        let two = SpectralProblem::new(
            Basis::Cosine,
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            NoiseModel::gaussian(0.0),
            None,
        )
        .unwrap();
        assert!((two.forward_eval(&[0.0, 1.0], 0.0).unwrap() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(matches!(two.forward_eval(&[1.0], 0.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hilbert_scale_norm_examples() {
        let p = SpectralProblem::new(
            Basis::Cosine,
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![0.0; 2],
            NoiseModel::gaussian(0.0),
            None,
        )
        .unwrap();
        assert_eq!(p.hilbert_scale_norm(&[1.0, 0.0], 7.3).unwrap(), 1.0);
        assert_eq!(p.hilbert_scale_norm(&[0.0, 1.0], 1.0).unwrap(), 2.0);
        let q = SpectralProblem::new(
            Basis::Cosine,
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![0.0; 2],
            NoiseModel::gaussian(0.0),
            None,
        )
        .unwrap();
        assert_eq!(q.hilbert_scale_norm(&[3.0, 4.0], 5.0).unwrap(), 5.0);
    }

    #[test]
    fn eval_basis_bounds() {
        let p = build_power_problem(&params(1.0, 0.5, 0.5, 1.0, 4)).unwrap();
        assert!(p.eval_basis(4, 0.2).is_ok());
        assert!(matches!(p.eval_basis(5, 0.2), Err(Error::IndexOutOfRange { index: 5, max: 4 })));
    }

    #[test]
    fn rejects_decreasing_scale() {
        let r = SpectralProblem::new(
            Basis::Cosine,
            vec![1.0, 1.0],
            vec![2.0, 1.0],
            vec![0.0; 2],
            NoiseModel::gaussian(0.0),
            None,
        );
        assert!(r.is_err());
    }

    #[test]
    fn kappa_constants() {
        let p = build_power_problem(&params(1.0, 0.5, 0.5, 1.0, 4)).unwrap();
        // t = (1, 1/4, 1/9, 1/16): 1 + 2 (1/4 + 1/9 + 1/16)
        let want = 1.0 + 2.0 * (0.25 + 1.0 / 9.0 + 1.0 / 16.0);
        assert!((p.kappa_sq() - want).abs() < 1e-14);
        assert!((p.kappa_tilde_sq() - 7.0).abs() < 1e-14);
    }

    #[test]
    fn json_field_names_and_round_trip() {
        let p = build_power_problem(&params(1.0, 0.5, 0.5, 1.0, 3)).unwrap();
        let s = p.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        for key in ["d", "basis", "a", "l", "f_true", "noise", "smoothness"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["basis"], "cosine");
        assert!(v["noise"].get("M").is_some() && v["noise"].get("Sigma").is_some());
        assert!(v["smoothness"].get("R_dagger").is_some());
        let back = SpectralProblem::from_json(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn json_rejects_inconsistent_d() {
        let bad = r#"{"d":3,"basis":"cosine","a":[1,1],"l":[1,2],"f_true":[0,0],
            "noise":{"sigma":0,"M":0,"Sigma":0},"smoothness":null}"#;
        assert!(SpectralProblem::from_json(bad).is_err());
    }

    #[test]
    fn truncation_rule_values() {
        assert_eq!(truncation_rule(256, 1.0), 64);
        assert_eq!(truncation_rule(16384, 1.0), 512);
        assert_eq!(truncation_rule(16384, 0.5), 2000);
    }
}
