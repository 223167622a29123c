//! Sample-dependent operator quantities (`Psi`, `Upsilon`, `Lambda`, `Xi`),
//! their high-probability bounds, Monte Carlo coverage of those bounds, and the
//! deterministic operator inequalities used along the way.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::effdim::effdim_unchecked;
use crate::error::{domain, Error, Result};
use crate::filters::FilterFamily;
use crate::index_fn::{log_grid, IndexFunctionSpec};
use crate::linalg::{op_norm, SymEigen};
use crate::sampling::{
    adjoint_apply, derive_seed, empirical_cov, empirical_l_cov, regression_values, sample_dataset, Dataset, Design,
    SpectralSolver, PSD_CLAMP_REL,
};
use crate::spectral_model::SpectralProblem;
use crate::textfmt::fmt_sig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Quantity {
    Psi,
    Upsilon,
    LambdaQ,
    XiS,
    XiZeta,
    TxDev,
}

impl Quantity {
    pub const ALL: [Quantity; 6] =
        [Quantity::Psi, Quantity::Upsilon, Quantity::LambdaQ, Quantity::XiS, Quantity::XiZeta, Quantity::TxDev];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Psi => "PSI",
            Quantity::Upsilon => "UPSILON",
            Quantity::LambdaQ => "LAMBDA_Q",
            Quantity::XiS => "XI_S",
            Quantity::XiZeta => "XI_ZETA",
            Quantity::TxDev => "TX_DEV",
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown quantity {s:?}")))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    Ok(())
}

/// `||(T_nu + lambda)^{-1/2} B_x^* (S_x A f_true - y)||`.
pub fn compute_psi(problem: &SpectralProblem, data: &Dataset, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let g = regression_values(problem, &data.x);
    let resid: Vec<f64> = g.iter().zip(&data.y).map(|(g, y)| g - y).collect();
    let b = adjoint_apply(problem, &data.x, &resid)?;
    Ok(b.iter().zip(problem.t_spectrum()).map(|(b, t)| b * b / (t + lambda)).sum::<f64>().sqrt())
}

/// `||(D + lambda)^{-1/2} (D - E)||_HS` for diagonal `D`.
fn weighted_hs_deviation(diag: &[f64], emp: &DMatrix<f64>, lambda: f64) -> f64 {
    let d = diag.len();
    let mut acc = 0.0;
    for j in 0..d {
        let mut row = 0.0;
        for k in 0..d {
            let pop = if j == k { diag[j] } else { 0.0 };
            row += (pop - emp[(j, k)]).powi(2);
        }
        acc += row / (diag[j] + lambda);
    }
    acc.sqrt()
}

/// `||(T_nu + lambda)^{-1/2} (T_nu - T_x)||_HS`.
pub fn compute_upsilon(problem: &SpectralProblem, x: &[f64], lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let tx = empirical_cov(problem, x)?;
    Ok(weighted_hs_deviation(problem.t_spectrum(), &tx, lambda))
}

/// `||(L_nu + lambda)^{-1/2} (L_nu - L_x)||_HS`.
pub fn compute_lambda_q(problem: &SpectralProblem, x: &[f64], lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let lx = empirical_l_cov(problem, x)?;
    Ok(weighted_hs_deviation(&problem.l_nu_spectrum(), &lx, lambda))
}

/// `||T_nu - T_x||_HS`.
pub fn tx_dev(problem: &SpectralProblem, x: &[f64]) -> Result<f64> {
    let mut tx = empirical_cov(problem, x)?;
    for (j, t) in problem.t_spectrum().iter().enumerate() {
        tx[(j, j)] -= t;
    }
    Ok(tx.norm())
}

/// Reusable eigendecomposition of `T_x` for evaluating several `Xi^zeta`.
#[derive(Debug, Clone)]
pub struct XiEvaluator {
    eig: SymEigen,
    t: Vec<f64>,
    lambda: f64,
}

impl XiEvaluator {
    pub fn new(problem: &SpectralProblem, x: &[f64], lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let tx = empirical_cov(problem, x)?;
        Self::from_matrix(&tx, problem.t_spectrum(), problem.kappa_sq(), lambda)
    }

    pub fn from_matrix(tx: &DMatrix<f64>, t: &[f64], kappa_sq: f64, lambda: f64) -> Result<Self> {
        let mut eig = SymEigen::new(tx)?;
        eig.clamp_psd(PSD_CLAMP_REL * kappa_sq)?;
        Ok(XiEvaluator { eig, t: t.to_vec(), lambda })
    }

    /// `||(1/zeta)(T_x + lambda) zeta(T_nu + lambda)||`, evaluated in that order.
    pub fn xi(&self, zeta: &IndexFunctionSpec) -> f64 {
        let lambda = self.lambda;
        let mut left = self.eig.apply(|mu| 1.0 / zeta.eval(mu + lambda));
        for (c, t) in self.t.iter().enumerate() {
            left.column_mut(c).scale_mut(zeta.eval(t + lambda));
        }
        op_norm(&left)
    }
}

fn check_zeta(zeta: &IndexFunctionSpec, upper: f64) -> Result<()> {
    let grid = log_grid(1e-12_f64.min(upper / 2.0), upper, 400);
    zeta.check_valid(&grid)?;
    if !zeta.is_sub_linear(&grid) {
        return Err(Error::Precondition(format!("zeta = {zeta:?} is not sub-linear")));
    }
    Ok(())
}

/// `Xi^zeta` for a nondecreasing sub-linear `zeta`.
pub fn compute_xi(problem: &SpectralProblem, x: &[f64], lambda: f64, zeta: &IndexFunctionSpec) -> Result<f64> {
    check_lambda(lambda)?;
    check_zeta(zeta, problem.kappa_sq() + lambda)?;
    Ok(XiEvaluator::new(problem, x, lambda)?.xi(zeta))
}

/// Constants entering the high-probability bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub kappa: f64,
    pub kappa_tilde: f64,
    #[serde(rename = "M")]
    pub bernstein_m: f64,
    #[serde(rename = "Sigma")]
    pub bernstein_sigma: f64,
    pub effdim_t: f64,
    pub effdim_l: f64,
    /// Exponent of `Xi^s`.
    pub s: f64,
}

impl BoundConstants {
    pub fn for_problem(problem: &SpectralProblem, lambda: f64) -> Self {
        let noise = problem.noise();
        BoundConstants {
            kappa: problem.kappa_sq().sqrt(),
            kappa_tilde: problem.kappa_tilde_sq().sqrt(),
            bernstein_m: noise.bernstein_m,
            bernstein_sigma: noise.bernstein_sigma,
            effdim_t: effdim_unchecked(problem.t_spectrum(), lambda),
            effdim_l: effdim_unchecked(&problem.l_nu_spectrum(), lambda),
            s: 0.5,
        }
    }
}

/// Right-hand side of the confidence-`1 - eta` bound for `quantity`.
pub fn bound_appendix(quantity: Quantity, lambda: f64, m: usize, eta: f64, c: &BoundConstants) -> Result<f64> {
    check_lambda(lambda)?;
    if !(eta > 0.0 && eta < 1.0) {
        return domain(format!("eta must lie in (0, 1), got {eta}"));
    }
    if m == 0 {
        return domain("sample size m must be at least 1");
    }
    let mf = m as f64;
    let log_term = (2.0 / eta).ln();
    let sl = lambda.sqrt();
    let k2 = c.kappa * c.kappa;
    let kt2 = c.kappa_tilde * c.kappa_tilde;
    Ok(match quantity {
        Quantity::Psi => {
            2.0 * (c.kappa * c.bernstein_m / (mf * sl) + (c.bernstein_sigma.powi(2) * c.effdim_t / mf).sqrt())
                * log_term
        }
        Quantity::Upsilon => 2.0 * (k2 / (mf * sl) + (k2 * c.effdim_t / mf).sqrt()) * log_term,
        Quantity::LambdaQ => 2.0 * (kt2 / (mf * sl) + (kt2 * c.effdim_l / mf).sqrt()) * log_term,
        Quantity::TxDev => 2.0 * (k2 / mf + k2 / mf.sqrt()) * log_term,
        Quantity::XiS => ((2.0 * c.kappa + 1.0).powi(2) * log_term).powf(2.0 * c.s),
        Quantity::XiZeta => ((2.0 * c.kappa + 1.0).powi(2) * log_term).powi(2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub quantity: Quantity,
    pub lambda: f64,
    pub m: usize,
    pub eta: f64,
    pub trials: usize,
    pub empirical_quantile: f64,
    pub bound_value: f64,
    pub coverage: f64,
    pub pass: bool,
    /// `N_T(lambda) > m lambda`: the bound's standing assumption fails.
    pub out_of_hypothesis: bool,
}

impl BoundCheckReport {
    pub const CSV_HEADER: &'static str = "quantity,lambda,m,eta,trials,quantile,bound,coverage";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.quantity.name(),
            fmt_sig(self.lambda, 15),
            self.m,
            fmt_sig(self.eta, 15),
            self.trials,
            fmt_sig(self.empirical_quantile, 15),
            fmt_sig(self.bound_value, 15),
            fmt_sig(self.coverage, 15)
        )
    }
}

pub fn reports_to_csv(reports: &[BoundCheckReport]) -> String {
    let mut out = format!("{}\n", BoundCheckReport::CSV_HEADER);
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// `zeta(t) = sqrt(t)` for `Xi^zeta` and `s = 1/2` for `Xi^s` in coverage runs.
fn default_zeta() -> IndexFunctionSpec {
    IndexFunctionSpec::power(0.5)
}

fn sample_quantity(problem: &SpectralProblem, data: &Dataset, quantity: Quantity, lambda: f64, s: f64) -> Result<f64> {
    match quantity {
        Quantity::Psi => compute_psi(problem, data, lambda),
        Quantity::Upsilon => compute_upsilon(problem, &data.x, lambda),
        Quantity::LambdaQ => compute_lambda_q(problem, &data.x, lambda),
        Quantity::TxDev => tx_dev(problem, &data.x),
        Quantity::XiS => Ok(XiEvaluator::new(problem, &data.x, lambda)?.xi(&IndexFunctionSpec::power(s))),
        Quantity::XiZeta => Ok(XiEvaluator::new(problem, &data.x, lambda)?.xi(&default_zeta())),
    }
}

/// Coverage of several quantities and confidence levels from one shared set
/// of `trials` seeded datasets (`RANDOM_UNIFORM` design).
pub fn coverage_batch(
    problem: &SpectralProblem,
    quantities: &[Quantity],
    lambda: f64,
    m: usize,
    etas: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<BoundCheckReport>> {
    check_lambda(lambda)?;
    if trials < 100 {
        return domain(format!("coverage needs at least 100 trials, got {trials}"));
    }
    let constants = BoundConstants::for_problem(problem, lambda);
    let values: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let data = sample_dataset(problem, m, derive_seed(seed, m as u64, trial as u64), Design::RandomUniform)?;
            quantities.iter().map(|&q| sample_quantity(problem, &data, q, lambda, constants.s)).collect()
        })
        .collect::<Result<_>>()?;
    let out_of_hypothesis = constants.effdim_t > m as f64 * lambda;
    let mut reports = Vec::new();
    for (qi, &quantity) in quantities.iter().enumerate() {
        let mut sample: Vec<f64> = values.iter().map(|v| v[qi]).collect();
        sample.sort_by(f64::total_cmp);
        for &eta in etas {
            let bound_value = bound_appendix(quantity, lambda, m, eta, &constants)?;
            let covered = sample.iter().filter(|v| **v <= bound_value).count();
            let coverage = covered as f64 / trials as f64;
            let idx = (((1.0 - eta) * trials as f64).ceil() as usize).clamp(1, trials) - 1;
            reports.push(BoundCheckReport {
                quantity,
                lambda,
                m,
                eta,
                trials,
                empirical_quantile: sample[idx],
                bound_value,
                coverage,
                pass: coverage >= 1.0 - eta,
                out_of_hypothesis,
            });
        }
    }
    Ok(reports)
}

pub fn montecarlo_coverage(
    problem: &SpectralProblem,
    quantity: Quantity,
    lambda: f64,
    m: usize,
    eta: f64,
    trials: usize,
    seed: u64,
) -> Result<BoundCheckReport> {
    Ok(coverage_batch(problem, &[quantity], lambda, m, &[eta], trials, seed)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `||f||_r <= ||f||_t^{(s-r)/(s-t)} ||f||_s^{(r-t)/(s-t)}` for `t < r < s`.
pub fn check_interpolation(
    problem: &SpectralProblem,
    f: &[f64],
    t_exp: f64,
    r_exp: f64,
    s_exp: f64,
) -> Result<InequalityCheck> {
    if !(t_exp < r_exp && r_exp < s_exp) {
        return domain(format!("need t < r < s, got {t_exp}, {r_exp}, {s_exp}"));
    }
    let lhs = problem.hilbert_scale_norm(f, r_exp)?;
    let nt = problem.hilbert_scale_norm(f, t_exp)?;
    let ns = problem.hilbert_scale_norm(f, s_exp)?;
    let w = s_exp - t_exp;
    let rhs = nt.powf((s_exp - r_exp) / w) * ns.powf((r_exp - t_exp) / w);
    Ok(InequalityCheck { lhs, rhs, pass: lhs <= rhs * (1.0 + 1e-12) })
}

/// `max_lambda [max_j t_j^a / sqrt(t_j + lambda)] sqrt(lambda) / lambda^a`.
pub fn check_heinz_bound(spectrum: &[f64], a_link: f64, lambda_grid: &[f64]) -> Result<f64> {
    if !(a_link > 0.0 && a_link <= 0.5) {
        return domain(format!("a_link must lie in (0, 1/2], got {a_link}"));
    }
    let mut worst = 0.0_f64;
    for &lambda in lambda_grid {
        check_lambda(lambda)?;
        let sup = spectrum.iter().map(|t| t.powf(a_link) / (t + lambda).sqrt()).fold(0.0, f64::max);
        worst = worst.max(sup * lambda.sqrt() / lambda.powf(a_link));
    }
    Ok(worst)
}

/// Components of the operator envelope for `||L^{-1} r_lambda(T_x) L||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaEnvelope {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub xi_rho: f64,
    pub xi_upsilon: f64,
    pub xi: f64,
    pub lambda_q: f64,
}

pub fn check_lemma_envelope(
    problem: &SpectralProblem,
    data: &Dataset,
    filter: &FilterFamily,
    lambda: f64,
) -> Result<LemmaEnvelope> {
    check_lambda(lambda)?;
    let spec = problem
        .smoothness()
        .ok_or_else(|| Error::Precondition("envelope check needs a problem with a link exponent".into()))?;
    let a = spec.a_link;
    let rho = IndexFunctionSpec::power(a);
    let upsilon = IndexFunctionSpec::power(1.0 - a);

    let solver = SpectralSolver::new(problem, data)?;
    let mut res = solver.residual_operator(filter, lambda)?;
    let l = problem.l();
    for r in 0..res.nrows() {
        for c in 0..res.ncols() {
            res[(r, c)] *= l[c] / l[r];
        }
    }
    let lhs = op_norm(&res);

    let xi_eval = XiEvaluator::new(problem, &data.x, lambda)?;
    let xi_rho = xi_eval.xi(&rho);
    let xi_upsilon = xi_eval.xi(&upsilon);
    let xi = xi_eval.xi(&IndexFunctionSpec::identity());
    let lambda_q = compute_lambda_q(problem, &data.x, lambda)?;
    let rl = rho.eval(lambda);
    let bd = filter.b_const + filter.d_const;
    let rhs = 1.0 + bd * (xi_rho * xi_upsilon + xi * rl * (rl + 1.0) * lambda_q / lambda.sqrt());
    Ok(LemmaEnvelope { lhs, rhs, pass: lhs <= rhs * (1.0 + 1e-9), xi_rho, xi_upsilon, xi, lambda_q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_model::{build_power_problem, Basis, NoiseModel, PowerProblemParams};

    fn small_power(d: usize, sigma: f64) -> SpectralProblem {
        let mut p = PowerProblemParams::default_regular();
        p.d = d;
        p.sigma = sigma;
        build_power_problem(&p).unwrap()
    }

    fn scalar(a: f64, l: f64, sigma: f64) -> SpectralProblem {
        SpectralProblem::new(Basis::Cosine, vec![a], vec![l], vec![1.0], NoiseModel::gaussian(sigma), None).unwrap()
    }

    #[test]
    fn psi_examples() {
        let p = small_power(16, 0.0);
        let ds = sample_dataset(&p, 50, 3, Design::RandomUniform).unwrap();
        assert_eq!(compute_psi(&p, &ds, 0.1).unwrap(), 0.0);
        let one = scalar(1.0, 1.0, 0.0);
        let x = vec![0.2, 0.4, 0.9];
        let y: Vec<f64> = regression_values(&one, &x).iter().map(|g| g + 0.3).collect();
        let ds = Dataset { x, y, seed: 0, design: Design::RandomUniform };
        assert!((compute_psi(&one, &ds, 1.0).unwrap() - 0.3 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn deviations_vanish_on_midpoint_grid() {
        let p = small_power(16, 0.0);
        let x: Vec<f64> = (0..64).map(|i| (i as f64 + 0.5) / 64.0).collect();
        assert!(compute_upsilon(&p, &x, 0.01).unwrap() <= 1e-9);
        assert!(compute_lambda_q(&p, &x, 0.01).unwrap() <= 1e-9);
        assert!(tx_dev(&p, &x).unwrap() <= 1e-9);
        let xi = compute_xi(&p, &x, 0.01, &IndexFunctionSpec::power(0.5)).unwrap();
        assert!((xi - 1.0).abs() <= 1e-9);
        let one = scalar(1.0, 1.0, 0.0);
        assert_eq!(compute_upsilon(&one, &[0.5], 0.3).unwrap(), 0.0);
        assert_eq!(compute_lambda_q(&one, &[0.5], 0.3).unwrap(), 0.0);
    }

    #[test]
    fn xi_scalar_ratio() {
        let tx = DMatrix::from_element(1, 1, 0.5);
        let xi = XiEvaluator::from_matrix(&tx, &[1.0], 1.0, 0.5).unwrap().xi(&IndexFunctionSpec::identity());
        assert!((xi - 1.5).abs() < 1e-14);
    }

    #[test]
    fn xi_rejects_super_linear() {
        let p = small_power(8, 0.0);
        let r = compute_xi(&p, &[0.1, 0.5], 0.1, &IndexFunctionSpec::power(2.0));
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn xi_below_deterministic_envelope() {
        let p = small_power(24, 0.0);
        for seed in 0..10 {
            let ds = sample_dataset(&p, 40, seed, Design::RandomUniform).unwrap();
            let lambda = 0.05;
            let ups = compute_upsilon(&p, &ds.x, lambda).unwrap();
            let xi = compute_xi(&p, &ds.x, lambda, &IndexFunctionSpec::power(0.5)).unwrap();
            assert!(xi <= (ups / lambda.sqrt() + 1.0).powi(2) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bound_plug_in() {
        let eta = 2.0 / std::f64::consts::E;
        let c = BoundConstants {
            kappa: 1.0,
            kappa_tilde: 1.0,
            bernstein_m: 1.0,
            bernstein_sigma: 1.0,
            effdim_t: 1.0,
            effdim_l: 1.0,
            s: 0.5,
        };
        assert!((bound_appendix(Quantity::Psi, 1.0, 1, eta, &c).unwrap() - 4.0).abs() < 1e-12);
        assert!((bound_appendix(Quantity::XiS, 1.0, 1, eta, &c).unwrap() - 9.0).abs() < 1e-12);
        let near_one = bound_appendix(Quantity::Upsilon, 0.1, 10, 1.0 - 1e-12, &c).unwrap();
        assert!(near_one > 0.0);
        assert!(bound_appendix(Quantity::Psi, 1.0, 1, 1.0, &c).is_err());
    }

    #[test]
    fn psi_coverage_is_total_without_noise() {
        let p = small_power(16, 0.0);
        let r = montecarlo_coverage(&p, Quantity::Psi, 0.01, 64, 0.1, 100, 1).unwrap();
        assert_eq!(r.coverage, 1.0);
        assert!(r.pass);
        assert!(montecarlo_coverage(&p, Quantity::Psi, 0.01, 64, 0.1, 10, 1).is_err());
    }

    #[test]
    fn interpolation_examples() {
        let p = SpectralProblem::new(
            Basis::Cosine,
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![1.0, 1.0],
            NoiseModel::gaussian(0.0),
            None,
        )
        .unwrap();
        let c = check_interpolation(&p, &[1.0, 1.0], 0.0, 1.0, 2.0).unwrap();
        assert!((c.lhs - 5f64.sqrt()).abs() < 1e-14);
        assert!((c.rhs - (2f64.sqrt() * 17f64.sqrt()).sqrt()).abs() < 1e-12);
        assert!(c.pass);
        let c = check_interpolation(&p, &[0.0, 3.0], -1.0, 0.5, 3.0).unwrap();
        assert!((c.lhs - c.rhs).abs() < 1e-14 * c.lhs);
        assert!(check_interpolation(&p, &[1.0, 1.0], 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn heinz_examples() {
        let lambda = 0.01;
        let r = check_heinz_bound(&[lambda], 0.25, &[lambda]).unwrap();
        assert!((r - 0.5f64.sqrt()).abs() < 1e-14);
        let dense: Vec<f64> = log_grid(1e-8, 1.0, 500);
        for a in [0.1, 0.25, 0.5] {
            assert!(check_heinz_bound(&dense, a, &log_grid(1e-6, 1.0, 100)).unwrap() <= 1.0 + 1e-12);
        }
        assert!(check_heinz_bound(&dense, 0.75, &[0.1]).is_err());
    }

    #[test]
    fn lemma_envelope_midpoint_and_scalar() {
        let p = small_power(16, 0.05);
        let ds = sample_dataset(&p, 64, 0, Design::MidpointGrid).unwrap();
        let env = check_lemma_envelope(&p, &ds, &FilterFamily::tikhonov(p.kappa_sq()), 0.01).unwrap();
        assert!(env.lambda_q <= 1e-9);
        assert!(env.pass, "{env:?}");

        let mut params = PowerProblemParams::default_regular();
        params.d = 2;
        let p = build_power_problem(&params).unwrap();
        let ds = sample_dataset(&p, 3, 5, Design::RandomUniform).unwrap();
        let env = check_lemma_envelope(&p, &ds, &FilterFamily::tikhonov(p.kappa_sq()), 0.2).unwrap();
        assert!(env.pass, "{env:?}");
    }

    #[test]
    fn quantity_names() {
        for q in Quantity::ALL {
            assert_eq!(q.name().parse::<Quantity>().unwrap(), q);
            assert_eq!(serde_json::to_string(&q).unwrap(), format!("\"{}\"", q.name()));
        }
    }
}
