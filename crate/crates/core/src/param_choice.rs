//! A-priori choices of the regularization parameter.

use serde::{Deserialize, Serialize};

use crate::distance::SmoothnessCase;
use crate::effdim::{effdim_prefactor, effdim_unchecked};
use crate::error::{domain, Result};
use crate::index_fn::log_grid;
use crate::spectral_model::SmoothnessSpec;

/// Lower end of every bisection bracket.
pub const LAMBDA_FLOOR: f64 = 1e-14;
const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaChoice {
    pub lambda: f64,
    /// Set when the rule fell back to an endpoint or its promise fails.
    pub warning: Option<String>,
}

impl LambdaChoice {
    fn ok(lambda: f64) -> Self {
        LambdaChoice { lambda, warning: None }
    }
}

/// Root of an increasing `h` on `[LAMBDA_FLOOR, 1]`, bisected in `log lambda`.
/// Falls back to the nearer endpoint (with a warning) when `h` has no sign change.
pub fn balance_root(h: impl Fn(f64) -> f64) -> LambdaChoice {
    if h(1.0) < 0.0 {
        return LambdaChoice {
            lambda: 1.0,
            warning: Some("no root in (floor, 1]: sample size too small, returning lambda = 1".into()),
        };
    }
    if h(LAMBDA_FLOOR) > 0.0 {
        return LambdaChoice {
            lambda: LAMBDA_FLOOR,
            warning: Some(format!("no root in ({LAMBDA_FLOOR:e}, 1]: returning the floor")),
        };
    }
    let (mut lo, mut hi) = (LAMBDA_FLOOR.ln(), 0.0_f64);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let v = h(mid.exp());
        if v == 0.0 {
            return LambdaChoice::ok(mid.exp());
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= REL_TOL {
            break;
        }
    }
    LambdaChoice::ok((0.5 * (lo + hi)).exp())
}

/// Solves `N(lambda) = m lambda` for an arbitrary decreasing effective-dimension curve.
pub fn lambda_balance_curve(n_of: impl Fn(f64) -> f64, m: usize) -> Result<LambdaChoice> {
    if m == 0 {
        return domain("sample size m must be at least 1");
    }
    let m = m as f64;
    Ok(balance_root(|l| m * l - n_of(l)))
}

/// Solves `N_T(lambda) = m lambda`.
pub fn lambda_balance_effdim(spectrum: &[f64], m: usize) -> Result<LambdaChoice> {
    lambda_balance_curve(|l| effdim_unchecked(spectrum, l), m)
}

/// `lambda = phi^{-1}(1/sqrt(m))` with `phi(t) = t^{a(q-1)}`.
pub fn lambda_phi_inverse(a_link: f64, q: f64, m: usize) -> Result<f64> {
    if !(q > 1.0) {
        return domain(format!("phi-inverse rule needs q > 1, got {q}"));
    }
    if !(a_link > 0.0) {
        return domain(format!("a_link must be positive, got {a_link}"));
    }
    if m == 0 {
        return domain("sample size m must be at least 1");
    }
    Ok((m as f64).powf(-1.0 / (2.0 * a_link * (q - 1.0))).min(1.0))
}

/// Solves `theta^2(rho(lambda)) / rho^2(lambda) * lambda m = N_T(lambda)`.
/// Warns when the root violates `N_T(lambda) <= m lambda`.
pub fn lambda_balance_general(spectrum: &[f64], spec: &SmoothnessSpec, m: usize) -> Result<LambdaChoice> {
    spec.validate()?;
    if m == 0 {
        return domain("sample size m must be at least 1");
    }
    let mf = m as f64;
    let e = 2.0 * spec.a_link * (spec.r - 1.0);
    let mut choice = balance_root(|l| l.powf(e) * l * mf - effdim_unchecked(spectrum, l));
    if choice.warning.is_none() {
        let n = effdim_unchecked(spectrum, choice.lambda);
        if n > mf * choice.lambda * (1.0 + 1e-8) {
            choice.warning = Some(format!(
                "N(lambda) = {n:.4} exceeds m lambda = {:.4}; m is below the threshold for this rule",
                mf * choice.lambda
            ));
        }
    }
    Ok(choice)
}

/// Which closed form of the power-type table applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableRegime {
    Oversmoothing,
    /// `a q >= a r + (b + 1)/2`: benchmark-limited.
    RegularBenchmark,
    /// `a r <= a q <= a r + (b + 1)/2`.
    RegularSmoothness,
}

/// Parameters of the power-type table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerParams {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub q: f64,
}

impl PowerParams {
    pub fn from_spec(spec: &SmoothnessSpec) -> Self {
        PowerParams { a: spec.a_link, b: spec.effdim_exponent(), r: spec.r, q: spec.q }
    }

    pub fn regime(&self, case: SmoothnessCase) -> Result<TableRegime> {
        let PowerParams { a, b, r, q } = *self;
        if !(a > 0.0 && a <= 0.5) {
            return domain(format!("table requires 0 < a <= 1/2, got a = {a}"));
        }
        if !(0.0..1.0).contains(&b) {
            return domain(format!("table requires 0 <= b < 1, got b = {b}"));
        }
        match case {
            SmoothnessCase::Oversmoothing => {
                if !(r > 0.0 && r <= 1.0) {
                    return domain(format!("oversmoothing row requires r <= 1, got r = {r}"));
                }
                Ok(TableRegime::Oversmoothing)
            }
            SmoothnessCase::Regular => {
                if !(q > 1.0) {
                    return domain(format!("regular row requires q > 1, got q = {q}"));
                }
                if r < 1.0 {
                    return domain(format!("regular row requires r >= 1, got r = {r}"));
                }
                if a * q < a * r {
                    return domain(format!("regular row requires a r <= a q, got r = {r} > q = {q}"));
                }
                if a * q >= a * r + (b + 1.0) / 2.0 {
                    Ok(TableRegime::RegularBenchmark)
                } else {
                    Ok(TableRegime::RegularSmoothness)
                }
            }
        }
    }

    /// Exponent `e` in `lambda* = (1/sqrt(m))^e`.
    pub fn lambda_exponent(&self, case: SmoothnessCase) -> Result<f64> {
        let PowerParams { a, b, r, q } = *self;
        Ok(match self.regime(case)? {
            TableRegime::Oversmoothing => 2.0 / (b + 1.0),
            TableRegime::RegularBenchmark => 1.0 / (a * (q - 1.0)),
            TableRegime::RegularSmoothness => 2.0 / (2.0 * a * r + b + 1.0 - 2.0 * a),
        })
    }

    /// Exponent `e` of the H-norm error rate `(1/sqrt(m))^e`.
    pub fn rate_exponent(&self, case: SmoothnessCase) -> Result<f64> {
        let PowerParams { a, b, r, q } = *self;
        Ok(match self.regime(case)? {
            TableRegime::Oversmoothing => 2.0 * a * r / (b + 1.0),
            TableRegime::RegularBenchmark => r / (q - 1.0),
            TableRegime::RegularSmoothness => 2.0 * a * r / (2.0 * a * r + b + 1.0 - 2.0 * a),
        })
    }
}

/// `scale * (1/sqrt(m))^e`, clamped to `(0, 1]`.
pub fn lambda_power_table(params: &PowerParams, m: usize, case: SmoothnessCase, scale: f64) -> Result<f64> {
    if m == 0 {
        return domain("sample size m must be at least 1");
    }
    if !(scale > 0.0) {
        return domain(format!("scale must be positive, got {scale}"));
    }
    let e = params.lambda_exponent(case)?;
    Ok((scale * (m as f64).powf(-0.5 * e)).min(1.0))
}

/// `scale * (1/sqrt(m))^{2/(b+1)}`: closed-form root of `c lambda^{-b} = m lambda`
/// when `c = scale^{b+1}`, independent of the source exponent.
pub fn lambda_balance_closed_form(b: f64, m: usize, scale: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&b) {
        return domain(format!("need 0 <= b < 1, got b = {b}"));
    }
    if m == 0 {
        return domain("sample size m must be at least 1");
    }
    Ok((scale * (m as f64).powf(-1.0 / (b + 1.0))).min(1.0))
}

/// `c^{1/(b+1)}` with `c` the fixed-slope prefactor of `N(lambda) ~ c lambda^{-b}`
/// on `[lo, hi]`.
pub fn balance_prefactor(spectrum: &[f64], b: f64, lambda_lo: f64, lambda_hi: f64) -> Result<f64> {
    if !(lambda_lo > 0.0 && lambda_lo < lambda_hi) {
        return domain(format!("bad calibration range [{lambda_lo}, {lambda_hi}]"));
    }
    let c = effdim_prefactor(spectrum, b, &log_grid(lambda_lo, lambda_hi, 41))?;
    Ok(c.powf(1.0 / (b + 1.0)))
}

/// Prefactor making the table's balance-type rows match the balancing
/// equation: with `N(lambda) ~ c lambda^{-b}` fitted on `[lo, hi]`, the root of
/// the balance equation scales like `c^{e/2} m^{-e/2}`. Rows without an
/// effective-dimension term return 1.
pub fn power_table_prefactor(
    spectrum: &[f64],
    params: &PowerParams,
    case: SmoothnessCase,
    lambda_lo: f64,
    lambda_hi: f64,
) -> Result<f64> {
    let regime = params.regime(case)?;
    if regime == TableRegime::RegularBenchmark {
        return Ok(1.0);
    }
    if !(lambda_lo > 0.0 && lambda_lo < lambda_hi) {
        return domain(format!("bad calibration range [{lambda_lo}, {lambda_hi}]"));
    }
    let c = effdim_prefactor(spectrum, params.b, &log_grid(lambda_lo, lambda_hi, 41))?;
    Ok(c.powf(0.5 * params.lambda_exponent(case)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaRuleKind {
    BalanceEffdim,
    PhiInverse,
    BalanceGeneral,
    PowerTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RuleParams {
    /// Multiplies the table's closed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Fit the table prefactor to the population effective dimension.
    #[serde(default)]
    pub calibrate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRule {
    #[serde(rename = "rule")]
    pub kind: LambdaRuleKind,
    #[serde(default)]
    pub params: RuleParams,
}

impl LambdaRule {
    pub fn new(kind: LambdaRuleKind) -> Self {
        LambdaRule { kind, params: RuleParams::default() }
    }

    /// Evaluates the rule at sample size `m`. `calibration` is the lambda range
    /// used when `params.calibrate` is set.
    pub fn choose(
        &self,
        spectrum: &[f64],
        spec: &SmoothnessSpec,
        case: SmoothnessCase,
        m: usize,
        calibration: Option<(f64, f64)>,
    ) -> Result<LambdaChoice> {
        match self.kind {
            LambdaRuleKind::BalanceEffdim => lambda_balance_effdim(spectrum, m),
            LambdaRuleKind::PhiInverse => lambda_phi_inverse(spec.a_link, spec.q, m).map(LambdaChoice::ok),
            LambdaRuleKind::BalanceGeneral => lambda_balance_general(spectrum, spec, m),
            LambdaRuleKind::PowerTable => {
                let params = PowerParams::from_spec(spec);
                let mut scale = self.params.scale.unwrap_or(1.0);
                if self.params.calibrate {
                    let (lo, hi) = calibration.unwrap_or((1e-6, 1e-1));
                    scale *= power_table_prefactor(spectrum, &params, case, lo, hi)?;
                }
                lambda_power_table(&params, m, case, scale).map(LambdaChoice::ok)
            }
        }
    }
}
