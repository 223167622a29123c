//! Monte Carlo convergence-rate experiments over a grid of sample sizes.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distance::SmoothnessCase;
use crate::effdim::ols;
use crate::error::{domain, Error, Result};
use crate::filters::{check_covering, FilterFamily, FilterId, Qualification};
use crate::index_fn::{linear_grid, IndexFunctionSpec};
use crate::json;
use crate::param_choice::{lambda_power_table, LambdaRule, LambdaRuleKind, PowerParams};
use crate::sampling::{derive_seed, errors, sample_dataset, Design, SpectralSolver};
use crate::spectral_model::{
    build_power_problem, truncation_rule, PowerProblemParams, SmoothnessSpec, SpectralProblem, VPattern,
};
use crate::textfmt::fmt_sig;

pub const DEFAULT_TOLERANCE: f64 = 0.08;

/// Parameters of a power problem as they appear in a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSource {
    pub s: f64,
    pub a_link: f64,
    pub r: f64,
    pub q: f64,
    #[serde(rename = "R_dagger")]
    pub r_dagger: f64,
    pub sigma: f64,
    #[serde(default)]
    pub v_pattern: VPattern,
    /// Fixed truncation; when absent the truncation rule is applied at the
    /// largest sample size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineSource {
    pub problem: SpectralProblem,
}

/// Where the experiment's problem comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "serde_json::Value")]
pub enum ProblemSource {
    Power(PowerSource),
    Inline(InlineSource),
}

impl TryFrom<serde_json::Value> for ProblemSource {
    type Error = String;

    fn try_from(v: serde_json::Value) -> std::result::Result<Self, String> {
        let (kind, rest) = json::from_tagged(v, "kind")?;
        match kind.as_str() {
            "power" => json::with_pointer(rest).map(ProblemSource::Power),
            "inline" => json::with_pointer(rest).map(ProblemSource::Inline),
            other => Err(format!("/kind: unknown variant `{other}`, expected `power` or `inline`")),
        }
    }
}

impl ProblemSource {
    pub fn power(p: &PowerProblemParams, d: Option<usize>) -> Self {
        ProblemSource::Power(PowerSource {
            s: p.s,
            a_link: p.a_link,
            r: p.r,
            q: p.q,
            r_dagger: p.r_dagger,
            sigma: p.sigma,
            v_pattern: p.v_pattern,
            d,
        })
    }

    /// Builds the problem for an experiment whose largest sample size is `m_max`.
    pub fn build(&self, m_max: usize) -> Result<SpectralProblem> {
        match self {
            ProblemSource::Power(PowerSource { s, a_link, r, q, r_dagger, sigma, v_pattern, d }) => {
                let d = d.unwrap_or_else(|| truncation_rule(m_max, *s));
                build_power_problem(&PowerProblemParams {
                    s: *s,
                    a_link: *a_link,
                    r: *r,
                    q: *q,
                    r_dagger: *r_dagger,
                    d,
                    sigma: *sigma,
                    v_pattern: *v_pattern,
                })
            }
            ProblemSource::Inline(InlineSource { problem }) => Ok(problem.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorNorm {
    H,
    Prediction,
    Zeta(IndexFunctionSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSource,
    pub filter: FilterId,
    pub lambda_rule: LambdaRule,
    pub m_grid: Vec<usize>,
    pub trials_per_m: usize,
    pub seed: u64,
    #[serde(default = "default_norm")]
    pub error_norm: ErrorNorm,
    pub case: SmoothnessCase,
    #[serde(default)]
    pub design: Design,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Overrides the table exponent (needed for norms other than `H`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theoretical_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_max: Option<u64>,
}

fn default_norm() -> ErrorNorm {
    ErrorNorm::H
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl ExperimentConfig {
    /// Regular-case default: `a = 1/4, r = 2, q = 4, b = 1/2`, Tikhonov,
    /// table parameter, `m = 2^8 .. 2^14`, 50 trials, `d = 256`.
    pub fn default_regular() -> Self {
        ExperimentConfig {
            problem: ProblemSource::power(&PowerProblemParams::default_regular(), Some(256)),
            filter: FilterId::Tikhonov,
            lambda_rule: LambdaRule::new(LambdaRuleKind::PowerTable),
            m_grid: (8..=14).map(|k| 1usize << k).collect(),
            trials_per_m: 50,
            seed: 20240601,
            error_norm: ErrorNorm::H,
            case: SmoothnessCase::Regular,
            design: Design::RandomUniform,
            tolerance: DEFAULT_TOLERANCE,
            theoretical_exponent: None,
            nu_max: None,
        }
    }

    /// Oversmoothing default: `a = 1/2, r = 1/2, q = 1, b = 1/2`, same grid,
    /// truncation from the rule (`d = 512` at `m = 2^14`).
    pub fn default_oversmoothing() -> Self {
        ExperimentConfig {
            problem: ProblemSource::power(&PowerProblemParams::default_oversmoothing(), None),
            case: SmoothnessCase::Oversmoothing,
            ..Self::default_regular()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials_per_m < 10 {
            return domain(format!("trials_per_m must be at least 10, got {}", self.trials_per_m));
        }
        if self.m_grid.len() < 4 {
            return domain(format!("m_grid needs at least 4 sizes, got {}", self.m_grid.len()));
        }
        if self.m_grid.windows(2).any(|w| w[1] <= w[0]) || self.m_grid[0] == 0 {
            return domain("m_grid must be strictly increasing and positive");
        }
        let span = (*self.m_grid.last().unwrap() as f64 / self.m_grid[0] as f64).log10();
        if span < 1.5 {
            return domain(format!("m_grid spans {span:.2} decades; at least 1.5 are required"));
        }
        if !(self.tolerance > 0.0) {
            return domain(format!("tolerance must be positive, got {}", self.tolerance));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> Result<String> {
        let canonical = serde_json::to_string(self)?;
        Ok(hex(&Sha256::digest(canonical.as_bytes())))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hex SHA-256 digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Exponent of `m` in the H-norm rate of the power-type table (negative).
pub fn theoretical_exponent(a: f64, b: f64, r: f64, q: f64, case: SmoothnessCase) -> Result<f64> {
    let params = PowerParams { a, b, r, q };
    if case == SmoothnessCase::Oversmoothing {
        let n = oversmoothing_n(a);
        if a < 1.0 / (n as f64 + 1.0) {
            return domain(format!("oversmoothing row requires a >= 1/(n+1) = {}", 1.0 / (n as f64 + 1.0)));
        }
    }
    Ok(-0.5 * params.rate_exponent(case)?)
}

/// Integer `n >= 1` with `n <= 1/a <= n + 1`.
pub fn oversmoothing_n(a: f64) -> usize {
    ((1.0 / a).ceil() as usize).saturating_sub(1).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
}

fn check_points(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 4 {
        return domain(format!("rate fit needs at least 4 points, got {}", points.len()));
    }
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0) || !(p.1 > 0.0)) {
        return domain(format!("rate fit needs positive values, got (m, error) = ({}, {})", p.0, p.1));
    }
    Ok(())
}

/// Ordinary least squares on `(log m, log error)`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    check_points(points)?;
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (intercept, slope, stderr) = ols(&x, &y);
    Ok(RateFit { slope, stderr, intercept })
}

/// Weighted least squares on `(log m, log error)` with weights `w`.
pub fn fit_rate_weighted(points: &[(f64, f64)], w: &[f64]) -> Result<RateFit> {
    check_points(points)?;
    if w.len() != points.len() || w.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return domain("weights must be positive, finite and match the points");
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(x, w)| w * (x - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).zip(w).map(|((x, y), w)| w * (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let n = points.len() as f64;
    let rss: f64 = x.iter().zip(&y).zip(w).map(|((x, y), w)| w * (y - intercept - slope * x).powi(2)).sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    Ok(RateFit { slope, stderr, intercept })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCell {
    pub m: usize,
    pub lambda_used: f64,
    pub mean_error: f64,
    pub median_error: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub per_m: Vec<RateCell>,
    pub fitted_exponent: Option<f64>,
    pub fit_stderr: Option<f64>,
    pub theoretical_exponent: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// Errors vanish or are nonpositive, so no slope can be fitted.
    pub degenerate: bool,
    pub config_hash: String,
    pub d: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn opt_fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |v| fmt_sig(v, 15))
}

fn opt_parse(s: &str) -> Result<Option<f64>> {
    if s == "none" {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

impl RateReport {
    pub const CSV_HEADER: &'static str = "m,lambda,mean,median,std";

    /// Table rows followed by `# key=value` footer lines describing the fit.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for c in &self.per_m {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.m,
                fmt_sig(c.lambda_used, 15),
                fmt_sig(c.mean_error, 15),
                fmt_sig(c.median_error, 15),
                fmt_sig(c.std_error, 15)
            ));
        }
        out.push_str(&format!("# fitted_exponent={}\n", opt_fmt(self.fitted_exponent)));
        out.push_str(&format!("# fit_stderr={}\n", opt_fmt(self.fit_stderr)));
        out.push_str(&format!("# theoretical_exponent={}\n", opt_fmt(self.theoretical_exponent)));
        out.push_str(&format!("# tolerance={}\n", fmt_sig(self.tolerance, 15)));
        out.push_str(&format!("# pass={}\n", self.pass));
        out.push_str(&format!("# degenerate={}\n", self.degenerate));
        out.push_str(&format!("# config_hash={}\n", self.config_hash));
        out.push_str(&format!("# d={}\n", self.d));
        out.push_str(&format!("# seed={}\n", self.seed));
        out
    }

    /// Parses the output of [`RateReport::to_csv`]; warnings are not stored in CSV.
    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("rate CSV: {msg}"));
        let mut lines = text.lines();
        if lines.next() != Some(Self::CSV_HEADER) {
            return Err(bad("missing header"));
        }
        let mut per_m = Vec::new();
        let mut footer = BTreeMap::new();
        for line in lines {
            if let Some(kv) = line.strip_prefix("# ") {
                let (k, v) = kv.split_once('=').ok_or_else(|| bad("footer line without '='"))?;
                footer.insert(k.to_string(), v.to_string());
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad("row must have 5 fields"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
            per_m.push(RateCell {
                m: f[0].parse().map_err(|_| bad("bad m"))?,
                lambda_used: num(f[1])?,
                mean_error: num(f[2])?,
                median_error: num(f[3])?,
                std_error: num(f[4])?,
            });
        }
        let get = |k: &str| footer.get(k).map(String::as_str).ok_or_else(|| bad(&format!("missing {k}")));
        Ok(RateReport {
            per_m,
            fitted_exponent: opt_parse(get("fitted_exponent")?)?,
            fit_stderr: opt_parse(get("fit_stderr")?)?,
            theoretical_exponent: opt_parse(get("theoretical_exponent")?)?,
            tolerance: get("tolerance")?.parse().map_err(|_| bad("bad tolerance"))?,
            pass: get("pass")?.parse().map_err(|_| bad("bad pass"))?,
            degenerate: get("degenerate")?.parse().map_err(|_| bad("bad degenerate"))?,
            config_hash: get("config_hash")?.to_string(),
            d: get("d")?.parse().map_err(|_| bad("bad d"))?,
            seed: get("seed")?.parse().map_err(|_| bad("bad seed"))?,
            warnings: Vec::new(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Log-log plot of the median errors with the fitted and theoretical slopes.
    pub fn to_svg(&self) -> String {
        crate::svg::rate_plot(self)
    }
}

/// Filter for a run; Landweber gets a qualification large enough for the
/// benchmark smoothness since its qualification is arbitrary.
fn filter_for(id: FilterId, problem: &SpectralProblem, spec: &SmoothnessSpec, nu_max: Option<u64>) -> FilterFamily {
    let mut f = FilterFamily::from_id(id, problem.kappa_sq(), nu_max);
    if id == FilterId::Landweber {
        let p = (spec.a_link * spec.q).max(1.0);
        f = FilterFamily::landweber(p, f.nu_max);
    }
    f
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn run_rate_experiment(config: &ExperimentConfig) -> Result<RateReport> {
    config.validate()?;
    let m_max = *config.m_grid.last().unwrap();
    let problem = config.problem.build(m_max)?;
    let spec = *problem
        .smoothness()
        .ok_or_else(|| Error::Precondition("rate experiments need a problem with smoothness parameters".into()))?;
    let filter = filter_for(config.filter, &problem, &spec, config.nu_max);

    // qualification must cover the benchmark smoothness t^{a q}
    if let Qualification::Finite(p) = filter.qualification {
        let bench = IndexFunctionSpec::power(spec.a_link * spec.q.max(1.0));
        if !check_covering(p, &bench, &linear_grid(0.0, 1.0, 200)) {
            return Err(Error::Precondition(format!(
                "qualification {p} of {} does not cover t^{}",
                filter.id.name(),
                spec.a_link * spec.q
            )));
        }
    }

    let params = PowerParams::from_spec(&spec);
    let theoretical = match (config.theoretical_exponent, &config.error_norm) {
        (Some(e), _) => Some(e),
        (None, ErrorNorm::H) => Some(theoretical_exponent(params.a, params.b, params.r, params.q, config.case)?),
        (None, _) => None,
    };

    let calibration = if config.lambda_rule.params.calibrate {
        let lo = lambda_power_table(&params, m_max, config.case, 1.0)?;
        let hi = lambda_power_table(&params, config.m_grid[0], config.case, 1.0)?;
        Some((lo, hi.max(lo * 1.0001)))
    } else {
        None
    };
    let mut warnings = Vec::new();
    let mut lambdas = Vec::with_capacity(config.m_grid.len());
    for &m in &config.m_grid {
        let choice = config.lambda_rule.choose(problem.t_spectrum(), &spec, config.case, m, calibration)?;
        if let Some(w) = choice.warning {
            log::warn!("m = {m}: {w}");
            warnings.push(format!("m = {m}: {w}"));
        }
        lambdas.push(choice.lambda);
    }

    let zeta = match &config.error_norm {
        ErrorNorm::Zeta(z) => Some(z.clone()),
        _ => None,
    };
    let cells: Vec<(usize, usize)> =
        (0..config.m_grid.len()).flat_map(|mi| (0..config.trials_per_m).map(move |t| (mi, t))).collect();
    let errs: Vec<f64> = cells
        .par_iter()
        .map(|&(mi, trial)| {
            let m = config.m_grid[mi];
            let seed = derive_seed(config.seed, m as u64, trial as u64);
            let data = sample_dataset(&problem, m, seed, config.design)?;
            let est = SpectralSolver::new(&problem, &data)?.solve(&filter, lambdas[mi])?;
            let e = errors(&problem, &est, zeta.as_ref())?;
            let v = match config.error_norm {
                ErrorNorm::H => e.h_norm,
                ErrorNorm::Prediction => e.prediction_norm,
                ErrorNorm::Zeta(_) => e.zeta_norm.unwrap_or(f64::NAN),
            };
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("error norm at m = {m}, trial = {trial}")));
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;

    let mut per_m = Vec::with_capacity(config.m_grid.len());
    let mut log_sd = Vec::with_capacity(config.m_grid.len());
    for (mi, &m) in config.m_grid.iter().enumerate() {
        let mut e: Vec<f64> = errs[mi * config.trials_per_m..(mi + 1) * config.trials_per_m].to_vec();
        let n = e.len() as f64;
        let mean = e.iter().sum::<f64>() / n;
        let std = (e.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        e.sort_by(f64::total_cmp);
        let logs: Vec<f64> = e.iter().filter(|v| **v > 0.0).map(|v| v.ln()).collect();
        let lm = logs.iter().sum::<f64>() / logs.len().max(1) as f64;
        let lsd = (logs.iter().map(|v| (v - lm).powi(2)).sum::<f64>() / (logs.len().max(2) - 1) as f64).sqrt();
        log_sd.push(lsd);
        per_m.push(RateCell {
            m,
            lambda_used: lambdas[mi],
            mean_error: mean,
            median_error: median(&e),
            std_error: std,
        });
    }

    let points: Vec<(f64, f64)> = per_m.iter().map(|c| (c.m as f64, c.median_error)).collect();
    let max_med = per_m.iter().map(|c| c.median_error).fold(0.0, f64::max);
    let degenerate = points.iter().any(|p| !(p.1 > 0.0)) || max_med < 1e-10;
    let fit = if degenerate {
        None
    } else if log_sd.iter().all(|s| *s > 0.0) {
        let w: Vec<f64> = log_sd.iter().map(|s| 1.0 / (s * s)).collect();
        Some(fit_rate_weighted(&points, &w)?)
    } else {
        Some(fit_rate(&points)?)
    };
    let pass = match (fit, theoretical) {
        (Some(f), Some(t)) => (f.slope - t).abs() <= config.tolerance,
        _ => false,
    };
    Ok(RateReport {
        per_m,
        fitted_exponent: fit.map(|f| f.slope),
        fit_stderr: fit.map(|f| f.stderr),
        theoretical_exponent: theoretical,
        tolerance: config.tolerance,
        pass,
        degenerate,
        config_hash: config.hash()?,
        d: problem.d(),
        seed: config.seed,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theoretical_examples() {
        let e = theoretical_exponent(0.5, 0.5, 0.5, 1.0, SmoothnessCase::Oversmoothing).unwrap();
        assert!((e + 1.0 / 6.0).abs() < 1e-15);
        let e = theoretical_exponent(0.25, 0.5, 2.0, 4.0, SmoothnessCase::Regular).unwrap();
        assert!((e + 0.25).abs() < 1e-15);
        let e = theoretical_exponent(0.25, 0.5, 1.0, 4.0, SmoothnessCase::Regular).unwrap();
        assert!((e + 1.0 / 6.0).abs() < 1e-15);
        assert!(theoretical_exponent(0.5, 0.5, 2.0, 1.0, SmoothnessCase::Oversmoothing).is_err());
    }

    #[test]
    fn oversmoothing_n_brackets() {
        for a in [0.05, 0.1, 0.2, 0.25, 0.3, 0.5] {
            let n = oversmoothing_n(a) as f64;
            assert!(n <= 1.0 / a + 1e-12 && 1.0 / a <= n + 1.0 + 1e-12, "a={a}");
        }
    }

    #[test]
    fn fit_examples() {
        let pts: Vec<(f64, f64)> = (8..=14).map(|k| (2f64.powi(k), 3.0 * 2f64.powi(k).powf(-0.25))).collect();
        let f = fit_rate(&pts).unwrap();
        assert!((f.slope + 0.25).abs() < 1e-12 && f.stderr < 1e-12);
        let flat: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, 2.0)).collect();
        assert!(fit_rate(&flat).unwrap().slope.abs() < 1e-15);
        assert!(fit_rate(&pts[..3]).is_err());
        let mut neg = pts.clone();
        neg[2].1 = 0.0;
        assert!(fit_rate(&neg).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::default_regular();
        assert!(c.validate().is_ok());
        c.trials_per_m = 5;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default_regular();
        c.m_grid = vec![100, 200, 300, 400];
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let c = ExperimentConfig::default_oversmoothing();
        let s = serde_json::to_string(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash().unwrap(), c.hash().unwrap());
        assert_eq!(c.hash().unwrap().len(), 64);
    }

    #[test]
    fn csv_round_trip() {
        let r = RateReport {
            per_m: vec![RateCell {
                m: 256,
                lambda_used: 1.0 / 16.0,
                mean_error: 0.1,
                median_error: 1.0 / 3.0,
                std_error: 0.0,
            }],
            fitted_exponent: Some(-0.2512345),
            fit_stderr: None,
            theoretical_exponent: Some(-0.25),
            tolerance: 0.08,
            pass: true,
            degenerate: false,
            config_hash: "ab".into(),
            d: 256,
            seed: 7,
            warnings: vec![],
        };
        let csv = r.to_csv();
        assert_eq!(RateReport::from_csv(&csv).unwrap().to_csv(), csv);
        let json = r.to_json().unwrap();
        assert_eq!(RateReport::from_json(&json).unwrap().to_json().unwrap(), json);
    }
}
