//! One function per subcommand. Each returns whether its checks passed and
//! the files it wrote.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use hscale::diagnostics::{coverage_batch, reports_to_csv, BoundCheckReport, Quantity};
use hscale::distance::{distance_bound, DistanceCurve, DistanceKind, SmoothnessCase};
use hscale::effdim::{
    check_effdim_relation, default_lambda_grid, fit_effdim_exponent, EffDimCurve, EffDimFit, EffDimRelation,
    DEFAULT_RELATION_CEILING,
};
use hscale::filters::{
    check_prop_regularization, check_qualification, check_regularization_constants,
    default_lambda_grid as filter_lambda_grid, default_t_grid, FilterFamily, DEFAULT_NU_MAX,
};
use hscale::harness::{run_rate_experiment, ExperimentConfig, ProblemSource, RateReport};
use hscale::index_fn::{log_grid, IndexFunctionSpec};
use hscale::param_choice::{LambdaRule, LambdaRuleKind};
use hscale::spectral_model::{kernel_gram, mercer_decompose, Kernel};
use hscale::textfmt::fmt_sig;
use hscale::PowerProblemParams;
use serde::{Deserialize, Serialize};

pub struct Outcome {
    pub pass: bool,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn write(out: &Path, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = out.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    files.push(path);
    Ok(())
}

// ---------------------------------------------------------------- rate

pub fn rate(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let report = run_rate_experiment(cfg)?;
    let mut files = Vec::new();
    write(out, "rate_report.json", &report.to_json()?, &mut files)?;
    write(out, "rate_report.csv", &report.to_csv(), &mut files)?;
    write(out, "rate.svg", &report.to_svg(), &mut files)?;
    Ok(Outcome { pass: report.pass, files, summary: rate_summary(&report) })
}

fn rate_summary(r: &RateReport) -> String {
    let f = r.fitted_exponent.map_or("undefined".to_string(), |v| format!("{v:.4}"));
    let t = r.theoretical_exponent.map_or("n/a".to_string(), |v| format!("{v:.4}"));
    let flag = if r.degenerate { " (degenerate fit)" } else { "" };
    format!(
        "rate: fitted exponent {f} vs theoretical {t} (tol {}){flag}: {}",
        r.tolerance,
        if r.pass { "PASS" } else { "FAIL" }
    )
}

// ---------------------------------------------------------------- effdim

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpectrumSource {
    /// `t_j = j^{-exponent}`.
    Polynomial {
        d: usize,
        exponent: f64,
    },
    /// `t_j = exp(-rate j)`.
    Exponential {
        d: usize,
        rate: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
    Problem {
        problem: ProblemSource,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffdimConfig {
    pub spectrum: SpectrumSource,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub n_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_b: Option<f64>,
    #[serde(default = "default_b_tol")]
    pub tolerance: f64,
    #[serde(default = "default_ceiling")]
    pub relation_ceiling: f64,
}

fn default_b_tol() -> f64 {
    0.05
}
fn default_ceiling() -> f64 {
    DEFAULT_RELATION_CEILING
}

impl Default for EffdimConfig {
    fn default() -> Self {
        EffdimConfig {
            spectrum: SpectrumSource::Polynomial { d: 2000, exponent: 2.0 },
            lambda_lo: 1e-5,
            lambda_hi: 1e-2,
            n_points: 121,
            expected_b: Some(0.5),
            tolerance: default_b_tol(),
            relation_ceiling: default_ceiling(),
        }
    }
}

#[derive(Serialize)]
struct EffdimReport<'a> {
    fit: EffDimFit,
    expected_b: Option<f64>,
    tolerance: f64,
    relation: Option<&'a EffDimRelation>,
    pass: bool,
}

pub fn effdim(cfg: &EffdimConfig, out: &Path) -> Result<Outcome> {
    let (spectrum, problem) = match &cfg.spectrum {
        SpectrumSource::Polynomial { d, exponent } => {
            ((1..=*d).map(|j| (j as f64).powf(-exponent)).collect::<Vec<_>>(), None)
        }
        SpectrumSource::Exponential { d, rate } => ((1..=*d).map(|j| (-rate * j as f64).exp()).collect(), None),
        SpectrumSource::Explicit { values } => (values.clone(), None),
        SpectrumSource::Problem { problem } => {
            let p = problem.build(1)?;
            (p.t_spectrum().to_vec(), Some(p))
        }
    };
    let fit = fit_effdim_exponent(&spectrum, cfg.lambda_lo, cfg.lambda_hi, cfg.n_points)?;
    let curve = EffDimCurve::compute(&spectrum, &default_lambda_grid(cfg.lambda_lo, cfg.lambda_hi), "T_nu")?;
    let relation = match &problem {
        Some(p) => match p.smoothness() {
            Some(spec) => Some(check_effdim_relation(
                p,
                &IndexFunctionSpec::power(spec.a_link),
                &default_lambda_grid(cfg.lambda_lo, 1e-1_f64.max(cfg.lambda_hi)),
                cfg.relation_ceiling,
            )?),
            None => None,
        },
        None => None,
    };
    let b_ok = cfg.expected_b.is_none_or(|b| (fit.b_hat - b).abs() <= cfg.tolerance);
    let pass = b_ok && relation.as_ref().is_none_or(|r| r.pass);
    let report =
        EffdimReport { fit, expected_b: cfg.expected_b, tolerance: cfg.tolerance, relation: relation.as_ref(), pass };
    let mut files = Vec::new();
    write(out, "effdim_curve.csv", &curve.to_csv(), &mut files)?;
    write(out, "effdim_report.json", &serde_json::to_string_pretty(&report)?, &mut files)?;
    let mut summary = format!("effdim: b_hat = {:.4} (stderr {:.2e})", fit.b_hat, fit.stderr);
    if let Some(b) = cfg.expected_b {
        summary.push_str(&format!(", expected {b} +/- {}", cfg.tolerance));
    }
    if fit.poor_power_fit {
        summary.push_str(", poor power fit");
    }
    if let Some(r) = &relation {
        summary.push_str(&format!(", relation max ratio {:.3} (ceiling {})", r.max_ratio, r.ceiling));
    }
    summary.push_str(if pass { ": PASS" } else { ": FAIL" });
    Ok(Outcome { pass, files, summary })
}

// ---------------------------------------------------------------- bounds

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub problem: ProblemSource,
    pub m_values: Vec<usize>,
    pub etas: Vec<f64>,
    pub trials: usize,
    pub quantities: Vec<Quantity>,
    pub lambda_rule: LambdaRule,
    pub case: SmoothnessCase,
    pub seed: u64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            problem: ProblemSource::power(&PowerProblemParams::default_regular(), Some(256)),
            m_values: vec![1024, 4096],
            etas: vec![0.05, 0.1],
            trials: 500,
            quantities: vec![Quantity::Psi, Quantity::Upsilon, Quantity::LambdaQ, Quantity::TxDev],
            lambda_rule: LambdaRule::new(LambdaRuleKind::BalanceEffdim),
            case: SmoothnessCase::Regular,
            seed: 7,
        }
    }
}

pub fn bounds(cfg: &BoundsConfig, out: &Path) -> Result<Outcome> {
    let m_max = cfg.m_values.iter().copied().max().context("m_values is empty")?;
    let problem = cfg.problem.build(m_max)?;
    let spec = *problem.smoothness().context("bounds need a problem with smoothness parameters")?;
    let mut reports: Vec<BoundCheckReport> = Vec::new();
    for &m in &cfg.m_values {
        let lambda = cfg.lambda_rule.choose(problem.t_spectrum(), &spec, cfg.case, m, None)?.lambda;
        reports.extend(coverage_batch(&problem, &cfg.quantities, lambda, m, &cfg.etas, cfg.trials, cfg.seed)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    let mut files = Vec::new();
    write(out, "bounds_report.json", &serde_json::to_string_pretty(&reports)?, &mut files)?;
    write(out, "bounds_report.csv", &reports_to_csv(&reports), &mut files)?;
    let worst = reports.iter().map(|r| r.coverage - (1.0 - r.eta)).fold(f64::INFINITY, f64::min);
    let summary = format!(
        "bounds: {} reports, worst coverage margin {:+.3}: {}",
        reports.len(),
        worst,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(Outcome { pass, files, summary })
}

// ---------------------------------------------------------------- distance

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceConfig {
    pub problem: ProblemSource,
    pub kind: DistanceKind,
    pub r_lo: f64,
    pub r_hi: f64,
    pub n: usize,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        DistanceConfig {
            problem: ProblemSource::power(&PowerProblemParams::default_oversmoothing(), Some(512)),
            kind: DistanceKind::D,
            r_lo: 1.0,
            r_hi: 1e3,
            n: 61,
        }
    }
}

#[derive(Serialize)]
struct DistanceReport<'a> {
    curve: &'a DistanceCurve,
    bound: Option<Vec<f64>>,
    nonincreasing: bool,
    bound_dominates: Option<bool>,
    pass: bool,
}

pub fn distance(cfg: &DistanceConfig, out: &Path) -> Result<Outcome> {
    let problem = cfg.problem.build(1)?;
    let rs = log_grid(cfg.r_lo, cfg.r_hi, cfg.n);
    let curve = DistanceCurve::compute(&problem, &rs, cfg.kind)?;
    let nonincreasing = curve.values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let bound = match (cfg.kind, problem.smoothness()) {
        (DistanceKind::D, Some(spec)) if spec.r < 1.0 => Some(
            rs.iter()
                .map(|&r| {
                    if r < spec.r_dagger {
                        Ok(f64::INFINITY)
                    } else {
                        distance_bound(spec.r, spec.r_dagger, r).map(|b| b.value)
                    }
                })
                .collect::<hscale::Result<Vec<f64>>>()?,
        ),
        _ => None,
    };
    let bound_dominates = bound.as_ref().map(|b| curve.values.iter().zip(b).all(|(d, b)| *d <= b + 1e-9));
    let pass = nonincreasing && bound_dominates.unwrap_or(true);
    let report = DistanceReport { curve: &curve, bound, nonincreasing, bound_dominates, pass };
    let mut files = Vec::new();
    write(out, "distance_curve.csv", &curve.to_csv(), &mut files)?;
    write(out, "distance_report.json", &serde_json::to_string_pretty(&report)?, &mut files)?;
    let summary = format!(
        "distance: d({}) = {}, nonincreasing = {nonincreasing}, bound dominates = {}: {}",
        fmt_sig(cfg.r_lo, 6),
        fmt_sig(curve.values[0], 6),
        bound_dominates.map_or("n/a".into(), |b| b.to_string()),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(Outcome { pass, files, summary })
}

// ---------------------------------------------------------------- filters-check

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltersConfig {
    pub t_max: f64,
    pub landweber_p: f64,
    pub saturation_p: f64,
}

impl Default for FiltersConfig {
    fn default() -> Self {
        FiltersConfig { t_max: 1.0, landweber_p: 1.0, saturation_p: 2.0 }
    }
}

#[derive(Serialize)]
struct FilterRow {
    filter: &'static str,
    d_obs: f64,
    b_obs: f64,
    gamma_obs: f64,
    p: f64,
    gamma_p_obs: f64,
    gamma_p_declared: f64,
    pass: bool,
}

pub fn filters_check(cfg: &FiltersConfig, out: &Path) -> Result<Outcome> {
    let lambdas = filter_lambda_grid();
    let families = [
        (FilterFamily::tikhonov(cfg.t_max), 1.0),
        (FilterFamily::spectral_cutoff(cfg.t_max), 2.0),
        (FilterFamily::landweber(cfg.landweber_p, DEFAULT_NU_MAX), cfg.landweber_p),
    ];
    let mut rows = Vec::new();
    for (f, p) in families {
        let t_grid = default_t_grid(f.t_max);
        let c = check_regularization_constants(&f, &lambdas, &t_grid);
        let gp = check_qualification(&f, p, &lambdas, &t_grid);
        let declared = f.gamma_p_for(p);
        rows.push(FilterRow {
            filter: f.id.name(),
            d_obs: c.d_obs,
            b_obs: c.b_obs,
            gamma_obs: c.gamma_obs,
            p,
            gamma_p_obs: gp,
            gamma_p_declared: declared,
            pass: c.pass && gp <= declared + hscale::filters::CONSTANT_TOL,
        });
    }
    let tik = FilterFamily::tikhonov(cfg.t_max);
    let saturation = check_qualification(&tik, cfg.saturation_p, &lambdas, &default_t_grid(cfg.t_max));
    let t_grid = default_t_grid(cfg.t_max);
    let prop = vec![
        check_prop_regularization(&tik, &IndexFunctionSpec::power(0.5), &lambdas, &t_grid)?,
        check_prop_regularization(
            &FilterFamily::spectral_cutoff(cfg.t_max),
            &IndexFunctionSpec::identity(),
            &lambdas,
            &t_grid,
        )?,
    ];
    let pass = rows.iter().all(|r| r.pass) && saturation > 10.0 && prop.iter().all(|p| p.pass);

    let mut csv = String::from("filter,D_obs,B_obs,gamma_obs,p,gamma_p_obs,gamma_p_declared,pass\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.filter,
            fmt_sig(r.d_obs, 15),
            fmt_sig(r.b_obs, 15),
            fmt_sig(r.gamma_obs, 15),
            fmt_sig(r.p, 15),
            fmt_sig(r.gamma_p_obs, 15),
            fmt_sig(r.gamma_p_declared, 15),
            r.pass
        ));
    }
    let json = serde_json::json!({
        "filters": rows,
        "tikhonov_saturation": {"p": cfg.saturation_p, "gamma_p_obs": saturation},
        "prop_regularization": prop,
        "pass": pass,
    });
    let mut files = Vec::new();
    write(out, "filters_check.csv", &csv, &mut files)?;
    write(out, "filters_check.json", &serde_json::to_string_pretty(&json)?, &mut files)?;

    let mut summary = format!(
        "{:<10} {:>10} {:>10} {:>10} {:>6} {:>12}\n",
        "filter", "D_obs", "B_obs", "gamma_obs", "p", "gamma_p_obs"
    );
    for r in &rows {
        summary.push_str(&format!(
            "{:<10} {:>10.6} {:>10.6} {:>10.6} {:>6} {:>12.6}\n",
            r.filter, r.d_obs, r.b_obs, r.gamma_obs, r.p, r.gamma_p_obs
        ));
    }
    summary.push_str(&format!(
        "tikhonov gamma_{} = {:.3e} (saturation)\nfilters-check: {}",
        cfg.saturation_p,
        saturation,
        if pass { "PASS" } else { "FAIL" }
    ));
    Ok(Outcome { pass, files, summary })
}

// ---------------------------------------------------------------- decompose

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelName {
    K1,
    K2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    pub kernel: KernelName,
    pub grid_n: usize,
    pub n_report: usize,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig { kernel: KernelName::K2, grid_n: 256, n_report: 20 }
    }
}

pub fn decompose(cfg: &DecomposeConfig, out: &Path) -> Result<Outcome> {
    let kernel = match cfg.kernel {
        KernelName::K1 => Kernel::K1,
        KernelName::K2 => Kernel::K2,
    };
    let dec = mercer_decompose(&kernel, cfg.grid_n)?;
    let gram = kernel_gram(&kernel, &dec.grid);
    let recon = dec.reconstruction_error(&gram);
    let ev = &dec.eigenvalues;
    let ratio_10_2 = if ev.len() >= 10 && ev[1] > 0.0 { Some(ev[9] / ev[1]) } else { None };
    let k2_rel_errors: Option<Vec<f64>> = (cfg.kernel == KernelName::K2).then(|| {
        (1..=5.min(ev.len()))
            .map(|k| {
                let want = 1.0 / (k as f64 * std::f64::consts::PI).powi(2);
                (ev[k - 1] - want).abs() / want
            })
            .collect()
    });
    let ordered = ev.windows(2).all(|w| w[0] >= w[1]) && ev.iter().all(|v| *v >= 0.0);
    let recon_ok = recon <= 1e-8 * gram.amax();
    let k2_ok = k2_rel_errors.as_ref().is_none_or(|e| e.iter().all(|e| *e < 0.01));
    let pass = ordered && recon_ok && k2_ok;

    let n = cfg.n_report.min(ev.len());
    let mut csv = String::from("k,eigenvalue\n");
    for (k, v) in ev.iter().take(n).enumerate() {
        csv.push_str(&format!("{},{}\n", k + 1, fmt_sig(*v, 15)));
    }
    let json = serde_json::json!({
        "kernel": cfg.kernel,
        "grid_n": cfg.grid_n,
        "eigenvalues": &ev[..n],
        "rank": dec.rank(),
        "reconstruction_error": recon,
        "ratio_10_2": ratio_10_2,
        "k2_relative_errors": k2_rel_errors,
        "pass": pass,
    });
    let mut files = Vec::new();
    write(out, "mercer_eigenvalues.csv", &csv, &mut files)?;
    write(out, "mercer.json", &serde_json::to_string_pretty(&json)?, &mut files)?;
    let summary = format!(
        "decompose {:?}: rank {}, lambda_10/lambda_2 = {}, reconstruction error {:.2e}: {}",
        cfg.kernel,
        dec.rank(),
        ratio_10_2.map_or("n/a".into(), |r| format!("{r:.3e}")),
        recon,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(Outcome { pass, files, summary })
}
