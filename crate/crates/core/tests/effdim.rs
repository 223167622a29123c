use hscale::effdim::{
    check_effdim_relation, check_tail_condition, default_lambda_grid, effdim, effdim_prefactor, fit_effdim_exponent,
    EffDimCurve,
};
use hscale::index_fn::{log_grid, IndexFunctionSpec};
use hscale::{build_power_problem, PowerProblemParams};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn poly(d: usize, p: f64) -> Vec<f64> {
    (1..=d).map(|j| (j as f64).powf(-p)).collect()
}

#[test]
fn polynomial_exponent_recovered() {
    let fit = fit_effdim_exponent(&poly(2000, 2.0), 1e-5, 1e-2, 60).unwrap();
    assert!((fit.b_hat - 0.5).abs() <= 0.05, "{fit:?}");
    assert!(!fit.poor_power_fit);
    let fit = fit_effdim_exponent(&poly(4000, 4.0), 1e-6, 1e-2, 60).unwrap();
    assert!((fit.b_hat - 0.25).abs() <= 0.05, "{fit:?}");
}

#[test]
fn truncation_binding_is_reported() {
    assert!(fit_effdim_exponent(&poly(50, 2.0), 1e-6, 1e-2, 20).is_err());
}

#[test]
fn degenerate_spectra() {
    let single = [1.0, 0.0, 0.0, 0.0];
    assert!((effdim(&single, 0.25).unwrap() - 0.8).abs() < 1e-15);
    assert!(effdim(&single, 0.0).is_err());
    let fit = fit_effdim_exponent(&single, 1e-4, 1e-2, 8).unwrap();
    assert!(fit.b_hat.abs() < 0.02);
}

#[test]
fn tail_condition_is_moderate_for_power_decay() {
    let s = poly(2000, 2.0);
    let c = check_tail_condition(&s, &log_grid(1e-6, 1.0, 200)).unwrap();
    assert!(c > 0.0 && c < 3.0, "C = {c}");
}

#[test]
fn prefactor_reproduces_curve() {
    let s = poly(5000, 2.0);
    let grid = log_grid(1e-5, 1e-3, 30);
    let c = effdim_prefactor(&s, 0.5, &grid).unwrap();
    for &l in &grid {
        let ratio = effdim(&s, l).unwrap() / (c * l.powf(-0.5));
        assert!((ratio - 1.0).abs() < 0.05);
    }
}

#[test]
fn relation_on_default_problem() {
    let p = build_power_problem(&PowerProblemParams { d: 256, ..PowerProblemParams::default_regular() }).unwrap();
    let rel =
        check_effdim_relation(&p, &IndexFunctionSpec::power(0.25), &default_lambda_grid(1e-5, 1e-1), 8.0).unwrap();
    assert!(rel.pass, "max ratio {}", rel.max_ratio);
}

#[test]
fn curve_csv() {
    let curve = EffDimCurve::compute(&poly(10, 2.0), &[0.1, 0.01], "T_nu").unwrap();
    let csv = curve.to_csv();
    assert!(csv.starts_with("lambda,n_effective\n"));
    assert_eq!(csv.lines().count(), 3);
}

fn orthogonal(d: usize, seed: &[f64]) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, d, |i, j| seed[(i * d + j) % seed.len()] + if i == j { 2.0 } else { 0.0 });
    m.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn effdim_shape(spec in prop::collection::vec(1e-8f64..1.0, 1..50), l1 in -6.0f64..0.0, l2 in -6.0f64..0.0) {
        let (a, b) = if l1 < l2 { (10f64.powf(l1), 10f64.powf(l2)) } else { (10f64.powf(l2), 10f64.powf(l1)) };
        let (na, nb) = (effdim(&spec, a).unwrap(), effdim(&spec, b).unwrap());
        let mid = effdim(&spec, 0.5 * (a + b)).unwrap();
        prop_assert!(nb <= na + 1e-12);
        prop_assert!(mid <= 0.5 * (na + nb) + 1e-12);
        prop_assert!(a * na <= b * nb * (1.0 + 1e-12));
        prop_assert!(na <= spec.len() as f64);
    }

    #[test]
    fn effdim_matches_dense_trace(spec in prop::collection::vec(1e-6f64..1.0, 1..20),
                                  noise in prop::collection::vec(-1.0f64..1.0, 1..40),
                                  log_lambda in -4.0f64..0.0) {
        let d = spec.len();
        let lambda = 10f64.powf(log_lambda);
        let q = orthogonal(d, &noise);
        let t = &q * DMatrix::from_diagonal(&DVector::from_vec(spec.clone())) * q.transpose();
        let shifted = &t + DMatrix::identity(d, d) * lambda;
        let trace = (shifted.lu().solve(&t).unwrap()).trace();
        prop_assert!((trace - effdim(&spec, lambda).unwrap()).abs() <= 1e-9 * d as f64);
    }
}
