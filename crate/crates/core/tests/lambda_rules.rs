use hscale::distance::SmoothnessCase;
use hscale::effdim::effdim;
use hscale::param_choice::{
    balance_prefactor, lambda_balance_closed_form, lambda_balance_effdim, lambda_balance_general, lambda_phi_inverse,
    lambda_power_table, LambdaRule, LambdaRuleKind, PowerParams, TableRegime,
};
use hscale::{build_power_problem, PowerProblemParams};
use proptest::prelude::*;

fn poly(d: usize, p: f64) -> Vec<f64> {
    (1..=d).map(|j| (j as f64).powf(-p)).collect()
}

#[test]
fn balance_solves_its_equation() {
    let s = poly(2000, 2.0);
    for m in [100, 1000, 10_000] {
        let c = lambda_balance_effdim(&s, m).unwrap();
        assert!(c.warning.is_none());
        let n = effdim(&s, c.lambda).unwrap();
        assert!((n - m as f64 * c.lambda).abs() <= 1e-8 * n);
    }
}

#[test]
fn balance_fallbacks_warn() {
    let c = lambda_balance_effdim(&[1.0], 1).unwrap();
    assert!(c.lambda > 0.0 && c.lambda <= 1.0);
    assert!(lambda_balance_effdim(&[1.0], 0).is_err());
}

#[test]
fn closed_forms() {
    assert!((lambda_phi_inverse(0.25, 4.0, 10_000).unwrap() - 10_000f64.powf(-2.0 / 3.0)).abs() < 1e-15);
    assert!(lambda_phi_inverse(0.25, 1.0, 100).is_err());
    assert!((lambda_balance_closed_form(0.5, 4096, 1.0).unwrap() - 4096f64.powf(-2.0 / 3.0)).abs() < 1e-15);
    assert!(lambda_balance_closed_form(1.0, 100, 1.0).is_err());
}

#[test]
fn table_regimes() {
    let reg = PowerParams::from_spec(&PowerProblemParams::default_regular().smoothness());
    assert_eq!(reg.regime(SmoothnessCase::Regular).unwrap(), TableRegime::RegularSmoothness);
    assert!((reg.rate_exponent(SmoothnessCase::Regular).unwrap() - 0.5).abs() < 1e-12);
    let over = PowerParams::from_spec(&PowerProblemParams::default_oversmoothing().smoothness());
    assert_eq!(over.regime(SmoothnessCase::Oversmoothing).unwrap(), TableRegime::Oversmoothing);
    assert!((over.lambda_exponent(SmoothnessCase::Oversmoothing).unwrap() - 4.0 / 3.0).abs() < 1e-12);
    // oversmoothing row needs r <= 1
    assert!(reg.regime(SmoothnessCase::Oversmoothing).is_err());
}

#[test]
fn effdim_balance_agrees_with_fitted_closed_form() {
    let p = build_power_problem(&PowerProblemParams { d: 256, ..PowerProblemParams::default_regular() }).unwrap();
    let t = p.t_spectrum();
    let scale = balance_prefactor(t, 0.5, 1e-3, 1e-1).unwrap();
    for k in 10..=14 {
        let m = 1usize << k;
        let a = lambda_balance_effdim(t, m).unwrap().lambda;
        let b = lambda_balance_closed_form(0.5, m, scale).unwrap();
        assert!((a - b).abs() / a <= 0.05, "m = {m}: {a} vs {b}");
    }
}

#[test]
fn rule_serde_shape() {
    let r = LambdaRule::new(LambdaRuleKind::BalanceEffdim);
    let v = serde_json::to_value(r).unwrap();
    assert_eq!(v["rule"], "balance_effdim");
    let parsed: LambdaRule = serde_json::from_str(r#"{"rule":"power_table","params":{"scale":2.0}}"#).unwrap();
    assert_eq!(parsed.params.scale, Some(2.0));
    assert!(serde_json::from_str::<LambdaRule>(r#"{"rule":"power_table","params":{"sclae":2.0}}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rules_nonincreasing_in_m(m in 1usize..100_000, dm in 1usize..100_000, which in 0usize..4) {
        let params = PowerProblemParams { d: 300, ..PowerProblemParams::default_regular() };
        let spec = params.smoothness();
        let t: Vec<f64> = poly(300, 2.0);
        let kind = [LambdaRuleKind::BalanceEffdim, LambdaRuleKind::PhiInverse, LambdaRuleKind::BalanceGeneral,
                    LambdaRuleKind::PowerTable][which];
        let rule = LambdaRule::new(kind);
        let a = rule.choose(&t, &spec, SmoothnessCase::Regular, m, None).unwrap().lambda;
        let b = rule.choose(&t, &spec, SmoothnessCase::Regular, m + dm, None).unwrap().lambda;
        prop_assert!(b <= a * (1.0 + 1e-9), "{:?}: lambda({}) = {} < lambda({}) = {}", kind, m, a, m + dm, b);
        prop_assert!(a > 0.0 && a <= 1.0);
    }

    #[test]
    fn general_balance_matches_effdim_balance_at_r_one(m in 10usize..100_000) {
        let mut spec = PowerProblemParams::default_regular().smoothness();
        spec.r = 1.0;
        let t = poly(500, 2.0);
        let a = lambda_balance_general(&t, &spec, m).unwrap().lambda;
        let b = lambda_balance_effdim(&t, m).unwrap().lambda;
        prop_assert!((a - b).abs() <= 1e-8 * b);
    }

    #[test]
    fn power_table_scales_linearly(m in 1usize..100_000, scale in 0.01f64..1.0) {
        let params = PowerParams::from_spec(&PowerProblemParams::default_regular().smoothness());
        let base = lambda_power_table(&params, m, SmoothnessCase::Regular, 1.0).unwrap();
        let scaled = lambda_power_table(&params, m, SmoothnessCase::Regular, scale).unwrap();
        prop_assert!((scaled - (scale * base).min(1.0)).abs() <= 1e-15);
    }
}
