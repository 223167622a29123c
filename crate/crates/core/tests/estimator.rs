mod common;

use common::{max_abs_diff, norm, random_problem};
use hscale::filters::{FilterFamily, FilterId};
use hscale::sampling::{
    adjoint_apply, derive_seed, design_matrix, empirical_cov, errors, estimate, sample_dataset, Dataset, Design,
    SpectralSolver,
};
use hscale::{build_power_problem, PowerProblemParams};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn tikhonov_matches_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for instance in 0..100 {
        let d = rng.gen_range(1..=32);
        let m = rng.gen_range(1..=256);
        let problem = random_problem(&mut rng, d, 0.1);
        let data = sample_dataset(&problem, m, instance, Design::RandomUniform).unwrap();
        let lambda = 10f64.powf(rng.gen_range(-3.0..0.0));

        // Normal equations built from the explicit design matrix.
        let phi = design_matrix(&problem, &data.x).unwrap();
        let tx = phi.transpose() * &phi / m as f64;
        let rhs = DVector::from_vec(adjoint_apply(&problem, &data.x, &data.y).unwrap());
        let u = (tx + DMatrix::identity(d, d) * lambda).lu().solve(&rhs).unwrap();

        let est = estimate(&problem, &data, &FilterFamily::tikhonov(f64::INFINITY), lambda).unwrap();
        let err = max_abs_diff(&est.u_hat, u.as_slice()) / norm(u.as_slice()).max(1.0);
        worst = worst.max(err);
    }
    assert!(worst <= 1e-10, "worst relative deviation {worst:e}");
}

#[test]
fn moment_gram_matches_dense_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let d = rng.gen_range(1..=40);
        let m = rng.gen_range(1..=300);
        let problem = random_problem(&mut rng, d, 0.0);
        let data = sample_dataset(&problem, m, rng.gen(), Design::RandomUniform).unwrap();
        let phi = design_matrix(&problem, &data.x).unwrap();
        let dense = phi.transpose() * &phi / m as f64;
        let fast = empirical_cov(&problem, &data.x).unwrap();
        assert!((dense - fast).amax() < 1e-12);
    }
}

#[test]
fn noiseless_cutoff_is_exact() {
    let base = build_power_problem(&PowerProblemParams { d: 128, ..PowerProblemParams::default_regular() }).unwrap();
    let problem = base.with_sigma(0.0).unwrap();
    let t_min = problem.t_spectrum().iter().copied().fold(f64::INFINITY, f64::min);
    for m in [128, 200, 512] {
        let data = sample_dataset(&problem, m, 1, Design::MidpointGrid).unwrap();
        let est = estimate(&problem, &data, &FilterFamily::spectral_cutoff(f64::INFINITY), 0.5 * t_min).unwrap();
        let e = errors(&problem, &est, None).unwrap();
        assert!(e.h_norm <= 1e-8, "m = {m}: h_norm {:e}", e.h_norm);
    }
}

#[test]
fn sampling_is_deterministic_in_seed() {
    let problem = build_power_problem(&PowerProblemParams { d: 16, ..PowerProblemParams::default_regular() }).unwrap();
    let a = sample_dataset(&problem, 50, 3, Design::RandomUniform).unwrap();
    let b = sample_dataset(&problem, 50, 3, Design::RandomUniform).unwrap();
    let c = sample_dataset(&problem, 50, 4, Design::RandomUniform).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.x, c.x);
    assert!(a.x.iter().all(|x| (0.0..=1.0).contains(x)));
    // Design and noise use separate streams: the noise-free part depends only on x.
    let grid = sample_dataset(&problem, 8, 3, Design::MidpointGrid).unwrap();
    let want: Vec<f64> = (0..8).map(|i| (i as f64 + 0.5) / 8.0).collect();
    assert!(max_abs_diff(&grid.x, &want) < 1e-15);
}

#[test]
fn derived_seeds_are_distinct() {
    let mut seen = std::collections::HashSet::new();
    for m in [256u64, 512, 1024] {
        for trial in 0..200 {
            assert!(seen.insert(derive_seed(20240601, m, trial)));
        }
    }
}

#[test]
fn estimate_json_has_expected_keys() {
    let problem = build_power_problem(&PowerProblemParams { d: 4, ..PowerProblemParams::default_regular() }).unwrap();
    let data = sample_dataset(&problem, 20, 0, Design::RandomUniform).unwrap();
    let est = estimate(&problem, &data, &FilterFamily::tikhonov(f64::INFINITY), 0.01).unwrap();
    let v: serde_json::Value = serde_json::from_str(&est.to_json().unwrap()).unwrap();
    assert_eq!(v["filter"], "tikhonov");
    assert_eq!(v["f_hat"].as_array().unwrap().len(), 4);
    assert!(estimate(&problem, &data, &FilterFamily::tikhonov(f64::INFINITY), 0.0).is_err());
}

#[test]
fn dataset_csv_header() {
    let problem = build_power_problem(&PowerProblemParams { d: 4, ..PowerProblemParams::default_regular() }).unwrap();
    let data = sample_dataset(&problem, 3, 0, Design::RandomUniform).unwrap();
    let csv = data.to_csv();
    assert!(csv.starts_with("x,y\n"));
    assert_eq!(csv.lines().count(), 4);
}

fn filter_of(id: FilterId) -> FilterFamily {
    FilterFamily::from_id(id, f64::INFINITY, None)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimator_is_linear_in_y(
        d in 1usize..24,
        m in 1usize..120,
        seed in any::<u64>(),
        c in -3.0f64..3.0,
        log_lambda in -3.0f64..0.0,
        which in 0usize..3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let problem = random_problem(&mut rng, d, 0.2);
        let id = [FilterId::Tikhonov, FilterId::SpectralCutoff, FilterId::Landweber][which];
        let filter = filter_of(id);
        let lambda = 10f64.powf(log_lambda);
        let base = sample_dataset(&problem, m, seed, Design::RandomUniform).unwrap();
        let y2: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let with = |y: Vec<f64>| Dataset { y, ..base.clone() };
        let combo: Vec<f64> = base.y.iter().zip(&y2).map(|(a, b)| a + c * b).collect();

        let e1 = SpectralSolver::new(&problem, &base).unwrap().solve(&filter, lambda).unwrap();
        let e2 = SpectralSolver::new(&problem, &with(y2)).unwrap().solve(&filter, lambda).unwrap();
        let e3 = SpectralSolver::new(&problem, &with(combo)).unwrap().solve(&filter, lambda).unwrap();
        let lin: Vec<f64> = e1.u_hat.iter().zip(&e2.u_hat).map(|(a, b)| a + c * b).collect();
        let scale = norm(&lin).max(norm(&e3.u_hat)).max(1.0);
        prop_assert!(max_abs_diff(&lin, &e3.u_hat) <= 1e-9 * scale);
    }

    #[test]
    fn estimate_is_deterministic(seed in any::<u64>(), d in 1usize..16, m in 1usize..64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let problem = random_problem(&mut rng, d, 0.1);
        let data = sample_dataset(&problem, m, seed, Design::RandomUniform).unwrap();
        let f = filter_of(FilterId::Tikhonov);
        let a = estimate(&problem, &data, &f, 0.05).unwrap();
        let b = estimate(&problem, &data, &f, 0.05).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn residual_operator_is_a_contraction(seed in any::<u64>(), d in 1usize..16, m in 1usize..64, which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let problem = random_problem(&mut rng, d, 0.1);
        let data = sample_dataset(&problem, m, seed, Design::RandomUniform).unwrap();
        let id = [FilterId::Tikhonov, FilterId::SpectralCutoff, FilterId::Landweber][which];
        let r = SpectralSolver::new(&problem, &data).unwrap().residual_operator(&filter_of(id), 0.01).unwrap();
        let sv = r.singular_values();
        prop_assert!(sv.max() <= 1.0 + 1e-9);
    }
}
