mod common;

use common::random_problem;
use hscale::diagnostics::{check_heinz_bound, check_interpolation};
use hscale::index_fn::log_grid;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn interpolation_holds_on_random_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = 0;
    for _ in 0..1000 {
        let d = rng.gen_range(1..=40);
        let problem = random_problem(&mut rng, d, 0.0);
        let f: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = rng.gen_range(-2.0..2.0);
        let r = t + rng.gen_range(0.01..2.5);
        let e = [t, r, r + rng.gen_range(0.01..2.5)];
        let check = check_interpolation(&problem, &f, e[0], e[1], e[2]).unwrap();
        if !check.pass {
            failures += 1;
        }
    }
    assert_eq!(failures, 0);
}

#[test]
fn interpolation_rejects_bad_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = random_problem(&mut rng, 3, 0.0);
    assert!(check_interpolation(&p, &[1.0, 0.0, 0.0], 1.0, 0.5, 2.0).is_err());
}

#[test]
fn heinz_ratio_at_most_one() {
    let spectrum: Vec<f64> = (1..=2000).map(|j| (j as f64).powi(-2)).collect();
    let grid = log_grid(1e-8, 1.0, 400);
    for a in [0.1, 0.25, 0.5] {
        let ratio = check_heinz_bound(&spectrum, a, &grid).unwrap();
        assert!(ratio <= 1.0 + 1e-12, "a = {a}: {ratio}");
    }
    assert!(check_heinz_bound(&spectrum, 0.75, &grid).is_err());
}

proptest! {
    #[test]
    fn heinz_on_random_spectra(spec in prop::collection::vec(1e-10f64..1.0, 1..60), a in 0.01f64..=0.5) {
        let ratio = check_heinz_bound(&spec, a, &log_grid(1e-8, 1.0, 50)).unwrap();
        prop_assert!(ratio <= 1.0 + 1e-12);
    }
}
