#![allow(dead_code)]

use hscale::spectral_model::{Basis, NoiseModel, SpectralProblem};
use rand::Rng;

/// Small random diagonal problem with decreasing `a`, increasing `l`.
pub fn random_problem<R: Rng>(rng: &mut R, d: usize, sigma: f64) -> SpectralProblem {
    let s: f64 = rng.gen_range(0.3..1.5);
    let beta: f64 = rng.gen_range(0.2..1.0);
    let a: Vec<f64> = (1..=d).map(|j| (j as f64).powf(-beta * s)).collect();
    let l: Vec<f64> = (1..=d).map(|j| (j as f64).powf(s)).collect();
    let f: Vec<f64> = (1..=d).map(|j| rng.gen_range(-1.0..1.0) / j as f64).collect();
    SpectralProblem::new(Basis::Cosine, a, l, f, NoiseModel::gaussian(sigma), None).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}
