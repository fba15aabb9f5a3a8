#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use ratework::rd::RdProblem;
use ratework::FiniteDistribution;

/// Strictly positive probability vector of length `n`.
pub fn random_probs(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize, hi: f64) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0.0..hi)).collect()).collect()
}

/// A random problem with `K, J ≤ max` and distortions in `[0, 2]` whose
/// curve is not degenerate.
pub fn random_problem(rng: &mut StdRng, max: usize) -> RdProblem {
    loop {
        let k = rng.gen_range(1..=max);
        let j = rng.gen_range(2..=max);
        let p = RdProblem::new(random_probs(rng, k), random_probs(rng, j), random_matrix(rng, k, j, 2.0))
            .expect("valid random problem");
        if p.zero_force_distortion() - p.min_distortion() > 1e-3 {
            return p;
        }
    }
}

/// A distortion strictly inside `(Δ_min, Δ₀)`, a fraction `u` of the way up.
pub fn interior_distortion(p: &RdProblem, u: f64) -> f64 {
    p.min_distortion() + u * (p.zero_force_distortion() - p.min_distortion())
}

pub fn random_distribution(rng: &mut StdRng, max: usize) -> FiniteDistribution {
    let n = rng.gen_range(2..=max);
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    FiniteDistribution::new(values, random_probs(rng, n)).expect("valid distribution")
}

pub fn bss() -> RdProblem {
    RdProblem::new(vec![0.5, 0.5], vec![0.5, 0.5], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
}

/// `ln 2 − h₂(Δ)` in nats.
pub fn bss_rate(delta: f64) -> f64 {
    std::f64::consts::LN_2 - ratework::chernoff::binary_entropy(delta)
}

/// Central-difference step in a mean-value coordinate whose conjugate force
/// responds with slope `1/variance`: keeps the force change near 1e-3.
pub fn fd_step(variance: f64) -> f64 {
    (1e-3 * variance).min(1e-5)
}
