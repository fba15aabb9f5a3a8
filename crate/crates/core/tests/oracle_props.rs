mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{bss, interior_distortion, random_matrix, random_probs, random_problem};
use ratework::oracle::{
    blahut_arimoto, brute_allocation_min, exact_ld_probability, legendre_grid_max, GridSearch, BA_MAX_ITER,
};
use ratework::rd::RdProblem;
use ratework::Error;

#[test]
fn exact_probability_needs_integral_composition() {
    let p = RdProblem::new(vec![0.3, 0.7], vec![0.5, 0.5], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    assert!(matches!(exact_ld_probability(&p, 8, 0.25), Err(Error::CompositionNotIntegral { .. })));
    assert!(exact_ld_probability(&p, 10, 0.25).is_ok());
}

#[test]
fn exact_probability_small_cases() {
    // n = 8 at Δ = 1/4: at most 2 of 8 fair coin flips disagree.
    assert_eq!(exact_ld_probability(&bss(), 8, 0.25).unwrap().prob, 37.0 / 256.0);
    assert_eq!(exact_ld_probability(&bss(), 16, 0.25).unwrap().prob, 2517.0 / 65536.0);
    assert_eq!(exact_ld_probability(&bss(), 8, 1.0).unwrap().prob, 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ba_objective_never_increases(seed in any::<u64>(), s in -6.0..-0.05f64) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (k, j) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
        let source = random_probs(&mut rng, k);
        let dist = random_matrix(&mut rng, k, j, 2.0);
        let ba = blahut_arimoto(&source, &dist, s, 1e-13, BA_MAX_ITER).unwrap();
        prop_assert!(ba.objective_history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let p = RdProblem::new(source, ba.q_star.clone(), dist).unwrap();
        let pt = p.distortion_at_force(s);
        prop_assert!((pt.rate - ba.rate).abs() <= 1e-6);
        prop_assert!((pt.distortion - ba.distortion).abs() <= 1e-6);
    }

    #[test]
    fn grid_scan_matches_legendre(seed in any::<u64>(), u in 0.05..0.95f64) {
        let p = random_problem(&mut StdRng::seed_from_u64(seed), 3);
        let delta = interior_distortion(&p, u);
        let grid = legendre_grid_max(&p, delta, GridSearch::default());
        prop_assert!((grid - p.rate_legendre(delta).unwrap()).abs() <= 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn brute_allocation_is_within_slack(seed in any::<u64>(), u in 0.1..0.9f64) {
        let p = random_problem(&mut StdRng::seed_from_u64(seed), 3);
        let delta = interior_distortion(&p, u);
        let rate = p.rate_legendre(delta).unwrap();
        let search = brute_allocation_min(&p, delta, 200).unwrap();
        prop_assert!(search.rate >= rate - 1e-10);
        prop_assert!(search.rate <= rate + search.slack);
        let avg: f64 = p.source_probs().iter().zip(&search.allocation).map(|(q, d)| q * d).sum();
        prop_assert!(avg <= delta + 1e-9);
    }
}
