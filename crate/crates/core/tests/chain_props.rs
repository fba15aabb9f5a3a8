mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{fd_step, interior_distortion, random_problem};
use ratework::chain::{ChainSystem, ElementArray, LevelSet};
use ratework::chernoff::{binary_entropy, tilt};
use ratework::rd::RdProblem;

fn mapped(seed: u64, beta: f64) -> (RdProblem, ChainSystem) {
    let p = random_problem(&mut StdRng::seed_from_u64(seed), 4);
    let sys = ChainSystem::from_rd_problem(&p, beta).unwrap();
    (p, sys)
}

#[test]
fn two_level_entropy() {
    let levels = LevelSet::from_energies(vec![0.0, 1.0]).unwrap();
    let mid = levels.entropy_at_energy(0.5, 1e-12).unwrap();
    assert!((mid.entropy - std::f64::consts::LN_2).abs() < 1e-12);
    assert_eq!(mid.beta, 0.0);
    let quarter = levels.entropy_at_energy(0.25, 1e-13).unwrap();
    assert!((quarter.entropy - binary_entropy(0.25)).abs() < 1e-9);
    let ground = levels.entropy_at_energy(0.0, 1e-12).unwrap();
    assert_eq!(ground.entropy, 0.0);
    assert!(ground.beta.is_infinite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn length_is_the_distortion(seed in any::<u64>(), beta in 0.2..5.0f64, s in -6.0..0.0f64) {
        let (p, sys) = mapped(seed, beta);
        prop_assert!((sys.expected_length(s / beta) - p.distortion_fn(s)).abs() <= 1e-10);
    }

    #[test]
    fn reversible_work_is_rate_times_kt(seed in any::<u64>(), beta in 0.2..5.0f64, s in -6.0..0.0f64) {
        let (p, sys) = mapped(seed, beta);
        let tol = 1e-10;
        let work = sys.quasistatic_work(s / beta, tol);
        prop_assert!((work - p.distortion_at_force(s).rate / beta).abs() <= 2.0 * tol);
    }

    #[test]
    fn stepwise_protocols_bracket_the_reversible_work(
        seed in any::<u64>(),
        beta in 0.2..5.0f64,
        force in -5.0..-0.05f64,
        cuts in prop::collection::vec(0.001..0.999f64, 0..30),
    ) {
        let (_, sys) = mapped(seed, beta);
        let mut cuts = cuts;
        cuts.sort_by(|a, b| a.total_cmp(b));
        cuts.dedup();
        let mut schedule = vec![0.0];
        schedule.extend(cuts.iter().map(|c| c * force));
        schedule.push(force);
        let (left, right) = sys.protocol_sums(&schedule).unwrap();
        let work = sys.quasistatic_work(force, 1e-11);
        prop_assert!(left.min(right) - 1e-10 <= work && work <= left.max(right) + 1e-10);
        prop_assert!(sys.protocol_work(&schedule).unwrap() >= work - 1e-10);
    }

    #[test]
    fn susceptibility_is_variance(seed in any::<u64>(), beta in 0.2..5.0f64, force in -4.0..4.0f64) {
        let (p, sys) = mapped(seed, beta);
        let h = 1e-5;
        let slope = (sys.expected_length(force + h) - sys.expected_length(force - h)) / (2.0 * h);
        let scale = beta * p.distortion().iter().flatten().cloned().fold(0.0, f64::max).powi(2).max(1e-3);
        prop_assert!((slope - sys.susceptibility(force)).abs() <= 1e-6 * scale);
    }

    #[test]
    fn equilibrium_equalizes_forces(seed in any::<u64>(), u in 0.15..0.85f64) {
        let (p, sys) = mapped(seed, 1.0);
        let target = interior_distortion(&p, u);
        let eq = sys.equilibrium_force(target, 1e-13).unwrap();
        prop_assert!((sys.expected_length(eq.force) - target).abs() <= 1e-10);
        let laws = p.build_delta_dists();
        for (x, &y) in eq.array_lengths.iter().enumerate() {
            let h = fd_step(tilt(&laws[x], eq.force).variance);
            // Below this the difference is dominated by rounding in F_x.
            if h < 1e-10 {
                continue;
            }
            let lo = sys.array_helmholtz(x, y - h, 1e-14).unwrap();
            let hi = sys.array_helmholtz(x, y + h, 1e-14).unwrap();
            prop_assert!(((hi - lo) / (2.0 * h) - eq.force).abs() <= 1e-5);
        }
    }

    #[test]
    fn thermodynamic_consistency(
        levels in prop::collection::vec((0.0..3.0f64, 0.5..4.0f64), 2..6),
        beta in 0.05..4.0f64,
    ) {
        let (energies, degeneracies): (Vec<f64>, Vec<f64>) = levels.into_iter().unzip();
        let set = LevelSet::new(energies, degeneracies).unwrap();
        let e = set.mean_energy(beta);
        prop_assume!(e < set.mean_energy(0.0) - 1e-9);
        let pt = set.entropy_at_energy(e, 1e-14).unwrap();
        prop_assert!((set.log_partition(beta) - (pt.entropy - beta * e)).abs() <= 1e-9);
    }
}

#[test]
fn explicit_arrays_and_temperature_scaling() {
    let arrays = vec![
        ElementArray::new(vec![0.0, 1.0], vec![0.0, 0.0], 0.5).unwrap(),
        ElementArray::new(vec![0.0, 1.0], vec![0.0, 0.0], 0.5).unwrap(),
    ];
    let sys = ChainSystem::new(arrays, 2.0, 3.0).unwrap();
    assert!((sys.temperature() - 1.0 / 6.0).abs() < 1e-15);
    // Two-state elements: Y(λ) is the logistic function of βλ.
    let force: f64 = -0.4;
    let expected = 1.0 / (1.0 + (-2.0 * force).exp());
    assert!((sys.expected_length(force) - expected).abs() < 1e-15);
}
