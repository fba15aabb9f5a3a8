//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the test harness so the lines always print; exits nonzero
//! if any criterion fails.

mod common;

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{bss, bss_rate, fd_step, interior_distortion, random_distribution, random_matrix, random_probs, random_problem};
use ratework::capacity::{capacity_point, mutual_information, Channel};
use ratework::chain::ChainSystem;
use ratework::chernoff::{log_mgf, tilt};
use ratework::multi::{rate_two_distortions, RdProblem2};
use ratework::oracle::{self, legendre_grid_max_2d, GridSearch2};
use ratework::rd::RdProblem;

type Check = fn() -> Outcome;

struct Outcome {
    passed: bool,
    detail: String,
}

/// Largest value seen, for reporting worst-case errors.
#[derive(Default)]
struct Worst(f64);

impl Worst {
    fn see(&mut self, v: f64) {
        if v.is_nan() {
            self.0 = f64::INFINITY;
        } else if v > self.0 {
            self.0 = v;
        }
    }
}

fn closed_form() -> Outcome {
    let p = bss();
    let start = Instant::now();
    let mut worst = Worst::default();
    for i in 0..50 {
        let delta = 0.02 + 0.48 * i as f64 / 49.0;
        match p.rate_legendre(delta) {
            Ok(r) => worst.see((r - bss_rate(delta)).abs()),
            Err(_) => worst.see(f64::INFINITY),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        passed: worst.0 <= 1e-9 && secs < 1.0,
        detail: format!("max |R - (ln2 - h2)| = {:.2e} over 50 levels in {secs:.3}s", worst.0),
    }
}

fn route_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let start = Instant::now();
    let (mut integral, mut alloc) = (Worst::default(), Worst::default());
    for _ in 0..100 {
        let p = random_problem(&mut rng, 5);
        for _ in 0..3 {
            let delta = interior_distortion(&p, rng.gen_range(0.05..0.95));
            let rate = p.rate_legendre(delta).expect("interior level");
            let s = p.force_at_distortion(delta, 1e-14).expect("interior level").s;
            integral.see((p.rate_mmse_integral(s, 1e-10) - rate).abs());
            let (_, alloc_rate) = p.equal_force_allocation(delta).expect("interior level");
            alloc.see((alloc_rate - rate).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        passed: integral.0 <= 1e-7 && alloc.0 <= 1e-10 && secs < 30.0,
        detail: format!(
            "300 levels: max |mmse route| = {:.2e}, max |allocation route| = {:.2e}, {secs:.2}s",
            integral.0, alloc.0
        ),
    }
}

fn uniform(s: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| if i == steps { s } else { s * i as f64 / steps as f64 }).collect()
}

fn sandwich_convergence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = Worst::default();
    let mut bracket_ok = true;
    for _ in 0..20 {
        let p = random_problem(&mut rng, 5);
        let delta = interior_distortion(&p, rng.gen_range(0.1..0.9));
        let s = p.force_at_distortion(delta, 1e-13).unwrap().s;
        let rate = p.distortion_at_force(s).rate;
        let gap = |steps| {
            let (l, r) = p.sandwich_bounds(&uniform(s, steps)).unwrap();
            (l.min(r), l.max(r))
        };
        let (lo1, hi1) = gap(1000);
        let (lo2, hi2) = gap(2000);
        bracket_ok &= lo2 <= rate + 1e-12 && rate <= hi2 + 1e-12;
        worst.see((hi2 - lo2) / (hi1 - lo1));
    }
    Outcome {
        passed: worst.0 <= 0.51 && bracket_ok,
        detail: format!("max gap(2000)/gap(1000) = {:.6} on 20 problems; bracket holds: {bracket_ok}", worst.0),
    }
}

fn allocation_optimality() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let (mut excess, mut under, mut slack) = (Worst::default(), Worst::default(), Worst::default());
    let mut within_slack = true;
    for _ in 0..20 {
        let p = random_problem(&mut rng, 3);
        let delta = interior_distortion(&p, rng.gen_range(0.1..0.9));
        let rate = p.rate_legendre(delta).unwrap();
        let search = oracle::brute_allocation_min(&p, delta, 400).unwrap();
        within_slack &= search.rate <= rate + search.slack;
        excess.see(search.rate - rate);
        slack.see(search.slack);
        under.see(rate - search.rate);
    }
    Outcome {
        passed: within_slack && under.0 <= 1e-10,
        detail: format!(
            "20 problems: max (brute - R) = {:.2e} within slack: {within_slack} (largest slack {:.2e}), max (R - brute) = {:.2e}",
            excess.0, slack.0, under.0
        ),
    }
}

fn capacity_mapping() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let (mut rate_err, mut force_err) = (Worst::default(), Worst::default());
    let mut channels: Vec<Channel> = (0..50)
        .map(|_| {
            let inputs = rng.gen_range(1..=4);
            let outputs = rng.gen_range(2..=4);
            let w = (0..inputs).map(|_| random_probs(&mut rng, outputs)).collect();
            Channel::new(w, random_probs(&mut rng, inputs)).unwrap()
        })
        .collect();
    channels.push(Channel::binary_symmetric(0.1).unwrap());
    for ch in &channels {
        match capacity_point(ch) {
            Ok(pt) => {
                rate_err.see((pt.rate - mutual_information(ch)).abs());
                force_err.see((pt.s_star.abs() - 1.0).abs());
            }
            Err(_) => rate_err.see(f64::INFINITY),
        }
    }
    let bsc = capacity_point(channels.last().unwrap()).map_or(f64::NAN, |p| p.rate);
    Outcome {
        passed: rate_err.0 <= 1e-9 && force_err.0 <= 1e-9 && (bsc - 0.368064).abs() <= 1e-6,
        detail: format!(
            "51 channels: max |R - I| = {:.2e}, max ||s*| - 1| = {:.2e}; BSC(0.1) = {bsc:.9}",
            rate_err.0, force_err.0
        ),
    }
}

fn work_interpretation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let (mut work_err, mut force_err) = (Worst::default(), Worst::default());
    let mut brackets = true;
    for _ in 0..20 {
        let p = random_problem(&mut rng, 4);
        let beta = rng.gen_range(0.5..3.0);
        let k = rng.gen_range(0.5..2.0);
        let system = ChainSystem::from_rd_problem_with_k(&p, beta, k).unwrap();
        let delta = interior_distortion(&p, rng.gen_range(0.15..0.85));
        let s = p.force_at_distortion(delta, 1e-13).unwrap().s;
        let lambda = s / beta;
        let work = system.quasistatic_work(lambda, 1e-10);
        work_err.see((work * beta - p.distortion_at_force(s).rate).abs());

        for _ in 0..5 {
            let steps = rng.gen_range(1..=40);
            let mut cuts: Vec<f64> = (0..steps - 1).map(|_| rng.gen_range(0.0..1.0)).collect();
            cuts.sort_by(|a, b| a.total_cmp(b));
            let mut schedule = vec![0.0];
            schedule.extend(cuts.iter().map(|c| c * lambda));
            schedule.push(lambda);
            schedule.dedup();
            let (l, r) = system.protocol_sums(&schedule).unwrap();
            brackets &= l.min(r) - 1e-12 <= work && work <= l.max(r) + 1e-12;
        }

        let eq = system.equilibrium_force(delta, 1e-13).unwrap();
        let h = fd_step(p.mmse(s));
        let slope = (p.rate_legendre(delta + h).unwrap() - p.rate_legendre(delta - h).unwrap()) / (2.0 * h);
        let kt = system.boltzmann_k() * system.temperature();
        force_err.see((eq.force - kt * slope).abs());
    }
    Outcome {
        passed: work_err.0 <= 2e-8 && brackets && force_err.0 <= 1e-5,
        detail: format!(
            "20 systems: max |W*beta - R| = {:.2e}, 100 protocols bracket: {brackets}, max |lambda - kT R'| = {:.2e}",
            work_err.0, force_err.0
        ),
    }
}

fn exponent_trend() -> Outcome {
    let p = bss();
    let rate = bss_rate(0.25);
    let mut exponents = Vec::new();
    let mut prob8 = f64::NAN;
    for n in [8, 16, 32, 64] {
        let ld = oracle::exact_ld_probability(&p, n, 0.25).unwrap();
        if n == 8 {
            prob8 = ld.prob;
        }
        exponents.push(ld.exponent);
    }
    let above = exponents.iter().all(|e| *e >= rate);
    let decreasing = exponents.windows(2).all(|w| w[1] < w[0]);
    let gap = exponents[3] - rate;
    let exact = prob8 == 37.0 / 256.0;
    Outcome {
        passed: above && decreasing && gap <= 0.08 && exact,
        detail: format!(
            "exponents {:?} vs I = {rate:.6}; final gap {gap:.4}; P(n=8) = {prob8} (37/256: {exact})",
            exponents.iter().map(|e| (e * 1e6).round() / 1e6).collect::<Vec<_>>()
        ),
    }
}

fn ba_cross_check() -> Outcome {
    let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    let mut uniform_err = Worst::default();
    for i in 0..=20 {
        let s = -0.5 * i as f64;
        match oracle::blahut_arimoto(&[0.5, 0.5], &d, s, 1e-14, oracle::BA_MAX_ITER) {
            Ok(ba) => ba.q_star.iter().for_each(|q| uniform_err.see((q - 0.5).abs())),
            Err(_) => uniform_err.see(f64::INFINITY),
        }
    }
    let mut rng = StdRng::seed_from_u64(8);
    let mut point_err = Worst::default();
    for _ in 0..20 {
        let k = rng.gen_range(2..=4);
        let j = rng.gen_range(2..=4);
        let source = random_probs(&mut rng, k);
        let dist = random_matrix(&mut rng, k, j, 2.0);
        let s = rng.gen_range(-5.0..-0.1);
        match oracle::blahut_arimoto(&source, &dist, s, 1e-14, oracle::BA_MAX_ITER) {
            Ok(ba) => {
                let p = RdProblem::new(source, ba.q_star.clone(), dist).unwrap();
                let pt = p.distortion_at_force(s);
                point_err.see((pt.rate - ba.rate).abs().max((pt.distortion - ba.distortion).abs()));
            }
            Err(_) => point_err.see(f64::INFINITY),
        }
    }
    Outcome {
        passed: uniform_err.0 <= 1e-8 && point_err.0 <= 1e-6,
        detail: format!(
            "BSS max |Q - 1/2| = {:.2e} over 21 slopes; 20 random problems max (R, D) mismatch = {:.2e}",
            uniform_err.0, point_err.0
        ),
    }
}

fn two_constraint_reduction() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let (mut reduce_err, mut grid_err) = (Worst::default(), Worst::default());
    let mut tried = 0;
    while tried < 20 {
        let k = rng.gen_range(1..=3);
        let j = rng.gen_range(2..=3);
        let (source, coding) = (random_probs(&mut rng, k), random_probs(&mut rng, j));
        let d1 = random_matrix(&mut rng, k, j, 2.0);
        let d2 = random_matrix(&mut rng, k, j, 2.0);
        let p2 = RdProblem2::new(source, coding, d1, d2.clone()).unwrap();
        let one = p2.first();
        if one.zero_force_distortion() - one.min_distortion() < 1e-3 {
            continue;
        }
        tried += 1;
        let delta = interior_distortion(one, rng.gen_range(0.1..0.9));
        // At the largest possible d₂ the second constraint can never bind.
        let slack = d2.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
        match rate_two_distortions(&p2, delta, slack, 1e-12) {
            Ok(r) => reduce_err.see((r.rate - one.rate_legendre(delta).unwrap()).abs().max(r.s2.abs())),
            Err(_) => reduce_err.see(f64::INFINITY),
        }

        let (s1, s2) = (rng.gen_range(-3.0..0.0), rng.gen_range(-3.0..0.0));
        let (t1, t2) = p2.tilted_means(s1, s2);
        match rate_two_distortions(&p2, t1, t2, 1e-12) {
            Ok(r) => {
                let (grid_rate, _, _) = legendre_grid_max_2d(&p2, t1, t2, GridSearch2::default());
                grid_err.see((r.rate - grid_rate).abs());
            }
            Err(_) => grid_err.see(f64::INFINITY),
        }
    }
    Outcome {
        passed: reduce_err.0 <= 1e-8 && grid_err.0 <= 1e-5,
        detail: format!(
            "20 problems: max |R2(slack) - R| or |s2| = {:.2e}; max |Newton - grid| = {:.2e}",
            reduce_err.0, grid_err.0
        ),
    }
}

fn numerical_hygiene() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let mut failures = Vec::new();
    let (mut d1, mut d2, mut dm, mut dr) = (Worst::default(), Worst::default(), Worst::default(), Worst::default());
    for _ in 0..50 {
        let dist = random_distribution(&mut rng, 6);
        let range = dist.max_value() - dist.min_value();
        let s = rng.gen_range(-3.0..3.0);
        let t = tilt(&dist, s);
        let h = 1e-5;
        let first = (log_mgf(&dist, s + h) - log_mgf(&dist, s - h)) / (2.0 * h);
        d1.see((first - t.mean).abs() / (1e-7 * range));
        let h = 1e-4;
        let second = (log_mgf(&dist, s + h) - 2.0 * log_mgf(&dist, s) + log_mgf(&dist, s - h)) / (h * h);
        d2.see((second - t.variance).abs() / (1e-6 * range * range));
    }
    for _ in 0..50 {
        let p = random_problem(&mut rng, 5);
        let scale = {
            let row_range = |r: &Vec<f64>| {
                let (lo, hi) = r.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
                hi - lo
            };
            p.distortion().iter().map(row_range).fold(0.0, f64::max).powi(2).max(1e-3)
        };
        let s = rng.gen_range(-5.0..0.0);
        let h = 1e-5;
        let slope = (p.distortion_fn(s + h) - p.distortion_fn(s - h)) / (2.0 * h);
        dm.see((slope - p.mmse(s)).abs() / (1e-6 * scale));

        let delta = interior_distortion(&p, rng.gen_range(0.15..0.85));
        let force = p.force_at_distortion(delta, 1e-14).unwrap().s;
        let h = fd_step(p.mmse(force));
        let rslope = (p.rate_legendre(delta + h).unwrap() - p.rate_legendre(delta - h).unwrap()) / (2.0 * h);
        dr.see((rslope - force).abs() / 1e-5);
    }
    for (name, w) in [("phi'", &d1), ("phi''", &d2), ("dD/ds", &dm), ("dR/dD", &dr)] {
        if w.0 > 1.0 {
            failures.push(name);
        }
    }
    Outcome {
        passed: failures.is_empty(),
        detail: format!(
            "worst error / tolerance: phi' {:.3}, phi'' {:.3}, dD/ds {:.3}, dR/dD {:.3} (<= 1 passes)",
            d1.0, d2.0, dm.0, dr.0
        ),
    }
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("closed form for the binary symmetric source", closed_form),
        ("route equivalence on random problems", route_equivalence),
        ("sandwich gap halves with doubled steps", sandwich_convergence),
        ("brute-force allocation matches the Legendre rate", allocation_optimality),
        ("capacity through the -ln W distortion", capacity_mapping),
        ("work, protocols and force-slope relation", work_interpretation),
        ("exact exponents decrease toward the rate", exponent_trend),
        ("Blahut-Arimoto cross-check", ba_cross_check),
        ("two-constraint reduction and grid oracle", two_constraint_reduction),
        ("finite-difference checks", numerical_hygiene),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        if !outcome.passed {
            failed += 1;
        }
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}: {name}: {}", i + 1, outcome.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
