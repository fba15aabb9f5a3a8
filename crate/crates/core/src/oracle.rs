//! Independent checks for the primary routes.
//!
//! Each check avoids the route it validates: probabilities come from exact
//! convolution, allocation minima and Legendre maxima from exhaustive grids,
//! and optimal coding distributions from Blahut–Arimoto alternating
//! minimization.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::chernoff::check_probability_vector;
use crate::error::{Error, Result};
use crate::multi::RdProblem2;
use crate::rd::RdProblem;

/// Exact probability of `{Σ δ_i ≤ nΔ}` and its normalized exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LdProbability {
    pub prob: f64,
    /// `−ln(prob)/n`.
    pub exponent: f64,
}

/// Relative lattice bin width for summing real-valued distortions.
const LATTICE_BIN: f64 = 1e-9;

/// `Pr{Σ_{i=1}^n δ_i ≤ nΔ}` when `n(x) = nP(x)` positions carry source
/// letter `x` and each codeword letter is drawn from `Q` independently.
pub fn exact_ld_probability(problem: &RdProblem, n: usize, target: f64) -> Result<LdProbability> {
    if n == 0 {
        return Err(Error::invalid("n", "must be positive"));
    }
    let mut counts = Vec::with_capacity(problem.source_probs().len());
    for &p in problem.source_probs() {
        let value = n as f64 * p;
        if (value - value.round()).abs() > 1e-9 {
            return Err(Error::CompositionNotIntegral { value });
        }
        counts.push(value.round() as usize);
    }
    let dists = problem.build_delta_dists();
    let vmin = dists.iter().map(|d| d.min_value()).fold(f64::INFINITY, f64::min);
    let vmax = dists.iter().map(|d| d.max_value()).fold(f64::NEG_INFINITY, f64::max);
    let range = vmax - vmin;
    let width = if range > 0.0 { LATTICE_BIN * range } else { 1.0 };

    let mut table: BTreeMap<i64, f64> = BTreeMap::from([(0, 1.0)]);
    for (x, (dist, &count)) in dists.iter().zip(&counts).enumerate() {
        let mass = problem.symbol_log_mass(x).exp();
        let steps: Vec<(i64, f64)> = dist
            .values()
            .iter()
            .zip(dist.probs())
            .map(|(v, p)| (((v - vmin) / width).round() as i64, p * mass))
            .collect();
        for _ in 0..count {
            let mut next = BTreeMap::new();
            for (&k, &pk) in &table {
                for &(step, ps) in &steps {
                    *next.entry(k + step).or_insert(0.0) += pk * ps;
                }
            }
            table = next;
        }
    }
    let threshold = (n as f64 * (target - vmin)) / width + 0.5;
    let prob: f64 = table
        .iter()
        .take_while(|(&k, _)| (k as f64) <= threshold)
        .map(|(_, p)| p)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    let exponent = if prob > 0.0 { (-prob.ln() / n as f64).max(0.0) } else { f64::INFINITY };
    Ok(LdProbability { prob, exponent })
}

/// Result of [`brute_allocation_min`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationSearch {
    pub rate: f64,
    pub allocation: Vec<f64>,
    /// Worst rate increase caused by rounding one letter's distortion down
    /// by a grid cell, averaged over letters: the grid's resolution error.
    pub slack: f64,
}

/// Largest alphabet the exhaustive allocation search accepts.
pub const MAX_BRUTE_ALPHABET: usize = 3;

/// Minimizes `Σ_x P(x) R_x(Δ_x)` over a product grid of per-letter
/// distortions subject to `Σ_x P(x) Δ_x ≤ Δ`.
///
/// Each letter's grid spans `[min δ, E[δ|x]]` with `points` values; beyond
/// the mean a letter's rate is already at its floor.
pub fn brute_allocation_min(problem: &RdProblem, target: f64, points: usize) -> Result<AllocationSearch> {
    let probs = problem.source_probs();
    let k = probs.len();
    if k > MAX_BRUTE_ALPHABET {
        return Err(Error::AlphabetTooLarge { size: k, limit: MAX_BRUTE_ALPHABET });
    }
    if points < 2 {
        return Err(Error::invalid("points", "need at least 2 grid points per letter"));
    }
    if target < problem.min_distortion() - 1e-12 {
        return Err(Error::DistortionTooLow { distortion: target, min: problem.min_distortion(), boundary: None });
    }
    let dists = problem.build_delta_dists();
    let grids: Vec<Vec<f64>> = dists
        .iter()
        .map(|d| {
            let (lo, hi) = (d.min_value(), d.mean());
            if hi - lo <= 1e-15 {
                return vec![lo];
            }
            (0..points)
                .map(|i| if i + 1 == points { hi } else { lo + (hi - lo) * i as f64 / (points - 1) as f64 })
                .collect()
        })
        .collect();
    let rates: Vec<Vec<f64>> = grids
        .iter()
        .enumerate()
        .map(|(x, g)| g.iter().map(|&v| problem.per_symbol_rate(x, v)).collect())
        .collect();
    let slack = rates
        .iter()
        .zip(probs)
        .map(|(r, p)| p * r.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max))
        .sum();

    let mut best = (f64::INFINITY, vec![0.0; k]);
    let mut chosen = vec![0usize; k];
    search(&grids, &rates, probs, target + 1e-12, 0, 0.0, 0.0, &mut chosen, &mut best);
    Ok(AllocationSearch { rate: best.0, allocation: best.1, slack })
}

/// Depth-first enumeration over all but the last letter; the last letter
/// takes the largest grid value the remaining budget allows.
#[allow(clippy::too_many_arguments)]
fn search(
    grids: &[Vec<f64>],
    rates: &[Vec<f64>],
    probs: &[f64],
    budget: f64,
    depth: usize,
    used: f64,
    rate: f64,
    chosen: &mut Vec<usize>,
    best: &mut (f64, Vec<f64>),
) {
    let last = grids.len() - 1;
    if depth == last {
        let room = (budget - used) / probs[last];
        let g = &grids[last];
        // Rates fall along the grid, so take the largest admissible value.
        let Some(i) = g.iter().rposition(|&v| v <= room) else { return };
        let total = rate + probs[last] * rates[last][i];
        if total < best.0 {
            chosen[last] = i;
            best.0 = total;
            best.1 = chosen.iter().enumerate().map(|(x, &j)| grids[x][j]).collect();
        }
        return;
    }
    for (i, &v) in grids[depth].iter().enumerate() {
        let spent = used + probs[depth] * v;
        if spent > budget {
            break;
        }
        chosen[depth] = i;
        search(grids, rates, probs, budget, depth + 1, spent, rate + probs[depth] * rates[depth][i], chosen, best);
    }
}

/// Dense scan parameters for the Legendre objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSearch {
    /// Lower end of the first scan (widened if the maximum sits on it);
    /// the upper end is always 0.
    pub s_min: f64,
    pub points: usize,
    /// Zoom passes around the best cell.
    pub refinements: usize,
}

impl Default for GridSearch {
    fn default() -> Self {
        GridSearch { s_min: -50.0, points: 2001, refinements: 2 }
    }
}

fn linspace(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let points = points.max(2);
    (0..points).map(move |i| if i + 1 == points { hi } else { lo + (hi - lo) * i as f64 / (points - 1) as f64 })
}

/// Lower limit past which [`legendre_grid_max`] stops widening its window.
const GRID_S_FLOOR: f64 = -1e6;

/// `max_{s≤0} [sΔ − Σ_x P(x)φ_x(s)]` by dense scan and zoom.
///
/// A maximum on the lower end of `[s_min, 0]` means the optimum lies
/// beyond it; the window is then doubled until the maximum is interior.
pub fn legendre_grid_max(problem: &RdProblem, target: f64, grid: GridSearch) -> f64 {
    let objective = |s: f64| s * target - problem.log_mgf(s);
    let scan = |lo: f64, hi: f64| {
        linspace(lo, hi, grid.points).fold((f64::NEG_INFINITY, 0.0), |best, s| {
            let v = objective(s);
            if v > best.0 { (v, s) } else { best }
        })
    };
    let mut s_min = grid.s_min.min(-1.0);
    let mut best = scan(s_min, 0.0);
    while best.1 == s_min && s_min > GRID_S_FLOOR {
        s_min *= 2.0;
        best = scan(s_min, 0.0);
    }
    let mut step = -s_min / (grid.points.max(2) - 1) as f64;
    for _ in 0..grid.refinements {
        let (lo, hi) = ((best.1 - step).max(s_min), (best.1 + step).min(0.0));
        let zoomed = scan(lo, hi);
        if zoomed.0 > best.0 {
            best = zoomed;
        }
        step = (hi - lo) / (grid.points.max(2) - 1) as f64;
    }
    best.0.max(0.0)
}

/// Scan parameters for the two-force objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSearch2 {
    pub s_min: f64,
    pub points: usize,
    pub refinements: usize,
}

impl Default for GridSearch2 {
    fn default() -> Self {
        GridSearch2 { s_min: -20.0, points: 201, refinements: 4 }
    }
}

/// Dense two-dimensional scan of the two-constraint objective over
/// `[s_min, 0]²` with zoom passes. Returns `(rate, s1, s2)`.
pub fn legendre_grid_max_2d(problem: &RdProblem2, d1: f64, d2: f64, grid: GridSearch2) -> (f64, f64, f64) {
    let mut window = [(grid.s_min, 0.0), (grid.s_min, 0.0)];
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for _ in 0..=grid.refinements {
        let steps = [
            (window[0].1 - window[0].0) / (grid.points.max(2) - 1) as f64,
            (window[1].1 - window[1].0) / (grid.points.max(2) - 1) as f64,
        ];
        for s1 in linspace(window[0].0, window[0].1, grid.points) {
            for s2 in linspace(window[1].0, window[1].1, grid.points) {
                let v = problem.objective(d1, d2, s1, s2);
                if v > best.0 {
                    best = (v, s1, s2);
                }
            }
        }
        window = [
            ((best.1 - 2.0 * steps[0]).max(grid.s_min), (best.1 + 2.0 * steps[0]).min(0.0)),
            ((best.2 - 2.0 * steps[1]).max(grid.s_min), (best.2 + 2.0 * steps[1]).min(0.0)),
        ];
    }
    (best.0.max(0.0), best.1, best.2)
}

/// Output of [`blahut_arimoto`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlahutArimoto {
    /// Coding distribution of the final iterate.
    pub q_star: Vec<f64>,
    /// Mutual information of the test channel induced by `q_star`.
    pub rate: f64,
    /// Average distortion under that test channel.
    pub distortion: f64,
    pub iterations: usize,
    /// `−Σ_x P(x) ln Σ_x̂ Q_t(x̂) e^{s d(x,x̂)}` per iteration; nonincreasing.
    pub objective_history: Vec<f64>,
}

/// Default iteration cap for [`blahut_arimoto`].
pub const BA_MAX_ITER: usize = 100_000;

/// Blahut–Arimoto at fixed slope `s ≤ 0`, started from the uniform coding
/// distribution. Stops when the rate changes by less than `tol`.
pub fn blahut_arimoto(
    source_probs: &[f64],
    distortion: &[Vec<f64>],
    s: f64,
    tol: f64,
    max_iter: usize,
) -> Result<BlahutArimoto> {
    check_probability_vector(source_probs, "source_probs")?;
    if !(s.is_finite() && s <= 0.0) {
        return Err(Error::invalid("s", format!("slope must be finite and <= 0, got {s}")));
    }
    let k = source_probs.len();
    let j = distortion.first().map_or(0, Vec::len);
    if distortion.len() != k || j == 0 || distortion.iter().any(|r| r.len() != j) {
        return Err(Error::invalid("distortion", format!("expected a {k}xJ matrix")));
    }
    if distortion.iter().flatten().any(|d| !d.is_finite()) {
        return Err(Error::invalid("distortion", "non-finite entry"));
    }

    let mut q = vec![1.0 / j as f64; j];
    let mut history = Vec::new();
    let mut previous_rate = f64::NAN;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut objective = 0.0;
        let mut next = vec![0.0; j];
        let mut posteriors = Vec::with_capacity(k);
        for (p, row) in source_probs.iter().zip(distortion) {
            let top = row
                .iter()
                .zip(&q)
                .filter(|(_, qv)| **qv > 0.0)
                .map(|(d, _)| s * d)
                .fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = row.iter().zip(&q).map(|(d, qv)| qv * (s * d - top).exp()).collect();
            let z: f64 = w.iter().sum();
            objective -= p * (top + z.ln());
            let post: Vec<f64> = w.iter().map(|wi| wi / z).collect();
            for (n, pi) in next.iter_mut().zip(&post) {
                *n += p * pi;
            }
            posteriors.push(post);
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);

        let mut rate = 0.0;
        let mut avg = 0.0;
        for ((p, row), post) in source_probs.iter().zip(distortion).zip(&posteriors) {
            for ((d, w), out) in row.iter().zip(post).zip(&next) {
                if *w > 0.0 {
                    rate += p * w * (w / out).ln();
                    avg += p * w * d;
                }
            }
        }
        history.push(objective);
        let rate = rate.max(0.0);
        let done = (rate - previous_rate).abs() < tol;
        let result = || BlahutArimoto {
            q_star: q.clone(),
            rate,
            distortion: avg,
            iterations,
            objective_history: history.clone(),
        };
        if done {
            return Ok(result());
        }
        if iterations >= max_iter {
            return Err(Error::NoConvergence { iterations, best: Box::new(result()) });
        }
        previous_rate = rate;
        q = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn bss() -> RdProblem {
        RdProblem::new(vec![0.5, 0.5], vec![0.5, 0.5], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn exact_probability_examples() {
        let p = bss();
        let r = exact_ld_probability(&p, 8, 0.25).unwrap();
        assert_eq!(r.prob, 37.0 / 256.0);
        let all = exact_ld_probability(&p, 8, 1.0).unwrap();
        assert_eq!((all.prob, all.exponent), (1.0, 0.0));
        assert!(matches!(
            exact_ld_probability(&p, 7, 0.25),
            Err(Error::CompositionNotIntegral { .. })
        ));
        let e32 = exact_ld_probability(&p, 32, 0.25).unwrap().exponent;
        let e64 = exact_ld_probability(&p, 64, 0.25).unwrap().exponent;
        let rate = p.rate_legendre(0.25).unwrap();
        assert!(e32 >= e64 && e64 >= rate);
    }

    #[test]
    fn brute_allocation_examples() {
        let one = RdProblem::new(vec![1.0], vec![0.2, 0.3, 0.5], vec![vec![0.0, 1.0, 3.0]]).unwrap();
        let target = 0.9;
        let brute = brute_allocation_min(&one, target, 400).unwrap();
        let exact = one.rate_legendre(target).unwrap();
        assert!(brute.rate >= exact - 1e-10 && brute.rate <= exact + brute.slack);

        let p = bss();
        let brute = brute_allocation_min(&p, 0.25, 401).unwrap();
        let cell = 0.5 / 400.0;
        for a in &brute.allocation {
            assert!((a - 0.25).abs() <= cell + 1e-12, "{:?}", brute.allocation);
        }

        let asym =
            RdProblem::new(vec![0.7, 0.3], vec![0.5, 0.5], vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        let target = 0.5 * (asym.min_distortion() + asym.zero_force_distortion());
        let (_, rate) = asym.equal_force_allocation(target).unwrap();
        let brute = brute_allocation_min(&asym, target, 400).unwrap();
        assert!(brute.rate >= rate - 1e-10);
        assert!(brute.rate - rate <= brute.slack);

        let big = RdProblem::new(vec![0.25; 4], vec![1.0], vec![vec![0.0]; 4]).unwrap();
        assert!(matches!(
            brute_allocation_min(&big, 0.0, 10),
            Err(Error::AlphabetTooLarge { .. })
        ));
    }

    #[test]
    fn grid_max_matches_bss() {
        let p = bss();
        let v = legendre_grid_max(&p, 0.25, GridSearch::default());
        assert!((v - 0.130812035941137).abs() < 1e-9);
        assert!(legendre_grid_max(&p, 0.5, GridSearch::default()).abs() < 1e-15);
    }

    #[test]
    fn ba_on_bss_stays_uniform() {
        let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        for s in [-3.0, -1.0, -0.2] {
            let ba = blahut_arimoto(&[0.5, 0.5], &d, s, 1e-13, 1000).unwrap();
            assert!(ba.q_star.iter().all(|q| (q - 0.5).abs() < 1e-12));
            let e = f64::exp(s);
            let delta = e / (1.0 + e);
            assert!((ba.rate - (LN_2 - crate::chernoff::binary_entropy(delta))).abs() < 1e-12);
        }
        let zero = blahut_arimoto(&[0.5, 0.5], &d, 0.0, 1e-13, 1000).unwrap();
        assert_eq!(zero.rate, 0.0);
        assert_eq!(zero.distortion, 0.5);
    }

    #[test]
    fn ba_objective_is_monotone() {
        let d = vec![vec![0.0, 1.0, 0.4], vec![2.0, 0.0, 0.7], vec![0.5, 1.5, 0.1]];
        let ba = blahut_arimoto(&[0.2, 0.5, 0.3], &d, -1.5, 1e-14, 100_000).unwrap();
        for w in ba.objective_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn ba_reports_no_convergence() {
        let d = vec![vec![0.0, 1.0, 0.4], vec![2.0, 0.0, 0.7]];
        match blahut_arimoto(&[0.4, 0.6], &d, -2.0, 0.0, 3) {
            Err(Error::NoConvergence { iterations, best }) => {
                assert_eq!(iterations, 3);
                assert_eq!(best.iterations, 3);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }
}
