//! Rate–distortion function `R_Q(Δ)` for a fixed coding distribution `Q`.
//!
//! For source letter `x`, the distortion `δ = d(x, x̂)` of a random codeword
//! letter `x̂ ~ Q` has law `Q(δ|x)`. Letters are independent given the source
//! sequence, so the large-deviations rate of `{Σ δ_i ≤ nΔ}` is
//!
//! ```text
//! R_Q(Δ) = max_{s≤0} [ sΔ − Σ_x P(x) ln Σ_δ Q(δ|x) e^{sδ} ]
//! ```
//!
//! Each route below computes the same quantity a different way: the direct
//! Legendre form, the equal-force allocation across source letters, the
//! work integral `∫ ŝ·mmse(ŝ) dŝ`, and Riemann sandwich bounds.

use serde::Serialize;

use crate::chernoff::{self, check_probability_vector, FiniteDistribution};
use crate::error::{Error, Result};
use crate::numeric::{self, adaptive_simpson};

/// Solve tolerance used by the canonical Legendre route; bisection then
/// runs essentially to f64 resolution.
const TIGHT_TOL: f64 = 1e-15;

/// Per-source-letter distortion law `Q(δ|x)`.
///
/// `log_mass` is `ln Σ Q(x̂)` over reproduction letters with finite
/// distortion; it is zero unless some pairs are excluded.
#[derive(Debug, Clone)]
struct SymbolLaw {
    dist: FiniteDistribution,
    log_mass: f64,
}

impl SymbolLaw {
    fn log_mgf(&self, s: f64) -> f64 {
        self.log_mass + chernoff::log_mgf(&self.dist, s)
    }
}

/// A rate–distortion instance: source `P`, coding distribution `Q` and
/// distortion matrix `d` (rows: source letters, columns: reproduction
/// letters). Zero-probability letters are dropped on construction.
#[derive(Debug, Clone)]
pub struct RdProblem {
    source: Vec<f64>,
    coding: Vec<f64>,
    distortion: Vec<Vec<f64>>,
    source_index: Vec<usize>,
    coding_index: Vec<usize>,
    shape: (usize, usize),
    laws: Vec<SymbolLaw>,
}

/// One point of the curve, parameterized by the force `s ≤ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RdPoint {
    pub s: f64,
    pub distortion: f64,
    pub rate: f64,
    /// `⟨δ⟩_{s|x}` for each retained source letter.
    pub per_symbol_mean: Vec<f64>,
    /// `Var_{s|x}{δ}` for each retained source letter.
    pub per_symbol_var: Vec<f64>,
    pub mmse: f64,
}

/// Per-letter distortion split `{Δ_x}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    pub per_symbol_distortion: Vec<f64>,
}

impl Allocation {
    /// Average distortion `Σ_x P(x) Δ_x`.
    pub fn average(&self, problem: &RdProblem) -> f64 {
        problem.source.iter().zip(&self.per_symbol_distortion).map(|(p, d)| p * d).sum()
    }

    pub fn satisfies(&self, problem: &RdProblem, target: f64) -> bool {
        self.average(problem) <= target + 1e-12
    }
}

impl RdProblem {
    pub fn new(source_probs: Vec<f64>, coding_probs: Vec<f64>, distortion: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(source_probs, coding_probs, distortion, false)
    }

    /// Like [`RdProblem::new`] but `+inf` distortion entries are allowed and
    /// mean "this pair never occurs": the letter is dropped from `Q(δ|x)`.
    /// Only forces `s ≤ 0` are meaningful for such problems.
    pub fn with_excluded_pairs(
        source_probs: Vec<f64>,
        coding_probs: Vec<f64>,
        distortion: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::build(source_probs, coding_probs, distortion, true)
    }

    fn build(
        source_probs: Vec<f64>,
        coding_probs: Vec<f64>,
        distortion: Vec<Vec<f64>>,
        allow_excluded: bool,
    ) -> Result<Self> {
        check_probability_vector(&source_probs, "source_probs")?;
        check_probability_vector(&coding_probs, "coding_probs")?;
        let (k, j) = (source_probs.len(), coding_probs.len());
        if distortion.len() != k {
            return Err(Error::invalid(
                "distortion",
                format!("{} rows for {k} source letters", distortion.len()),
            ));
        }
        for (x, row) in distortion.iter().enumerate() {
            if row.len() != j {
                return Err(Error::invalid(
                    "distortion",
                    format!("row {x} has {} entries for {j} reproduction letters", row.len()),
                ));
            }
            if let Some(v) = row.iter().find(|v| v.is_nan() || (!allow_excluded && !v.is_finite())) {
                return Err(Error::invalid("distortion", format!("row {x} has non-finite entry {v}")));
            }
            if let Some(v) = row.iter().find(|v| **v == f64::NEG_INFINITY) {
                return Err(Error::invalid("distortion", format!("row {x} has entry {v}")));
            }
        }

        let source_index: Vec<usize> = (0..k).filter(|&x| source_probs[x] > 0.0).collect();
        let coding_index: Vec<usize> = (0..j).filter(|&y| coding_probs[y] > 0.0).collect();
        let source: Vec<f64> = source_index.iter().map(|&x| source_probs[x]).collect();
        let coding: Vec<f64> = coding_index.iter().map(|&y| coding_probs[y]).collect();
        let distortion: Vec<Vec<f64>> = source_index
            .iter()
            .map(|&x| coding_index.iter().map(|&y| distortion[x][y]).collect())
            .collect();

        let mut laws = Vec::with_capacity(source.len());
        for (row, &x) in distortion.iter().zip(&source_index) {
            let (values, weights): (Vec<f64>, Vec<f64>) = row
                .iter()
                .zip(&coding)
                .filter(|(d, _)| d.is_finite())
                .map(|(&d, &q)| (d, q))
                .unzip();
            if values.is_empty() {
                return Err(Error::invalid(
                    "distortion",
                    format!("source letter {x} has no reproduction letter with finite distortion"),
                ));
            }
            let (dist, mass) = FiniteDistribution::from_weights(&values, &weights)?;
            let log_mass = if allow_excluded { mass.ln() } else { 0.0 };
            laws.push(SymbolLaw { dist, log_mass });
        }
        Ok(RdProblem { source, coding, distortion, source_index, coding_index, shape: (k, j), laws })
    }

    /// Retained source probabilities.
    pub fn source_probs(&self) -> &[f64] {
        &self.source
    }

    /// Retained coding probabilities.
    pub fn coding_probs(&self) -> &[f64] {
        &self.coding
    }

    /// Distortion matrix restricted to retained letters.
    pub fn distortion(&self) -> &[Vec<f64>] {
        &self.distortion
    }

    /// Original indices of the retained source letters.
    pub fn source_letters(&self) -> &[usize] {
        &self.source_index
    }

    /// Original indices of the retained reproduction letters.
    pub fn coding_letters(&self) -> &[usize] {
        &self.coding_index
    }

    /// `(K, J)` as supplied, before dropping zero-probability letters.
    pub fn original_shape(&self) -> (usize, usize) {
        self.shape
    }

    pub(crate) fn symbol_log_mass(&self, x: usize) -> f64 {
        self.laws[x].log_mass
    }

    /// `Q(δ|x)` for each retained source letter, equal distortions grouped.
    pub fn build_delta_dists(&self) -> Vec<FiniteDistribution> {
        self.laws.iter().map(|l| l.dist.clone()).collect()
    }

    /// `Δ₀ = Σ_x P(x) E_Q[δ|x]`, the distortion at zero force.
    pub fn zero_force_distortion(&self) -> f64 {
        self.source.iter().zip(&self.laws).map(|(p, l)| p * l.dist.mean()).sum()
    }

    /// `Δ_min = Σ_x P(x) min{δ : Q(δ|x) > 0}`.
    pub fn min_distortion(&self) -> f64 {
        self.source.iter().zip(&self.laws).map(|(p, l)| p * l.dist.min_value()).sum()
    }

    /// `Σ_x P(x) φ_x(s)`.
    pub fn log_mgf(&self, s: f64) -> f64 {
        self.source.iter().zip(&self.laws).map(|(p, l)| p * l.log_mgf(s)).sum()
    }

    /// Tilted distortion `Σ_x P(x)⟨δ⟩_{s|x}` without building a full point.
    pub fn distortion_fn(&self, s: f64) -> f64 {
        self.source
            .iter()
            .zip(&self.laws)
            .map(|(p, l)| p * chernoff::tilted_moments(&l.dist, s).1)
            .sum()
    }

    /// All quantities of the curve at force `s`. The rate is the Legendre
    /// objective `sΔ(s) − Σ_x P(x)φ_x(s)`, for which `s` is the maximizer.
    pub fn distortion_at_force(&self, s: f64) -> RdPoint {
        let mut phi = 0.0;
        let mut distortion = 0.0;
        let mut mmse = 0.0;
        let mut per_symbol_mean = Vec::with_capacity(self.laws.len());
        let mut per_symbol_var = Vec::with_capacity(self.laws.len());
        for (p, law) in self.source.iter().zip(&self.laws) {
            let (lm, mean, var) = chernoff::tilted_moments(&law.dist, s);
            phi += p * (law.log_mass + lm);
            distortion += p * mean;
            mmse += p * var;
            per_symbol_mean.push(mean);
            per_symbol_var.push(var);
        }
        let rate = (s * distortion - phi).max(0.0);
        RdPoint { s, distortion, rate, per_symbol_mean, per_symbol_var, mmse }
    }

    fn boundary_point(&self) -> RdPoint {
        let per_symbol_mean: Vec<f64> = self.laws.iter().map(|l| l.dist.min_value()).collect();
        let rate = -self
            .source
            .iter()
            .zip(&self.laws)
            .map(|(p, l)| p * (l.log_mass + l.dist.probs()[0].ln()))
            .sum::<f64>();
        RdPoint {
            s: f64::NEG_INFINITY,
            distortion: self.min_distortion(),
            rate,
            per_symbol_var: vec![0.0; per_symbol_mean.len()],
            per_symbol_mean,
            mmse: 0.0,
        }
    }

    fn edge_tol(&self) -> f64 {
        1e-12 * self.zero_force_distortion().abs().max(1.0)
    }

    /// Solves `Δ(s) = Δ` over `s ≤ 0` by bisection, so that
    /// `|Δ(s) − Δ| ≤ tol·(Δ₀ − Δ_min)`.
    pub fn force_at_distortion(&self, target: f64, tol: f64) -> Result<RdPoint> {
        self.solve_force(target, tol).map(|s| self.distortion_at_force(s))
    }

    fn solve_force(&self, target: f64, tol: f64) -> Result<f64> {
        if !target.is_finite() {
            return Err(Error::invalid("distortion", format!("non-finite target {target}")));
        }
        let d0 = self.zero_force_distortion();
        let dmin = self.min_distortion();
        let edge = self.edge_tol();
        if target > d0 + edge {
            return Err(Error::DistortionAboveZeroForce {
                distortion: target,
                zero_force: d0,
                point: Box::new(self.distortion_at_force(0.0)),
            });
        }
        if target >= d0 - edge {
            return Ok(0.0);
        }
        if target < dmin - edge {
            return Err(Error::DistortionTooLow { distortion: target, min: dmin, boundary: None });
        }
        if target <= dmin + edge {
            return Err(Error::DistortionTooLow {
                distortion: target,
                min: dmin,
                boundary: Some(Box::new(self.boundary_point())),
            });
        }
        let tol = if tol > 0.0 { tol } else { numeric::DEFAULT_SOLVE_TOL };
        numeric::solve_increasing(|s| self.distortion_fn(s), target, -1.0, 0.0, tol * (d0 - dmin))
            .map_err(|_| Error::Numerical(format!("could not bracket the force for distortion {target}")))
    }

    /// `R_Q(Δ)` by the direct Legendre route.
    pub fn rate_legendre(&self, target: f64) -> Result<f64> {
        self.legendre(target).map(|(_, rate)| rate)
    }

    /// Maximizing force and rate at `target`.
    pub(crate) fn legendre(&self, target: f64) -> Result<(f64, f64)> {
        let s = self.solve_force(target, TIGHT_TOL)?;
        if s == 0.0 {
            return Ok((0.0, self.distortion_at_force(0.0).rate));
        }
        Ok((s, (s * target - self.log_mgf(s)).max(0.0)))
    }

    /// Rate of letter `x` alone at distortion `Δ_x`, with the force
    /// restricted to `s_x ≤ 0`: `max_{s_x≤0}[s_x Δ_x − φ_x(s_x)]`.
    /// Returns `+inf` below the letter's minimum distortion.
    pub fn per_symbol_rate(&self, x: usize, level: f64) -> f64 {
        let law = &self.laws[x];
        if level >= law.dist.mean() {
            return -law.log_mass;
        }
        match chernoff::force_at_level(&law.dist, level, TIGHT_TOL) {
            Ok(r) => r.rate - law.log_mass,
            Err(Error::LevelExtreme(r)) => r.rate - law.log_mass,
            Err(_) => f64::INFINITY,
        }
    }

    /// Splits `Δ` across source letters at the common force `s*` and sums
    /// the per-letter rates. The sum equals [`RdProblem::rate_legendre`].
    pub fn equal_force_allocation(&self, target: f64) -> Result<(Allocation, f64)> {
        let s = self.solve_force(target, TIGHT_TOL)?;
        let per_symbol_distortion: Vec<f64> = self
            .laws
            .iter()
            .map(|l| chernoff::tilted_moments(&l.dist, s).1)
            .collect();
        let rate = per_symbol_distortion
            .iter()
            .enumerate()
            .map(|(x, &dx)| self.source[x] * self.per_symbol_rate(x, dx))
            .sum();
        Ok((Allocation { per_symbol_distortion }, rate))
    }

    /// `Σ_x P(x) Var_{s|x}{δ}`: the error of the conditional-mean estimate of
    /// `δ` from `x` under the tilted joint law.
    pub fn mmse(&self, s: f64) -> f64 {
        self.source
            .iter()
            .zip(&self.laws)
            .map(|(p, l)| p * chernoff::tilted_moments(&l.dist, s).2)
            .sum()
    }

    /// `∫₀^s ŝ·mmse(ŝ) dŝ`.
    pub fn rate_mmse_integral(&self, s: f64, tol: f64) -> f64 {
        adaptive_simpson(|u| u * self.mmse(u), 0.0, s, tol).value
    }

    /// `Δ₀ + ∫₀^s mmse(ŝ) dŝ`.
    pub fn distortion_mmse_integral(&self, s: f64, tol: f64) -> f64 {
        self.zero_force_distortion() + adaptive_simpson(|u| self.mmse(u), 0.0, s, tol).value
    }

    /// Left- and right-endpoint Riemann sums of the work integral over a
    /// force partition from 0 to `s`; the rate at `s` lies between them.
    pub fn sandwich_bounds(&self, partition: &[f64]) -> Result<(f64, f64)> {
        chernoff::check_partition(partition)?;
        let distortions: Vec<f64> = partition.iter().map(|&s| self.distortion_fn(s)).collect();
        Ok(chernoff::endpoint_sums(partition, &distortions))
    }

    fn check_observable(&self, observable: &[Vec<f64>]) -> Result<()> {
        let (k, j) = self.shape;
        if observable.len() != k || observable.iter().any(|r| r.len() != j) {
            return Err(Error::invalid("observable", format!("expected a {k}x{j} matrix")));
        }
        if observable.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("observable", "non-finite entry"));
        }
        Ok(())
    }

    /// For letter `x`: `(E[θ], Cov{θ, δ})` under `Q_s(x̂|x)`.
    fn observable_moments(&self, x: usize, observable: &[Vec<f64>], s: f64) -> (f64, f64) {
        let row = &self.distortion[x];
        let orig = &observable[self.source_index[x]];
        let m = row
            .iter()
            .filter(|d| d.is_finite())
            .fold(if s > 0.0 { f64::NEG_INFINITY } else { f64::INFINITY }, |acc, &d| {
                if s > 0.0 { acc.max(d) } else { acc.min(d) }
            });
        let (mut z, mut et, mut ed, mut etd) = (0.0, 0.0, 0.0, 0.0);
        for (y, (&d, &q)) in row.iter().zip(&self.coding).enumerate() {
            if !d.is_finite() {
                continue;
            }
            let w = q * (s * (d - m)).exp();
            let t = orig[self.coding_index[y]];
            z += w;
            et += w * t;
            ed += w * d;
            etd += w * t * d;
        }
        let (et, ed, etd) = (et / z, ed / z, etd / z);
        (et, etd - et * ed)
    }

    /// Direct expectation `⟨θ⟩_s = Σ_{x,x̂} P(x) Q_s(x̂|x) t(x,x̂)`.
    /// `observable` is indexed by the original `(K, J)` letters.
    pub fn observable_mean(&self, observable: &[Vec<f64>], s: f64) -> Result<f64> {
        self.check_observable(observable)?;
        Ok((0..self.source.len())
            .map(|x| self.source[x] * self.observable_moments(x, observable, s).0)
            .sum())
    }

    /// `⟨θ⟩_s` through the covariance integral
    /// `⟨θ⟩_0 + ∫₀^s Σ_x P(x) Cov_{ŝ|x}{θ, δ} dŝ`.
    pub fn observable_sweep(&self, observable: &[Vec<f64>], s: f64, tol: f64) -> Result<f64> {
        let start = self.observable_mean(observable, 0.0)?;
        let cov = |u: f64| {
            (0..self.source.len())
                .map(|x| self.source[x] * self.observable_moments(x, observable, u).1)
                .sum::<f64>()
        };
        Ok(start + adaptive_simpson(cov, 0.0, s, tol).value)
    }

    /// One point per force in `grid`, ordered by `s` descending.
    pub fn rd_curve(&self, grid: &[f64]) -> Result<Vec<RdPoint>> {
        if let Some(s) = grid.iter().find(|s| !(s.is_finite() && **s <= 0.0)) {
            return Err(Error::invalid("grid", format!("force {s} is not a finite value <= 0")));
        }
        let mut forces = grid.to_vec();
        forces.sort_by(|a, b| b.total_cmp(a));
        Ok(forces.into_iter().map(|s| self.distortion_at_force(s)).collect())
    }
}
