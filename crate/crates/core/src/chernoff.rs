//! Exponential tilting of finite distributions.
//!
//! For a finite law `P(y)` and force `s`, the tilted law is
//!
//! ```text
//! P_s(y) = P(y) e^{s y} / Σ_y' P(y') e^{s y'}
//! ```
//!
//! and the log-moment generating function `φ(s) = ln Σ P(y) e^{s y}` is
//! convex with `φ'(s) = ⟨y⟩_s` and `φ''(s) = Var_s{y}`. The rate function at
//! level `Y` is the Legendre transform `max_s [sY − φ(s)]`; evaluated at the
//! maximizing force it reads `Î(s) = s⟨y⟩_s − φ(s)`, which also equals the
//! work `∫₀^s ŝ d⟨y⟩_ŝ` done by a slowly increasing force.
//!
//! All logarithms are natural; rates are in nats.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{self, adaptive_simpson};

/// Two outcome values closer than this are the same outcome.
pub const VALUE_TOL: f64 = 1e-12;

/// Allowed deviation of a probability vector's sum from one.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// A finite law over real outcomes.
///
/// Construction drops zero-mass outcomes, merges values equal within
/// [`VALUE_TOL`] and sorts by value, so `values()` is strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl FiniteDistribution {
    /// Builds a distribution from outcome values and probabilities that must
    /// sum to one within [`PROB_SUM_TOL`].
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let total = check_probability_vector(&probs, "probs")?;
        let (dist, _) = Self::from_weights(&values, &probs)?;
        debug_assert!((total - 1.0).abs() <= PROB_SUM_TOL);
        Ok(dist)
    }

    /// Single outcome with probability one.
    pub fn point_mass(value: f64) -> Self {
        FiniteDistribution { values: vec![value], probs: vec![1.0] }
    }

    /// Normalizes nonnegative weights into a distribution and returns it
    /// together with the total weight.
    pub(crate) fn from_weights(values: &[f64], weights: &[f64]) -> Result<(Self, f64)> {
        if values.len() != weights.len() {
            return Err(Error::invalid(
                "values",
                format!("{} values but {} probabilities", values.len(), weights.len()),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid("values", format!("non-finite outcome value {v}")));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::invalid("probs", format!("invalid weight {w}")));
        }
        let mut pairs: Vec<(f64, f64)> = values
            .iter()
            .copied()
            .zip(weights.iter().copied())
            .filter(|&(_, w)| w > 0.0)
            .collect();
        if pairs.is_empty() {
            return Err(Error::invalid("probs", "no outcome carries positive mass"));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (v, w) in pairs {
            match merged.last_mut() {
                // Compare against the first value of the group so grouping
                // does not chain across many near-equal values.
                Some(last) if (v - last.0).abs() <= VALUE_TOL => last.1 += w,
                _ => merged.push((v, w)),
            }
        }
        let total: f64 = merged.iter().map(|p| p.1).sum();
        let (values, probs) = merged.into_iter().map(|(v, w)| (v, w / total)).unzip();
        Ok((FiniteDistribution { values, probs }, total))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probs).map(|(v, p)| v * p).sum()
    }

    /// Probability of the outcome equal to `value` within [`VALUE_TOL`].
    pub fn prob_of(&self, value: f64) -> f64 {
        self.values
            .iter()
            .position(|v| (v - value).abs() <= VALUE_TOL)
            .map_or(0.0, |i| self.probs[i])
    }

    /// Unnormalized tilted weights `P(y) e^{s(y - m)}` with the shift `m`
    /// chosen so no exponent is positive, plus `s·m`.
    fn shifted_weights(&self, s: f64) -> (Vec<f64>, f64) {
        if s == 0.0 {
            return (self.probs.clone(), 0.0);
        }
        let m = if s > 0.0 { self.max_value() } else { self.min_value() };
        let w = self
            .values
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| p * (s * (v - m)).exp())
            .collect();
        (w, s * m)
    }
}

/// Checks nonnegativity, finiteness and unit sum; returns the sum.
pub(crate) fn check_probability_vector(probs: &[f64], field: &str) -> Result<f64> {
    if probs.is_empty() {
        return Err(Error::invalid(field, "empty probability vector"));
    }
    if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::invalid(field, format!("entry {i} = {p} is not a probability")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::invalid(field, format!("probabilities sum to {total}, expected 1")));
    }
    Ok(total)
}

/// The tilted law at one force together with its first two moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiltReport {
    pub s: f64,
    pub log_mgf: f64,
    pub mean: f64,
    pub variance: f64,
    pub tilted: FiniteDistribution,
}

/// One point of a rate function: level `Y`, its force `s*` and `I(Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateResult {
    pub level: f64,
    pub force: f64,
    pub rate: f64,
}

/// `ln Σ P(y) e^{s y}`, stable for `|s·y|` far beyond the `exp` range.
pub fn log_mgf(dist: &FiniteDistribution, s: f64) -> f64 {
    let (w, shift) = dist.shifted_weights(s);
    shift + w.iter().sum::<f64>().ln()
}

/// Tilted mean and variance only; avoids building the tilted distribution.
pub(crate) fn tilted_moments(dist: &FiniteDistribution, s: f64) -> (f64, f64, f64) {
    let (w, shift) = dist.shifted_weights(s);
    let z: f64 = w.iter().sum();
    let mean = dist.values.iter().zip(&w).map(|(v, wi)| v * wi).sum::<f64>() / z;
    let var = dist
        .values
        .iter()
        .zip(&w)
        .map(|(v, wi)| wi * (v - mean) * (v - mean))
        .sum::<f64>()
        / z;
    (shift + z.ln(), mean, var.max(0.0))
}

pub fn tilt(dist: &FiniteDistribution, s: f64) -> TiltReport {
    let (w, shift) = dist.shifted_weights(s);
    let z: f64 = w.iter().sum();
    let (tilted, _) = FiniteDistribution::from_weights(&dist.values, &w)
        .expect("tilted weights of a valid distribution are valid");
    let mean = tilted.mean();
    let variance = tilted
        .values
        .iter()
        .zip(&tilted.probs)
        .map(|(v, p)| p * (v - mean) * (v - mean))
        .sum::<f64>()
        .max(0.0);
    TiltReport { s, log_mgf: shift + z.ln(), mean, variance, tilted }
}

/// `Î(s) = s⟨y⟩_s − φ(s)`, the rate at the level this force sustains.
pub fn rate_at_force(dist: &FiniteDistribution, s: f64) -> RateResult {
    let (phi, mean, _) = tilted_moments(dist, s);
    RateResult { level: mean, force: s, rate: (s * mean - phi).max(0.0) }
}

/// Solves `⟨y⟩_s = Y` by bisection and returns the rate there.
///
/// `tol` is relative to the value range of the support. A level on a support
/// extreme carrying less than all the mass yields [`Error::LevelExtreme`]
/// with rate `−ln P(extreme)` and an infinite force.
pub fn force_at_level(dist: &FiniteDistribution, level: f64, tol: f64) -> Result<RateResult> {
    let (min, max) = (dist.min_value(), dist.max_value());
    if level < min - VALUE_TOL || level > max + VALUE_TOL || !level.is_finite() {
        return Err(Error::LevelInfeasible { level, min, max });
    }
    if dist.len() == 1 {
        return Ok(RateResult { level, force: 0.0, rate: 0.0 });
    }
    if (level - min).abs() <= VALUE_TOL {
        return Err(Error::LevelExtreme(RateResult {
            level,
            force: f64::NEG_INFINITY,
            rate: -dist.probs[0].ln(),
        }));
    }
    if (level - max).abs() <= VALUE_TOL {
        return Err(Error::LevelExtreme(RateResult {
            level,
            force: f64::INFINITY,
            rate: -dist.probs[dist.len() - 1].ln(),
        }));
    }
    let tol = if tol > 0.0 { tol } else { numeric::DEFAULT_SOLVE_TOL };
    let mean0 = dist.mean();
    if level == mean0 {
        return Ok(RateResult { level, force: 0.0, rate: 0.0 });
    }
    let s = numeric::solve_increasing(
        |s| tilted_moments(dist, s).1,
        level,
        -1.0,
        1.0,
        tol * (max - min),
    )
    .map_err(|_| Error::Numerical(format!("could not bracket the force for level {level}")))?;
    // The objective sY − φ(s) is stationary at the solution, so evaluating
    // it at the requested level keeps the error second order in s.
    let rate = (s * level - log_mgf(dist, s)).max(0.0);
    Ok(RateResult { level, force: s, rate })
}

/// `∫₀^s ŝ Var_ŝ{y} dŝ` by adaptive Simpson; equals [`rate_at_force`].
pub fn rate_work_integral(dist: &FiniteDistribution, s: f64, tol: f64) -> f64 {
    adaptive_simpson(|u| u * tilted_moments(dist, u).2, 0.0, s, tol).value
}

/// `⟨y⟩_0 + ∫₀^s Var_ŝ{y} dŝ`; equals the tilted mean.
pub fn mean_via_integral(dist: &FiniteDistribution, s: f64, tol: f64) -> f64 {
    dist.mean() + adaptive_simpson(|u| tilted_moments(dist, u).2, 0.0, s, tol).value
}

/// Checks that `partition` runs strictly monotonically from 0 to its last
/// element.
pub(crate) fn check_partition(partition: &[f64]) -> Result<()> {
    let first = *partition
        .first()
        .ok_or_else(|| Error::PartitionInvalid("empty partition".into()))?;
    if first != 0.0 {
        return Err(Error::PartitionInvalid(format!("first point is {first}, expected 0")));
    }
    if let Some(x) = partition.iter().find(|x| !x.is_finite()) {
        return Err(Error::PartitionInvalid(format!("non-finite point {x}")));
    }
    if partition.len() > 1 {
        let up = partition[1] > partition[0];
        let monotone = partition
            .windows(2)
            .all(|w| if up { w[1] > w[0] } else { w[1] < w[0] });
        if !monotone {
            return Err(Error::PartitionInvalid("points are not strictly monotone".into()));
        }
    }
    Ok(())
}

/// Left- and right-endpoint sums `Σ s_i Δm_i` and `Σ s_{i+1} Δm_i` for a
/// monotone mean curve sampled on `partition`.
pub(crate) fn endpoint_sums(partition: &[f64], means: &[f64]) -> (f64, f64) {
    partition
        .windows(2)
        .zip(means.windows(2))
        .fold((0.0, 0.0), |(a, b), (s, m)| {
            let dm = m[1] - m[0];
            (a + s[0] * dm, b + s[1] * dm)
        })
}

/// The two Riemann sums of the work integral over `partition`.
/// The rate at the final force lies between them.
pub fn riemann_sandwich(dist: &FiniteDistribution, partition: &[f64]) -> Result<(f64, f64)> {
    check_partition(partition)?;
    let means: Vec<f64> = partition.iter().map(|&s| tilted_moments(dist, s).1).collect();
    Ok(endpoint_sums(partition, &means))
}

/// `D(q‖p) = Σ q ln(q/p)` in nats.
///
/// With `p` the untilted law and `q = P_s`, this is the free-energy gap
/// between the two and equals the rate at force `s`.
pub fn kl_free_energy_gap(q: &FiniteDistribution, p: &FiniteDistribution) -> Result<f64> {
    let mut total = 0.0;
    for (&v, &qv) in q.values.iter().zip(&q.probs) {
        let pv = p.prob_of(v);
        if pv == 0.0 {
            return Err(Error::SupportMismatch { value: v });
        }
        total += qv * (qv / pv).ln();
    }
    Ok(total.max(0.0))
}

/// Binary entropy in nats.
pub fn binary_entropy(u: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    term(u) + term(1.0 - u)
}
