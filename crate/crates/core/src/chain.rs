//! A deterministic emulator of the physical picture behind the force view:
//! arrays of independent multi-state elements, pulled by a force `λ` at
//! inverse temperature `β`.
//!
//! An element of array `x` in state `j` has length `y_j` and internal energy
//! `ε_j`. Under force `λ` the state is Boltzmann distributed with weights
//! `e^{−β(ε_j − λ y_j)}`; the per-element Gibbs free energy is
//!
//! ```text
//! G(λ) = −(1/β) Σ_x p_x ln Σ_j e^{−β(ε_{j|x} − λ y_{j|x})}
//! ```
//!
//! and the mean length is `Y(λ) = −∂G/∂λ`. Mapping a rate–distortion problem
//! onto arrays (lengths = distortions, energies = `−(1/β) ln Q`) turns the
//! tilt `s` into the force `βλ`, the distortion into the mean length, and
//! `R_Q(Δ)/β` into the reversible work `∫ λ dY`.

use serde::Serialize;

use crate::chernoff::{self, FiniteDistribution, VALUE_TOL};
use crate::error::{Error, Result};
use crate::numeric::{self, adaptive_simpson};
use crate::rd::RdProblem;

/// One array: per-state lengths and energies, and its share of the elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementArray {
    pub state_lengths: Vec<f64>,
    pub state_energies: Vec<f64>,
    pub fraction: f64,
}

impl ElementArray {
    pub fn new(state_lengths: Vec<f64>, state_energies: Vec<f64>, fraction: f64) -> Result<Self> {
        if state_lengths.is_empty() || state_lengths.len() != state_energies.len() {
            return Err(Error::invalid(
                "arrays",
                "state lengths and energies must be nonempty and of equal size",
            ));
        }
        if state_lengths.iter().chain(&state_energies).any(|v| !v.is_finite()) {
            return Err(Error::invalid("arrays", "non-finite state length or energy"));
        }
        if !(fraction.is_finite() && fraction >= 0.0) {
            return Err(Error::invalid("arrays", format!("invalid fraction {fraction}")));
        }
        Ok(ElementArray { state_lengths, state_energies, fraction })
    }
}

/// Boltzmann weights at zero force as a length distribution plus its log
/// normalizer `ln Σ_j e^{−β ε_j}`.
#[derive(Debug, Clone)]
struct ArrayLaw {
    lengths: FiniteDistribution,
    log_norm: f64,
}

impl ArrayLaw {
    fn new(array: &ElementArray, beta: f64) -> Result<Self> {
        let top = array
            .state_energies
            .iter()
            .map(|e| -beta * e)
            .fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = array.state_energies.iter().map(|e| (-beta * e - top).exp()).collect();
        let (lengths, total) = FiniteDistribution::from_weights(&array.state_lengths, &w)?;
        Ok(ArrayLaw { lengths, log_norm: top + total.ln() })
    }

    /// `ln Σ_j e^{−β(ε_j − λ y_j)}` at tilt `s = βλ`.
    fn log_partition(&self, s: f64) -> f64 {
        self.log_norm + chernoff::log_mgf(&self.lengths, s)
    }
}

/// Arrays, inverse temperature `β = 1/(kT)` and Boltzmann constant `k`.
#[derive(Debug, Clone)]
pub struct ChainSystem {
    arrays: Vec<ElementArray>,
    beta: f64,
    boltzmann_k: f64,
    laws: Vec<ArrayLaw>,
}

/// Output of [`ChainSystem::equilibrium_force`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    pub force: f64,
    /// Mean length of an element of each array at the common force.
    pub array_lengths: Vec<f64>,
}

/// Entropy at a given mean energy and the conjugate inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyPoint {
    /// Per-particle entropy in units of `k`.
    pub entropy: f64,
    pub beta: f64,
}

impl ChainSystem {
    pub fn new(arrays: Vec<ElementArray>, beta: f64, boltzmann_k: f64) -> Result<Self> {
        if arrays.is_empty() {
            return Err(Error::invalid("arrays", "no arrays"));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
        }
        if !(boltzmann_k.is_finite() && boltzmann_k > 0.0) {
            return Err(Error::invalid("k", format!("must be positive, got {boltzmann_k}")));
        }
        let total: f64 = arrays.iter().map(|a| a.fraction).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("arrays", format!("fractions sum to {total}, expected 1")));
        }
        let laws = arrays.iter().map(|a| ArrayLaw::new(a, beta)).collect::<Result<_>>()?;
        Ok(ChainSystem { arrays, beta, boltzmann_k, laws })
    }

    /// One array per source letter: fraction `P(x)`, lengths `d(x, ·)` and
    /// energies `−(1/β) ln Q(·)`. Excluded pairs become absent states.
    pub fn from_rd_problem(problem: &RdProblem, beta: f64) -> Result<Self> {
        Self::from_rd_problem_with_k(problem, beta, 1.0)
    }

    pub fn from_rd_problem_with_k(problem: &RdProblem, beta: f64, boltzmann_k: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
        }
        let q = problem.coding_probs();
        let arrays = problem
            .distortion()
            .iter()
            .zip(problem.source_probs())
            .map(|(row, &p)| {
                let (lengths, energies) = row
                    .iter()
                    .zip(q)
                    .filter(|(d, _)| d.is_finite())
                    .map(|(&d, &qv)| (d, -qv.ln() / beta))
                    .unzip();
                ElementArray::new(lengths, energies, p)
            })
            .collect::<Result<Vec<_>>>()?;
        ChainSystem::new(arrays, beta, boltzmann_k)
    }

    pub fn arrays(&self) -> &[ElementArray] {
        &self.arrays
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn boltzmann_k(&self) -> f64 {
        self.boltzmann_k
    }

    /// `T = 1/(kβ)`.
    pub fn temperature(&self) -> f64 {
        1.0 / (self.boltzmann_k * self.beta)
    }

    /// `kT = 1/β`, the energy scale of the rate.
    pub fn thermal_energy(&self) -> f64 {
        1.0 / self.beta
    }

    /// Per-element Gibbs free energy `G(λ)`.
    pub fn gibbs_free_energy(&self, force: f64) -> f64 {
        let s = self.beta * force;
        -self
            .arrays
            .iter()
            .zip(&self.laws)
            .map(|(a, l)| a.fraction * l.log_partition(s))
            .sum::<f64>()
            / self.beta
    }

    /// Mean length of one element of each array under force `λ`.
    pub fn array_lengths(&self, force: f64) -> Vec<f64> {
        let s = self.beta * force;
        self.laws.iter().map(|l| chernoff::tilted_moments(&l.lengths, s).1).collect()
    }

    /// Per-element mean length `Y(λ) = −∂G/∂λ`.
    pub fn expected_length(&self, force: f64) -> f64 {
        self.moments(force).0
    }

    /// `(Y(λ), Σ_x p_x Var_x(y))`.
    fn moments(&self, force: f64) -> (f64, f64) {
        let s = self.beta * force;
        self.arrays.iter().zip(&self.laws).fold((0.0, 0.0), |(m, v), (a, l)| {
            let (_, mean, var) = chernoff::tilted_moments(&l.lengths, s);
            (m + a.fraction * mean, v + a.fraction * var)
        })
    }

    /// Susceptibility `dY/dλ = β Σ_x p_x Var_x(y)`.
    pub fn susceptibility(&self, force: f64) -> f64 {
        self.beta * self.moments(force).1
    }

    fn length_range(&self) -> (f64, f64) {
        self.arrays.iter().zip(&self.laws).fold((0.0, 0.0), |(lo, hi), (a, l)| {
            (lo + a.fraction * l.lengths.min_value(), hi + a.fraction * l.lengths.max_value())
        })
    }

    /// The common force at which the concatenated arrays have total mean
    /// length `Y₀` per element, and the resulting per-array lengths.
    /// `tol` is relative to the achievable length range.
    pub fn equilibrium_force(&self, length: f64, tol: f64) -> Result<Equilibrium> {
        let (min, max) = self.length_range();
        let edge = VALUE_TOL * max.abs().max(min.abs()).max(1.0);
        if !(length > min + edge && length < max - edge) {
            return Err(Error::LengthInfeasible { length, min, max });
        }
        let tol = if tol > 0.0 { tol } else { numeric::DEFAULT_SOLVE_TOL };
        let force = if length == self.expected_length(0.0) {
            0.0
        } else {
            numeric::solve_increasing(|f| self.expected_length(f), length, -1.0, 1.0, tol * (max - min))
                .map_err(|_| Error::Numerical(format!("could not bracket the force for length {length}")))?
        };
        Ok(Equilibrium { force, array_lengths: self.array_lengths(force) })
    }

    /// Helmholtz free energy of one element of array `index` held at mean
    /// length `length`: `F(Y) = max_λ [G(λ) + λY]`.
    pub fn array_helmholtz(&self, index: usize, length: f64, tol: f64) -> Result<f64> {
        let law = self
            .laws
            .get(index)
            .ok_or_else(|| Error::invalid("index", format!("no array {index}")))?;
        let r = chernoff::force_at_level(&law.lengths, length, tol)?;
        let force = r.force / self.beta;
        let g = -law.log_partition(r.force) / self.beta;
        Ok(g + force * length)
    }

    /// Reversible work per element `∫₀^{λ_f} λ (dY/dλ) dλ` as the force is
    /// raised slowly from zero.
    pub fn quasistatic_work(&self, final_force: f64, tol: f64) -> f64 {
        adaptive_simpson(|f| f * self.susceptibility(f), 0.0, final_force, tol).value
    }

    /// Work of a stepwise protocol: each jump to `λ_{i+1}` is charged
    /// `λ_{i+1}(Y(λ_{i+1}) − Y(λ_i))` once the system re-equilibrates.
    /// This never falls below [`ChainSystem::quasistatic_work`].
    pub fn protocol_work(&self, schedule: &[f64]) -> Result<f64> {
        self.protocol_sums(schedule).map(|(_, charged)| charged)
    }

    /// Both endpoint sums of a schedule: `(Σ λ_i ΔY_i, Σ λ_{i+1} ΔY_i)`.
    /// The reversible work lies between them.
    pub fn protocol_sums(&self, schedule: &[f64]) -> Result<(f64, f64)> {
        chernoff::check_partition(schedule).map_err(|e| match e {
            Error::PartitionInvalid(msg) => Error::ScheduleInvalid(msg),
            other => other,
        })?;
        let lengths: Vec<f64> = schedule.iter().map(|&f| self.expected_length(f)).collect();
        Ok(chernoff::endpoint_sums(schedule, &lengths))
    }
}

/// Energy levels with degeneracies, for the microcanonical entropy.
#[derive(Debug, Clone)]
pub struct LevelSet {
    energies: FiniteDistribution,
    log_states: f64,
}

impl LevelSet {
    /// Degeneracies need not be integers but must be positive in total.
    pub fn new(energies: Vec<f64>, degeneracies: Vec<f64>) -> Result<Self> {
        let (dist, total) = FiniteDistribution::from_weights(&energies, &degeneracies)?;
        Ok(LevelSet { energies: dist, log_states: total.ln() })
    }

    /// Nondegenerate levels.
    pub fn from_energies(energies: Vec<f64>) -> Result<Self> {
        let ones = vec![1.0; energies.len()];
        LevelSet::new(energies, ones)
    }

    /// `φ(β) = ln Σ_j g_j e^{−β ε_j}`.
    pub fn log_partition(&self, beta: f64) -> f64 {
        self.log_states + chernoff::log_mgf(&self.energies, -beta)
    }

    /// Mean energy `E(β) = −φ'(β)`.
    pub fn mean_energy(&self, beta: f64) -> f64 {
        chernoff::tilted_moments(&self.energies, -beta).1
    }

    /// `S(E) = min_{β≥0} [βE + φ(β)]`, per particle in units of `k`.
    pub fn entropy_at_energy(&self, energy: f64, tol: f64) -> Result<EntropyPoint> {
        let (min, max) = (self.energies.min_value(), self.energies.max_value());
        if !(energy >= min - VALUE_TOL && energy <= max + VALUE_TOL) {
            return Err(Error::EnergyInfeasible { energy, min, max });
        }
        if energy >= self.mean_energy(0.0) {
            return Ok(EntropyPoint { entropy: self.log_states, beta: 0.0 });
        }
        if energy <= min + VALUE_TOL {
            let ground = self.energies.probs()[0].ln() + self.log_states;
            return Ok(EntropyPoint { entropy: ground, beta: f64::INFINITY });
        }
        let tol = if tol > 0.0 { tol } else { numeric::DEFAULT_SOLVE_TOL };
        // −E(β) is nondecreasing in β.
        let beta = numeric::solve_increasing(
            |b| -self.mean_energy(b),
            -energy,
            0.0,
            1.0,
            tol * (max - min),
        )
        .map_err(|_| Error::Numerical(format!("could not bracket beta for energy {energy}")))?;
        Ok(EntropyPoint { entropy: beta * energy + self.log_partition(beta), beta })
    }
}
