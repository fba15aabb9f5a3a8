//! Channel capacity through the rate–distortion machinery.
//!
//! Take the channel output law as the source, the input law as the coding
//! distribution and `d(x, x̂) = −ln W(x|x̂)`. At the distortion level
//! `Δ = H(X|X̂)` the Legendre rate equals the mutual information and the
//! maximizing force has magnitude one. Under the `s ≤ 0` convention used
//! here the force comes out as `s* = −1`.

use serde::Serialize;

use crate::chernoff::{check_probability_vector, PROB_SUM_TOL};
use crate::error::{Error, Result};
use crate::rd::RdProblem;

/// A discrete memoryless channel with an input distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    /// `transition[x̂][x] = W(x|x̂)`; rows are inputs.
    transition: Vec<Vec<f64>>,
    input_probs: Vec<f64>,
}

/// Result of [`capacity_point`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityPoint {
    pub rate: f64,
    pub s_star: f64,
    pub delta: f64,
}

impl Channel {
    pub fn new(transition: Vec<Vec<f64>>, input_probs: Vec<f64>) -> Result<Self> {
        check_probability_vector(&input_probs, "input_probs")?;
        if transition.len() != input_probs.len() {
            return Err(Error::invalid(
                "transition",
                format!("{} rows for {} inputs", transition.len(), input_probs.len()),
            ));
        }
        let outputs = transition.first().map_or(0, Vec::len);
        for (i, row) in transition.iter().enumerate() {
            if row.len() != outputs || outputs == 0 {
                return Err(Error::invalid("transition", format!("row {i} has {} entries", row.len())));
            }
            if row.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(Error::invalid("transition", format!("row {i} has an invalid entry")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::invalid("transition", format!("row {i} sums to {total}")));
            }
        }
        Ok(Channel { transition, input_probs })
    }

    /// Binary symmetric channel with crossover `p` and uniform input.
    pub fn binary_symmetric(p: f64) -> Result<Self> {
        Channel::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]], vec![0.5, 0.5])
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn input_probs(&self) -> &[f64] {
        &self.input_probs
    }

    pub fn outputs(&self) -> usize {
        self.transition[0].len()
    }

    /// Output law `P(x) = Σ_x̂ Q(x̂) W(x|x̂)`.
    pub fn output_probs(&self) -> Vec<f64> {
        (0..self.outputs())
            .map(|x| self.input_probs.iter().zip(&self.transition).map(|(q, row)| q * row[x]).sum())
            .collect()
    }

    /// `H(X|X̂) = −Σ Q(x̂) W(x|x̂) ln W(x|x̂)`.
    pub fn conditional_entropy(&self) -> f64 {
        self.input_probs
            .iter()
            .zip(&self.transition)
            .flat_map(|(q, row)| row.iter().filter(|w| **w > 0.0).map(move |w| -q * w * w.ln()))
            .sum()
    }

    /// The rate–distortion instance `(P, Q, −ln W)`; zero transitions become
    /// excluded pairs.
    pub fn to_rd_problem(&self) -> Result<RdProblem> {
        let mut output = self.output_probs();
        if let Some(x) = output.iter().position(|p| *p <= 0.0) {
            return Err(Error::ChannelDegenerate { output: x });
        }
        // Guard against the column sums drifting past the unit-sum check.
        let total: f64 = output.iter().sum();
        output.iter_mut().for_each(|p| *p /= total);
        let distortion = (0..self.outputs())
            .map(|x| {
                self.transition
                    .iter()
                    .map(|row| if row[x] > 0.0 { -row[x].ln() } else { f64::INFINITY })
                    .collect()
            })
            .collect();
        RdProblem::with_excluded_pairs(output, self.input_probs.clone(), distortion)
    }
}

/// Rate, maximizing force and distortion level of the capacity mapping.
pub fn capacity_point(channel: &Channel) -> Result<CapacityPoint> {
    let problem = channel.to_rd_problem()?;
    let delta = channel.conditional_entropy();
    let (mut s_star, rate) = match problem.legendre(delta) {
        Ok(found) => found,
        // Δ within rounding of the minimum: every W(x|·) is constant on
        // Q's support, the objective is flat and the boundary value is exact.
        Err(Error::DistortionTooLow { boundary: Some(b), .. }) => (f64::NEG_INFINITY, b.rate),
        Err(e) => return Err(e),
    };
    // With every Q(δ|x) a point mass the objective is flat in s; report the
    // posterior force instead of whichever endpoint the solver stopped at.
    if problem.build_delta_dists().iter().all(|d| d.len() == 1) {
        s_star = -1.0;
    }
    Ok(CapacityPoint { rate, s_star, delta })
}

/// `I(X̂; X) = Σ Q(x̂) W(x|x̂) ln(W(x|x̂)/P(x))` in nats.
pub fn mutual_information(channel: &Channel) -> f64 {
    let output = channel.output_probs();
    let total: f64 = channel
        .input_probs
        .iter()
        .zip(&channel.transition)
        .flat_map(|(q, row)| {
            row.iter()
                .zip(&output)
                .filter(|(w, _)| **w > 0.0)
                .map(move |(w, p)| q * w * (w / p).ln())
        })
        .sum();
    total.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chernoff::binary_entropy;
    use std::f64::consts::LN_2;

    #[test]
    fn bsc_capacity() {
        let ch = Channel::binary_symmetric(0.1).unwrap();
        let pt = capacity_point(&ch).unwrap();
        let expected = LN_2 - binary_entropy(0.1);
        assert!((pt.rate - expected).abs() < 1e-12);
        assert!((pt.rate - 0.368064).abs() < 1e-6);
        assert!((pt.s_star + 1.0).abs() < 1e-9);
        assert!((mutual_information(&ch) - expected).abs() < 1e-15);
    }

    #[test]
    fn noiseless_channel() {
        let ch = Channel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.5, 0.5]).unwrap();
        let pt = capacity_point(&ch).unwrap();
        assert!((pt.rate - LN_2).abs() < 1e-15);
        assert_eq!(pt.delta, 0.0);
        assert_eq!(pt.s_star, -1.0);
        let id3 = Channel::new(
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            vec![1.0 / 3.0; 3],
        )
        .unwrap();
        assert!((mutual_information(&id3) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn useless_channel() {
        let ch = Channel::new(vec![vec![1.0 / 3.0; 3]; 2], vec![0.25, 0.75]).unwrap();
        assert!(capacity_point(&ch).unwrap().rate.abs() < 1e-15);
        assert!(mutual_information(&ch).abs() < 1e-15);
        let same = Channel::new(vec![vec![0.2, 0.8]; 3], vec![0.2, 0.3, 0.5]).unwrap();
        assert!(mutual_information(&same).abs() < 1e-15);
    }

    #[test]
    fn zero_transitions_are_excluded_pairs() {
        // Binary erasure channel: outputs {0, e, 1}.
        let eps = 0.2;
        let ch = Channel::new(vec![vec![1.0 - eps, eps, 0.0], vec![0.0, eps, 1.0 - eps]], vec![0.5, 0.5])
            .unwrap();
        let pt = capacity_point(&ch).unwrap();
        assert!((pt.rate - (1.0 - eps) * LN_2).abs() < 1e-10);
        assert!((pt.rate - mutual_information(&ch)).abs() < 1e-10);
    }

    #[test]
    fn degenerate_output_rejected() {
        let ch = Channel::new(vec![vec![0.5, 0.5, 0.0], vec![1.0, 0.0, 0.0]], vec![0.5, 0.5]).unwrap();
        assert!(matches!(capacity_point(&ch), Err(Error::ChannelDegenerate { output: 2 })));
        assert!(Channel::new(vec![vec![0.5, 0.4]], vec![1.0]).is_err());
    }
}
