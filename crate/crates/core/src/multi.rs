//! Rate under two simultaneous distortion constraints.
//!
//! ```text
//! R_Q(Δ₁, Δ₂) = max_{s₁≤0, s₂≤0} [ s₁Δ₁ + s₂Δ₂ − Σ_x P(x) ln Σ_x̂ Q(x̂) e^{s₁d₁ + s₂d₂} ]
//! ```
//!
//! The objective is concave with gradient `Δ − ⟨d⟩_s` and Hessian equal to
//! minus the tilted covariance of `(d₁, d₂)`. It is maximized by projected
//! damped Newton on the nonpositive quadrant.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rd::RdProblem;

/// Iteration cap for the Newton loop.
pub const MAX_ITERATIONS: usize = 200;

/// Default gradient-norm stopping tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Forces beyond this magnitude mean the supremum is not attained.
const DIVERGENCE_LIMIT: f64 = 1e8;

/// Armijo sufficient-increase constant.
const ARMIJO: f64 = 1e-4;

/// A problem with two distortion matrices over the same letters.
#[derive(Debug, Clone)]
pub struct RdProblem2 {
    first: RdProblem,
    second: RdProblem,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoConstraintRate {
    pub rate: f64,
    pub s1: f64,
    pub s2: f64,
    /// `true` where the force sits on `s_i = 0`, i.e. the constraint is slack.
    pub slack: [bool; 2],
    pub iterations: usize,
}

/// Objective value, gradient and tilted covariance at one force pair.
struct Local {
    value: f64,
    grad: [f64; 2],
    c11: f64,
    c12: f64,
    c22: f64,
}

impl RdProblem2 {
    pub fn new(
        source_probs: Vec<f64>,
        coding_probs: Vec<f64>,
        distortion_1: Vec<Vec<f64>>,
        distortion_2: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let first = RdProblem::new(source_probs.clone(), coding_probs.clone(), distortion_1)
            .map_err(|e| e.in_field("distortion_1"))?;
        let second = RdProblem::new(source_probs, coding_probs, distortion_2)
            .map_err(|e| e.in_field("distortion_2"))?;
        Ok(RdProblem2 { first, second })
    }

    /// The one-constraint problem for `d₁`.
    pub fn first(&self) -> &RdProblem {
        &self.first
    }

    /// The one-constraint problem for `d₂`.
    pub fn second(&self) -> &RdProblem {
        &self.second
    }

    /// Zero-force means `(Δ₁⁰, Δ₂⁰)`.
    pub fn zero_force_distortions(&self) -> (f64, f64) {
        (self.first.zero_force_distortion(), self.second.zero_force_distortion())
    }

    /// The concave objective at `(s₁, s₂)`.
    pub fn objective(&self, d1: f64, d2: f64, s1: f64, s2: f64) -> f64 {
        self.local(d1, d2, [s1, s2]).value
    }

    /// Tilted means `(⟨d₁⟩_s, ⟨d₂⟩_s)`.
    pub fn tilted_means(&self, s1: f64, s2: f64) -> (f64, f64) {
        let l = self.local(0.0, 0.0, [s1, s2]);
        (-l.grad[0], -l.grad[1])
    }

    fn local(&self, d1: f64, d2: f64, s: [f64; 2]) -> Local {
        let q = self.first.coding_probs();
        let rows1 = self.first.distortion();
        let rows2 = self.second.distortion();
        let (mut phi, mut m1, mut m2) = (0.0, 0.0, 0.0);
        let (mut c11, mut c12, mut c22) = (0.0, 0.0, 0.0);
        for ((p, r1), r2) in self.first.source_probs().iter().zip(rows1).zip(rows2) {
            let expo: Vec<f64> = r1.iter().zip(r2).map(|(a, b)| s[0] * a + s[1] * b).collect();
            let top = expo.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = expo.iter().zip(q).map(|(e, qv)| qv * (e - top).exp()).collect();
            let z: f64 = w.iter().sum();
            let mean = |r: &[f64]| r.iter().zip(&w).map(|(v, wi)| v * wi).sum::<f64>() / z;
            let (a, b) = (mean(r1), mean(r2));
            let (mut v11, mut v12, mut v22) = (0.0, 0.0, 0.0);
            for ((x1, x2), wi) in r1.iter().zip(r2).zip(&w) {
                let (e1, e2) = (x1 - a, x2 - b);
                v11 += wi * e1 * e1;
                v12 += wi * e1 * e2;
                v22 += wi * e2 * e2;
            }
            phi += p * (top + z.ln());
            m1 += p * a;
            m2 += p * b;
            c11 += p * v11 / z;
            c12 += p * v12 / z;
            c22 += p * v22 / z;
        }
        Local {
            value: s[0] * d1 + s[1] * d2 - phi,
            grad: [d1 - m1, d2 - m2],
            c11,
            c12,
            c22,
        }
    }
}

/// Gradient with components that would push a zero force positive removed.
fn projected_gradient(s: [f64; 2], g: [f64; 2]) -> [f64; 2] {
    let mut pg = g;
    for i in 0..2 {
        if s[i] >= 0.0 && g[i] > 0.0 {
            pg[i] = 0.0;
        }
    }
    pg
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Ascent direction: pseudo-inverse Newton step on the free coordinates,
/// plus the gradient's null-space component (a direction along which the
/// objective is linear). The null-space part runs to the nearest zero
/// force, since a linear objective has its maximum on the boundary.
fn newton_direction(local: &Local, s: [f64; 2], free: [bool; 2]) -> [f64; 2] {
    let g = local.grad;
    match free {
        [true, true] => {
            let (a, b, c) = (local.c11, local.c12, local.c22);
            // Eigen-decomposition of [[a, b], [b, c]].
            let mean = 0.5 * (a + c);
            let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            let eig = [mean + rad, (mean - rad).max(0.0)];
            let v0 = if rad == 0.0 {
                [1.0, 0.0]
            } else if (a - eig[1]).abs() >= (c - eig[1]).abs() {
                let n = (a - eig[1]).hypot(b);
                [(a - eig[1]) / n, b / n]
            } else {
                let n = b.hypot(c - eig[1]);
                [b / n, (c - eig[1]) / n]
            };
            let vecs = [v0, [-v0[1], v0[0]]];
            let cutoff = 1e-12 * eig[0].max(f64::MIN_POSITIVE);
            let mut d = [0.0, 0.0];
            for (lam, v) in eig.iter().zip(vecs) {
                let proj = g[0] * v[0] + g[1] * v[1];
                let scale = if *lam > cutoff { proj / lam } else { to_boundary(s, v, proj) };
                d[0] += scale * v[0];
                d[1] += scale * v[1];
            }
            d
        }
        [true, false] => [newton_1d(g[0], local.c11), 0.0],
        [false, true] => [0.0, newton_1d(g[1], local.c22)],
        [false, false] => [0.0, 0.0],
    }
}

/// Signed distance along `v` (ascent sign taken from `proj`) to the first
/// coordinate reaching zero, or `proj` itself when no coordinate does.
fn to_boundary(s: [f64; 2], v: [f64; 2], proj: f64) -> f64 {
    let sign = proj.signum();
    let reach = (0..2)
        .filter(|&i| sign * v[i] > 0.0)
        .map(|i| -s[i] / (sign * v[i]))
        .fold(f64::INFINITY, f64::min);
    if reach.is_finite() && reach > 0.0 { sign * reach } else { proj }
}

fn newton_1d(g: f64, curvature: f64) -> f64 {
    if curvature > 1e-300 { g / curvature } else { g }
}

/// Maximizes the two-constraint objective over `(s₁, s₂) ≤ 0`.
pub fn rate_two_distortions(problem: &RdProblem2, d1: f64, d2: f64, tol: f64) -> Result<TwoConstraintRate> {
    if !(d1.is_finite() && d2.is_finite()) {
        return Err(Error::invalid("distortion", "non-finite target"));
    }
    let edge = 1e-12;
    if d1 < problem.first.min_distortion() - edge || d2 < problem.second.min_distortion() - edge {
        return Err(Error::InfeasiblePair { d1, d2 });
    }
    let tol = if tol > 0.0 { tol } else { DEFAULT_TOL };
    let at = |s: [f64; 2]| problem.local(d1, d2, s);
    let mut s = [0.0, 0.0];
    let mut local = at(s);

    for iteration in 0..MAX_ITERATIONS {
        let pg = projected_gradient(s, local.grad);
        if norm(pg) <= tol {
            return Ok(finish(s, local.value, iteration));
        }
        let free = [pg[0] != 0.0 || s[0] < 0.0, pg[1] != 0.0 || s[1] < 0.0];
        let newton = newton_direction(&local, s, free);
        let stepped = line_search(&at, s, &local, newton)
            .or_else(|| {
                let t0 = 1.0 / (local.c11 + local.c22).max(1e-12);
                line_search(&at, s, &local, [pg[0] * t0, pg[1] * t0])
            });
        match stepped {
            Some((next, next_local)) => {
                s = next;
                local = next_local;
            }
            None => {
                // No ascent left at f64 resolution.
                if norm(pg) <= 1e-6 {
                    return Ok(finish(s, local.value, iteration));
                }
                return Err(Error::Numerical(format!(
                    "two-constraint solver stalled with gradient norm {}",
                    norm(pg)
                )));
            }
        }
        if s[0].abs() > DIVERGENCE_LIMIT || s[1].abs() > DIVERGENCE_LIMIT {
            return Err(Error::InfeasiblePair { d1, d2 });
        }
    }
    let pg = projected_gradient(s, local.grad);
    if norm(pg) <= tol.max(1e-8) {
        return Ok(finish(s, local.value, MAX_ITERATIONS));
    }
    if s[0].abs().max(s[1].abs()) > 1e3 {
        return Err(Error::InfeasiblePair { d1, d2 });
    }
    Err(Error::Numerical(format!("two-constraint solver did not converge (gradient norm {})", norm(pg))))
}

fn finish(s: [f64; 2], value: f64, iterations: usize) -> TwoConstraintRate {
    TwoConstraintRate {
        rate: value.max(0.0),
        s1: s[0],
        s2: s[1],
        slack: [s[0] == 0.0, s[1] == 0.0],
        iterations,
    }
}

/// Projected backtracking line search with step expansion when the full
/// step is accepted (the objective may be linear along the direction).
fn line_search<F: Fn([f64; 2]) -> Local>(
    at: &F,
    s: [f64; 2],
    local: &Local,
    dir: [f64; 2],
) -> Option<([f64; 2], Local)> {
    if !(dir[0].is_finite() && dir[1].is_finite()) || norm(dir) == 0.0 {
        return None;
    }
    let trial = |t: f64| {
        let next = [(s[0] + t * dir[0]).min(0.0), (s[1] + t * dir[1]).min(0.0)];
        let moved = [next[0] - s[0], next[1] - s[1]];
        let gain = local.grad[0] * moved[0] + local.grad[1] * moved[1];
        if moved == [0.0, 0.0] {
            return None;
        }
        let l = at(next);
        (l.value >= local.value + ARMIJO * gain && l.value > local.value).then_some((next, l))
    };
    let mut t = 1.0;
    for _ in 0..60 {
        if let Some(mut best) = trial(t) {
            if t == 1.0 {
                let mut grow = 2.0;
                while grow <= 1e12 {
                    match trial(grow) {
                        Some(c) if c.1.value > best.1.value => best = c,
                        _ => break,
                    }
                    grow *= 2.0;
                }
            }
            return Some(best);
        }
        t *= 0.5;
    }
    None
}
