//! Deterministic scalar numerics shared by every computation route:
//! adaptive Simpson quadrature and bracketed bisection on monotone maps.

/// Default absolute tolerance for quadrature routes.
pub const DEFAULT_QUAD_TOL: f64 = 1e-9;

/// Default relative tolerance for root solves (relative to the value range).
pub const DEFAULT_SOLVE_TOL: f64 = 1e-10;

/// Hard cap on integrand evaluations per quadrature call.
pub const MAX_EVALUATIONS: usize = 1_000_000;

/// Panels the interval is split into before adaptive refinement starts.
/// Guards against a coarse first sample that happens to look converged.
const INITIAL_PANELS: usize = 8;

/// Recursion depth limit for a single panel.
const MAX_DEPTH: u32 = 50;

/// Outcome of an adaptive quadrature run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub evaluations: usize,
    /// `false` when the evaluation cap or depth limit cut refinement short.
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

struct Integrator<'f, F> {
    f: &'f F,
    evaluations: usize,
    converged: bool,
}

impl<F: Fn(f64) -> f64> Integrator<'_, F> {
    fn eval(&mut self, x: f64) -> f64 {
        self.evaluations += 1;
        (self.f)(x)
    }

    fn refine(&mut self, p: Panel, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = self.eval(lm);
        let frm = self.eval(rm);
        let h = p.b - p.a;
        let left = h * (p.fa + 4.0 * flm + p.fm) / 12.0;
        let right = h * (p.fm + 4.0 * frm + p.fb) / 12.0;
        let both = left + right;
        let err = both - p.whole;

        // The classical test allows |err| up to 15·tol, which trusts the
        // asymptotic error model too early on panels that are still coarse.
        if err.abs() <= tol {
            return both + err / 15.0;
        }
        if depth == 0 || self.evaluations >= MAX_EVALUATIONS || m <= p.a || m >= p.b {
            self.converged = false;
            return both + err / 15.0;
        }
        let lp = Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left };
        let rp = Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right };
        self.refine(lp, 0.5 * tol, depth - 1) + self.refine(rp, 0.5 * tol, depth - 1)
    }
}

/// Integrates `f` over `[a, b]` by adaptive composite Simpson to absolute
/// tolerance `tol`. Reversed limits (`b < a`) give the negated integral.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Quadrature {
    if a == b {
        return Quadrature { value: 0.0, evaluations: 0, converged: true };
    }
    if b < a {
        let q = adaptive_simpson(f, b, a, tol);
        return Quadrature { value: -q.value, ..q };
    }
    let tol = if tol > 0.0 { tol } else { DEFAULT_QUAD_TOL };
    let mut it = Integrator { f: &f, evaluations: 0, converged: true };
    let width = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = tol / INITIAL_PANELS as f64;

    let mut total = 0.0;
    let mut x0 = a;
    let mut f0 = it.eval(a);
    for i in 0..INITIAL_PANELS {
        let x1 = if i + 1 == INITIAL_PANELS { b } else { a + width * (i + 1) as f64 };
        let xm = 0.5 * (x0 + x1);
        let fm = it.eval(xm);
        let f1 = it.eval(x1);
        let whole = (x1 - x0) * (f0 + 4.0 * fm + f1) / 6.0;
        let panel = Panel { a: x0, b: x1, fa: f0, fm, fb: f1, whole };
        total += it.refine(panel, panel_tol, MAX_DEPTH);
        x0 = x1;
        f0 = f1;
    }
    Quadrature { value: total, evaluations: it.evaluations, converged: it.converged }
}

/// Failure modes of [`solve_increasing`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketError {
    /// The bracket grew past the search limit without enclosing the target.
    NotEnclosed,
}

/// Largest magnitude the geometric bracket expansion may reach.
const BRACKET_LIMIT: f64 = 1e200;

/// Finds `x` with `g(x) ≈ target` for a nondecreasing `g`.
///
/// The bracket starts at `[lo, hi]` and each side that fails to enclose the
/// target is doubled away from zero. Bisection stops once
/// `|g(x) - target| <= abs_tol` or the bracket can no longer be split.
pub fn solve_increasing<G: Fn(f64) -> f64>(
    g: G,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    abs_tol: f64,
) -> Result<f64, BracketError> {
    debug_assert!(lo < hi);
    while g(lo) > target {
        if lo.abs() > BRACKET_LIMIT {
            return Err(BracketError::NotEnclosed);
        }
        hi = hi.min(lo);
        lo = if lo < 0.0 { 2.0 * lo } else { -1.0 };
    }
    while g(hi) < target {
        if hi.abs() > BRACKET_LIMIT {
            return Err(BracketError::NotEnclosed);
        }
        lo = lo.max(hi);
        hi = if hi > 0.0 { 2.0 * hi } else { 1.0 };
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Bracket exhausted at f64 resolution; pick the closer end.
            let (el, eh) = ((g(lo) - target).abs(), (g(hi) - target).abs());
            return Ok(if el <= eh { lo } else { hi });
        }
        let v = g(mid);
        if (v - target).abs() <= abs_tol {
            return Ok(mid);
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
