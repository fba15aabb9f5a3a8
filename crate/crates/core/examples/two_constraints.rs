//! Rate under two simultaneous distortion measures, Hamming and a
//! "wrong-neighbour" cost, on a ternary source.
//!
//! ```text
//! cargo run --example two_constraints
//! ```

use ratework::multi::{rate_two_distortions, RdProblem2};
use ratework::oracle::{legendre_grid_max_2d, GridSearch2};

fn main() -> ratework::Result<()> {
    let hamming = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
    let neighbour = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]];
    let problem = RdProblem2::new(vec![0.5, 0.3, 0.2], vec![1.0 / 3.0; 3], hamming, neighbour)?;
    let (h0, n0) = problem.zero_force_distortions();
    println!("zero-force distortions: ({h0:.6}, {n0:.6})");

    let single = problem.first().rate_legendre(0.3)?;
    println!("one constraint, Δ₁ = 0.3: {single:.10}");
    println!("\n{:>6} {:>14} {:>10} {:>10} {:>8} {:>14}", "Δ₂", "rate", "s1", "s2", "active", "grid");
    for d2 in [0.3, 0.2, 0.15, 0.1, 0.05] {
        let r = rate_two_distortions(&problem, 0.3, d2, 1e-12)?;
        let (grid, _, _) = legendre_grid_max_2d(&problem, 0.3, d2, GridSearch2::default());
        let active = format!("{}{}", u8::from(!r.slack[0]), u8::from(!r.slack[1]));
        println!("{d2:>6} {:>14.10} {:>10.5} {:>10.5} {active:>8} {grid:>14.10}", r.rate, r.s1, r.s2);
    }
    Ok(())
}
