//! One rate–distortion value reached four ways on a small asymmetric
//! problem: direct Legendre maximization, the integral of `s·mmse(s)`,
//! equal-force allocation across source letters, and Riemann bounds.
//!
//! ```text
//! cargo run --example rd_routes
//! ```

use ratework::RdProblem;

fn main() -> ratework::Result<()> {
    let problem = RdProblem::new(
        vec![0.5, 0.3, 0.2],
        vec![0.4, 0.4, 0.2],
        vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
    )?;
    let (dmin, d0) = (problem.min_distortion(), problem.zero_force_distortion());
    println!("distortion range: min {dmin}, zero force {d0:.6}");

    let target = 0.4;
    let rate = problem.rate_legendre(target)?;
    let point = problem.force_at_distortion(target, 1e-13)?;
    let integral = problem.rate_mmse_integral(point.s, 1e-11);
    let (allocation, split_rate) = problem.equal_force_allocation(target)?;

    println!("\nΔ = {target}: force s* = {:.9}", point.s);
    println!("  legendre         {rate:.12}");
    println!("  ∫ s·mmse ds      {integral:.12}");
    println!("  equal force      {split_rate:.12}");
    println!("  per-letter Δ_x   {:.6?}", allocation.per_symbol_distortion);
    for steps in [10, 100, 1000] {
        let partition: Vec<f64> = (0..=steps).map(|i| point.s * i as f64 / steps as f64).collect();
        let (left, right) = problem.sandwich_bounds(&partition)?;
        println!("  {steps:>4} steps      [{:.9}, {:.9}]", left.min(right), left.max(right));
    }
    Ok(())
}
