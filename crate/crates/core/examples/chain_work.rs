//! The rate as mechanical work: arrays of elements built from a
//! rate–distortion problem, pulled by a force at temperature `T`.
//!
//! ```text
//! cargo run --example chain_work
//! ```

use ratework::chain::{ChainSystem, LevelSet};
use ratework::RdProblem;

fn main() -> ratework::Result<()> {
    let problem = RdProblem::new(
        vec![0.5, 0.3, 0.2],
        vec![0.4, 0.4, 0.2],
        vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
    )?;
    let (k, temperature) = (1.0, 0.5);
    let chain = ChainSystem::from_rd_problem_with_k(&problem, 1.0 / (k * temperature), k)?;

    let target = 0.4;
    let eq = chain.equilibrium_force(target, 1e-13)?;
    let work = chain.quasistatic_work(eq.force, 1e-12);
    let rate = problem.rate_legendre(target)?;
    println!("hold length {target}: force λ = {:.9}", eq.force);
    println!("  per-array lengths {:.6?}", eq.array_lengths);
    println!("  reversible work   {work:.12}");
    println!("  kT·R(Δ)           {:.12}", chain.thermal_energy() * rate);

    println!("\n{:>6} {:>14} {:>12}", "steps", "stepwise work", "excess");
    for steps in [1, 2, 5, 20, 100] {
        let schedule: Vec<f64> = (0..=steps).map(|i| eq.force * i as f64 / steps as f64).collect();
        let charged = chain.protocol_work(&schedule)?;
        println!("{steps:>6} {charged:>14.9} {:>12.3e}", charged - work);
    }

    // Entropy of a two-level system from its energy.
    let levels = LevelSet::from_energies(vec![0.0, 1.0])?;
    for e in [0.5, 0.25, 0.1] {
        let s = levels.entropy_at_energy(e, 1e-12)?;
        println!("two-level E = {e}: S = {:.9}, β = {:.6}", s.entropy, s.beta);
    }
    Ok(())
}
