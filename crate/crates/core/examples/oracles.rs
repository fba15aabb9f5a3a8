//! Independent checks on the Legendre rate: exact block probabilities,
//! Blahut–Arimoto, exhaustive allocation search and a dense force scan.
//!
//! ```text
//! cargo run --release --example oracles
//! ```

use ratework::oracle::{
    blahut_arimoto, brute_allocation_min, exact_ld_probability, legendre_grid_max, GridSearch, BA_MAX_ITER,
};
use ratework::RdProblem;

fn main() -> ratework::Result<()> {
    let hamming = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    let bss = RdProblem::new(vec![0.5, 0.5], vec![0.5, 0.5], hamming.clone())?;
    let rate = bss.rate_legendre(0.25)?;
    println!("R(0.25) = {rate:.9}");
    for n in [8, 16, 32, 64] {
        let ld = exact_ld_probability(&bss, n, 0.25)?;
        println!("  n = {n:>2}: P = {:.6e}, -ln P / n = {:.6}", ld.prob, ld.exponent);
    }

    let source = vec![0.7, 0.3];
    let ba = blahut_arimoto(&source, &hamming, -2.0, 1e-14, BA_MAX_ITER)?;
    let tilted = RdProblem::new(source, ba.q_star.clone(), hamming)?.distortion_at_force(-2.0);
    println!("\nBlahut–Arimoto at s = -2: Q* = {:.6?} after {} iterations", ba.q_star, ba.iterations);
    println!("  (Δ, R) = ({:.9}, {:.9}), via tilting ({:.9}, {:.9})", ba.distortion, ba.rate, tilted.distortion, tilted.rate);

    let ternary = RdProblem::new(
        vec![0.5, 0.3, 0.2],
        vec![0.4, 0.4, 0.2],
        vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
    )?;
    let target = 0.4;
    let search = brute_allocation_min(&ternary, target, 400)?;
    println!("\nternary, Δ = {target}:");
    println!("  legendre   {:.9}", ternary.rate_legendre(target)?);
    println!("  grid scan  {:.9}", legendre_grid_max(&ternary, target, GridSearch::default()));
    println!("  brute      {:.9} (slack {:.2e}) at {:.4?}", search.rate, search.slack, search.allocation);
    Ok(())
}
