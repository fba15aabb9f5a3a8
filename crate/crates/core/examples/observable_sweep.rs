//! Tracking the mean of another observable along a force sweep, either
//! directly or by integrating its covariance with the distortion.
//!
//! ```text
//! cargo run --example observable_sweep
//! ```

use ratework::RdProblem;

fn main() -> ratework::Result<()> {
    let problem = RdProblem::new(
        vec![0.5, 0.3, 0.2],
        vec![0.4, 0.4, 0.2],
        vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
    )?;
    // Squared error between letters, a different cost than the distortion.
    let squared: Vec<Vec<f64>> =
        (0..3).map(|x| (0..3).map(|y| ((x as f64) - (y as f64)).powi(2)).collect()).collect();

    println!("{:>6} {:>10} {:>14} {:>14}", "s", "Δ(s)", "⟨θ⟩ direct", "⟨θ⟩ sweep");
    for i in 0..=8 {
        let s = 0.0 - 0.5 * i as f64;
        let direct = problem.observable_mean(&squared, s)?;
        let sweep = problem.observable_sweep(&squared, s, 1e-11)?;
        println!("{s:>6.2} {:>10.6} {direct:>14.10} {sweep:>14.10}", problem.distortion_fn(s));
    }
    Ok(())
}
