//! Binary symmetric source under Hamming distortion with uniform coding:
//! the curve traced by sweeping the force against `ln 2 − h₂(Δ)`.
//!
//! ```text
//! cargo run --example bss_closed_form
//! ```

use ratework::chernoff::binary_entropy;
use ratework::RdProblem;

fn main() -> ratework::Result<()> {
    let bss = RdProblem::new(vec![0.5, 0.5], vec![0.5, 0.5], vec![vec![0.0, 1.0], vec![1.0, 0.0]])?;
    let grid: Vec<f64> = (0..=12).map(|i| 0.0 - 0.5 * i as f64).collect();

    println!("{:>6} {:>10} {:>12} {:>12}", "s", "Δ(s)", "R(Δ)", "ln2-h2(Δ)");
    for pt in bss.rd_curve(&grid)? {
        let closed = std::f64::consts::LN_2 - binary_entropy(pt.distortion);
        println!("{:>6.2} {:>10.6} {:>12.9} {:>12.9}", pt.s, pt.distortion, pt.rate, closed);
    }

    let rate = bss.rate_legendre(0.25)?;
    println!("\nR(0.25) = {rate:.12} nats ({:.6} bits)", rate / std::f64::consts::LN_2);
    Ok(())
}
