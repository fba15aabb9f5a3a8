//! Exponential tilting of a finite distribution: the rate as a Legendre
//! transform, as reversible work and as a divergence, plus the two Riemann
//! sums that bracket it for a finite force schedule.
//!
//! ```text
//! cargo run --example tilting
//! ```

use ratework::chernoff::{
    force_at_level, kl_free_energy_gap, rate_at_force, rate_work_integral, riemann_sandwich, tilt,
};
use ratework::FiniteDistribution;

fn main() -> ratework::Result<()> {
    // A loaded die shifted to zero mean.
    let die = FiniteDistribution::new(
        vec![-2.5, -1.5, -0.5, 0.5, 1.5, 2.5],
        vec![0.1, 0.15, 0.25, 0.25, 0.15, 0.1],
    )?;

    let level = 1.2;
    let r = force_at_level(&die, level, 1e-12)?;
    println!("level {level}: force s* = {:.9}, rate I = {:.12}", r.force, r.rate);

    let work = rate_work_integral(&die, r.force, 1e-12);
    let t = tilt(&die, r.force);
    let kl = kl_free_energy_gap(&t.tilted, &die)?;
    println!("work integral  {work:.12}");
    println!("divergence     {kl:.12}");
    println!("rate at force  {:.12}", rate_at_force(&die, r.force).rate);

    println!("\n{:>6} {:>14} {:>14} {:>12}", "steps", "left sum", "right sum", "gap");
    for steps in [1, 4, 16, 64, 256] {
        let partition: Vec<f64> = (0..=steps).map(|i| r.force * i as f64 / steps as f64).collect();
        let (left, right) = riemann_sandwich(&die, &partition)?;
        println!("{steps:>6} {left:>14.9} {right:>14.9} {:>12.3e}", (right - left).abs());
    }
    Ok(())
}
