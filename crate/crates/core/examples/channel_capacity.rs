//! Mutual information of a channel recovered as a rate–distortion value
//! with `d = −ln W` at `Δ = H(X|X̂)`; the maximizing force has magnitude 1.
//!
//! ```text
//! cargo run --example channel_capacity
//! ```

use ratework::capacity::{capacity_point, mutual_information, Channel};

fn main() -> ratework::Result<()> {
    let channels = [
        ("BSC(0.1)", Channel::binary_symmetric(0.1)?),
        ("BEC(0.2)", Channel::new(vec![vec![0.8, 0.2, 0.0], vec![0.0, 0.2, 0.8]], vec![0.5, 0.5])?),
        (
            "Z channel",
            Channel::new(vec![vec![1.0, 0.0], vec![0.3, 0.7]], vec![0.6, 0.4])?,
        ),
        (
            "ternary",
            Channel::new(
                vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.8, 0.1], vec![0.25, 0.25, 0.5]],
                vec![0.3, 0.3, 0.4],
            )?,
        ),
    ];
    println!("{:<10} {:>14} {:>14} {:>10}", "channel", "rate (nats)", "I(X;Y)", "s*");
    for (name, ch) in &channels {
        let pt = capacity_point(ch)?;
        println!("{name:<10} {:>14.12} {:>14.12} {:>10.6}", pt.rate, mutual_information(ch), pt.s_star);
    }
    Ok(())
}
