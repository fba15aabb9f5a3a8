//! Large-deviations rate functions computed as mechanical work.
//!
//! The tilt parameter `s` of a Chernoff bound is treated as a force acting
//! on a displacement variable. The rate function is then the free energy of
//! the tilted system, and equals the work done by a force raised slowly
//! from zero. The crate applies this to:
//!
//! - scalar rate functions of finite distributions ([`chernoff`]),
//! - the rate–distortion function `R_Q(Δ)` for a fixed coding distribution,
//!   computed by several independent routes ([`rd`]),
//! - channel capacity through the distortion `−ln W` ([`capacity`]),
//! - rates under two simultaneous distortion constraints ([`multi`]),
//! - a physical emulator of arrays of elements under force ([`chain`]),
//! - validation oracles ([`oracle`]).
//!
//! Runnable programs for each area live in `examples/`; the `ratework`
//! binary exposes the same computations on the command line ([`cli`]).
//!
//! ```
//! use ratework::rd::RdProblem;
//!
//! let bss = RdProblem::new(
//!     vec![0.5, 0.5],
//!     vec![0.5, 0.5],
//!     vec![vec![0.0, 1.0], vec![1.0, 0.0]],
//! )?;
//! let rate = bss.rate_legendre(0.25)?;
//! assert!((rate - 0.130812035941).abs() < 1e-9);
//! # Ok::<(), ratework::Error>(())
//! ```

pub mod capacity;
pub mod chain;
pub mod chernoff;
pub mod cli;
pub mod error;
pub mod multi;
pub mod numeric;
pub mod oracle;
pub mod rd;

pub use chernoff::{FiniteDistribution, RateResult, TiltReport};
pub use error::{Error, Result};
pub use rd::{Allocation, RdPoint, RdProblem};
