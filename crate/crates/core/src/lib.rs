//! Solvers for fixed-rate power-control games between a transmitter and a
//! power-constrained jammer on a fast-fading channel.
//!
//! The library is organised around one pipeline:
//!
//! * [`channel`] — fading-gain distributions and expectations over them,
//! * [`frame_solver`] — per-codeword (frame) water-filling duels: the minimum
//!   average power the transmitter needs to sustain a target rate against the
//!   worst-case jammer, and the two-sided peak-power game,
//! * [`pure_strategies`] — outage probabilities of the pure (deterministic)
//!   strategies built on top of the frame solutions,
//! * [`mixed_equilibrium`] — the randomised frame-power game and its
//!   closed-form special cases,
//! * [`montecarlo`] — reproducible simulation of the strategies above.

pub mod channel;
pub mod error;
pub mod frame_solver;
pub mod mixed_equilibrium;
pub mod montecarlo;
pub mod numeric;
pub mod pure_strategies;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
