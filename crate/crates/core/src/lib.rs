//! Simulated-bifurcation MAXCUT solving with an ideal-math engine and a
//! behavioral model of a mixed-signal SRAM compute-in-memory Ising chip.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod hw;
pub mod ising;
pub mod sb;
pub mod seed;

pub use error::{Error, Result};
