//! Graph spanner constructions in the congested clique, with a
//! deterministic round-based simulator, bandwidth accounting, hitting-set
//! machinery (randomized, d-wise independent, and derandomized via
//! conditional expectations), and a verification harness.

pub mod clique;
pub mod dense;
pub mod graph;
pub mod hitting;
pub mod nn;
pub mod params;
pub mod partition;
pub mod rng;
pub mod sparse;
pub mod suite;
pub mod verify;

mod error;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
