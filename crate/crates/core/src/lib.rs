//! Hilbert-space dimension witness for black-box quantum processes.
//!
//! A time series `⟨M(t)⟩` produced by iterating an unknown channel is folded
//! into a Hankel matrix of delayed vectors, whose rank is bounded by the
//! squared dimension of the system. Singular values are validated against a
//! worst-case shot-noise threshold, so a validated rank above `d_a²` is
//! evidence that the process leaks out of its advertised `d_a`-dimensional
//! space.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod qasm;
pub mod quantum;
pub mod rng;
pub mod witness;

pub use error::{Error, Result};

/// Version of this library, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
