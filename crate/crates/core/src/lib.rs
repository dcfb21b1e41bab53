//! Moderate-deviation bounds for suprema of Gaussian polynomials and
//! vectors, with a seeded Monte Carlo engine to check each bound
//! empirically.
//!
//! The crate is organised by subsystem:
//!
//! * [`spectrum`]: coefficient and frequency sequences, polynomial specs,
//!   power sums and the spectral geometric mean.
//! * [`simulate`]: sample paths, covariance structures and the replication
//!   engine producing [`McEstimate`] values.
//! * [`bounds`]: closed-form deviation bounds for Gaussian vectors and
//!   trigonometric polynomials.
//! * [`decoupling`]: decoupling coefficients, Riemann-sum gaps and the cyclic
//!   deviation bounds.
//! * [`cyclic`]: rational quantization of frequencies, the interval sieve and
//!   the transfer inequality between almost periodic and cyclic processes.
//! * [`kronecker`]: lattice-localized simultaneous approximation and the
//!   related exponential-sum experiments.
//! * [`harness`]: experiment configs, result records and emitters.

pub mod bounds;
pub mod cyclic;
pub mod decoupling;
mod error;
pub mod harness;
pub mod kronecker;
pub mod normal;
pub mod quadrature;
pub mod simulate;
pub mod spectrum;

pub use error::{Error, Result};
pub use simulate::McEstimate;

/// Library version echoed into every result record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
