//! Secure-authentication-rate (SAR) analysis for user authentication schemes
//! that draw their randomness from reciprocal Rayleigh AWGN channel estimates.
//!
//! Alice and Bob alternate pilot transmissions over frames; an eavesdropper
//! Eve observes correlated estimates of the same channel. Three
//! authentication strategies are compared by the exponential rate at which an
//! impersonation attack fails as the number of channel uses grows:
//!
//! * **S-CBCA** — symmetric-key authentication, keyed by secret-key agreement
//!   from the two legitimate estimates. Its SAR is bracketed by secret-key
//!   capacity bounds built from Gaussian mutual informations.
//! * **A-CBCA** — asymmetric-key authentication, keyed by bits that Alice
//!   extracts from a quantized channel estimate. Its SAR is a quantized
//!   conditional entropy (infinite in the unquantized limit).
//! * **PLA** — key-less physical-layer authentication, whose SAR is the
//!   Kullback-Leibler divergence between the legitimate and attack joint
//!   distributions of the reference and verification estimates.
//!
//! Every closed form in this crate is backed by a seeded Monte-Carlo oracle
//! (module [`oracle`]) drawing from the same generative channel model, so the
//! analysis and the simulation validate each other.
//!
//! The [`scheme`] module exposes the strategies behind a common trait and a
//! name-keyed registry, which is what the `sarlab` command-line driver uses to
//! select schemes at runtime.

pub mod attacks;
pub mod channel;
pub mod error;
pub mod gaussian;
pub mod lep;
pub mod numerics;
pub mod oracle;
pub mod sar;
pub mod scheme;

pub use error::{Error, Result};

/// Complex scalar type used for channel estimates and covariances.
pub use num_complex::Complex64;
