//! Non-adaptive distribution-free testers for k-sparse parities.
//!
//! The crate is organised around the pieces a tester run touches:
//!
//! - [`boolfn`]: bit vectors, black-box function oracles with query accounting,
//!   sampling distributions, and exact small-`n` distance computations.
//! - [`linearity`]: the BLR linearity test and the self-corrector.
//! - [`learner`]: a deterministic, non-adaptive exact learner for `K`-sparse
//!   parities built on a binary BCH parity-check matrix.
//! - [`tester`]: the four-stage pipeline for `k`-Linear\* (one-sided) and
//!   `k`-Linear (two-sided).
//! - [`harness`]: instance generators with certified farness, seeded Monte
//!   Carlo experiments, and CSV output.
//! - [`lab`]: Hamming bound, zero-sum column packings and the gcd/λ lemmas
//!   that feed the query lower bounds.

pub mod boolfn;
pub mod error;
pub mod harness;
pub mod lab;
pub mod learner;
pub mod linearity;
pub mod rng;
pub mod tester;

pub use error::{Error, Result};
