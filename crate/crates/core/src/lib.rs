//! Asymptotic key-rate lower bounds for the high-dimensional three-state
//! BB84 protocol, together with an explicit density-operator oracle that
//! checks every analytic formula.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. All file, CSV and command-line handling lives in the `qkdkr`
//! companion crate.
//!
//! Module map:
//!
//! * [`numerics`]: entropies and small dense Hermitian linear algebra.
//! * [`channels`]: depolarizing, amplitude-damping and Kraus-defined channels.
//! * [`tracedist`]: the trace-distance parameter ε between the key-round and
//!   test-round states.
//! * [`bounds`]: continuity bounds on the conditional-entropy gap Δ.
//! * [`keyrate`]: key-rate assembly, noise tolerances and sweeps.
//! * [`oracle`]: explicit collective attacks and exact entropies.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bounds;
pub mod channels;
mod error;
pub mod keyrate;
mod math;
pub mod numerics;
pub mod oracle;
pub mod tracedist;

pub use error::{Error, Result};
