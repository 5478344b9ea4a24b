//! Envelope-theory binding energies and critical coupling constants for
//! nonrelativistic systems of identical particles, optionally plus one
//! distinct particle, bound by short-range central wells.
//!
//! Units: `hbar = 1`; masses, couplings and inverse ranges are plain numbers.

pub mod critical;
pub mod error;
pub mod identical;
pub mod mixed;
pub mod numerics;
pub mod oracle;
pub mod potentials;
pub mod quantum;
pub mod validate;

pub use error::{Error, Result};
