//! Simulation and analysis of charge-parity switching in
//! offset-charge-sensitive transmon qubits.
//!
//! The crate covers the full parity-rate story: the charge-dispersed
//! transmon spectrum ([`transmon`]), telegraph parity processes with Welch
//! spectral estimation and the Lorentzian rate fit ([`telegraph`],
//! [`spectrum`], [`fit`]), the Ramsey-like parity-mapping sequence
//! ([`protocol`]), quasiparticle injection and recovery dynamics ([`qp`]),
//! and blackbody pair-breaking photon absorption through the junction's
//! antenna impedance ([`antenna`]).

// Validation uses `!(x > 0.0)` so NaN inputs fail the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod constants;
pub mod error;
pub mod fit;
pub mod io;
pub mod ode;
pub mod protocol;
pub mod qp;
pub mod spectrum;
pub mod telegraph;
pub mod transmon;

pub use error::{Error, Result};
