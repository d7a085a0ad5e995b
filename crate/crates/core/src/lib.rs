//! Digital quantum simulation of small spin models.
//!
//! Target Hamiltonians are written as weighted Pauli strings ([`models`]),
//! compiled into first-order product-formula circuits over a CNOT or
//! exchange (√iSWAP) native gate set ([`trotter`]), and executed on one of
//! two noisy backends:
//!
//! * [`gatesim`]: a gate-level density-matrix simulator with per-gate
//!   amplitude damping, dephasing and readout error;
//! * [`devsim`]: a pulse-level master-equation model of two anharmonic
//!   nanomechanical resonators coupled through a two-level transmon.
//!
//! [`bench`] ties the pieces into reproducible experiments that write CSV
//! time series and OpenQASM files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod devsim;
pub mod error;
pub mod gatesim;
pub mod models;
pub mod qcore;
pub mod trotter;

pub use error::{Error, Result};
