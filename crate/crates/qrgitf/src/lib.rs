//! Quantum renormalization group analysis of the one-dimensional
//! transverse-field Ising chain with two-site blocks.
//!
//! - [`qcore`]: exact algebra on two-qubit density matrices (spectra,
//!   entropies, partial operations, Bloch decomposition, dephasing).
//! - [`rgflow`]: the block ground state, the coupling map
//!   (J, g) -> (J / sqrt(g^2+1), g^2), an overflow-safe iterated flow, and a
//!   numerical check of the effective-Hamiltonian projection.
//! - [`measures`]: seven correlation quantifiers as closed forms in the
//!   field, each paired with a definition-level oracle on arbitrary states.
//! - [`scaling`]: sweeps, derivatives, extremum tracking, and the log-log
//!   fit extracting the critical exponent.
//! - [`cli`]: the `qrgitf` command-line front end emitting CSV and JSON.

// index loops mirror the matrix formulas throughout
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
mod linalg;
pub mod measures;
pub mod qcore;
pub mod rgflow;
pub mod scaling;

pub use error::{Error, Result};
