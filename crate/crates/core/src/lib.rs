//! Core kernels for simulating tubulin dimers as two-state qubits on a
//! microtubule lattice.
//!
//! Everything here is `no_std` (with `alloc`): dense state-vector algebra,
//! Hermitian eigen-solvers and Schmidt decompositions, the cylindrical dimer
//! lattice with MAP binding patterns, trajectory-style decoherence and the
//! engram recall / conditioning harness. File formats, reports and the CLI
//! live in the `mtq` crate.
//!
//! Basis convention: bit `i` of an amplitude index is the conformation of
//! qubit `i`, with `0` for the `|a>` conformation and `1` for `|b>`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod decohere;
pub mod engram;
pub mod entangle;
mod error;
pub mod lattice;
pub mod linalg;
pub mod qstate;
pub mod seed;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Seeded random source used throughout the simulator.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Tolerance for algebraic identities (normalization, unitarity).
pub const ALGEBRAIC_TOL: f64 = 1e-10;

/// Tolerance for examples with exact rational amplitudes.
pub const EXACT_TOL: f64 = 1e-12;
