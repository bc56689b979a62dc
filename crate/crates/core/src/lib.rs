//! Open-system generators for nonreciprocal single-excitation lattices.
//!
//! The crate builds hierarchical (HEOM), rotating-wave (RWA-HEOM) and
//! Born-Markov (Lindblad) generators over a vectorized system+ADO space,
//! diagonalizes them with bi-orthonormal left/right modes, propagates
//! trajectories and runs parameter scans.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod bmme;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod heom;
pub mod io;
pub mod lattice;
pub mod sparse;
pub mod spectral;
pub mod scan;
pub mod superop;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
