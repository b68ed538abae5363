//! Simulation toolkit for a heralded, error-rejecting entangling gate
//! between quantum-dot spins in low-Q optical cavities.
//!
//! - [`cavity`]: spin-dependent reflection coefficients.
//! - [`qstate`]: small dense spin registers.
//! - [`gate`]: the parity gate with recycling, analytic and Monte Carlo.
//! - [`pulse`]: finite-bandwidth photon averaging.
//! - [`cluster`]: 1D cluster-state growth, joining and resource counts.
//! - [`sweep`], [`table`], [`config`]: parameter sweeps and their output.

// `!(x > 0.0)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod cluster;
pub mod config;
pub mod error;
pub mod gate;
pub mod pulse;
pub mod qstate;
pub mod rng;
pub mod sweep;
pub mod table;

pub use error::{Error, Result};
