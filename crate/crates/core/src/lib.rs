//! Simulation and verification toolkit for K-sparse pure-state tomography
//! driven by quantum phase estimation on the which-path-detector unitary
//! U_Phi.
//!
//! Module map:
//! - [`circuit`]: dense state vectors, the U_Phi circuit and its dense matrix.
//! - [`fast`]: O(n) single-element formulas and the optical path sum.
//! - [`eigen`]: eigenvector ansatz, reduced 2x2 blocks, spectrum scans.
//! - [`qpe`]: textbook phase estimation with Born-rule sampling.
//! - [`tomography`]: the two-phase reconstruction pipeline.
//! - [`verify`]: cross-checks of the three circuit constructions.
//! - [`bench`]: timing helpers used by the CLI.

pub mod bench;
pub mod circuit;
pub mod eigen;
pub mod error;
pub mod fast;
pub mod qpe;
pub mod rng;
pub mod tomography;
pub mod verify;

pub use circuit::{PhaseConfig, StateVector, UnitaryMatrix};
pub use error::{QstError, Result};

/// Crate version, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
