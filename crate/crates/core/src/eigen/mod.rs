//! Closed-form eigenvectors of the photon circuit, one 2x2 block per ansatz
//! index.

pub mod ansatz;
pub mod appendix_b;
pub mod pair;
pub mod rho;
pub mod scan;
pub mod spectrum;

pub use ansatz::{ansatz_state, AnsatzIndex};
pub use appendix_b::{appendix_b_residuals, mu_from_pair, trig_residuals, unitarity_residuals, AppendixB, BlockAngles, Mu};
pub use pair::{dual, gauge_fix, solve_pair, Ancilla, EigenPair};
pub use rho::{block_transfer, k_product, rho_block, RhoBlock};
pub use scan::{conjecture_scan, ScanReport, ScanSummary, TrialRecord};
pub use spectrum::{full_spectrum, verify_against_dense, DenseCheck, Spectrum};
