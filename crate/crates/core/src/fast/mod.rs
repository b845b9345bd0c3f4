//! Closed-form, matrix-free evaluation of U_Phi: single entries in O(n) via
//! 4x4 transfer matrices, and the path-sum amplitudes of the optical set-up.

mod appendix_a;
mod element;
mod m4;

pub use appendix_a::{appendix_a_amplitude, appendix_a_state, path_amplitude, PathAmplitude};
pub use element::{
    canonical_to_section4, section4_to_canonical, uphi_element, uphi_element_counted, uphi_element_reordered,
    uphi_element_reordered_counted, MAX_ELEMENT_N,
};
pub use m4::{m_matrix, m_matrix_final, rotation, Block, OpCount, IDENTITY_BLOCK, M4, ZERO_BLOCK};
pub(crate) use m4::stage_matrix;
