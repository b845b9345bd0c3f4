//! Dense state-vector simulation and the explicit U_Phi circuit. Everything
//! else in the crate is checked against this module.

mod gate;
mod matrix;
mod state;
mod uphi;

pub use gate::Gate2x2;
pub use matrix::{unitary_power, UnitaryMatrix};
pub use state::{plus_state, StateVector, GATE_UNITARITY_TOL, MAX_STATE_QUBITS};
pub use uphi::{
    apply_general_optics_circuit, apply_uphi_circuit, apply_uphi_circuit_phase_first, detector_qubit,
    uphi_dense, uphi_dense_with_limit, OpticsConfig, PhaseConfig, DEFAULT_DENSE_LIMIT,
};
