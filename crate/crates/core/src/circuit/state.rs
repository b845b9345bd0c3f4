//! Dense state vectors over `num_qubits` qubits.
//!
//! Bit `l` of a basis index is qubit `l`. In the U_Phi setting qubit 0 is the
//! photon (or the tomography ancilla) and qubit `l` in `1..=n` holds which-path
//! detector `n + 1 - l`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gate::Gate2x2;
use crate::error::{arg_err, QstError, Result};

/// Tolerance used when a gate is checked for unitarity before application.
pub const GATE_UNITARITY_TOL: f64 = 1e-9;

/// Largest register this simulator will allocate.
pub const MAX_STATE_QUBITS: usize = 28;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state `|basis_index>`.
    pub fn new_basis_state(num_qubits: usize, basis_index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_STATE_QUBITS {
            return arg_err(format!("num_qubits must be in [1, {MAX_STATE_QUBITS}], got {num_qubits}"));
        }
        let dim = 1usize << num_qubits;
        if basis_index >= dim {
            return arg_err(format!("basis index {basis_index} out of range for {num_qubits} qubits"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[basis_index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wraps an amplitude vector whose length is a power of two. The vector is
    /// taken as-is; call [`StateVector::normalize`] if needed.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return arg_err(format!("amplitude vector length {len} is not a power of two >= 2"));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_STATE_QUBITS {
            return Err(QstError::Resource(format!("{num_qubits} qubits exceeds the state cap")));
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QstError::Validation("cannot normalize a zero or non-finite state".into()));
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise distance after removing the best global phase.
    pub fn max_abs_diff_up_to_phase(&self, other: &StateVector) -> f64 {
        let ov = self.inner(other);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }

    /// `|high> (x) |low>`: `low` occupies the least significant qubits.
    pub fn tensor(high: &StateVector, low: &StateVector) -> Result<StateVector> {
        let nq = high.num_qubits + low.num_qubits;
        if nq > MAX_STATE_QUBITS {
            return Err(QstError::Resource(format!("{nq} qubits exceeds the state cap")));
        }
        let mut amps = Vec::with_capacity(high.dim() * low.dim());
        for h in &high.amps {
            amps.extend(low.amps.iter().map(|l| h * l));
        }
        Ok(StateVector { num_qubits: nq, amps })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return arg_err(format!("qubit {qubit} out of range for {} qubits", self.num_qubits));
        }
        Ok(())
    }

    /// Applies a single-qubit gate. The gate must be unitary within
    /// [`GATE_UNITARITY_TOL`].
    pub fn apply_gate1(&mut self, qubit: usize, g: &Gate2x2) -> Result<()> {
        self.check_qubit(qubit)?;
        let defect = g.unitarity_defect();
        if defect > GATE_UNITARITY_TOL {
            return Err(QstError::Validation(format!("gate is not unitary (defect {defect:.3e})")));
        }
        self.apply_gate1_unchecked(qubit, g);
        Ok(())
    }

    pub(crate) fn apply_gate1_unchecked(&mut self, qubit: usize, g: &Gate2x2) {
        let [[g00, g01], [g10, g11]] = *g.entries();
        let stride = 1usize << qubit;
        for chunk in self.amps.chunks_mut(stride << 1) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = g00 * x + g01 * y;
                *b = g10 * x + g11 * y;
            }
        }
    }

    /// Multiplies the amplitudes of the `|0>` and `|1>` branches of `qubit`
    /// by `d0` and `d1`.
    pub(crate) fn apply_diagonal1(&mut self, qubit: usize, d0: Complex64, d1: Complex64) {
        let mask = 1usize << qubit;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & mask == 0 { d0 } else { d1 };
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return arg_err("CNOT control and target must differ");
        }
        let (cm, tm) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            // visit each swapped pair once, from the member with the target bit clear
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
        Ok(())
    }

    pub fn apply_hadamard_layer(&mut self, qubits: &[usize]) -> Result<()> {
        self.check_distinct(qubits)?;
        let h = Gate2x2::hadamard();
        for &q in qubits {
            self.apply_gate1_unchecked(q, &h);
        }
        Ok(())
    }

    /// Phase `e^{i theta}` on basis states where both qubits are 1.
    pub fn apply_controlled_phase(&mut self, control: usize, target: usize, theta: f64) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return arg_err("controlled-phase control and target must differ");
        }
        let mask = (1usize << control) | (1usize << target);
        let ph = Complex64::from_polar(1.0, theta);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= ph;
            }
        }
        Ok(())
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Ok(());
        }
        let (am, bm) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & am != 0 && i & bm == 0 {
                self.amps.swap(i, (i & !am) | bm);
            }
        }
        Ok(())
    }

    pub(crate) fn check_distinct(&self, qubits: &[usize]) -> Result<()> {
        let mut seen = 0u64;
        for &q in qubits {
            self.check_qubit(q)?;
            if seen & (1 << q) != 0 {
                return arg_err(format!("qubit {q} listed twice"));
            }
            seen |= 1 << q;
        }
        Ok(())
    }
}

/// `(|0> + |1>)/sqrt(2)` as a one-qubit state.
pub fn plus_state() -> StateVector {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    StateVector { num_qubits: 1, amps: vec![h, h] }
}

impl From<StateVector> for Vec<[f64; 2]> {
    fn from(s: StateVector) -> Self {
        s.amps.into_iter().map(|a| [a.re, a.im]).collect()
    }
}

impl TryFrom<Vec<[f64; 2]>> for StateVector {
    type Error = QstError;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        StateVector::from_amplitudes(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}
