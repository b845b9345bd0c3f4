use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::SparseState;
use crate::circuit::{StateVector, MAX_STATE_QUBITS};
use crate::eigen::{EigenPair, Spectrum};
use crate::error::{arg_err, QstError, Result};

/// `sum_k c_k H^{(x)n}|s_k> (x) (|0> + |1>)/sqrt 2`, ancilla on qubit 0.
pub fn prepare_encoded(truth: &SparseState) -> Result<StateVector> {
    let n = truth.n();
    if n + 1 > MAX_STATE_QUBITS {
        return Err(QstError::Resource(format!("encoding {n} data qubits exceeds the state cap")));
    }
    let scale = 2f64.powf(-(n as f64) / 2.0) * FRAC_1_SQRT_2;
    let terms = truth.indexed();
    let mut amps = Vec::with_capacity(2 << n);
    for x in 0..1u64 << n {
        let a: Complex64 = terms
            .iter()
            .map(|&(s, c)| if (x & s).count_ones() % 2 == 0 { c } else { -c })
            .sum::<Complex64>()
            * scale;
        amps.push(a);
        amps.push(a);
    }
    StateVector::from_amplitudes(amps)
}

/// Coefficients with `(|0> + |1>)/sqrt 2 = d1 alpha + d2 beta`, read off the
/// second eigenvector: `d1 = (beta0 - beta1)/sqrt 2`,
/// `d2 = (beta0 + conj beta1)/sqrt 2`.
pub fn decompose_ancilla(pair: &EigenPair) -> (Complex64, Complex64) {
    let (b0, b1) = pair.beta;
    ((b0 - b1) * FRAC_1_SQRT_2, (b0 + b1.conj()) * FRAC_1_SQRT_2)
}

/// `(|d1|^2, |d2|^2) = (1/2 + a0 a1, 1/2 - a0 a1)`.
pub fn ancilla_weights(pair: &EigenPair) -> (f64, f64) {
    let prod = pair.alpha.0.re * pair.alpha.1.re;
    (0.5 + prod, 0.5 - prod)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// `min_k max(|c_k d_{k,1}|^2, |c_k d_{k,2}|^2)`.
    pub m: f64,
    pub min_prob: f64,
    /// `ceil(2 / min_k |c_k|^2)`.
    pub budget: u64,
}

pub fn repetition_budget(truth: &SparseState, spectrum: &Spectrum) -> Result<Budget> {
    if !spectrum.conforming {
        return arg_err("repetition budget needs a conforming spectrum");
    }
    if spectrum.n != truth.n() {
        return arg_err(format!("spectrum is for n = {}, state has n = {}", spectrum.n, truth.n()));
    }
    let mut m = f64::INFINITY;
    for (bits, c) in truth.indexed() {
        let pair = spectrum
            .pair_for(bits)
            .ok_or_else(|| QstError::Validation(format!("no eigenpair for bitstring {bits}")))?;
        let (w1, w2) = ancilla_weights(pair);
        m = m.min(c.norm_sqr() * w1.max(w2));
    }
    let min_prob = truth.min_prob();
    if m < min_prob / 2.0 {
        return Err(QstError::Validation(format!("m = {m} is below min_prob / 2 = {}", min_prob / 2.0)));
    }
    Ok(Budget { m, min_prob, budget: (2.0 / min_prob).ceil() as u64 })
}
