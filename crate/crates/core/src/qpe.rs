//! Textbook phase estimation, simulated on the full register plus data
//! state. Register qubit `j` controls `U^{2^j}` and is bit `j` of the outcome
//! word.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;

use crate::circuit::{uphi_dense, PhaseConfig, StateVector, UnitaryMatrix};
use crate::error::{arg_err, QstError, Result};

pub const DEFAULT_QUBIT_CAP: usize = 22;

/// Smallest `b` with `2^b >= x`, for `x >= 1`.
fn ceil_log2(x: f64) -> usize {
    let mut b = 0;
    while ((1u64 << b) as f64) < x {
        b += 1;
    }
    b
}

/// `t + ceil(log2(2 + 1/(2 epsilon)))`.
pub fn register_size(t: usize, epsilon: f64) -> Result<usize> {
    if t == 0 {
        return arg_err("t must be at least 1");
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return arg_err(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    Ok(t + ceil_log2(2.0 + 1.0 / (2.0 * epsilon)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct QpeConfig {
    pub t: usize,
    pub epsilon: f64,
    pub t_tilde: usize,
    pub qubit_cap: usize,
}

impl QpeConfig {
    pub fn new(t: usize, epsilon: f64) -> Result<Self> {
        Ok(Self { t, epsilon, t_tilde: register_size(t, epsilon)?, qubit_cap: DEFAULT_QUBIT_CAP })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.qubit_cap = cap;
        self
    }

    fn check_fits(&self, data_qubits: usize) -> Result<()> {
        let total = self.t_tilde + data_qubits;
        if total > self.qubit_cap {
            return Err(QstError::Resource(format!(
                "phase estimation needs {total} qubits ({} register + {data_qubits} data), cap is {}",
                self.t_tilde, self.qubit_cap
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QpeOutcome {
    pub phase_word: u64,
    /// `2 pi word / 2^t_tilde`.
    pub phase_estimate: f64,
    pub collapsed: StateVector,
}

pub fn word_to_phase(word: u64, t_tilde: usize) -> f64 {
    2.0 * PI * word as f64 / (1u64 << t_tilde) as f64
}

/// `|x> -> sum_y e^{2 pi i x y / N} |y> / sqrt N` on `register`, with
/// `register[j]` as bit `j`.
pub fn qft(state: &mut StateVector, register: &[usize]) -> Result<()> {
    state.check_distinct(register)?;
    let m = register.len();
    for i in 0..m / 2 {
        state.apply_swap(register[i], register[m - 1 - i])?;
    }
    for j in 0..m {
        for k in 0..j {
            state.apply_controlled_phase(register[k], register[j], PI / (1u64 << (j - k)) as f64)?;
        }
        state.apply_hadamard_layer(&[register[j]])?;
    }
    Ok(())
}

/// Adjoint of [`qft`]: the same gates in reverse order with negated phases.
pub fn inverse_qft(state: &mut StateVector, register: &[usize]) -> Result<()> {
    state.check_distinct(register)?;
    let m = register.len();
    for j in (0..m).rev() {
        state.apply_hadamard_layer(&[register[j]])?;
        for k in (0..j).rev() {
            state.apply_controlled_phase(register[k], register[j], -PI / (1u64 << (j - k)) as f64)?;
        }
    }
    for i in 0..m / 2 {
        state.apply_swap(register[i], register[m - 1 - i])?;
    }
    Ok(())
}

/// Draws an index with probability proportional to `weights`.
pub fn sample_index(weights: &[f64], rng: &mut impl Rng) -> Result<usize> {
    let dist = WeightedIndex::new(weights).map_err(|e| QstError::Validation(format!("cannot sample: {e}")))?;
    Ok(dist.sample(rng))
}

/// Born-rule measurement of `qubits`; returns the bits in list order and
/// the renormalized post-measurement state.
pub fn measure_qubits(state: &StateVector, qubits: &[usize], rng: &mut impl Rng) -> Result<(Vec<u8>, StateVector)> {
    state.check_distinct(qubits)?;
    let pattern = |i: usize| qubits.iter().enumerate().fold(0usize, |acc, (p, &q)| acc | (((i >> q) & 1) << p));
    let mut weights = vec![0.0; 1 << qubits.len()];
    for (i, a) in state.amps().iter().enumerate() {
        weights[pattern(i)] += a.norm_sqr();
    }
    let outcome = sample_index(&weights, rng)?;
    let norm = weights[outcome].sqrt();
    let amps = state
        .amps()
        .iter()
        .enumerate()
        .map(|(i, a)| if pattern(i) == outcome { a / norm } else { Complex64::new(0.0, 0.0) })
        .collect();
    let bits = (0..qubits.len()).map(|p| ((outcome >> p) & 1) as u8).collect();
    Ok((bits, StateVector::from_amplitudes(amps)?))
}

/// Register plus data state just before the register is measured. The data
/// occupies the low qubits; the full index is `word << data_qubits | data`.
#[derive(Clone, Debug)]
pub struct QpeState {
    pub t_tilde: usize,
    pub data_qubits: usize,
    pub state: StateVector,
}

impl QpeState {
    pub fn register_qubits(&self) -> Vec<usize> {
        (self.data_qubits..self.data_qubits + self.t_tilde).collect()
    }

    /// Probability of each outcome word.
    pub fn word_distribution(&self) -> Vec<f64> {
        let block = 1usize << self.data_qubits;
        self.state.amps().chunks(block).map(|c| c.iter().map(|a| a.norm_sqr()).sum()).collect()
    }

    /// Renormalized data state given the outcome `word`.
    pub fn collapse(&self, word: u64) -> Result<StateVector> {
        let block = 1usize << self.data_qubits;
        let start = word as usize * block;
        if start >= self.state.dim() {
            return arg_err(format!("word {word} out of range for {} register qubits", self.t_tilde));
        }
        let mut out = StateVector::from_amplitudes(self.state.amps()[start..start + block].to_vec())?;
        out.normalize()?;
        Ok(out)
    }

    pub fn measure(&self, rng: &mut impl Rng) -> Result<QpeOutcome> {
        let word = sample_index(&self.word_distribution(), rng)? as u64;
        Ok(QpeOutcome { phase_word: word, phase_estimate: word_to_phase(word, self.t_tilde), collapsed: self.collapse(word)? })
    }
}

/// Hadamards on the register, controlled powers of `u`, inverse QFT.
pub fn qpe_state(data: &StateVector, u: &UnitaryMatrix, qcfg: &QpeConfig) -> Result<QpeState> {
    let dq = data.num_qubits();
    if u.dim() != data.dim() {
        return arg_err(format!("unitary of dimension {} does not act on {dq} qubits", u.dim()));
    }
    if (data.norm_sqr() - 1.0).abs() > 1e-10 {
        return arg_err("data state is not normalized");
    }
    qcfg.check_fits(dq)?;
    let t = qcfg.t_tilde;
    let block = data.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); block << t];
    amps[..block].copy_from_slice(data.amps());
    let mut full = StateVector::from_amplitudes(amps)?;
    let register: Vec<usize> = (dq..dq + t).collect();
    full.apply_hadamard_layer(&register)?;

    let mut amps = full.into_amps();
    let mut power = u.clone();
    for j in 0..t {
        if j > 0 {
            power = power.matmul(&power);
        }
        let bit = 1usize << j;
        let p = &power;
        amps.par_chunks_mut(block).enumerate().filter(|(r, _)| r & bit != 0).for_each(|(_, chunk)| {
            let input = chunk.to_vec();
            p.apply_into(&input, chunk);
        });
    }
    let mut full = StateVector::from_amplitudes(amps)?;
    inverse_qft(&mut full, &register)?;
    Ok(QpeState { t_tilde: t, data_qubits: dq, state: full })
}

/// One phase-estimation shot on the photon circuit.
pub fn qpe_run(data: &StateVector, cfg: &PhaseConfig, qcfg: &QpeConfig, rng: &mut impl Rng) -> Result<QpeOutcome> {
    if data.num_qubits() != cfg.num_qubits() {
        return arg_err(format!("data has {} qubits, circuit acts on {}", data.num_qubits(), cfg.num_qubits()));
    }
    qcfg.check_fits(data.num_qubits())?;
    qpe_run_unitary(data, &uphi_dense(cfg)?, qcfg, rng)
}

pub fn qpe_run_unitary(data: &StateVector, u: &UnitaryMatrix, qcfg: &QpeConfig, rng: &mut impl Rng) -> Result<QpeOutcome> {
    qpe_state(data, u, qcfg)?.measure(rng)
}
