//! The U_Phi circuit: `n + 1` beam-splitter stages acting on the photon
//! (qubit 0), each of the first `n` followed by a which-path detector modelled
//! as a CNOT onto its detector qubit.

use std::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Gate2x2, StateVector, UnitaryMatrix};
use crate::error::{arg_err, QstError, Result};

/// Default cap on `n` for dense construction (a 2048 x 2048 matrix).
pub const DEFAULT_DENSE_LIMIT: usize = 10;

/// Phase shifts `phi_1 .. phi_{n+1}` (radians, wrapped into `[0, 2pi)`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    n: usize,
    phis: Vec<f64>,
}

impl PhaseConfig {
    pub fn new(phis: Vec<f64>) -> Result<Self> {
        if phis.len() < 2 {
            return arg_err(format!("need n + 1 >= 2 phases, got {}", phis.len()));
        }
        if phis.iter().any(|p| !p.is_finite()) {
            return arg_err("phases must be finite");
        }
        let phis: Vec<f64> = phis.into_iter().map(|p| p.rem_euclid(TAU)).map(|p| if p >= TAU { 0.0 } else { p }).collect();
        Ok(Self { n: phis.len() - 1, phis })
    }

    /// All-zero phases for `n` detectors.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n + 1])
    }

    /// Phases drawn uniformly from `[0, 2pi)`.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        assert!(n >= 1, "n must be at least 1");
        let phis = (0..=n).map(|_| rng.random::<f64>() * TAU).collect();
        Self { n, phis }
    }

    /// Number of which-path detectors.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_qubits(&self) -> usize {
        self.n + 1
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    /// `phi_k` with the one-based stage index used throughout.
    #[inline]
    pub fn phi(&self, stage: usize) -> f64 {
        self.phis[stage - 1]
    }
}

/// Qubit holding detector `k` (one-based) in the canonical order.
#[inline]
pub fn detector_qubit(n: usize, k: usize) -> usize {
    n + 1 - k
}

fn check_width(state: &StateVector, n: usize) -> Result<()> {
    if state.num_qubits() != n + 1 {
        return arg_err(format!(
            "state has {} qubits but the circuit acts on n + 1 = {}",
            state.num_qubits(),
            n + 1
        ));
    }
    Ok(())
}

/// Applies U_Phi in place: per stage `k <= n`, `R_X(-pi/2)` on the photon,
/// CNOT onto detector `k`, then `diag(1, e^{i phi_k})`; the last stage has no
/// detector.
pub fn apply_uphi_circuit(state: &mut StateVector, cfg: &PhaseConfig) -> Result<()> {
    check_width(state, cfg.n())?;
    let bs = Gate2x2::rx_minus_half_pi();
    let one = Complex64::new(1.0, 0.0);
    for k in 1..=cfg.n() + 1 {
        state.apply_gate1_unchecked(0, &bs);
        if k <= cfg.n() {
            state.apply_cnot(0, detector_qubit(cfg.n(), k))?;
        }
        state.apply_diagonal1(0, one, Complex64::from_polar(1.0, cfg.phi(k)));
    }
    Ok(())
}

/// Same circuit with the phase shifter placed before the CNOT in every stage.
/// Both act diagonally on the photon, so the result must match
/// [`apply_uphi_circuit`].
pub fn apply_uphi_circuit_phase_first(state: &mut StateVector, cfg: &PhaseConfig) -> Result<()> {
    check_width(state, cfg.n())?;
    let bs = Gate2x2::rx_minus_half_pi();
    let one = Complex64::new(1.0, 0.0);
    for k in 1..=cfg.n() + 1 {
        state.apply_gate1_unchecked(0, &bs);
        state.apply_diagonal1(0, one, Complex64::from_polar(1.0, cfg.phi(k)));
        if k <= cfg.n() {
            state.apply_cnot(0, detector_qubit(cfg.n(), k))?;
        }
    }
    Ok(())
}

/// Beam-splitter angles and per-path phases for the unrestricted optical
/// set-up. Index `k - 1` holds stage `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpticsConfig {
    pub thetas: Vec<f64>,
    /// `(phi_{k,0}, phi_{k,1})`: phase on the upper and lower path.
    pub phase_pairs: Vec<(f64, f64)>,
}

impl OpticsConfig {
    pub fn new(thetas: Vec<f64>, phase_pairs: Vec<(f64, f64)>) -> Result<Self> {
        if thetas.len() < 2 || thetas.len() != phase_pairs.len() {
            return arg_err(format!(
                "need matching thetas/phase_pairs of length n + 1 >= 2, got {} and {}",
                thetas.len(),
                phase_pairs.len()
            ));
        }
        Ok(Self { thetas, phase_pairs })
    }

    /// The symmetric special case: `theta_k = pi/4`, upper phases zero.
    pub fn from_phase_config(cfg: &PhaseConfig) -> Self {
        Self {
            thetas: vec![FRAC_PI_4; cfg.n() + 1],
            phase_pairs: cfg.phis().iter().map(|&p| (0.0, p)).collect(),
        }
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let thetas = (0..=n).map(|_| rng.random::<f64>() * TAU).collect();
        let phase_pairs = (0..=n).map(|_| (rng.random::<f64>() * TAU, rng.random::<f64>() * TAU)).collect();
        Self { thetas, phase_pairs }
    }

    pub fn n(&self) -> usize {
        self.thetas.len() - 1
    }
}

/// Applies the general optical set-up: per stage the beam splitter
/// `[[cos t, i sin t], [i sin t, cos t]]`, the detector CNOT (stages `<= n`),
/// then `diag(e^{i phi_{k,0}}, e^{i phi_{k,1}})` on the photon.
pub fn apply_general_optics_circuit(state: &mut StateVector, optics: &OpticsConfig) -> Result<()> {
    let n = optics.n();
    check_width(state, n)?;
    for k in 1..=n + 1 {
        state.apply_gate1_unchecked(0, &Gate2x2::beam_splitter(optics.thetas[k - 1]));
        if k <= n {
            state.apply_cnot(0, detector_qubit(n, k))?;
        }
        let (p0, p1) = optics.phase_pairs[k - 1];
        state.apply_diagonal1(0, Complex64::from_polar(1.0, p0), Complex64::from_polar(1.0, p1));
    }
    Ok(())
}

/// Dense U_Phi, column `j` = circuit applied to `|j>`.
pub fn uphi_dense(cfg: &PhaseConfig) -> Result<UnitaryMatrix> {
    uphi_dense_with_limit(cfg, DEFAULT_DENSE_LIMIT)
}

pub fn uphi_dense_with_limit(cfg: &PhaseConfig, max_n: usize) -> Result<UnitaryMatrix> {
    dense_from_circuit(cfg.n(), max_n, |s| apply_uphi_circuit(s, cfg))
}

pub(crate) fn dense_from_circuit<F>(n: usize, max_n: usize, apply: F) -> Result<UnitaryMatrix>
where
    F: Fn(&mut StateVector) -> Result<()> + Sync,
{
    if n > max_n {
        return Err(QstError::Resource(format!("dense construction limited to n <= {max_n}, got n = {n}")));
    }
    let dim = 1usize << (n + 1);
    let columns = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut s = StateVector::new_basis_state(n + 1, j)?;
            apply(&mut s)?;
            Ok(s.into_amps())
        })
        .collect::<Result<Vec<_>>>()?;
    UnitaryMatrix::from_columns(&columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// n = 1, phi = (0, 0), multiplied out by hand from
    /// `RX_q0 * CNOT(0 -> 1) * RX_q0`; rows are output indices.
    pub(crate) fn golden_n1_zero_phase() -> UnitaryMatrix {
        let h = 0.5;
        let rows = [
            [c(h, 0.0), c(0.0, h), c(-h, 0.0), c(0.0, h)],
            [c(0.0, h), c(-h, 0.0), c(0.0, h), c(h, 0.0)],
            [c(-h, 0.0), c(0.0, h), c(h, 0.0), c(0.0, h)],
            [c(0.0, h), c(h, 0.0), c(0.0, h), c(-h, 0.0)],
        ];
        UnitaryMatrix::from_row_major(4, rows.iter().flatten().copied().collect()).unwrap()
    }

    #[test]
    fn n1_matches_hand_assembly() {
        let u = uphi_dense(&PhaseConfig::zeros(1).unwrap()).unwrap();
        assert!(u.max_abs_diff(&golden_n1_zero_phase()) < 1e-15);

        let mut s = StateVector::new_basis_state(2, 0).unwrap();
        apply_uphi_circuit(&mut s, &PhaseConfig::zeros(1).unwrap()).unwrap();
        let col0: Vec<_> = (0..4).map(|r| u.get(r, 0)).collect();
        assert!(s.amps().iter().zip(&col0).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn dense_matches_circuit_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..50 {
            let n = 1 + trial % 6;
            let cfg = PhaseConfig::random(n, &mut rng);
            let u = uphi_dense(&cfg).unwrap();
            let input = crate::test_util::random_state(n + 1, &mut rng);
            let mut s = input.clone();
            apply_uphi_circuit(&mut s, &cfg).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            let via_dense = u.apply(input.amps());
            let diff = s.amps().iter().zip(&via_dense).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-10, "n={n} diff={diff}");
        }
    }

    #[test]
    fn dense_is_unitary_complex_hadamard() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let cfg = PhaseConfig::random(4, &mut rng);
        let u = uphi_dense(&cfg).unwrap();
        assert!(u.unitarity_defect() < 1e-10);
        let mag = 2f64.powf(-2.5);
        assert!(u.entries().iter().all(|e| (e.norm() - mag).abs() < 1e-10));
    }

    #[test]
    fn phase_and_cnot_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 1..=5 {
            let cfg = PhaseConfig::random(n, &mut rng);
            let a = uphi_dense(&cfg).unwrap();
            let b = dense_from_circuit(n, 10, |s| apply_uphi_circuit_phase_first(s, &cfg)).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn general_optics_specializes_to_uphi() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for n in 1..=6 {
            let cfg = PhaseConfig::random(n, &mut rng);
            let optics = OpticsConfig::from_phase_config(&cfg);
            let input = crate::test_util::random_state(n + 1, &mut rng);
            let (mut a, mut b) = (input.clone(), input);
            apply_uphi_circuit(&mut a, &cfg).unwrap();
            apply_general_optics_circuit(&mut b, &optics).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn zero_angle_keeps_photon_on_upper_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let n = 3;
        let mut optics = OpticsConfig::random(n, &mut rng);
        optics.thetas[0] = 0.0;
        // stop after stage 1 by making the remaining splitters transparent too,
        // then check detector 1 (qubit n) never fired
        for t in optics.thetas.iter_mut().skip(1) {
            *t = 0.0;
        }
        let mut s = StateVector::new_basis_state(n + 1, 0).unwrap();
        apply_general_optics_circuit(&mut s, &optics).unwrap();
        let fired: f64 = s.amps().iter().enumerate().filter(|(i, _)| i >> n & 1 == 1).map(|(_, a)| a.norm_sqr()).sum();
        assert!(fired < 1e-15);
    }

    #[test]
    fn dimension_and_limit_errors() {
        let cfg = PhaseConfig::zeros(2).unwrap();
        let mut s = StateVector::new_basis_state(2, 0).unwrap();
        assert!(matches!(apply_uphi_circuit(&mut s, &cfg), Err(QstError::Argument(_))));
        let big = PhaseConfig::zeros(11).unwrap();
        assert!(matches!(uphi_dense(&big), Err(QstError::Resource(_))));
        assert!(matches!(uphi_dense_with_limit(&cfg, 1), Err(QstError::Resource(_))));
        assert!(PhaseConfig::new(vec![0.0]).is_err());
    }
}
