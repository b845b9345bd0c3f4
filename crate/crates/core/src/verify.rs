//! Cross-checks of the three constructions of the photon circuit.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{apply_general_optics_circuit, detector_qubit, uphi_dense, OpticsConfig, PhaseConfig, StateVector, UnitaryMatrix};
use crate::error::{arg_err, Result};
use crate::fast::{appendix_a_state, canonical_to_section4, uphi_element, uphi_element_reordered};
use crate::rng::stream;

/// The `n = 1`, all-zero-phase matrix, rows indexed by output.
pub fn golden_n1() -> UnitaryMatrix {
    let c = |re: f64, im: f64| Complex64::new(re / 2.0, im / 2.0);
    let rows = [
        [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 1.0)],
        [c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)],
        [c(-1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)],
        [c(0.0, 1.0), c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)],
    ];
    UnitaryMatrix::from_row_major(4, rows.iter().flatten().copied().collect()).expect("4x4")
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialDiffs {
    /// Dense matrix vs element formula in both index orders.
    pub element: f64,
    /// `| |U_kl| - 2^{-(n+1)/2} |`.
    pub magnitude: f64,
    pub unitarity: f64,
    /// Dense columns vs the path sum with the circuit's own angles.
    pub path_sum: f64,
    /// General beam-splitter angles: path sum vs the gate circuit.
    pub general_optics: f64,
}

impl TrialDiffs {
    pub fn max(&self) -> f64 {
        [self.element, self.magnitude, self.unitarity, self.path_sum, self.general_optics].into_iter().fold(0.0, f64::max)
    }

    fn merge(self, o: TrialDiffs) -> TrialDiffs {
        TrialDiffs {
            element: self.element.max(o.element),
            magnitude: self.magnitude.max(o.magnitude),
            unitarity: self.unitarity.max(o.unitarity),
            path_sum: self.path_sum.max(o.path_sum),
            general_optics: self.general_optics.max(o.general_optics),
        }
    }
}

/// Path-sum output for canonical input column `col`.
fn path_sum_column(optics: &OpticsConfig, col: usize) -> Result<StateVector> {
    let n = optics.n();
    let wpd: Vec<u8> = (1..=n).map(|k| ((col >> detector_qubit(n, k)) & 1) as u8).collect();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let q = if col & 1 == 0 { (one, zero) } else { (zero, one) };
    appendix_a_state(optics, &wpd, q)
}

pub fn check_phase_config(cfg: &PhaseConfig, rng: &mut impl Rng) -> Result<TrialDiffs> {
    let n = cfg.n();
    let dense = uphi_dense(cfg)?;
    let dim = dense.dim();
    let expected = 2f64.powf(-((n + 1) as f64) / 2.0);
    let optics = OpticsConfig::from_phase_config(cfg);
    let cols: Vec<(f64, f64, f64)> = (0..dim)
        .into_par_iter()
        .map(|col| -> Result<(f64, f64, f64)> {
            let mut element = 0.0f64;
            let mut magnitude = 0.0f64;
            for row in 0..dim {
                let d = dense.get(row, col);
                let a = uphi_element_reordered(row as u64, col as u64, cfg)?;
                let b = uphi_element(canonical_to_section4(row as u64, n), canonical_to_section4(col as u64, n), cfg)?;
                element = element.max((d - a).norm()).max((d - b).norm());
                magnitude = magnitude.max((d.norm() - expected).abs());
            }
            let ps = path_sum_column(&optics, col)?;
            let path = (0..dim).map(|row| (ps.amps()[row] - dense.get(row, col)).norm()).fold(0.0, f64::max);
            Ok((element, magnitude, path))
        })
        .collect::<Result<Vec<_>>>()?;

    let general = OpticsConfig::random(n, rng);
    let wpd: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let q = (Complex64::from_polar(t.cos(), rng.random::<f64>() * 6.0), Complex64::from_polar(t.sin(), 0.0));
    let closed = appendix_a_state(&general, &wpd, q)?;
    let mut input = vec![Complex64::new(0.0, 0.0); dim];
    let base = (1..=n).fold(0usize, |acc, k| acc | ((wpd[k - 1] as usize) << detector_qubit(n, k)));
    input[base] = q.0;
    input[base | 1] = q.1;
    let mut circ = StateVector::from_amplitudes(input)?;
    apply_general_optics_circuit(&mut circ, &general)?;

    Ok(TrialDiffs {
        element: cols.iter().map(|c| c.0).fold(0.0, f64::max),
        magnitude: cols.iter().map(|c| c.1).fold(0.0, f64::max),
        unitarity: dense.unitarity_defect(),
        path_sum: cols.iter().map(|c| c.2).fold(0.0, f64::max),
        general_optics: closed.max_abs_diff(&circ),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub golden_diff: f64,
    pub worst: TrialDiffs,
    pub max_diff: f64,
    /// `max_diff < tol`, strictly.
    pub pass: bool,
}

pub fn verify_unitary(n: usize, trials: usize, seed: u64, tol: f64) -> Result<VerifyReport> {
    if n == 0 {
        return arg_err("n must be at least 1");
    }
    let golden_diff = uphi_dense(&PhaseConfig::zeros(1)?)?.max_abs_diff(&golden_n1());
    let mut worst = TrialDiffs::default();
    for trial in 0..trials {
        let mut rng = stream(seed, trial as u64);
        let cfg = PhaseConfig::random(n, &mut rng);
        worst = worst.merge(check_phase_config(&cfg, &mut rng)?);
    }
    let max_diff = worst.max().max(golden_diff);
    Ok(VerifyReport {
        version: crate::VERSION.to_string(),
        n,
        trials,
        seed,
        tol,
        golden_diff,
        worst,
        max_diff,
        pass: max_diff < tol,
    })
}
