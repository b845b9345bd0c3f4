//! Two-phase reconstruction of a K-sparse pure state: phase estimation finds
//! the support, then basis and interferometric counts give the coefficients.

pub mod encode;
pub mod phase1;
pub mod phase2;
pub mod state;

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

pub use encode::{ancilla_weights, decompose_ancilla, prepare_encoded, repetition_budget, Budget};
pub use phase1::{phase1_from_table, phase1_support, OutcomeTable, SupportEstimate};
pub use phase2::{multinomial, phase2_coefficients, Phase2Estimate};
pub use state::{format_bits, gen_state, parse_bits, SparseState, Term};

use crate::circuit::{uphi_dense, PhaseConfig};
use crate::error::{arg_err, Result};
use crate::qpe::{QpeConfig, DEFAULT_QUBIT_CAP};
use crate::rng::substream;

pub const DEFAULT_PATIENCE: usize = 25;
pub const DEFAULT_SAFETY: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyConfig {
    pub t: usize,
    pub epsilon: f64,
    /// Lower bound on `min_k |c_k|^2`; fixes the repetition count when set.
    pub min_prob_hint: Option<f64>,
    /// Repetitions without a new bitstring before phase 1 stops (no hint).
    pub patience: usize,
    pub safety: f64,
    pub shots_mag: u64,
    pub shots_phase: u64,
    pub seed: u64,
    /// Extra register bits to try when phase 1 flags a collision.
    pub collision_retries: usize,
    pub qubit_cap: usize,
}

impl TomographyConfig {
    pub fn default_for(t: usize, epsilon: f64) -> Self {
        Self {
            t,
            epsilon,
            min_prob_hint: None,
            patience: DEFAULT_PATIENCE,
            safety: DEFAULT_SAFETY,
            shots_mag: 100_000,
            shots_phase: 100_000,
            seed: 0,
            collision_retries: 1,
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.patience == 0 || self.shots_mag == 0 || self.shots_phase == 0 {
            return arg_err("patience and shot counts must be at least 1");
        }
        if let Some(h) = self.min_prob_hint {
            if !(h > 0.0 && h <= 1.0) {
                return arg_err(format!("min_prob_hint must lie in (0, 1], got {h}"));
            }
        }
        if !(self.safety >= 1.0) {
            return arg_err("safety multiplier must be at least 1");
        }
        QpeConfig::new(self.t, self.epsilon).map(|_| ())
    }

    /// `ceil(2 / hint) * safety` repetitions, when a hint is set.
    pub fn hint_budget(&self) -> Option<u64> {
        self.min_prob_hint.map(|h| ((2.0 / h).ceil() * self.safety).ceil() as u64)
    }

    pub fn qpe_config(&self) -> Result<QpeConfig> {
        Ok(QpeConfig::new(self.t, self.epsilon)?.with_cap(self.qubit_cap))
    }
}

/// Smallest `t` whose bin width `2 pi 2^{-t}` is below half of `min_gap`.
pub fn suggest_t(min_gap: f64) -> usize {
    let mut t = 1;
    while TAU / (1u64 << t) as f64 >= min_gap / 2.0 && t < 40 {
        t += 1;
    }
    t
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: TomographyConfig,
    pub phis: Vec<f64>,
    pub t_used: usize,
    pub t_tilde: usize,
    pub truth_k: usize,
    pub support_found: BTreeSet<String>,
    pub support_exact: bool,
    pub support: SupportEstimate,
    pub estimate: SparseState,
    pub fidelity: f64,
    pub repetitions_used: u64,
    pub measurement_settings: usize,
    pub shots: u64,
    pub off_support_rate: f64,
    pub warnings: Vec<String>,
}

/// Runs both phases against the simulated source `truth`.
pub fn reconstruct(truth: &SparseState, cfg: &PhaseConfig, tcfg: &TomographyConfig) -> Result<Report> {
    tcfg.validate()?;
    if cfg.n() != truth.n() {
        return arg_err(format!("circuit has n = {}, state has n = {}", cfg.n(), truth.n()));
    }
    let u = uphi_dense(cfg)?;
    let mut warnings = Vec::new();
    let mut run_cfg = tcfg.clone();
    let mut support = None;
    for attempt in 0..=tcfg.collision_retries {
        let mut rng = substream(tcfg.seed, attempt as u64, 1);
        let est = phase1_support(truth, &u, &run_cfg, &mut rng)?;
        let flagged = est.flagged();
        support = Some(est);
        if !flagged {
            break;
        }
        warnings.push(format!("phase words collided at t = {}", run_cfg.t));
        if attempt < tcfg.collision_retries && run_cfg.qpe_config().map(|q| q.t_tilde + 1 + cfg.num_qubits() <= q.qubit_cap).unwrap_or(false) {
            run_cfg.t += 1;
        } else {
            break;
        }
    }
    let support = support.expect("at least one phase-1 attempt");
    let mut rng = substream(tcfg.seed, 0, 2);
    let p2 = phase2_coefficients(truth, &support.found, tcfg, &mut rng)?;
    for b in &p2.dropped {
        warnings.push(format!("support bitstring {b} had no magnitude counts and was dropped"));
    }
    let estimate = p2.to_state(truth.n())?;
    Ok(Report {
        version: crate::VERSION.to_string(),
        config: tcfg.clone(),
        phis: cfg.phis().to_vec(),
        t_used: run_cfg.t,
        t_tilde: support.t_tilde,
        truth_k: truth.k(),
        support_exact: support.found == truth.support(),
        support_found: support.found.clone(),
        fidelity: truth.fidelity(&estimate),
        repetitions_used: support.repetitions_used,
        measurement_settings: p2.measurement_settings,
        shots: p2.shots,
        off_support_rate: p2.off_support_rate,
        support,
        estimate,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use num_complex::Complex64;

    #[test]
    fn basis_state_is_recovered_exactly() {
        let cfg = PhaseConfig::random(3, &mut seeded(81));
        let truth = SparseState::new(3, vec![Term { bits: "011".into(), coeff: Complex64::new(-1.0, 0.0) }]).unwrap();
        let report = reconstruct(&truth, &cfg, &TomographyConfig::default_for(4, 0.1)).unwrap();
        assert!((report.fidelity - 1.0).abs() < 1e-12);
        assert!(report.support_exact);
        assert_eq!(report.measurement_settings, 1);
    }

    #[test]
    fn config_checks() {
        let mut c = TomographyConfig::default_for(4, 0.1);
        assert!(c.validate().is_ok());
        c.min_prob_hint = Some(0.2);
        assert_eq!(c.hint_budget(), Some(30));
        c.shots_mag = 0;
        assert!(c.validate().is_err());
        assert!(TomographyConfig::default_for(4, 1.5).validate().is_err());
    }

    #[test]
    fn suggested_t_resolves_the_gap() {
        for gap in [1.0, 0.1, 0.01, 1e-4] {
            let t = suggest_t(gap);
            assert!(TAU / ((1u64 << t) as f64) < gap / 2.0);
            assert!(TAU / (1u64 << (t - 1)) as f64 >= gap / 2.0);
        }
    }

    #[test]
    fn same_seed_same_report() {
        let cfg = PhaseConfig::random(3, &mut seeded(82));
        let truth = gen_state(3, 2, 0.2, &mut seeded(83)).unwrap();
        let mut tcfg = TomographyConfig::default_for(4, 0.1);
        tcfg.seed = 11;
        tcfg.shots_mag = 2000;
        tcfg.shots_phase = 2000;
        let a = serde_json::to_string(&reconstruct(&truth, &cfg, &tcfg).unwrap()).unwrap();
        let b = serde_json::to_string(&reconstruct(&truth, &cfg, &tcfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
