use std::collections::{BTreeMap, BTreeSet};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::encode::prepare_encoded;
use super::state::{format_bits, SparseState};
use super::TomographyConfig;
use crate::circuit::UnitaryMatrix;
use crate::error::{QstError, Result};
use crate::qpe::{qpe_state, QpeConfig, QpeState};

/// Joint distribution of (phase word, data bits) for one repetition: phase
/// estimation, register readout, Hadamards on the data qubits, then a
/// readout of the data qubits with the ancilla left unmeasured.
pub struct OutcomeTable {
    pub t_tilde: usize,
    pub n: usize,
    /// Indexed by `word << n | data`.
    pub probs: Vec<f64>,
    dist: WeightedIndex<f64>,
}

impl OutcomeTable {
    pub fn from_qpe(qs: &QpeState) -> Result<Self> {
        let n = qs.data_qubits - 1;
        let mut st = qs.state.clone();
        st.apply_hadamard_layer(&(1..=n).collect::<Vec<_>>())?;
        let mut probs = vec![0.0; 1usize << (qs.t_tilde + n)];
        for (i, a) in st.amps().iter().enumerate() {
            probs[i >> 1] += a.norm_sqr();
        }
        let dist = WeightedIndex::new(&probs).map_err(|e| QstError::Validation(format!("outcome table: {e}")))?;
        Ok(Self { t_tilde: qs.t_tilde, n, probs, dist })
    }

    pub fn build(truth: &SparseState, u: &UnitaryMatrix, qcfg: &QpeConfig) -> Result<Self> {
        Self::from_qpe(&qpe_state(&prepare_encoded(truth)?, u, qcfg)?)
    }

    /// One repetition: `(phase word, data bits)`.
    pub fn sample(&self, rng: &mut impl Rng) -> (u64, u64) {
        let i = self.dist.sample(rng) as u64;
        (i >> self.n, i & ((1u64 << self.n) - 1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportEstimate {
    pub found: BTreeSet<String>,
    /// Distinct phase words per bitstring in order of first detection.
    pub phase_table: BTreeMap<String, Vec<u64>>,
    /// Every `(word, bitstring)` observation in order.
    pub observations: Vec<(u64, String)>,
    pub repetitions_used: u64,
    pub t_tilde: usize,
    /// Pairs of bitstrings whose first-detected words fall within one
    /// `t`-bit bin of each other.
    pub collisions: Vec<(String, String)>,
    /// Bitstrings whose words form more than two `t`-bit clusters.
    pub overfull: Vec<String>,
}

impl SupportEstimate {
    pub fn flagged(&self) -> bool {
        !self.collisions.is_empty() || !self.overfull.is_empty()
    }
}

fn circular_distance(a: u64, b: u64, modulus: u64) -> u64 {
    let d = a.abs_diff(b);
    d.min(modulus - d)
}

/// Greedy clustering of words into groups no wider than `radius`.
fn cluster_count(words: &[u64], radius: u64, modulus: u64) -> usize {
    let mut centers: Vec<u64> = Vec::new();
    for &w in words {
        if !centers.iter().any(|&c| circular_distance(c, w, modulus) <= radius) {
            centers.push(w);
        }
    }
    centers.len()
}

/// Repeats the phase-estimation measurement until the stopping rule fires.
pub fn phase1_from_table(table: &OutcomeTable, tcfg: &TomographyConfig, rng: &mut impl Rng) -> SupportEstimate {
    let n = table.n;
    let mut found = BTreeSet::new();
    let mut phase_table: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    let mut observations = Vec::new();
    let limit = tcfg.hint_budget();
    let mut since_new = 0usize;
    let mut reps = 0u64;
    loop {
        let (word, data) = table.sample(rng);
        reps += 1;
        let bits = format_bits(data, n);
        let words = phase_table.entry(bits.clone()).or_default();
        if !words.contains(&word) {
            words.push(word);
        }
        if found.insert(bits.clone()) {
            since_new = 0;
        } else {
            since_new += 1;
        }
        observations.push((word, bits));
        let done = match limit {
            Some(l) => reps >= l,
            None => since_new >= tcfg.patience,
        };
        if done {
            break;
        }
    }

    let modulus = 1u64 << table.t_tilde;
    let radius = 1u64 << (table.t_tilde - tcfg.t.min(table.t_tilde));
    let firsts: Vec<(&String, u64)> = phase_table.iter().map(|(b, w)| (b, w[0])).collect();
    let mut collisions = Vec::new();
    for (i, (a, wa)) in firsts.iter().enumerate() {
        for (b, wb) in &firsts[i + 1..] {
            if circular_distance(*wa, *wb, modulus) < radius {
                collisions.push(((*a).clone(), (*b).clone()));
            }
        }
    }
    let overfull = phase_table
        .iter()
        .filter(|(_, w)| cluster_count(w, radius, modulus) > 2)
        .map(|(b, _)| b.clone())
        .collect();
    SupportEstimate {
        found,
        phase_table,
        observations,
        repetitions_used: reps,
        t_tilde: table.t_tilde,
        collisions,
        overfull,
    }
}

pub fn phase1_support(truth: &SparseState, u: &UnitaryMatrix, tcfg: &TomographyConfig, rng: &mut impl Rng) -> Result<SupportEstimate> {
    let table = OutcomeTable::build(truth, u, &tcfg.qpe_config()?)?;
    Ok(phase1_from_table(&table, tcfg, rng))
}
