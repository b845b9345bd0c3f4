use std::collections::BTreeSet;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::circuit::{StateVector, MAX_STATE_QUBITS};
use crate::error::{arg_err, QstError, Result};

pub const NORM_TOL: f64 = 1e-10;

/// One basis component. `bits` is written most-significant first, so the last
/// character is the bit on data qubit 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub bits: String,
    pub coeff: Complex64,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    bits: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SparseRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

/// A pure state on `n` qubits with exactly `terms.len()` nonzero amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SparseRepr", into = "SparseRepr")]
pub struct SparseState {
    n: usize,
    terms: Vec<Term>,
}

impl TryFrom<SparseRepr> for SparseState {
    type Error = QstError;

    fn try_from(r: SparseRepr) -> Result<Self> {
        SparseState::new(r.n, r.terms.into_iter().map(|t| Term { bits: t.bits, coeff: Complex64::new(t.re, t.im) }).collect())
    }
}

impl From<SparseState> for SparseRepr {
    fn from(s: SparseState) -> Self {
        SparseRepr {
            n: s.n,
            terms: s.terms.into_iter().map(|t| TermRepr { bits: t.bits, re: t.coeff.re, im: t.coeff.im }).collect(),
        }
    }
}

/// Parses an `n`-character binary string.
pub fn parse_bits(bits: &str, n: usize) -> Result<u64> {
    if bits.len() != n || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return arg_err(format!("bitstring {bits:?} is not {n} binary digits"));
    }
    Ok(u64::from_str_radix(bits, 2).unwrap_or(0))
}

pub fn format_bits(value: u64, n: usize) -> String {
    format!("{value:0n$b}")
}

impl SparseState {
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        if n == 0 || n > 62 {
            return arg_err(format!("n must be in [1, 62], got {n}"));
        }
        if terms.is_empty() {
            return arg_err("a sparse state needs at least one term");
        }
        let mut seen = BTreeSet::new();
        let mut norm = 0.0;
        for t in &terms {
            parse_bits(&t.bits, n)?;
            if !seen.insert(t.bits.as_str()) {
                return arg_err(format!("bitstring {} appears twice", t.bits));
            }
            if t.coeff.norm() == 0.0 || !t.coeff.norm().is_finite() {
                return arg_err(format!("coefficient of {} must be nonzero and finite", t.bits));
            }
            norm += t.coeff.norm_sqr();
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return arg_err(format!("coefficients have squared norm {norm}, expected 1"));
        }
        Ok(Self { n, terms })
    }

    /// Builds a state from unnormalized terms.
    pub fn normalized(n: usize, mut terms: Vec<Term>) -> Result<Self> {
        let norm = terms.iter().map(|t| t.coeff.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return arg_err("cannot normalize an all-zero state");
        }
        for t in &mut terms {
            t.coeff /= norm;
        }
        Self::new(n, terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn support(&self) -> BTreeSet<String> {
        self.terms.iter().map(|t| t.bits.clone()).collect()
    }

    pub fn coeff_of(&self, bits: &str) -> Complex64 {
        self.terms.iter().find(|t| t.bits == bits).map_or(Complex64::new(0.0, 0.0), |t| t.coeff)
    }

    /// `(data value, coefficient)` pairs.
    pub fn indexed(&self) -> Vec<(u64, Complex64)> {
        self.terms.iter().map(|t| (u64::from_str_radix(&t.bits, 2).unwrap_or(0), t.coeff)).collect()
    }

    pub fn min_prob(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm_sqr()).fold(f64::INFINITY, f64::min)
    }

    pub fn inner(&self, other: &SparseState) -> Complex64 {
        self.terms.iter().map(|t| t.coeff.conj() * other.coeff_of(&t.bits)).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &SparseState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn with_global_phase(&self, theta: f64) -> SparseState {
        let ph = Complex64::from_polar(1.0, theta);
        let terms = self.terms.iter().map(|t| Term { bits: t.bits.clone(), coeff: t.coeff * ph }).collect();
        SparseState { n: self.n, terms }
    }

    pub fn to_state_vector(&self) -> Result<StateVector> {
        if self.n > MAX_STATE_QUBITS {
            return Err(QstError::Resource(format!("dense vector limited to {MAX_STATE_QUBITS} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << self.n];
        for (idx, c) in self.indexed() {
            amps[idx as usize] = c;
        }
        StateVector::from_amplitudes(amps)
    }
}

/// `K` distinct random bitstrings with probabilities
/// `min_prob + (1 - K min_prob) * Dirichlet(1, .., 1)` and uniform phases.
pub fn gen_state(n: usize, k: usize, min_prob: f64, rng: &mut impl Rng) -> Result<SparseState> {
    if n == 0 || n > 62 {
        return arg_err(format!("n must be in [1, 62], got {n}"));
    }
    if k == 0 || (n < 63 && (k as u128) > (1u128 << n)) {
        return arg_err(format!("K = {k} must be in [1, 2^n]"));
    }
    if !(min_prob >= 0.0) || k as f64 * min_prob > 1.0 + 1e-12 {
        return arg_err(format!("K * min_prob = {} exceeds 1", k as f64 * min_prob));
    }
    let values: Vec<u64> = if n <= 20 {
        index::sample(rng, 1usize << n, k).into_iter().map(|v| v as u64).collect()
    } else {
        let mut set = BTreeSet::new();
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            let v = rng.random::<u64>() >> (64 - n);
            if set.insert(v) {
                out.push(v);
            }
        }
        out
    };
    let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    let spare = (1.0 - k as f64 * min_prob).max(0.0);
    let terms = values
        .iter()
        .zip(&draws)
        .map(|(&v, &d)| {
            let p = min_prob + spare * d / total;
            let phase = rng.random::<f64>() * TAU;
            Term { bits: format_bits(v, n), coeff: Complex64::from_polar(p.sqrt(), phase) }
        })
        .collect();
    SparseState::normalized(n, terms)
}
