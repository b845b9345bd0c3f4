use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ansatz::{ansatz_state, AnsatzIndex};
use super::pair::{solve_pair, EigenPair};
use super::rho::rho_block;
use crate::circuit::{PhaseConfig, UnitaryMatrix, DEFAULT_DENSE_LIMIT};
use crate::error::{QstError, Result};

/// Default circular distance below which two eigenphases count as equal.
pub const DEFAULT_DISTINCT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub n: usize,
    pub pairs: Vec<EigenPair>,
    /// Indices whose block could not be diagonalized.
    pub degenerate: Vec<AnsatzIndex>,
    /// Smallest circular distance between any two eigenphases.
    pub min_gap: f64,
    pub tolerance: f64,
    pub distinct: bool,
    /// Every block matched the single-angle pattern and was diagonalized.
    pub conforming: bool,
    pub max_duality_residual: f64,
    pub max_constraint_residual: f64,
}

impl Spectrum {
    /// All `2^{n+1}` eigenphases, sorted.
    pub fn eigenphases(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.pairs.iter().flat_map(|p| [p.lambda1, p.lambda2]).collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Pair for the data string `bits`.
    pub fn pair_for(&self, bits: u64) -> Option<&EigenPair> {
        self.pairs.iter().find(|p| p.index.data_bits() == bits)
    }
}

/// Smallest circular gap of a sorted list of phases in `[0, 2 pi)`.
pub fn min_circular_gap(sorted: &[f64]) -> f64 {
    if sorted.len() < 2 {
        return 2.0 * PI;
    }
    let inner = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    inner.min(2.0 * PI - sorted[sorted.len() - 1] + sorted[0])
}

pub fn full_spectrum(cfg: &PhaseConfig, tolerance: f64) -> Result<Spectrum> {
    let n = cfg.n();
    if n > DEFAULT_DENSE_LIMIT {
        return Err(QstError::Resource(format!("full spectrum limited to n <= {DEFAULT_DENSE_LIMIT}, got n = {n}")));
    }
    let mut pairs = Vec::with_capacity(1 << n);
    let mut degenerate = Vec::new();
    let mut all_structured = true;
    for idx in AnsatzIndex::enumerate(n) {
        let block = rho_block(&idx, cfg)?;
        all_structured &= block.conforming;
        match solve_pair(&block) {
            Ok(p) => pairs.push(p),
            Err(QstError::DegenerateBlock { .. }) => degenerate.push(idx),
            Err(e) => return Err(e),
        }
    }
    let mut spectrum = Spectrum {
        n,
        min_gap: 0.0,
        tolerance,
        distinct: false,
        conforming: all_structured && degenerate.is_empty(),
        max_duality_residual: pairs.iter().map(|p| p.duality_residual).fold(0.0, f64::max),
        max_constraint_residual: pairs.iter().map(|p| p.constraint_residual).fold(0.0, f64::max),
        pairs,
        degenerate,
    };
    spectrum.min_gap = min_circular_gap(&spectrum.eigenphases());
    spectrum.distinct = spectrum.conforming && spectrum.min_gap >= tolerance;
    Ok(spectrum)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseCheck {
    /// `max ||U v - e^{i lambda} v||_inf` over every ansatz eigenvector.
    pub max_eigen_residual: f64,
    /// `max |G - I|` for the Gram matrix of all ansatz eigenvectors.
    pub gram_deviation: f64,
}

pub fn verify_against_dense(spectrum: &Spectrum, u: &UnitaryMatrix) -> Result<DenseCheck> {
    let n = spectrum.n;
    let mut vectors = Vec::with_capacity(2 * spectrum.pairs.len());
    let mut phases = Vec::with_capacity(2 * spectrum.pairs.len());
    for p in &spectrum.pairs {
        vectors.push(ansatz_state(&p.index, p.alpha, n)?.into_amps());
        vectors.push(ansatz_state(&p.index, p.beta, n)?.into_amps());
        phases.push(p.lambda1);
        phases.push(p.lambda2);
    }
    let max_eigen_residual = vectors
        .par_iter()
        .zip(phases.par_iter())
        .map(|(v, &lambda)| {
            let phase = Complex64::from_polar(1.0, lambda);
            u.apply(v).iter().zip(v).map(|(a, b)| (a - b * phase).norm()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let gram_deviation = (0..vectors.len())
        .into_par_iter()
        .map(|a| {
            let mut worst = 0.0f64;
            for b in 0..vectors.len() {
                let g: Complex64 = vectors[a].iter().zip(&vectors[b]).map(|(x, y)| x.conj() * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    let missing = (1usize << (n + 1)) - vectors.len();
    Ok(DenseCheck { max_eigen_residual, gram_deviation: if missing > 0 { f64::INFINITY } else { gram_deviation } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::uphi_dense;
    use crate::rng::seeded;
    use nalgebra::DMatrix;

    fn dense_eigenphases(u: &UnitaryMatrix) -> Vec<f64> {
        let d = u.dim();
        let m = DMatrix::from_fn(d, d, |r, c| u.get(r, c));
        let (_, t) = m.schur().unpack();
        let mut out: Vec<f64> = (0..d).map(|i| t[(i, i)].arg().rem_euclid(2.0 * PI)).collect();
        out.sort_by(f64::total_cmp);
        out
    }

    fn circular(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    }

    #[test]
    fn matches_dense_eigendecomposition() {
        let mut rng = seeded(41);
        for n in 1..=5 {
            for _ in 0..3 {
                let cfg = PhaseConfig::random(n, &mut rng);
                let spec = full_spectrum(&cfg, DEFAULT_DISTINCT_TOL).unwrap();
                assert!(spec.conforming);
                let ours = spec.eigenphases();
                let theirs = dense_eigenphases(&uphi_dense(&cfg).unwrap());
                assert_eq!(ours.len(), theirs.len());
                // Greedy matching on the circle; safe since the gaps are far
                // larger than the tolerance.
                let mut used = vec![false; theirs.len()];
                for &a in &ours {
                    let (j, d) = theirs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| !used[*j])
                        .map(|(j, &b)| (j, circular(a, b)))
                        .min_by(|x, y| x.1.total_cmp(&y.1))
                        .unwrap();
                    used[j] = true;
                    assert!(d < 1e-8, "n={n} phase {a} unmatched ({d})");
                }
            }
        }
    }

    #[test]
    fn ansatz_vectors_form_an_eigenbasis() {
        let mut rng = seeded(42);
        for n in 1..=6 {
            let cfg = PhaseConfig::random(n, &mut rng);
            let spec = full_spectrum(&cfg, DEFAULT_DISTINCT_TOL).unwrap();
            let check = verify_against_dense(&spec, &uphi_dense(&cfg).unwrap()).unwrap();
            assert!(check.max_eigen_residual < 1e-9, "n={n} {check:?}");
            assert!(check.gram_deviation < 1e-8, "n={n} {check:?}");
        }
    }

    #[test]
    fn gap_and_limits() {
        assert!((min_circular_gap(&[0.1, 1.0, 6.2]) - (2.0 * PI - 6.1)).abs() < 1e-12);
        assert_eq!(min_circular_gap(&[1.0]), 2.0 * PI);
        let big = PhaseConfig::zeros(DEFAULT_DENSE_LIMIT + 1).unwrap();
        assert!(matches!(full_spectrum(&big, 1e-6), Err(QstError::Resource(_))));
    }

    #[test]
    fn all_zero_phases_break_the_pattern() {
        // Some blocks are +-I, which the single-angle form cannot express.
        let spec = full_spectrum(&PhaseConfig::zeros(3).unwrap(), DEFAULT_DISTINCT_TOL).unwrap();
        assert!(!spec.conforming);
        assert!(!spec.distinct);
        assert!(spec.degenerate.is_empty());
        assert!(spec.min_gap < 1e-6);
        assert!(spec.eigenphases().iter().all(|p| (0.0..2.0 * PI).contains(p)));
    }
}
