use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::state::{SparseState, Term};
use super::TomographyConfig;
use crate::error::{arg_err, QstError, Result};

/// Multinomial counts drawn as a chain of binomials.
pub fn multinomial(shots: u64, probs: &[f64], rng: &mut impl Rng) -> Result<Vec<u64>> {
    let mut left = shots;
    let mut mass = 1.0f64;
    let mut out = Vec::with_capacity(probs.len());
    for &p in probs {
        if left == 0 || mass <= 0.0 {
            out.push(0);
            continue;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let draw = Binomial::new(left, q).map_err(|e| QstError::Validation(format!("binomial: {e}")))?.sample(rng);
        out.push(draw);
        left -= draw;
        mass -= p;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase2Estimate {
    /// Estimated terms, reference term first with a real coefficient.
    pub terms: Vec<(String, Complex64)>,
    pub reference: String,
    /// Fraction of magnitude shots that landed outside the support.
    pub off_support_rate: f64,
    pub measurement_settings: usize,
    pub shots: u64,
    /// Support bitstrings dropped for having no magnitude counts.
    pub dropped: Vec<String>,
}

/// Probabilities of the two projections and the remainder for
/// `(|s_ref> + w |s_k>)/sqrt 2` and `(|s_ref> - w |s_k>)/sqrt 2`.
fn interferometric_probs(c_ref: Complex64, c_k: Complex64, w: Complex64) -> [f64; 3] {
    let plus = (c_ref + w.conj() * c_k).norm_sqr() / 2.0;
    let minus = (c_ref - w.conj() * c_k).norm_sqr() / 2.0;
    [plus, minus, (1.0 - plus - minus).max(0.0)]
}

/// Magnitudes from computational-basis counts, relative phases from two
/// interferometric settings per non-reference term.
pub fn phase2_coefficients(
    truth: &SparseState,
    support: &BTreeSet<String>,
    tcfg: &TomographyConfig,
    rng: &mut impl Rng,
) -> Result<Phase2Estimate> {
    if support.is_empty() {
        return arg_err("phase 2 needs a nonempty support");
    }
    let n0 = tcfg.shots_mag;
    let n1 = tcfg.shots_phase;
    let order: Vec<&String> = support.iter().collect();
    let mut probs: Vec<f64> = order.iter().map(|b| truth.coeff_of(b).norm_sqr()).collect();
    let inside: f64 = probs.iter().sum();
    probs.push((1.0 - inside).max(0.0));
    let counts = multinomial(n0, &probs, rng)?;
    let off_support_rate = counts[order.len()] as f64 / n0 as f64;

    let mut kept: Vec<(&String, u64)> = Vec::new();
    let mut dropped = Vec::new();
    for (b, &cnt) in order.iter().zip(&counts) {
        if cnt == 0 {
            dropped.push((*b).clone());
        } else {
            kept.push((b, cnt));
        }
    }
    if kept.is_empty() {
        return Err(QstError::Validation("no magnitude counts landed on the support".into()));
    }
    // Highest count first; ties broken by bitstring order.
    kept.sort_by_key(|k| std::cmp::Reverse(k.1));
    let (reference, ref_count) = kept[0];
    let c_ref = truth.coeff_of(reference);
    let mut terms = vec![(reference.clone(), Complex64::new((ref_count as f64 / n0 as f64).sqrt(), 0.0))];
    let mut shots = n0;
    for &(bits, cnt) in &kept[1..] {
        let c_k = truth.coeff_of(bits);
        let re_counts = multinomial(n1, &interferometric_probs(c_ref, c_k, Complex64::new(1.0, 0.0)), rng)?;
        let im_counts = multinomial(n1, &interferometric_probs(c_ref, c_k, Complex64::new(0.0, 1.0)), rng)?;
        shots += 2 * n1;
        let re = (re_counts[0] as f64 - re_counts[1] as f64) / (2.0 * n1 as f64);
        let im = (im_counts[0] as f64 - im_counts[1] as f64) / (2.0 * n1 as f64);
        let theta = im.atan2(re);
        terms.push((bits.clone(), Complex64::from_polar((cnt as f64 / n0 as f64).sqrt(), theta)));
    }
    Ok(Phase2Estimate {
        measurement_settings: 1 + 2 * (terms.len() - 1),
        terms,
        reference: reference.clone(),
        off_support_rate,
        shots,
        dropped,
    })
}

impl Phase2Estimate {
    pub fn to_state(&self, n: usize) -> Result<SparseState> {
        let terms = self.terms.iter().map(|(b, c)| Term { bits: b.clone(), coeff: *c }).collect();
        SparseState::normalized(n, terms)
    }
}
