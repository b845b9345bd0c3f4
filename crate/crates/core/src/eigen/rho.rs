use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ansatz::AnsatzIndex;
use super::pair::wrap_phase;
use crate::circuit::PhaseConfig;
use crate::error::{arg_err, Result};
use crate::fast::{stage_matrix, OpCount, M4};

/// Tolerance on the single-angle magnitude/phase pattern of a reduced block.
pub const STRUCTURE_TOL: f64 = 1e-8;
/// Distance from a multiple of `pi/2` below which the angle sums are flagged.
pub const CONDITIONING_TOL: f64 = 1e-6;

/// Sum over all input detector bits of stages `1..=a`, right-to-left. The sum
/// does not depend on the output bits, so they are taken as zero.
pub fn k_product(a: usize, cfg: &PhaseConfig) -> Result<M4> {
    if a > cfg.n() {
        return arg_err(format!("a = {a} exceeds n = {}", cfg.n()));
    }
    let mut count = OpCount::default();
    let mut acc = M4::IDENTITY;
    for stage in 1..=a {
        let summed = stage_matrix(stage, 0, 0, cfg, &mut count) + stage_matrix(stage, 1, 0, cfg, &mut count);
        acc = summed * acc;
    }
    Ok(acc)
}

/// Stage `n - a + 1` matrix with the input bit summed under sign `(-1)^s`.
fn signed_stage(a: usize, s: u8, cfg: &PhaseConfig) -> M4 {
    let stage = cfg.n() - a + 1;
    let mut count = OpCount::default();
    let keep = stage_matrix(stage, 0, 0, cfg, &mut count);
    let flip = stage_matrix(stage, 1, 0, cfg, &mut count);
    if s == 0 {
        keep + flip
    } else {
        keep + flip.scaled(-1.0)
    }
}

/// `(prod_l signed_stage(m - l)) * k_product(n - m + 1)`.
pub fn block_transfer(idx: &AnsatzIndex, cfg: &PhaseConfig) -> Result<M4> {
    AnsatzIndex::new(idx.m, idx.s.clone())?;
    let n = cfg.n();
    if idx.m > n + 1 {
        return arg_err(format!("index with m = {} does not fit n = {n}", idx.m));
    }
    let mut acc = k_product(n + 1 - idx.m, cfg)?;
    // Leftmost factor is a = m - 1, so build up from a = 1 (nearest K).
    for a in (1..idx.m).rev() {
        acc = signed_stage(a, idx.s_bit(a), cfg) * acc;
    }
    Ok(acc)
}

/// Reduced 2x2 block of one ansatz pair with its angle parametrization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoBlock {
    pub index: AnsatzIndex,
    pub n: usize,
    /// `entries[j0][k0]`, photon input `j0` to photon output `k0`.
    pub entries: [[Complex64; 2]; 2],
    pub omega: f64,
    pub gamma00: f64,
    pub gamma01: f64,
    pub gamma10: f64,
    /// Worst deviation from the single-`omega` pattern, in rescaled units.
    pub structure_residual: f64,
    pub conforming: bool,
    pub conditioning_warning: bool,
}

impl RhoBlock {
    /// `(sqrt 2)^n`, the factor that makes the reduced block unitary.
    pub fn scale(&self) -> f64 {
        2f64.powf(self.n as f64 / 2.0)
    }

    /// `R[k0][j0] = (sqrt 2)^n rho[j0][k0]`, acting on the ancilla pair.
    pub fn reduced_matrix(&self) -> [[Complex64; 2]; 2] {
        let f = self.scale();
        let e = &self.entries;
        [[e[0][0] * f, e[1][0] * f], [e[0][1] * f, e[1][1] * f]]
    }

    /// `max |R^dagger R - I|` of the reduced matrix.
    pub fn unitarity_defect(&self) -> f64 {
        let r = self.reduced_matrix();
        let mut worst = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                let g = r[0][a].conj() * r[0][b] + r[1][a].conj() * r[1][b];
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}


/// Distance of `x` from the nearest multiple of `pi/2`.
fn off_quarter_turn(x: f64) -> f64 {
    let r = x.rem_euclid(FRAC_PI_2);
    r.min(FRAC_PI_2 - r)
}

pub fn rho_block(idx: &AnsatzIndex, cfg: &PhaseConfig) -> Result<RhoBlock> {
    let v = block_transfer(idx, cfg)?;
    let n = cfg.n();
    let denom = 2f64.powi(n as i32) * 2f64.sqrt();
    let mut entries = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (j0, row) in entries.iter_mut().enumerate() {
        for (k0, e) in row.iter_mut().enumerate() {
            let r = 2 * k0;
            let c = 2 * j0;
            *e = Complex64::new(v.0[r][c], v.0[r + 1][c]) / denom;
        }
    }
    Ok(from_entries(idx.clone(), n, entries))
}

/// Fills the angle parametrization and conformance flags for given entries.
pub fn from_entries(index: AnsatzIndex, n: usize, entries: [[Complex64; 2]; 2]) -> RhoBlock {
    let f = 2f64.powf(n as f64 / 2.0);
    let s00 = entries[0][0] * f;
    let s10 = entries[1][0] * f;
    let s01 = entries[0][1] * f;
    let s11 = entries[1][1] * f;
    let omega = s10.norm().atan2(s00.norm());
    let gamma00 = wrap_phase(s00.arg());
    let gamma10 = wrap_phase(s10.arg());
    let gamma01 = wrap_phase(s01.arg());
    let predicted11 = Complex64::from_polar(omega.cos(), gamma01 + gamma10 - gamma00 - PI);
    let structure_residual = [
        (s00.norm().hypot(s10.norm()) - 1.0).abs(),
        (s01.norm() - omega.sin()).abs(),
        (s11.norm() - omega.cos()).abs(),
        (s11 - predicted11).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let conditioning_warning = off_quarter_turn(gamma00 + gamma01) < CONDITIONING_TOL
        || off_quarter_turn(gamma00 + gamma10) < CONDITIONING_TOL;
    RhoBlock {
        index,
        n,
        entries,
        omega,
        gamma00,
        gamma01,
        gamma10,
        structure_residual,
        conforming: structure_residual <= STRUCTURE_TOL,
        conditioning_warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::apply_uphi_circuit;
    use crate::eigen::ansatz::ansatz_state;
    use crate::fast::m_matrix_final;
    use crate::rng::seeded;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Generic stage matrix straight from the two path cases.
    fn plain_stage(stage: usize, d: u8, e: u8, cfg: &PhaseConfig) -> M4 {
        if stage == cfg.n() {
            m_matrix_final(d, e, cfg)
        } else {
            crate::fast::m_matrix(stage, d, e, cfg).unwrap()
        }
    }

    #[test]
    fn empty_product_is_identity() {
        let cfg = PhaseConfig::random(3, &mut seeded(1));
        assert_eq!(k_product(0, &cfg).unwrap(), M4::IDENTITY);
        assert!(k_product(4, &cfg).is_err());
    }

    #[test]
    fn single_stage_with_zero_phase() {
        let cfg = PhaseConfig::new(vec![0.0, 0.3, 0.7]).unwrap();
        let got = k_product(1, &cfg).unwrap();
        // [[I, R(pi/2)], [R(pi/2), I]]
        let expect = M4([
            [1.0, 0.0, 0.0, -1.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, -1.0, 1.0, 0.0],
            [1.0, 0.0, 0.0, 1.0],
        ]);
        assert!(got.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn k_product_matches_bit_sum_for_every_output_pattern() {
        let mut rng = seeded(7);
        for n in 1..=5 {
            let cfg = PhaseConfig::random(n, &mut rng);
            for a in 0..=n.min(4) {
                let fast = k_product(a, &cfg).unwrap();
                for t in 0..1u32 << a {
                    let mut sum = M4::ZERO;
                    for b in 0..1u32 << a {
                        let mut acc = M4::IDENTITY;
                        for stage in 1..=a {
                            let d = ((b >> (stage - 1)) & 1) as u8;
                            let e = ((t >> (stage - 1)) & 1) as u8;
                            acc = plain_stage(stage, d, e, &cfg) * acc;
                        }
                        sum = sum + acc;
                    }
                    assert!(fast.max_abs_diff(&sum) < 1e-12, "n={n} a={a} t={t}");
                }
            }
        }
    }

    /// Canonical output index `k + t 2^m` with photon bit `k0` and
    /// `k_l` on qubit `l`.
    fn reconstructed(block: &RhoBlock, alpha: (Complex64, Complex64), out: usize) -> Complex64 {
        let k0 = out & 1;
        let data = (out >> 1) as u64;
        let mask = (1u64 << (block.index.m - 1)) - 1;
        let sign = if (data & mask & block.index.data_bits()).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        (block.entries[0][k0] * alpha.0 + block.entries[1][k0] * alpha.1) * sign
    }

    #[test]
    fn reconstruction_matches_circuit() {
        let mut rng = seeded(11);
        for n in 1..=5 {
            let cfg = PhaseConfig::random(n, &mut rng);
            let alpha = (c(0.6, 0.48), c(0.64, 0.0));
            for idx in AnsatzIndex::enumerate(n) {
                let block = rho_block(&idx, &cfg).unwrap();
                let mut st = ansatz_state(&idx, alpha, n).unwrap();
                apply_uphi_circuit(&mut st, &cfg).unwrap();
                for out in 0..st.dim() {
                    let diff = (reconstructed(&block, alpha, out) - st.amps()[out]).norm();
                    assert!(diff < 1e-10, "n={n} idx={idx:?} out={out} diff={diff}");
                }
            }
        }
    }

    #[test]
    fn rescaled_block_is_unitary_and_conforming() {
        let mut rng = seeded(12);
        for n in 1..=6 {
            for _ in 0..4 {
                let cfg = PhaseConfig::random(n, &mut rng);
                for idx in AnsatzIndex::enumerate(n) {
                    let block = rho_block(&idx, &cfg).unwrap();
                    assert!(block.unitarity_defect() < 1e-9);
                    let r = block.reduced_matrix();
                    for col in 0..2 {
                        let norm = r[0][col].norm_sqr() + r[1][col].norm_sqr();
                        assert!((norm - 1.0).abs() < 1e-9);
                    }
                    assert!(block.conforming, "residual {}", block.structure_residual);
                    assert!((0.0..=FRAC_PI_2).contains(&block.omega));
                }
            }
        }
    }

    #[test]
    fn non_conforming_entries_are_flagged() {
        let bad = from_entries(AnsatzIndex::from_data_bits(0), 0, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]]);
        assert!(!bad.conforming);
        let good = from_entries(AnsatzIndex::from_data_bits(0), 0, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]);
        assert!(good.conforming);
    }
}
