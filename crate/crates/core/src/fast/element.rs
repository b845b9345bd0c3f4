//! Single entries of U_Phi from an O(n) product of 4x4 transfer matrices.

use num_complex::Complex64;

use super::m4::{stage_matrix, OpCount, M4};
use crate::circuit::PhaseConfig;
use crate::error::{arg_err, Result};

/// Largest `n` for which element indices fit comfortably in a `u64`.
pub const MAX_ELEMENT_N: usize = 62;

/// Maps an index written with detector `j` on bit `j - 1` and the photon on
/// bit `n` to the canonical order (photon on bit 0, detector `j` on bit
/// `n + 1 - j`). This is a reversal of the `n + 1` bits, hence an involution.
pub fn section4_to_canonical(index: u64, n: usize) -> u64 {
    index.reverse_bits() >> (63 - n)
}

/// Inverse of [`section4_to_canonical`].
pub fn canonical_to_section4(index: u64, n: usize) -> u64 {
    section4_to_canonical(index, n)
}

fn check_indices(a: u64, b: u64, n: usize) -> Result<()> {
    if n > MAX_ELEMENT_N {
        return arg_err(format!("n = {n} exceeds {MAX_ELEMENT_N}"));
    }
    let dim = 1u64 << (n + 1);
    if a >= dim || b >= dim {
        return arg_err(format!("indices ({a}, {b}) out of range for dimension {dim}"));
    }
    Ok(())
}

/// `u_e^T P v_q` for the transfer product `P`: `v_q` picks column `2q`, and
/// `u_e = [1, i, 0, 0]` or `[0, 0, 1, i]` reads the complex amplitude of
/// photon output `e`.
fn contract(p: &M4, photon_out: u8, photon_in: u8, count: &mut OpCount) -> Complex64 {
    count.contractions += 1;
    let col = 2 * photon_in as usize;
    let row = 2 * photon_out as usize;
    Complex64::new(p.0[row][col], p.0[row + 1][col])
}

/// Transfer product over stages `1..=n`, multiplied right-to-left.
/// `bits(stage)` returns `(input detector bit, output detector bit)`.
fn transfer_product(cfg: &PhaseConfig, count: &mut OpCount, bits: impl Fn(usize) -> (u8, u8)) -> M4 {
    let (d, e) = bits(1);
    let mut acc = stage_matrix(1, d, e, cfg, count);
    for stage in 2..=cfg.n() {
        let (d, e) = bits(stage);
        acc = stage_matrix(stage, d, e, cfg, count).mul_counted(&acc, count);
    }
    acc
}

fn normalization(n: usize) -> f64 {
    2f64.powf(-((n + 1) as f64) / 2.0)
}

/// `U_Phi(k, l)` with `k = sum_j e_j 2^{j-1}` (photon output `e_{n+1}` on bit
/// `n`) and `l = Q 2^n + sum_j D_j 2^{j-1}`.
pub fn uphi_element(k: u64, l: u64, cfg: &PhaseConfig) -> Result<Complex64> {
    uphi_element_counted(k, l, cfg, &mut OpCount::default())
}

pub fn uphi_element_counted(k: u64, l: u64, cfg: &PhaseConfig, count: &mut OpCount) -> Result<Complex64> {
    let n = cfg.n();
    check_indices(k, l, n)?;
    let bit = |x: u64, pos: usize| ((x >> pos) & 1) as u8;
    let p = transfer_product(cfg, count, |j| (bit(l, j - 1), bit(k, j - 1)));
    Ok(contract(&p, bit(k, n), bit(l, n), count) * normalization(n))
}

/// `<k|U_Phi|j>` in the canonical order: bit 0 is the photon, bit `l` holds
/// detector `n + 1 - l`.
pub fn uphi_element_reordered(k: u64, j: u64, cfg: &PhaseConfig) -> Result<Complex64> {
    uphi_element_reordered_counted(k, j, cfg, &mut OpCount::default())
}

pub fn uphi_element_reordered_counted(k: u64, j: u64, cfg: &PhaseConfig, count: &mut OpCount) -> Result<Complex64> {
    let n = cfg.n();
    check_indices(k, j, n)?;
    let bit = |x: u64, pos: usize| ((x >> pos) & 1) as u8;
    let p = transfer_product(cfg, count, |l| (bit(j, n + 1 - l), bit(k, n + 1 - l)));
    Ok(contract(&p, bit(k, 0), bit(j, 0), count) * normalization(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::uphi_dense;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn remap_is_exhaustively_a_bit_reversal() {
        for n in 1..=4 {
            let dim = 1u64 << (n + 1);
            let mut seen = vec![false; dim as usize];
            for idx in 0..dim {
                let c = section4_to_canonical(idx, n);
                // photon: bit n -> bit 0; detector j: bit j-1 -> bit n+1-j
                assert_eq!((c & 1), (idx >> n) & 1);
                for j in 1..=n {
                    assert_eq!((c >> (n + 1 - j)) & 1, (idx >> (j - 1)) & 1);
                }
                assert_eq!(canonical_to_section4(c, n), idx);
                seen[c as usize] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn hand_evaluated_corner() {
        // u_0^T M v_0 with M = [[I, 0], [R(pi/2), 0]] [[I, R(pi/2)], [0, 0]]:
        // the top-left block is I, so the contraction is 1, times 1/2.
        let cfg = PhaseConfig::zeros(1).unwrap();
        let v = uphi_element(0, 0, &cfg).unwrap();
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn magnitude_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cfg = PhaseConfig::random(3, &mut rng);
        let mag = 2f64.powf(-2.0);
        for k in 0..16 {
            for l in 0..16 {
                assert!((uphi_element(k, l, &cfg).unwrap().norm() - mag).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn both_conventions_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for n in 1..=6 {
            let cfg = PhaseConfig::random(n, &mut rng);
            let u = uphi_dense(&cfg).unwrap();
            let dim = 1u64 << (n + 1);
            let mut worst: f64 = 0.0;
            for k in 0..dim {
                let mut row_norm = 0.0;
                for j in 0..dim {
                    let r = uphi_element_reordered(k, j, &cfg).unwrap();
                    row_norm += r.norm_sqr();
                    worst = worst.max((r - u.get(k as usize, j as usize)).norm());
                    if n <= 4 {
                        let s4 = uphi_element(canonical_to_section4(k, n), canonical_to_section4(j, n), &cfg).unwrap();
                        worst = worst.max((s4 - r).norm());
                    }
                }
                assert!((row_norm - 1.0).abs() < 1e-10);
            }
            assert!(worst < 1e-10, "n={n} worst={worst}");
        }
    }

    #[test]
    fn operation_count_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for n in [1usize, 2, 5, 12, 24] {
            let cfg = PhaseConfig::random(n, &mut rng);
            let mut count = OpCount::default();
            uphi_element_counted(3, 1, &cfg, &mut count).unwrap();
            assert_eq!(count, OpCount { mat_mults: n, contractions: 1 });
            let mut count = OpCount::default();
            uphi_element_reordered_counted(1, 2, &cfg, &mut count).unwrap();
            assert_eq!(count, OpCount { mat_mults: n, contractions: 1 });
        }
    }

    #[test]
    fn out_of_range() {
        let cfg = PhaseConfig::zeros(2).unwrap();
        assert!(uphi_element(8, 0, &cfg).is_err());
        assert!(uphi_element_reordered(0, 8, &cfg).is_err());
    }
}
