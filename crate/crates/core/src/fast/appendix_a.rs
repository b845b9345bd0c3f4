//! Path-sum form of the optical set-up: every photon path `j_1 .. j_{n+1}`
//! contributes one product amplitude, and each detector ends up flipped iff
//! the photon took the lower path at its stage.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{detector_qubit, OpticsConfig, StateVector};
use crate::error::{arg_err, Result};

/// Amplitude of one photon path, `path_bits[k - 1] = j_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathAmplitude {
    pub value: Complex64,
    pub path_bits: Vec<u8>,
}

/// `c~_{k,j} = cos(theta_k) e^{i phi_{k,j}}`.
fn c_tilde(optics: &OpticsConfig, k: usize, j: u8) -> Complex64 {
    let phase = path_phase(optics, k, j);
    Complex64::from_polar(optics.thetas[k - 1].cos(), phase)
}

/// `s~_{k,j} = i sin(theta_k) e^{i phi_{k,j}}`.
fn s_tilde(optics: &OpticsConfig, k: usize, j: u8) -> Complex64 {
    let phase = path_phase(optics, k, j);
    Complex64::i() * Complex64::from_polar(optics.thetas[k - 1].sin(), phase)
}

fn path_phase(optics: &OpticsConfig, k: usize, j: u8) -> f64 {
    let (p0, p1) = optics.phase_pairs[k - 1];
    if j == 0 {
        p0
    } else {
        p1
    }
}

/// Factor for stage `k` taking the photon from path `from` to path `to`:
/// `c~_{k,to}` when the path is kept, `s~_{k,to}` when it switches.
fn chi(optics: &OpticsConfig, k: usize, from: u8, to: u8) -> Complex64 {
    if from == to {
        c_tilde(optics, k, to)
    } else {
        s_tilde(optics, k, to)
    }
}

/// Amplitude of `path` for photon input `|photon_in>`.
pub fn path_amplitude(photon_in: u8, path: &[u8], optics: &OpticsConfig) -> Result<Complex64> {
    if path.len() != optics.n() + 1 {
        return arg_err(format!("path has {} bits, expected n + 1 = {}", path.len(), optics.n() + 1));
    }
    if path.iter().any(|&b| b > 1) || photon_in > 1 {
        return arg_err("path bits must be 0 or 1");
    }
    let mut value = chi(optics, 1, photon_in, path[0]);
    for k in 1..path.len() {
        value *= chi(optics, k + 1, path[k - 1], path[k]);
    }
    Ok(value)
}

/// `A(j) = K_{j_1} prod_k chi_{k+1, j_k, j_{k+1}}` for a photon entering in
/// `|0>`.
pub fn appendix_a_amplitude(path: &[u8], optics: &OpticsConfig) -> Result<PathAmplitude> {
    Ok(PathAmplitude { value: path_amplitude(0, path, optics)?, path_bits: path.to_vec() })
}

/// Output state for detectors prepared in `|D_1 .. D_n>` (`wpd_basis[k - 1] =
/// D_k`) and photon input `alpha_0 |0> + alpha_1 |1>`, in canonical order.
pub fn appendix_a_state(
    optics: &OpticsConfig,
    wpd_basis: &[u8],
    q_amps: (Complex64, Complex64),
) -> Result<StateVector> {
    let n = optics.n();
    if wpd_basis.len() != n {
        return arg_err(format!("expected {n} detector bits, got {}", wpd_basis.len()));
    }
    if wpd_basis.iter().any(|&b| b > 1) {
        return arg_err("detector bits must be 0 or 1");
    }
    let norm = q_amps.0.norm_sqr() + q_amps.1.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return arg_err(format!("photon amplitudes have norm^2 {norm}, expected 1"));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (n + 1)];
    let mut path = vec![0u8; n + 1];
    for code in 0..(1usize << (n + 1)) {
        for (k, b) in path.iter_mut().enumerate() {
            *b = ((code >> k) & 1) as u8;
        }
        let mut index = path[n] as usize;
        for k in 1..=n {
            index |= ((wpd_basis[k - 1] ^ path[k - 1]) as usize) << detector_qubit(n, k);
        }
        for (q, alpha) in [(0u8, q_amps.0), (1u8, q_amps.1)] {
            if alpha.norm_sqr() > 0.0 {
                amps[index] += alpha * path_amplitude(q, &path, optics)?;
            }
        }
    }
    StateVector::from_amplitudes(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::apply_general_optics_circuit;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn symmetric(n: usize) -> OpticsConfig {
        OpticsConfig::new(vec![FRAC_PI_4; n + 1], vec![(0.0, 0.0); n + 1]).unwrap()
    }

    #[test]
    fn straight_path_is_product_of_cosines() {
        for n in 1..=5 {
            let a = appendix_a_amplitude(&vec![0; n + 1], &symmetric(n)).unwrap();
            assert!((a.value - Complex64::new(FRAC_1_SQRT_2.powi(n as i32 + 1), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn closed_first_splitter_blocks_lower_path() {
        let mut optics = symmetric(3);
        optics.thetas[0] = 0.0;
        let a = appendix_a_amplitude(&[1, 0, 1, 1], &optics).unwrap();
        assert_eq!(a.value.norm(), 0.0);
    }

    #[test]
    fn path_sum_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in 1..=8 {
            let optics = OpticsConfig::random(n, &mut rng);
            let total: f64 = (0..1usize << (n + 1))
                .map(|code| {
                    let path: Vec<u8> = (0..=n).map(|k| ((code >> k) & 1) as u8).collect();
                    appendix_a_amplitude(&path, &optics).unwrap().value.norm_sqr()
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn n1_hand_enumeration() {
        // paths (j1, j2): (0,0) c c, (0,1) c s, (1,0) s s, (1,1) s c with
        // c = 1/sqrt2, s = i/sqrt2; index bit 0 = j2, bit 1 = j1 (D_1 = 0)
        let s = appendix_a_state(&symmetric(1), &[0], (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))).unwrap();
        let expect = [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.5), Complex64::new(-0.5, 0.0), Complex64::new(0.0, 0.5)];
        for (a, e) in s.amps().iter().zip(expect) {
            assert!((a - e).norm() < 1e-15);
        }
    }

    #[test]
    fn matches_general_optics_circuit() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..20 {
            let n = 1 + trial % 6;
            let optics = OpticsConfig::random(n, &mut rng);
            let wpd: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
            let t: f64 = rng.random::<f64>() * 3.0;
            let q = (Complex64::from_polar(t.cos(), 0.4), Complex64::from_polar(t.sin(), -1.3));
            let closed = appendix_a_state(&optics, &wpd, q).unwrap();

            let mut input = vec![Complex64::new(0.0, 0.0); 1 << (n + 1)];
            let mut base = 0usize;
            for k in 1..=n {
                base |= (wpd[k - 1] as usize) << detector_qubit(n, k);
            }
            input[base] = q.0;
            input[base | 1] = q.1;
            let mut circ = StateVector::from_amplitudes(input).unwrap();
            apply_general_optics_circuit(&mut circ, &optics).unwrap();
            assert!(closed.max_abs_diff(&circ) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn output_is_entangled_for_generic_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let n = 3;
        let optics = OpticsConfig::random(n, &mut rng);
        let s = appendix_a_state(&optics, &[0, 1, 0], (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))).unwrap();
        // photon-vs-detectors: the 2x2 Gram matrix of the two photon rows is
        // singular iff the Schmidt rank is 1
        let rows: [Vec<Complex64>; 2] = [0, 1].map(|p| (0..1 << n).map(|w| s.amps()[(w << 1) | p]).collect());
        let g = |a: &Vec<Complex64>, b: &Vec<Complex64>| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
        let det = g(&rows[0], &rows[0]) * g(&rows[1], &rows[1]) - g(&rows[0], &rows[1]) * g(&rows[1], &rows[0]);
        assert!(det.norm() > 1e-3);
    }
}
