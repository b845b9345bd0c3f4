use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

/// A single-qubit gate as a 2x2 complex matrix, `entries[row][col]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate2x2 {
    entries: [[Complex64; 2]; 2],
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl Gate2x2 {
    /// No unitarity check here; [`crate::StateVector::apply_gate1`] validates.
    pub fn from_entries(entries: [[Complex64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    pub fn identity() -> Self {
        Self::from_entries([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn pauli_x() -> Self {
        Self::from_entries([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::from_entries([[h, h], [h, -h]])
    }

    /// Symmetric beam splitter `R_X(-pi/2) = [[1, i], [i, 1]] / sqrt(2)`.
    pub fn rx_minus_half_pi() -> Self {
        Self::beam_splitter(std::f64::consts::FRAC_PI_4)
    }

    /// General beam splitter `[[cos t, i sin t], [i sin t, cos t]]`.
    pub fn beam_splitter(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let c = Complex64::new(c, 0.0);
        let is = Complex64::new(0.0, s);
        Self::from_entries([[c, is], [is, c]])
    }

    /// `diag(1, e^{i phi})`.
    pub fn phase(phi: f64) -> Self {
        Self::path_phases(0.0, phi)
    }

    /// `diag(e^{i phi0}, e^{i phi1})`: independent phase shifters on both paths.
    pub fn path_phases(phi0: f64, phi1: f64) -> Self {
        Self::from_entries([
            [Complex64::from_polar(1.0, phi0), ZERO],
            [ZERO, Complex64::from_polar(1.0, phi1)],
        ])
    }

    /// Largest entry of `|G^dagger G - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = &self.entries;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ZERO;
                for k in 0..2 {
                    acc += g[k][i].conj() * g[k][j];
                }
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries[0][1] == ZERO && self.entries[1][0] == ZERO
    }
}
