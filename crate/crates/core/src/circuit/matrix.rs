//! Square complex matrices, stored row-major.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{arg_err, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return arg_err(format!("expected {} entries for a {dim}x{dim} matrix, got {}", dim * dim, data.len()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let dim = columns.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (c, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return arg_err(format!("column {c} has length {}, expected {dim}", col.len()));
            }
            for (r, v) in col.iter().enumerate() {
                data[r * dim + c] = *v;
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        Self { dim: n, data }
    }

    /// `self * rhs`. Rows are computed in parallel.
    pub fn matmul(&self, rhs: &UnitaryMatrix) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        data.par_chunks_mut(n.max(1)).enumerate().for_each(|(r, out)| {
            for (k, a) in self.row(r).iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        });
        Self { dim: n, data }
    }

    /// `out = self * x`.
    pub fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        for (o, row) in out.iter_mut().zip(self.data.chunks(self.dim)) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_into(x, &mut out);
        out
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().matmul(self);
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((p.get(r, c) - target).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &UnitaryMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `u^p` by square-and-multiply.
pub fn unitary_power(u: &UnitaryMatrix, mut p: u64) -> UnitaryMatrix {
    let mut result = UnitaryMatrix::identity(u.dim());
    let mut base = u.clone();
    let mut first = true;
    while p > 0 {
        if p & 1 == 1 {
            result = if first { base.clone() } else { result.matmul(&base) };
            first = false;
        }
        p >>= 1;
        if p > 0 {
            base = base.matmul(&base);
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{uphi_dense, PhaseConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naive_power(u: &UnitaryMatrix, p: u64) -> UnitaryMatrix {
        let mut acc = UnitaryMatrix::identity(u.dim());
        for _ in 0..p {
            acc = acc.matmul(u);
        }
        acc
    }

    #[test]
    fn power_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = uphi_dense(&PhaseConfig::random(3, &mut rng)).unwrap();
        assert_eq!(unitary_power(&u, 0), UnitaryMatrix::identity(u.dim()));
        assert_eq!(unitary_power(&u, 1), u);
        assert!(unitary_power(&u, 4).max_abs_diff(&naive_power(&u, 4)) < 1e-11);
        for p in [3u64, 7, 13] {
            assert!(unitary_power(&u, p).max_abs_diff(&naive_power(&u, p)) < 1e-11);
        }
    }

    #[test]
    fn large_powers_stay_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let u = uphi_dense(&PhaseConfig::random(2, &mut rng)).unwrap();
        let p = unitary_power(&u, 1 << 20);
        assert!(p.unitarity_defect() < 1e-9);
    }

    #[test]
    fn from_columns_layout() {
        let c = |r: f64| Complex64::new(r, 0.0);
        let m = UnitaryMatrix::from_columns(&[vec![c(1.0), c(2.0)], vec![c(3.0), c(4.0)]]).unwrap();
        assert_eq!(m.get(0, 1), c(3.0));
        assert_eq!(m.get(1, 0), c(2.0));
        assert_eq!(m.apply(&[c(1.0), c(0.0)]), vec![c(1.0), c(2.0)]);
    }
}
