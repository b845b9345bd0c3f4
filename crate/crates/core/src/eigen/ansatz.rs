use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::StateVector;
use crate::error::{arg_err, Result};

/// Labels one eigenvector pair: period `2^m` and sign pattern
/// `s = [s_1 .. s_{m-1}]` with `s_{m-1} = 1` (empty for `m = 1`).
///
/// Zero-padded, `s` is an `n`-bit data string with `s_l` on bit `l - 1`; the
/// all-zero string is `m = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AnsatzIndex {
    pub m: usize,
    pub s: Vec<u8>,
}

impl AnsatzIndex {
    pub fn new(m: usize, s: Vec<u8>) -> Result<Self> {
        if m == 0 {
            return arg_err("m must be at least 1");
        }
        if s.len() != m - 1 {
            return arg_err(format!("s must have m - 1 = {} bits, got {}", m - 1, s.len()));
        }
        if s.iter().any(|&b| b > 1) {
            return arg_err("s bits must be 0 or 1");
        }
        if m >= 2 && s[m - 2] != 1 {
            return arg_err("s_{m-1} must be 1 when m >= 2");
        }
        Ok(Self { m, s })
    }

    /// Index for the data string `bits` (bit `l - 1` is `s_l`).
    pub fn from_data_bits(bits: u64) -> Self {
        let m = (64 - bits.leading_zeros()) as usize + 1;
        let s = (0..m - 1).map(|l| ((bits >> l) & 1) as u8).collect();
        Self { m, s }
    }

    pub fn data_bits(&self) -> u64 {
        self.s.iter().enumerate().fold(0, |acc, (l, &b)| acc | ((b as u64) << l))
    }

    /// `s_l` for `l` in `[1, m - 1]`.
    pub fn s_bit(&self, l: usize) -> u8 {
        self.s[l - 1]
    }

    /// All `2^n` indices, ordered by their data string.
    pub fn enumerate(n: usize) -> Vec<AnsatzIndex> {
        (0..1u64 << n).map(Self::from_data_bits).collect()
    }

    fn check_fits(&self, n: usize) -> Result<()> {
        if self.m > n + 1 {
            return arg_err(format!("index with m = {} does not fit n = {n}", self.m));
        }
        Ok(())
    }
}

/// `H^{(x)n} |0..0 s_{m-1} .. s_1> (x) (alpha_0 |0> + alpha_1 |1>)` with the
/// ancilla on qubit 0. The amplitude at `(x << 1) | j0` is
/// `2^{-n/2} (-1)^{popcount(x & s)} alpha_{j0}`.
pub fn ansatz_state(idx: &AnsatzIndex, alpha: (Complex64, Complex64), n: usize) -> Result<StateVector> {
    AnsatzIndex::new(idx.m, idx.s.clone())?;
    idx.check_fits(n)?;
    let norm = alpha.0.norm_sqr() + alpha.1.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return arg_err(format!("ancilla amplitudes have norm^2 {norm}, expected 1"));
    }
    let s = idx.data_bits();
    let scale = 2f64.powf(-(n as f64) / 2.0);
    let mut amps = Vec::with_capacity(1 << (n + 1));
    for x in 0..1u64 << n {
        let sign = if (x & s).count_ones().is_multiple_of(2) { scale } else { -scale };
        amps.push(alpha.0 * sign);
        amps.push(alpha.1 * sign);
    }
    StateVector::from_amplitudes(amps)
}
