//! Real 4x4 transfer matrices acting on `[a0, b0, a1, b1]`, the real and
//! imaginary parts of the photon's `|0>` and `|1>` amplitudes. Every block is
//! a plane rotation, the identity or zero, so the matrices stay real; the
//! complex read-out happens only in the final contraction with `u`.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul};

use crate::circuit::PhaseConfig;
use crate::error::{arg_err, Result};

pub type Block = [[f64; 2]; 2];

pub const ZERO_BLOCK: Block = [[0.0, 0.0], [0.0, 0.0]];
pub const IDENTITY_BLOCK: Block = [[1.0, 0.0], [0.0, 1.0]];

/// Counter-clockwise rotation `R(alpha)`.
pub fn rotation(alpha: f64) -> Block {
    let (s, c) = alpha.sin_cos();
    [[c, -s], [s, c]]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct M4(pub [[f64; 4]; 4]);

/// Tally of the work done by an element evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub mat_mults: usize,
    pub contractions: usize,
}

impl M4 {
    pub const IDENTITY: M4 = M4([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]);
    pub const ZERO: M4 = M4([[0.0; 4]; 4]);

    /// `[[top_left, top_right], [bottom_left, bottom_right]]`.
    pub fn from_blocks(tl: Block, tr: Block, bl: Block, br: Block) -> Self {
        let mut m = [[0.0; 4]; 4];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = tl[r][c];
                m[r][c + 2] = tr[r][c];
                m[r + 2][c] = bl[r][c];
                m[r + 2][c + 2] = br[r][c];
            }
        }
        M4(m)
    }

    /// Block `(br, bc)` with `br, bc` in `{0, 1}`.
    pub fn block(&self, br: usize, bc: usize) -> Block {
        let m = &self.0;
        [
            [m[2 * br][2 * bc], m[2 * br][2 * bc + 1]],
            [m[2 * br + 1][2 * bc], m[2 * br + 1][2 * bc + 1]],
        ]
    }

    pub fn scaled(&self, f: f64) -> M4 {
        let mut out = self.0;
        out.iter_mut().flatten().for_each(|v| *v *= f);
        M4(out)
    }

    pub fn mul_counted(&self, rhs: &M4, count: &mut OpCount) -> M4 {
        count.mat_mults += 1;
        *self * *rhs
    }

    pub fn max_abs_diff(&self, other: &M4) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Mul for M4 {
    type Output = M4;

    fn mul(self, rhs: M4) -> M4 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[0.0; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c] + a[r][2] * b[2][c] + a[r][3] * b[3][c];
            }
        }
        M4(out)
    }
}

impl Add for M4 {
    type Output = M4;

    fn add(self, rhs: M4) -> M4 {
        let mut out = self.0;
        for (o, r) in out.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *o += r;
        }
        M4(out)
    }
}

/// Photon stays on the detector's recorded path: `[[I, R(pi/2)], [0, 0]]`.
fn same_path() -> M4 {
    M4::from_blocks(IDENTITY_BLOCK, rotation(FRAC_PI_2), ZERO_BLOCK, ZERO_BLOCK)
}

/// Photon takes the other path: `[[0, 0], [R(phi + pi/2), R(phi)]]`.
fn flipped_path(phi: f64) -> M4 {
    M4::from_blocks(ZERO_BLOCK, ZERO_BLOCK, rotation(phi + FRAC_PI_2), rotation(phi))
}

/// Transfer matrix of stage `stage < n` for input detector bit `d_bit` and
/// output bit `e_bit`.
pub fn m_matrix(stage: usize, d_bit: u8, e_bit: u8, cfg: &PhaseConfig) -> Result<M4> {
    if stage == 0 || stage >= cfg.n() {
        return arg_err(format!("stage {stage} outside [1, n - 1] for n = {}", cfg.n()));
    }
    Ok(if d_bit == e_bit { same_path() } else { flipped_path(cfg.phi(stage)) })
}

/// Stage-`n` matrix with the detector-free stage `n + 1` folded in.
pub fn m_matrix_final(d_bit: u8, e_bit: u8, cfg: &PhaseConfig) -> M4 {
    m_matrix_final_counted(d_bit, e_bit, cfg, &mut OpCount::default())
}

pub(crate) fn m_matrix_final_counted(d_bit: u8, e_bit: u8, cfg: &PhaseConfig, count: &mut OpCount) -> M4 {
    let n = cfg.n();
    let last = cfg.phi(n + 1);
    if d_bit == e_bit {
        let outer = M4::from_blocks(IDENTITY_BLOCK, ZERO_BLOCK, rotation(last + FRAC_PI_2), ZERO_BLOCK);
        outer.mul_counted(&same_path(), count)
    } else {
        let outer = M4::from_blocks(ZERO_BLOCK, rotation(FRAC_PI_2), ZERO_BLOCK, rotation(last));
        outer.mul_counted(&flipped_path(cfg.phi(n)), count)
    }
}

/// Stage matrix for any `stage` in `[1, n]`, using the folded form at `n`.
pub(crate) fn stage_matrix(stage: usize, d_bit: u8, e_bit: u8, cfg: &PhaseConfig, count: &mut OpCount) -> M4 {
    if stage == cfg.n() {
        m_matrix_final_counted(d_bit, e_bit, cfg, count)
    } else if d_bit == e_bit {
        same_path()
    } else {
        flipped_path(cfg.phi(stage))
    }
}
