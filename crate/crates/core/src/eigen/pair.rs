use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ansatz::AnsatzIndex;
use super::rho::RhoBlock;
use crate::error::{QstError, Result};

/// Reduced blocks with a larger normality or unitarity defect are rejected.
pub const DEGENERATE_TOL: f64 = 1e-6;

pub type Ancilla = (Complex64, Complex64);

/// The two eigenvectors sharing one ansatz index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub index: AnsatzIndex,
    pub alpha: Ancilla,
    /// Exactly `dual(alpha)`.
    pub beta: Ancilla,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Phase `theta` with `beta_solved = e^{i theta} dual(alpha)`.
    pub beta_phase: f64,
    /// Largest residual of the four polynomial constraints at `alpha`.
    pub constraint_residual: f64,
    /// Phase-insensitive distance between `dual(alpha)` and the second
    /// eigenvector of the block.
    pub duality_residual: f64,
}

/// `(a0 + i b0, a1) -> (a1, -a0 + i b0)`, written for general input as
/// `(conj y, -conj x)`. Applying it twice negates the vector.
pub fn dual(v: Ancilla) -> Ancilla {
    (v.1.conj(), -v.0.conj())
}

/// Unit norm with `v.1` real non-negative; falls back to `v.0` when
/// `|v.1| <= 1e-12`.
pub fn gauge_fix(v: Ancilla) -> Ancilla {
    let norm = (v.0.norm_sqr() + v.1.norm_sqr()).sqrt();
    let (x, y) = (v.0 / norm, v.1 / norm);
    let pivot = if y.norm() > 1e-12 { y } else { x };
    let rot = pivot.conj() / pivot.norm();
    let (x, y) = (x * rot, y * rot);
    if y.norm() > 1e-12 {
        (x, Complex64::new(y.re, 0.0))
    } else {
        (Complex64::new(x.re, 0.0), y)
    }
}

fn apply(r: &[[Complex64; 2]; 2], v: Ancilla) -> Ancilla {
    (r[0][0] * v.0 + r[0][1] * v.1, r[1][0] * v.0 + r[1][1] * v.1)
}

fn inner(a: Ancilla, b: Ancilla) -> Complex64 {
    a.0.conj() * b.0 + a.1.conj() * b.1
}

/// Argument in `[0, 2 pi)`.
pub(crate) fn phase_of(z: Complex64) -> f64 {
    wrap_phase(z.arg())
}

/// `rem_euclid` can round a tiny negative angle up to exactly `2 pi`.
pub(crate) fn wrap_phase(angle: f64) -> f64 {
    let r = angle.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Unit eigenvector of `r` for eigenvalue `mu`, or `None` when `r - mu I`
/// vanishes.
fn eigvec(r: &[[Complex64; 2]; 2], mu: Complex64) -> Option<Ancilla> {
    let a = (r[0][1], mu - r[0][0]);
    let b = (mu - r[1][1], r[1][0]);
    let na = a.0.norm_sqr() + a.1.norm_sqr();
    let nb = b.0.norm_sqr() + b.1.norm_sqr();
    let (v, nv) = if na >= nb { (a, na) } else { (b, nb) };
    if nv < 1e-24 {
        return None;
    }
    let s = nv.sqrt();
    Some((v.0 / s, v.1 / s))
}

fn normality_defect(r: &[[Complex64; 2]; 2]) -> (f64, f64) {
    let mut normal = 0.0f64;
    let mut unitary = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            let rdr = r[0][a].conj() * r[0][b] + r[1][a].conj() * r[1][b];
            let rrd = r[a][0] * r[b][0].conj() + r[a][1] * r[b][1].conj();
            normal = normal.max((rdr - rrd).norm());
            let target = if a == b { 1.0 } else { 0.0 };
            unitary = unitary.max((rdr - target).norm());
        }
    }
    (normal, unitary)
}

/// Residuals of the four polynomial constraints at `alpha`, rescaled so that
/// each is dimensionless: `2^n` times the magnitude equations, `(sqrt 2)^n`
/// times the cross equation, the norm equation, and `b0 b1`.
pub fn constraint_residuals(block: &RhoBlock, alpha: Ancilla) -> [f64; 5] {
    let e = &block.entries;
    let scale = 2f64.powi(block.n as i32);
    let mut out = [0.0; 5];
    for k0 in 0..2 {
        let lhs = (e[0][k0] * alpha.0 + e[1][k0] * alpha.1).norm_sqr();
        let a = if k0 == 0 { alpha.0 } else { alpha.1 };
        out[k0] = scale * (lhs - a.norm_sqr() / scale);
    }
    let cross = alpha.1 * (alpha.0 * e[0][0] + alpha.1 * e[1][0]) - alpha.0 * (alpha.0 * e[0][1] + alpha.1 * e[1][1]);
    out[2] = scale.sqrt() * cross.norm();
    out[3] = alpha.0.norm_sqr() + alpha.1.norm_sqr() - 1.0;
    out[4] = alpha.0.im * alpha.1.im;
    out
}

/// Diagonalizes the reduced block. Members are ordered by eigenphase in
/// `[0, 2 pi)`, the smaller first.
pub fn solve_pair(block: &RhoBlock) -> Result<EigenPair> {
    let r = block.reduced_matrix();
    let (normal, unitary) = normality_defect(&r);
    if normal > DEGENERATE_TOL || unitary > DEGENERATE_TOL {
        return Err(QstError::DegenerateBlock { normality_defect: normal, unitarity_defect: unitary });
    }
    let half_trace = (r[0][0] + r[1][1]) / 2.0;
    let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
    let disc = (half_trace * half_trace - det).sqrt();
    let mut mus = [half_trace + disc, half_trace - disc];
    if phase_of(mus[1]) < phase_of(mus[0]) {
        mus.swap(0, 1);
    }
    let first = eigvec(&r, mus[0]);
    let second = eigvec(&r, mus[1]);
    // A scalar block leaves every vector fixed; take the standard basis.
    let (first, second) = match (first, second) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, dual(a)),
        (None, Some(b)) => (dual(b), b),
        (None, None) => ((Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))),
    };
    let alpha = gauge_fix(first);
    let beta = dual(alpha);
    let overlap = inner(beta, second);
    let beta_phase = phase_of(overlap);
    let rot = Complex64::from_polar(1.0, beta_phase);
    let duality_residual = ((second.0 - beta.0 * rot).norm_sqr() + (second.1 - beta.1 * rot).norm_sqr()).sqrt();
    let constraint_residual = constraint_residuals(block, alpha).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    // Rayleigh quotients give phases consistent with the stored vectors.
    let lambda1 = phase_of(inner(alpha, apply(&r, alpha)));
    let lambda2 = phase_of(inner(beta, apply(&r, beta)));
    Ok(EigenPair {
        index: block.index.clone(),
        alpha,
        beta,
        lambda1,
        lambda2,
        beta_phase,
        constraint_residual,
        duality_residual,
    })
}

impl EigenPair {
    /// `(|d1|^2, |d2|^2)` for `(|0> + |1>)/sqrt 2 = d1 alpha + d2 beta`.
    pub fn ancilla_weights(&self) -> (f64, f64) {
        let plus = (Complex64::new(1.0, 0.0) / 2f64.sqrt(), Complex64::new(1.0, 0.0) / 2f64.sqrt());
        (inner(self.alpha, plus).norm_sqr(), inner(self.beta, plus).norm_sqr())
    }
}
