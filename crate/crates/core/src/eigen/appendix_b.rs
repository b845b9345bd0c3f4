use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pair::EigenPair;
use super::rho::RhoBlock;

/// Angles of a reduced block in the single-`omega` parametrization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockAngles {
    pub omega: f64,
    pub gamma00: f64,
    pub gamma01: f64,
    pub gamma10: f64,
}

impl From<&RhoBlock> for BlockAngles {
    fn from(b: &RhoBlock) -> Self {
        Self { omega: b.omega, gamma00: b.gamma00, gamma01: b.gamma01, gamma10: b.gamma10 }
    }
}

/// `(a0, b0, a1)` of an ancilla vector gauged with a real second component.
pub type Mu = (f64, f64, f64);

pub fn mu_from_pair(pair: &EigenPair) -> Mu {
    (pair.alpha.0.re, pair.alpha.0.im, pair.alpha.1.re)
}

/// The ten trigonometric residuals for the primal solution `mu` and its dual.
pub fn trig_residuals(ang: &BlockAngles, mu: Mu) -> [f64; 10] {
    let BlockAngles { omega: w, gamma00: g00, gamma01: g01, gamma10: g10 } = *ang;
    let (m0, m1, m2) = mu;
    let (sw, cw) = w.sin_cos();
    let s2w = (2.0 * w).sin();
    let d = g00 - g10;
    let p01 = g00 + g01;
    let p10 = g00 + g10;
    let c_sum = (2.0 * g00).cos() + (g01 + g10).cos();
    let s_sum = (2.0 * g00).sin() + (g01 + g10).sin();
    let sq = m0 * m0 + m1 * m1 - m2 * m2;
    let diff = m1 * m1 - m0 * m0;

    let e1 = m2 * s2w * (m0 * d.cos() - m1 * d.sin()) - sw * sw * sq;
    let e2 = sw * sw * sq + m2 * s2w * (m1 * d.sin() - m0 * d.cos());
    let e3 = sw * (diff * p01.cos() + 2.0 * m0 * m1 * p01.sin() + m2 * m2 * p10.cos()) + m2 * cw * (m0 * c_sum - m1 * s_sum);
    let e4 = sw * (diff * p01.sin() - 2.0 * m0 * m1 * p01.cos() + m2 * m2 * p10.sin()) + m2 * cw * (m0 * s_sum + m1 * c_sum);
    let e5 = m0 * m0 + m1 * m1 + m2 * m2 - 1.0;
    let e8 = sw * (diff * p10.cos() - 2.0 * m0 * m1 * p10.sin() + m2 * m2 * p01.cos()) + m2 * cw * (m0 * c_sum + m1 * s_sum);
    let e9 = sw * (diff * p10.sin() + 2.0 * m0 * m1 * p10.cos() + m2 * m2 * p01.sin()) + m2 * cw * (m0 * s_sum - m1 * c_sum);
    [e1, e2, e3, e4, e5, -e1, -e2, e8, e9, e5]
}

/// The four unitarity residuals read directly off the block entries. The
/// last one is complex; its modulus is returned.
pub fn unitarity_residuals(block: &RhoBlock) -> [f64; 4] {
    let r = &block.entries;
    let inv = 2f64.powi(-(block.n as i32));
    let e14: Complex64 = r[0][0].conj() * r[1][0] + r[0][1].conj() * r[1][1];
    [
        r[0][0].norm_sqr() + r[1][0].norm_sqr() - inv,
        r[0][0].norm_sqr() + r[0][1].norm_sqr() - inv,
        r[0][1].norm_sqr() + r[1][1].norm_sqr() - inv,
        e14.norm(),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixB {
    /// `E_1 .. E_14`.
    pub residuals: [f64; 14],
    pub omega_closed_form: f64,
    /// Distance between the extracted `omega` and the closed form, modulo `pi`.
    pub omega_mismatch: f64,
    pub mu0_closed_form: f64,
    /// `|mu0 sin x + mu1 cos x|` with `x = (gamma01 - gamma10)/2`; zero
    /// exactly when `mu0 = -mu1 cot x`, and finite when `sin x = 0`.
    pub mu0_mismatch: f64,
    pub conditioning_warning: bool,
}

impl AppendixB {
    pub fn max_trig(&self) -> f64 {
        self.residuals[..10].iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_unitarity(&self) -> f64 {
        self.residuals[10..].iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub fn appendix_b_residuals(block: &RhoBlock, mu: Mu) -> AppendixB {
    let ang = BlockAngles::from(block);
    let trig = trig_residuals(&ang, mu);
    let unit = unitarity_residuals(block);
    let mut residuals = [0.0; 14];
    residuals[..10].copy_from_slice(&trig);
    residuals[10..].copy_from_slice(&unit);

    let (m0, m1, m2) = mu;
    let (g00, g01, g10) = (ang.gamma00, ang.gamma01, ang.gamma10);
    let p01 = g00 + g01;
    let p10 = g00 + g10;
    let c_sum = (2.0 * g00).cos() + (g01 + g10).cos();
    let s_sum = (2.0 * g00).sin() + (g01 + g10).sin();
    let num = m2 * (m0 * c_sum - m1 * s_sum);
    let den = (m1 * m1 - m0 * m0) * p01.cos() + 2.0 * m0 * m1 * p01.sin() + m2 * m2 * p10.cos();
    let omega_closed_form = (-num / den).atan();
    let r = (ang.omega - omega_closed_form).rem_euclid(std::f64::consts::PI);
    let omega_mismatch = r.min(std::f64::consts::PI - r);

    let x = (g01 - g10) / 2.0;
    let mu0_closed_form = -m1 / x.tan();
    let mu0_mismatch = (m0 * x.sin() + m1 * x.cos()).abs();

    AppendixB {
        residuals,
        omega_closed_form,
        omega_mismatch,
        mu0_closed_form,
        mu0_mismatch,
        conditioning_warning: block.conditioning_warning,
    }
}
