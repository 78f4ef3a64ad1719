//! Unitary normal form of a 2x2 Jordan pair and the symmetrized `b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, hs_norm, op_norm, svd, CMatrix, C64};

const PHASE_TOL: f64 = 1e-300;

/// `(a, b)` carried by `x -> u T(v x u) v` and diagonal phases to
/// `a = diag(1, lambda)` with `b[0][1]`, `b[1][0]` real and nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalJordan {
    pub lambda: C64,
    pub a_norm: CMatrix,
    pub b_norm: CMatrix,
    pub u_left: CMatrix,
    pub v_right: CMatrix,
    /// Unimodular scalar applied to `b` only.
    pub phase: C64,
    /// `a` was divided by this (its operator norm).
    pub a_scale: f64,
    /// `b` was divided by this (its Hilbert-Schmidt norm).
    pub b_scale: f64,
}

impl CanonicalJordan {
    pub fn lambda_abs(&self) -> f64 {
        self.lambda.norm()
    }
}

/// Normalizes `||a|| = 1`, `||b||_2 = 1` and reduces to the canonical form.
/// Only 2x2 inputs.
pub fn reduce_to_canonical(a: &CMatrix, b: &CMatrix) -> Result<CanonicalJordan> {
    a.check_dim(2)?;
    b.check_dim(2)?;
    let a_scale = op_norm(a);
    let b_scale = hs_norm(b);
    if a_scale == 0.0 || b_scale == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let an = a.scale_re(1.0 / a_scale);
    let bn = b.scale_re(1.0 / b_scale);
    let d = svd(&an);
    let mut u_left = d.u.adjoint();
    let v_right = d.v;
    let mut bt = &(&u_left * &bn) * &v_right;
    let phase = unit_phase(bt[(0, 1)]).conj();
    bt = bt.scale(phase);
    let rot = unit_phase(bt[(1, 0)]).conj();
    let dm = CMatrix::diag(&[c64(1.0, 0.0), rot]);
    bt = &dm * &bt;
    u_left = &dm * &u_left;
    // clean the entries that are real by construction
    bt[(0, 1)] = c64(bt[(0, 1)].norm(), 0.0);
    bt[(1, 0)] = c64(bt[(1, 0)].norm(), 0.0);
    let lambda = rot * d.s[1];
    let mut a_norm = CMatrix::zeros(2);
    a_norm[(0, 0)] = c64(1.0, 0.0);
    a_norm[(1, 1)] = lambda;
    Ok(CanonicalJordan {
        lambda,
        a_norm,
        b_norm: bt,
        u_left,
        v_right,
        phase,
        a_scale,
        b_scale,
    })
}

fn unit_phase(z: C64) -> C64 {
    let r = z.norm();
    if r <= PHASE_TOL {
        c64(1.0, 0.0)
    } else {
        z / r
    }
}

/// Quantities read off `b_s = (b + b^t)/2` for a canonical `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsData {
    pub b_s: CMatrix,
    pub b11: C64,
    pub b22: C64,
    pub s12: f64,
    /// Diagonal entries of `b_s b_s^*`.
    pub mu1_sq: f64,
    pub mu2_sq: f64,
    /// `cos^2 theta = |b11|^2 + |b22|^2`.
    pub theta: f64,
    /// `|b22| - |b11|`
    pub eps12: f64,
    /// `||b_s||_2^2`
    pub hs_sq: f64,
    /// `|det b|` of the canonical `b`.
    pub det_abs: f64,
}

impl BsData {
    /// Builds the data from a `b` already in canonical form
    /// (off-diagonal entries real and nonnegative, `||b||_2 = 1`).
    pub fn from_b(b: &CMatrix) -> BsData {
        let b_s = (b + &b.transpose()).scale_re(0.5);
        let b11 = b[(0, 0)];
        let b22 = b[(1, 1)];
        let s12 = b_s[(0, 1)].re;
        let mu1_sq = b11.norm_sqr() + s12 * s12;
        let mu2_sq = b22.norm_sqr() + s12 * s12;
        let cos_sq = (b11.norm_sqr() + b22.norm_sqr()).min(1.0);
        BsData {
            hs_sq: hs_norm(&b_s).powi(2),
            b_s,
            b11,
            b22,
            s12,
            mu1_sq,
            mu2_sq,
            theta: cos_sq.sqrt().acos(),
            eps12: b22.norm() - b11.norm(),
            det_abs: b.det2().norm(),
        }
    }

    /// `|b11 + conj(b22)|`
    pub fn diag_coupling(&self) -> f64 {
        (self.b11 + self.b22.conj()).norm()
    }
}

pub fn symmetrize_b(canon: &CanonicalJordan) -> BsData {
    BsData::from_b(&canon.b_norm)
}
