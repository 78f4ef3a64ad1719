//! Symmetric representations `a ⊗ b + b ⊗ a = c1 ⊗ c1 + c2 ⊗ c2` realizing
//! the Haagerup norm, and the unitary normal form of a symmetric pair.

use serde::{Deserialize, Serialize};

use super::formulas::{is_dependent, jordan_op};
use crate::error::{Error, Result};
use crate::haagerup::tensor::tensor_residual;
use crate::haagerup::{haagerup_norm, Budget, Term};
use crate::linalg::{c64, lambda_max, takagi, CMatrix, C64};

const ALPHA_ASYMMETRY_TOL: f64 = 1e-8;
const MATCH_ANGLE_TOL: f64 = 1e-6;
const FORM_TOL: f64 = 1e-9;

/// `c1 = (z a + b/z)/sqrt 2`, `c2 = i (z a - b/z)/sqrt 2` with
/// `||a ⊗ b + b ⊗ a||_h = ||d1 c1 c1^* + d2 c2 c2^*|| = ||c1^* c1/d1 + c2^* c2/d2||`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricRep {
    pub c1: CMatrix,
    pub c2: CMatrix,
    pub delta1: f64,
    pub delta2: f64,
    pub z: C64,
    /// Symmetric change of basis `[b_1, b_2] = [a_1, a_2] alpha` between the
    /// two halves of the balanced representation.
    pub alpha: CMatrix,
    /// Haagerup norm of the balanced representation the data came from.
    pub norm: f64,
}

/// Residuals of the three defining identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricResiduals {
    pub tensor: f64,
    pub coefficients: f64,
    /// `max` of the deviations of the two weighted norms from `norm`.
    pub balance: f64,
}

impl SymmetricRep {
    pub fn left_norm(&self) -> f64 {
        let m = &(&self.c1 * &self.c1.adjoint()).scale_re(self.delta1)
            + &(&self.c2 * &self.c2.adjoint()).scale_re(self.delta2);
        lambda_max(&m)
    }

    pub fn right_norm(&self) -> f64 {
        let m = &(&self.c1.adjoint() * &self.c1).scale_re(1.0 / self.delta1)
            + &(&self.c2.adjoint() * &self.c2).scale_re(1.0 / self.delta2);
        lambda_max(&m)
    }

    pub fn residuals(&self, a: &CMatrix, b: &CMatrix) -> SymmetricResiduals {
        let lhs = [
            Term::new(self.c1.clone(), self.c1.clone()),
            Term::new(self.c2.clone(), self.c2.clone()),
        ];
        let rhs = [
            Term::new(a.clone(), b.clone()),
            Term::new(b.clone(), a.clone()),
        ];
        let tensor = tensor_residual(&lhs, &rhs).unwrap_or(f64::INFINITY);
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let za = a.scale(self.z);
        let bz = b.scale(self.z.inv());
        let c1 = (&za + &bz).scale_re(r2);
        let c2 = (&za - &bz).scale(c64(0.0, r2));
        let coefficients = (&c1 - &self.c1).frob().max((&c2 - &self.c2).frob());
        let balance = (self.left_norm() - self.norm)
            .abs()
            .max((self.right_norm() - self.norm).abs());
        SymmetricResiduals {
            tensor,
            coefficients,
            balance,
        }
    }
}

/// Builds the symmetric representation from an optimal balanced
/// representation of `a ⊗ b + b ⊗ a`.
pub fn symmetrize(a: &CMatrix, b: &CMatrix, budget: &Budget) -> Result<SymmetricRep> {
    if is_dependent(a, b) {
        return Err(Error::DependentPair);
    }
    let h = haagerup_norm(&jordan_op(a, b)?, budget)?;
    if h.rep.len() != 2 {
        return Err(Error::DependentPair);
    }
    symmetrize_from_rep(a, b, &h.rep, h.value)
}

/// The same construction from a given balanced two-term representation.
pub fn symmetrize_from_rep(
    a: &CMatrix,
    b: &CMatrix,
    rep: &[Term],
    norm: f64,
) -> Result<SymmetricRep> {
    let alpha = change_of_basis(rep)?;
    let asym = (&alpha - &alpha.transpose()).max_abs();
    if asym > ALPHA_ASYMMETRY_TOL * alpha.max_abs() {
        return Err(Error::NotSymmetric(asym));
    }
    let alpha = (&alpha + &alpha.transpose()).scale_re(0.5);
    let tk = takagi(&alpha)?;
    if tk.delta[1] <= 0.0 {
        return Err(Error::DependentPair);
    }
    let ubar = tk.u.conj();
    // [b'] = [B] conj(u), c_i = sqrt(delta_i) b'_i with delta_i = 1/Delta_ii
    let combine = |mats: [&CMatrix; 2], coef: &CMatrix, j: usize| {
        &mats[0].scale(coef[(0, j)]) + &mats[1].scale(coef[(1, j)])
    };
    let bs = [&rep[0].b, &rep[1].b];
    let mut deltas = [1.0 / tk.delta[0], 1.0 / tk.delta[1]];
    let mut cs = [
        combine(bs, &ubar, 0).scale_re(deltas[0].sqrt()),
        combine(bs, &ubar, 1).scale_re(deltas[1].sqrt()),
    ];
    for attempt in 0..2 {
        if attempt == 1 {
            cs.swap(0, 1);
            deltas.swap(0, 1);
        }
        if let Some(z) = match_z(a, b, &cs[0], &cs[1]) {
            return Ok(SymmetricRep {
                c1: cs[0].clone(),
                c2: cs[1].clone(),
                delta1: deltas[0],
                delta2: deltas[1],
                z,
                alpha: alpha.clone(),
                norm,
            });
        }
    }
    Err(Error::AmbiguousMatch)
}

/// `alpha` with `[b_1, b_2] = [a_1, a_2] alpha`, by least squares on the
/// flattened coefficients.
fn change_of_basis(rep: &[Term]) -> Result<CMatrix> {
    let a1 = rep[0].a.vec();
    let a2 = rep[1].a.vec();
    let g = |u: &[C64], v: &[C64]| -> C64 { u.iter().zip(v).map(|(x, y)| x.conj() * y).sum() };
    let gram = [[g(&a1, &a1), g(&a1, &a2)], [g(&a2, &a1), g(&a2, &a2)]];
    let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
    if det.norm() <= 1e-24 * gram[0][0].norm() * gram[1][1].norm() {
        return Err(Error::DependentPair);
    }
    let mut alpha = CMatrix::zeros(2);
    for j in 0..2 {
        let bj = rep[j].b.vec();
        let r = [g(&a1, &bj), g(&a2, &bj)];
        alpha[(0, j)] = (gram[1][1] * r[0] - gram[0][1] * r[1]) / det;
        alpha[(1, j)] = (gram[0][0] * r[1] - gram[1][0] * r[0]) / det;
    }
    Ok(alpha)
}

/// `z` with `(c1 - i c2)/sqrt 2 = z a`, when that vector is parallel to `a`.
fn match_z(a: &CMatrix, b: &CMatrix, c1: &CMatrix, c2: &CMatrix) -> Option<C64> {
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let ap = (c1 - &c2.scale(c64(0.0, 1.0))).scale_re(r2);
    let bp = (c1 + &c2.scale(c64(0.0, 1.0))).scale_re(r2);
    let z = ap.inner(a) / a.inner(a);
    let zi = bp.inner(b) / b.inner(b);
    if z.norm() == 0.0 || zi.norm() == 0.0 {
        return None;
    }
    let angle = super::formulas::pair_angle;
    if angle(a, &ap) <= MATCH_ANGLE_TOL && angle(b, &bp) <= MATCH_ANGLE_TOL {
        Some(z)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetricForm {
    BothDiagonal,
    ScalarPlusSpecial,
}

/// Unitary `u` bringing a symmetric pair with `c1 c1^* + c2 c2^* = rho I`
/// to one of the two normal forms under `c -> u c u^t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalPair {
    pub u: CMatrix,
    pub form: SymmetricForm,
    pub c1: CMatrix,
    pub c2: CMatrix,
    /// For the scalar-plus-special form: `c1 = lambda I`,
    /// `c2 = zeta [[alpha, beta], [beta, -conj alpha]]`.
    pub lambda: f64,
    pub zeta: C64,
    pub alpha: C64,
    pub beta: f64,
}

pub fn canonical_symmetric_pair(c1: &CMatrix, c2: &CMatrix) -> Result<CanonicalPair> {
    c1.check_dim(2)?;
    c2.check_dim(2)?;
    let s = &(c1 * &c1.adjoint()) + &(c2 * &c2.adjoint());
    let rho = 0.5 * (s[(0, 0)].re + s[(1, 1)].re);
    let dev = (&s - &CMatrix::identity(2).scale_re(rho)).max_abs();
    if dev > FORM_TOL * rho.max(1.0) {
        return Err(Error::PreconditionFailed(format!(
            "c1 c1^* + c2 c2^* differs from a multiple of I by {dev:.3e}"
        )));
    }
    // diagonalize whichever factor is nonzero
    let (first, second, swapped) = if c1.max_abs() >= FORM_TOL {
        (c1, c2, false)
    } else {
        (c2, c1, true)
    };
    let tk = takagi(first)?;
    let u = tk.u.adjoint();
    let ut = u.transpose();
    let f1 = &(&u * first) * &ut;
    let f2 = &(&u * second) * &ut;
    let scale = rho.sqrt().max(1.0);
    let off = f2[(0, 1)].norm().max(f2[(1, 0)].norm());
    let (d1, d2) = if swapped { (f2, f1) } else { (f1, f2) };
    if off <= FORM_TOL * scale {
        return Ok(CanonicalPair {
            u,
            form: SymmetricForm::BothDiagonal,
            c1: d1,
            c2: d2,
            lambda: 0.0,
            zeta: c64(1.0, 0.0),
            alpha: c64(0.0, 0.0),
            beta: 0.0,
        });
    }
    if swapped || (tk.delta[0] - tk.delta[1]).abs() > FORM_TOL * scale {
        return Err(Error::PreconditionFailed(
            "pair admits neither normal form".into(),
        ));
    }
    let lambda = 0.5 * (tk.delta[0] + tk.delta[1]);
    let zeta = d2[(0, 1)] / d2[(0, 1)].norm();
    let beta = d2[(0, 1)].norm();
    let alpha = d2[(0, 0)] / zeta;
    let special = CMatrix::from_rows(&[
        vec![alpha, c64(beta, 0.0)],
        vec![c64(beta, 0.0), -alpha.conj()],
    ])?
    .scale(zeta);
    let res = (&special - &d2).max_abs();
    if res > FORM_TOL * scale {
        return Err(Error::PreconditionFailed(format!(
            "second factor misses the special form by {res:.3e}"
        )));
    }
    Ok(CanonicalPair {
        u,
        form: SymmetricForm::ScalarPlusSpecial,
        c1: d1,
        c2: d2,
        lambda,
        zeta,
        alpha,
        beta,
    })
}
