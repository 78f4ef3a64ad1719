//! Lower bounds `||T_{a,b}|| >= ||a|| ||b||`, `||T_{a,b}||_cb >= ||a||_2 ||b||_2`
//! and `||T_{a,b}|| >= ||a||_2 ||b||_2`, checked against the oracles, and
//! the compression of a pair to dimension two.

use serde::{Deserialize, Serialize};

use super::formulas::{dependent_norm, is_dependent, jordan_op};
use crate::error::Result;
use crate::haagerup::{cb_norm_oracle, haagerup_norm, op_norm_estimate, Budget, NormCertificate};
use crate::linalg::matrix::{complete_basis, normalize};
use crate::linalg::{hs_norm, op_norm, svd, vdot, CMatrix, C64};

/// Slack on one-sided inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Orthonormal bases `p` of `span{xi, eta}` and `q` of `span{a xi, b eta}`
/// (as `n x 2` column sets) and the compressions `q^* a p`, `q^* b p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compression {
    pub a2: CMatrix,
    pub b2: CMatrix,
    /// Columns of the `n x 2` isometry `p`, stored as an `n x n` matrix whose
    /// first two columns are used.
    pub p: CMatrix,
    pub q: CMatrix,
}

impl Compression {
    /// `q^* m p` for an `n x n` matrix `m`.
    pub fn compress(&self, m: &CMatrix) -> CMatrix {
        compress_with(m, &self.p, &self.q)
    }

    /// `p y q^*` embedded as an `n x n` matrix, for a 2x2 `y`.
    pub fn lift(&self, y: &CMatrix) -> CMatrix {
        let n = self.p.n();
        CMatrix::from_fn(n, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..2 {
                for l in 0..2 {
                    s += self.p[(i, k)] * y[(k, l)] * self.q[(j, l)].conj();
                }
            }
            s
        })
    }
}

fn compress_with(m: &CMatrix, p: &CMatrix, q: &CMatrix) -> CMatrix {
    let mp: Vec<Vec<C64>> = (0..2).map(|l| m.matvec(&p.col(l))).collect();
    CMatrix::from_fn(2, |k, l| vdot(&mp[l], &q.col(k)))
}

fn two_frame(u: Vec<C64>, v: Vec<C64>, n: usize) -> CMatrix {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for mut w in [u, v] {
        for _ in 0..2 {
            for b in &basis {
                let c = vdot(&w, b);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        if normalize(&mut w) > 1e-10 {
            basis.push(w);
        }
    }
    let full = complete_basis(basis, n);
    CMatrix::from_columns(&full)
}

/// Compression of `(a, b)` to 2x2 through the unit vectors where `a` and
/// `b` attain their norms, so `||a2|| >= ||a|| - eps`, `||b2|| >= ||b|| - eps`
/// and `||T_{a2,b2}|| <= ||T_{a,b}||`.
pub fn compress_to_2d(a: &CMatrix, b: &CMatrix, eps: f64) -> Result<Compression> {
    a.check_dim(b.n())?;
    if eps <= 0.0 {
        return Err(crate::error::Error::InvalidArgument(
            "eps must be positive".into(),
        ));
    }
    let n = a.n();
    if n < 2 {
        return Err(crate::error::Error::InvalidArgument(
            "dimension must be at least 2".into(),
        ));
    }
    let xi = svd(a).v.col(0);
    let eta = svd(b).v.col(0);
    let axi = a.matvec(&xi);
    let beta = b.matvec(&eta);
    let p = two_frame(xi, eta, n);
    let q = two_frame(axi, beta, n);
    Ok(Compression {
        a2: compress_with(a, &p, &q),
        b2: compress_with(b, &p, &q),
        p,
        q,
    })
}

/// Margins `m1 = ||T|| - ||a|| ||b||`, `m2 = ||T||_cb - ||a||_2 ||b||_2`,
/// `m3 = ||T|| - ||a||_2 ||b||_2` with the oracle values standing in for
/// the norms, plus a Haagerup upper bound. The Hilbert-Schmidt margins are
/// only recorded for 2x2 pairs.
pub fn verify_lower_bounds(a: &CMatrix, b: &CMatrix, budget: &Budget) -> Result<NormCertificate> {
    verify_lower_bounds_with(a, b, budget, true)
}

/// As [`verify_lower_bounds`], optionally skipping the Haagerup upper bound.
pub fn verify_lower_bounds_with(
    a: &CMatrix,
    b: &CMatrix,
    budget: &Budget,
    upper: bool,
) -> Result<NormCertificate> {
    let t = jordan_op(a, b)?;
    let op = op_norm_estimate(&t, budget);
    let (na, nb) = (op_norm(a), op_norm(b));
    let mut cert = NormCertificate::new("jordan-lower-bounds", budget.seed, op.value, op.witness);
    let dependent = is_dependent(a, b);
    if dependent {
        cert = cert.with_formula(dependent_norm(a, b));
    }
    cert.margin("m1", op.value - na * nb, INEQUALITY_SLACK);
    if a.n() == 2 {
        let cb = cb_norm_oracle(&t, budget);
        let hs = hs_norm(a) * hs_norm(b);
        cert.value("cb", cb.value);
        cert.margin("m2", cb.value - hs, INEQUALITY_SLACK);
        cert.margin("m3", op.value - hs, INEQUALITY_SLACK);
    }
    if upper {
        let h = haagerup_norm(&t, budget)?;
        let gap = h.value - cert.lower;
        cert = cert.with_upper(h.value, h.rep);
        cert.margin("sandwich", gap, 1e-6);
    }
    Ok(cert)
}
