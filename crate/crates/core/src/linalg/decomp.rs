//! Eigen, singular value and Takagi decompositions.
//!
//! Order-2 inputs use closed forms; larger orders use cyclic Jacobi sweeps
//! (two-sided for Hermitian eigenproblems, one-sided for the SVD).

use super::matrix::{c64, complete_basis, normalize, vdot, vnorm, CMatrix, C64};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const SYMMETRIC_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 80;

/// Singular value decomposition `m = u * diag(s) * v^*`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.u.n();
        let us = CMatrix::from_fn(n, |i, j| self.u[(i, j)] * self.s[j]);
        &us * &self.v.adjoint()
    }
}

/// Takagi factorization `m = u * diag(delta) * u^t` of a complex symmetric
/// matrix, `u` unitary and `delta` nonnegative and descending.
#[derive(Debug, Clone)]
pub struct TakagiFactors {
    pub u: CMatrix,
    pub delta: Vec<f64>,
}

impl TakagiFactors {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.u.n();
        let ud = CMatrix::from_fn(n, |i, j| self.u[(i, j)] * self.delta[j]);
        &ud * &self.u.transpose()
    }
}

fn scale_of(m: &CMatrix) -> f64 {
    m.frob().max(1.0)
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    (m - &m.adjoint()).frob()
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    match m.n() {
        1 => m[(0, 0)].norm(),
        // largest eigenvalue of m^* m, from its entries to avoid the
        // cancellation in the discriminant of the characteristic polynomial
        2 => {
            let (x, y, z, w) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            let h11 = x.norm_sqr() + z.norm_sqr();
            let h22 = y.norm_sqr() + w.norm_sqr();
            let h12 = x.conj() * y + z.conj() * w;
            (0.5 * (h11 + h22) + (0.5 * (h11 - h22)).hypot(h12.norm())).sqrt()
        }
        _ => svd(m).s[0],
    }
}

/// Hilbert-Schmidt norm `sqrt(trace m^* m)`.
pub fn hs_norm(m: &CMatrix) -> f64 {
    m.frob()
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    match m.n() {
        1 => m[(0, 0)].norm(),
        2 => (m.frob().powi(2) + 2.0 * m.det2().norm()).sqrt(),
        _ => svd(m).s.iter().sum(),
    }
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigs(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(eigh(m)?.0)
}

/// Largest eigenvalue of a Hermitian matrix; no precondition check.
pub fn lambda_max(m: &CMatrix) -> f64 {
    match m.n() {
        1 => m[(0, 0)].re,
        2 => {
            let p = m[(0, 0)].re;
            let r = m[(1, 1)].re;
            let q = m[(0, 1)];
            0.5 * (p + r) + (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt()
        }
        _ => jacobi_eigh(m).0[0],
    }
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues descending, with
/// the matching orthonormal eigenvectors as columns.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let res = hermitian_residual(m);
    if !m.is_finite() {
        return Err(Error::NotFinite);
    }
    if res > HERMITIAN_TOL * scale_of(m) {
        return Err(Error::NotHermitian(res));
    }
    Ok(match m.n() {
        1 => (vec![m[(0, 0)].re], CMatrix::identity(1)),
        2 => eigh2(m),
        _ => jacobi_eigh(m),
    })
}

fn eigh2(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let p = m[(0, 0)].re;
    let r = m[(1, 1)].re;
    let q = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mean = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
    let (l1, l2) = (mean + rad, mean - rad);
    let mut v1 = if q.norm() == 0.0 {
        if p >= r {
            vec![c64(1.0, 0.0), c64(0.0, 0.0)]
        } else {
            vec![c64(0.0, 0.0), c64(1.0, 0.0)]
        }
    } else {
        let cand_a = vec![q, c64(l1 - p, 0.0)];
        let cand_b = vec![c64(l1 - r, 0.0), q.conj()];
        if vnorm(&cand_a) >= vnorm(&cand_b) {
            cand_a
        } else {
            cand_b
        }
    };
    normalize(&mut v1);
    let v2 = vec![-v1[1].conj(), v1[0].conj()];
    (vec![l1, l2], CMatrix::from_columns(&[v1, v2]))
}

/// Unitary acting on the `(p, q)` coordinate plane that diagonalizes the
/// Hermitian block `[[app, apq], [conj(apq), aqq]]` under `G^* H G`.
/// Returned as `(g_pp, g_pq, g_qp, g_qq)`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> (C64, C64, C64, C64) {
    let r = apq.norm();
    let e = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ec = e.conj();
    (c64(c, 0.0), c64(s, 0.0), -ec * s, ec * c)
}

fn jacobi_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.n();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let total = a.frob().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-16 * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let (gpp, gpq, gqp, gqq) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * gpp + y * gqp;
                    a[(k, q)] = x * gpq + y * gqq;
                }
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = gpp.conj() * x + gqp.conj() * y;
                    a[(q, k)] = gpq.conj() * x + gqq.conj() * y;
                }
                a[(p, q)] = c64(0.0, 0.0);
                a[(q, p)] = c64(0.0, 0.0);
                a[(p, p)] = c64(a[(p, p)].re, 0.0);
                a[(q, q)] = c64(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * gpp + y * gqp;
                    v[(k, q)] = x * gpq + y * gqq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let vals = order.iter().map(|&i| a[(i, i)].re).collect();
    let vecs = CMatrix::from_columns(&order.iter().map(|&i| v.col(i)).collect::<Vec<_>>());
    (vals, vecs)
}

/// Singular value decomposition with descending singular values.
pub fn svd(m: &CMatrix) -> Svd {
    match m.n() {
        1 => {
            let z = m[(0, 0)];
            let s = z.norm();
            let ph = if s > 0.0 { z / s } else { c64(1.0, 0.0) };
            Svd {
                u: CMatrix::diag(&[ph]),
                s: vec![s],
                v: CMatrix::identity(1),
            }
        }
        2 => svd2(m),
        _ => jacobi_svd(m),
    }
}

fn svd2(m: &CMatrix) -> Svd {
    let h = &m.adjoint() * m;
    let (_, w) = eigh2(&h);
    let v1 = w.col(0);
    let v2 = w.col(1);
    let mut u1 = m.matvec(&v1);
    let s1 = normalize(&mut u1);
    if s1 == 0.0 {
        return Svd {
            u: CMatrix::identity(2),
            s: vec![0.0, 0.0],
            v: CMatrix::identity(2),
        };
    }
    let mut u2 = vec![-u1[1].conj(), u1[0].conj()];
    let z = vdot(&m.matvec(&v2), &u2);
    let s2 = z.norm();
    if s2 > 0.0 {
        let ph = z / s2;
        for x in u2.iter_mut() {
            *x *= ph;
        }
    }
    Svd {
        u: CMatrix::from_columns(&[u1, u2]),
        s: vec![s1, s2],
        v: CMatrix::from_columns(&[v1, v2]),
    }
}

fn jacobi_svd(m: &CMatrix) -> Svd {
    let n = m.n();
    let mut u = m.clone();
    let mut v = CMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, c64(0.0, 0.0));
                for i in 0..n {
                    let (x, y) = (u[(i, p)], u[(i, q)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let (gpp, gpq, gqp, gqq) = jacobi_rotation(alpha, beta, gamma);
                for k in 0..n {
                    let (x, y) = (u[(k, p)], u[(k, q)]);
                    u[(k, p)] = x * gpp + y * gqp;
                    u[(k, q)] = x * gpq + y * gqq;
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * gpp + y * gqp;
                    v[(k, q)] = x * gpq + y * gqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| vnorm(&u.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let smax = norms[order[0]];
    let mut ucols = Vec::with_capacity(n);
    for &j in &order {
        if norms[j] > 1e-14 * smax && norms[j] > 0.0 {
            let mut c = u.col(j);
            normalize(&mut c);
            ucols.push(c);
        } else {
            break;
        }
    }
    let ucols = complete_basis(ucols, n);
    Svd {
        u: CMatrix::from_columns(&ucols),
        s: order.iter().map(|&j| norms[j]).collect(),
        v: CMatrix::from_columns(&order.iter().map(|&j| v.col(j)).collect::<Vec<_>>()),
    }
}

/// Takagi factorization of a complex symmetric matrix.
///
/// Uses the real symmetric embedding `[[Re m, Im m], [Im m, -Re m]]`, whose
/// eigenvalues are `±delta_i`; an eigenvector `(x; y)` for `+delta_i`
/// gives the Takagi vector `x + i y`. Columns for vanishing `delta_i` are an
/// arbitrary orthonormal completion.
pub fn takagi(m: &CMatrix) -> Result<TakagiFactors> {
    if !m.is_finite() {
        return Err(Error::NotFinite);
    }
    let asym = (m - &m.transpose()).frob();
    if asym > SYMMETRIC_TOL * scale_of(m) {
        return Err(Error::NotSymmetric(asym));
    }
    let n = m.n();
    let sym = (m + &m.transpose()).scale_re(0.5);
    let k = CMatrix::from_fn(2 * n, |i, j| {
        let z = sym[(i % n, j % n)];
        let v = match (i < n, j < n) {
            (true, true) => z.re,
            (true, false) | (false, true) => z.im,
            (false, false) => -z.re,
        };
        c64(v, 0.0)
    });
    let (vals, vecs) = match n {
        1 => {
            let z = sym[(0, 0)];
            let d = z.norm();
            let u = if d > 0.0 {
                (z / d).sqrt()
            } else {
                c64(1.0, 0.0)
            };
            return Ok(TakagiFactors {
                u: CMatrix::diag(&[u]),
                delta: vec![d],
            });
        }
        _ => jacobi_eigh(&k),
    };
    let top = vals[0].max(0.0);
    let mut cols = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    for i in 0..n {
        let d = vals[i].max(0.0);
        delta.push(d);
        if d > 1e-13 * top && d > 0.0 {
            let mut c: Vec<C64> = (0..n)
                .map(|r| c64(vecs[(r, i)].re, vecs[(r + n, i)].re))
                .collect();
            normalize(&mut c);
            cols.push(c);
        }
    }
    let cols = complete_basis(cols, n);
    Ok(TakagiFactors {
        u: CMatrix::from_columns(&cols),
        delta,
    })
}

/// `||u u^* - I||_F`
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    (&(u * &u.adjoint()) - &CMatrix::identity(u.n())).frob()
}
