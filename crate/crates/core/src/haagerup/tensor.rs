//! Haagerup tensor norm of `w = sum_i a_i ⊗ b_i`.
//!
//! Every representation with linearly independent tuples is
//! `[a'] = [a] L`, `[b'] = L^{-1} [b]` for an invertible `L`, and the two
//! factor norms only depend on `P = L L^*`:
//! `sum a'a'^* = sum_jl P_jl a_j a_l^*`, `sum b'^*b' = sum_jl (P^{-1})_jl b_j^* b_l`.
//! Rescaling `L` trades one factor against the other, so
//! `||w||_h = min_L (||sum a'a'^*|| + ||sum b'^*b'||) / 2`, a convex problem
//! in `P`. `L` is parametrized as a lower-triangular factor with positive
//! diagonal and minimized by Nelder-Mead on a smoothed objective (soft
//! maximum of eigenvalues) with a decreasing smoothing width, finished on
//! the exact objective.

use serde::{Deserialize, Serialize};

use super::elemop::{ElemOp, Term};
use super::oracle::Budget;
use crate::error::{Error, Result};
use crate::exec::argmin_by_key;
use crate::linalg::ensemble::complex_gaussian;
use crate::linalg::{eigh, lambda_max, seeded_rng, svd, CMatrix, C64};
use crate::optim::{nelder_mead_restarts, NelderMeadOptions};

const RANK_TOL: f64 = 1e-10;
const COND_BARRIER: f64 = 1e6;
const HAAGERUP_STREAM: u64 = 0x6861_6167_0000_0000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaagerupResult {
    /// Upper bound on `||w||_h` achieved by `rep`.
    pub value: f64,
    /// Balanced representation: `left_norm == right_norm == value`.
    pub rep: Vec<Term>,
    /// `||sum a_i a_i^*||`
    pub left_norm: f64,
    /// `||sum b_i^* b_i||`
    pub right_norm: f64,
}

/// `(||sum a_i a_i^*||, ||sum b_i^* b_i||)`
pub fn rep_norms(rep: &[Term]) -> (f64, f64) {
    let n = rep[0].a.n();
    let mut left = CMatrix::zeros(n);
    let mut right = CMatrix::zeros(n);
    for t in rep {
        left += &(&t.a * &t.a.adjoint());
        right += &(&t.b.adjoint() * &t.b);
    }
    (lambda_max(&left), lambda_max(&right))
}

/// `sqrt(||sum a a^*|| ||sum b^* b||)`, the Haagerup value of one
/// representation.
pub fn rep_value(rep: &[Term]) -> f64 {
    let (l, r) = rep_norms(rep);
    (l * r).sqrt()
}

/// Rescales `a_i -> t a_i`, `b_i -> b_i / t` so both factor norms agree.
pub fn balance(rep: &[Term]) -> Vec<Term> {
    let (l, r) = rep_norms(rep);
    if l <= 0.0 || r <= 0.0 {
        return rep.to_vec();
    }
    let t = (r / l).powf(0.25);
    rep.iter()
        .map(|x| Term::new(x.a.scale_re(t), x.b.scale_re(1.0 / t)))
        .collect()
}

/// Numerical rank of a tuple of matrices viewed as vectors.
pub fn tuple_rank(mats: &[&CMatrix]) -> usize {
    let size = (mats[0].n() * mats[0].n()).max(mats.len());
    let cols: Vec<Vec<C64>> = (0..size)
        .map(|j| {
            let mut c = mats.get(j).map(|m| m.vec()).unwrap_or_default();
            c.resize(size, C64::new(0.0, 0.0));
            c
        })
        .collect();
    let s = svd(&CMatrix::from_columns(&cols)).s;
    let smax = s[0];
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > RANK_TOL * smax).count()
}

/// True when both coefficient tuples are linearly independent.
pub fn is_independent(w: &ElemOp) -> bool {
    let k = w.len();
    let a: Vec<&CMatrix> = w.terms().iter().map(|t| &t.a).collect();
    let b: Vec<&CMatrix> = w.terms().iter().map(|t| &t.b).collect();
    k <= w.dim() * w.dim() && tuple_rank(&a) == k && tuple_rank(&b) == k
}

/// Shortest representation of the same tensor, read off the SVD of the
/// flattening `sum vec(a_i) vec(b_i)^t`.
pub fn reduce(w: &ElemOp) -> Result<ElemOp> {
    let n = w.dim();
    let d = svd(&w.flatten());
    let smax = d.s[0];
    if smax == 0.0 {
        return Err(Error::EmptyTensor);
    }
    let terms = (0..n * n)
        .filter(|&j| d.s[j] > RANK_TOL * smax)
        .map(|j| {
            let u: Vec<C64> = d.u.col(j).iter().map(|z| z * d.s[j]).collect();
            let v: Vec<C64> = d.v.col(j).iter().map(|z| z.conj()).collect();
            Term::new(CMatrix::from_vec(n, &u), CMatrix::from_vec(n, &v))
        })
        .collect();
    ElemOp::new(terms)
}

struct Problem<'a> {
    terms: &'a [Term],
    k: usize,
    n: usize,
}

impl Problem<'_> {
    fn factor(&self, p: &[f64]) -> CMatrix {
        let k = self.k;
        let mut l = CMatrix::zeros(k);
        let mut idx = k;
        for i in 0..k {
            l[(i, i)] = C64::new(p[i].exp(), 0.0);
            for j in 0..i {
                l[(i, j)] = C64::new(p[idx], p[idx + 1]);
                idx += 2;
            }
        }
        l
    }

    fn transformed(&self, l: &CMatrix) -> Vec<Term> {
        let k = self.k;
        let linv = lower_inverse(l);
        (0..k)
            .map(|i| {
                let mut a = CMatrix::zeros(self.n);
                let mut b = CMatrix::zeros(self.n);
                for j in 0..k {
                    if l[(j, i)].norm() != 0.0 {
                        a += &self.terms[j].a.scale(l[(j, i)]);
                    }
                    if linv[(i, j)].norm() != 0.0 {
                        b += &self.terms[j].b.scale(linv[(i, j)]);
                    }
                }
                Term::new(a, b)
            })
            .collect()
    }

    fn factor_matrices(&self, p: &[f64]) -> (CMatrix, CMatrix) {
        let rep = self.transformed(&self.factor(p));
        let mut left = CMatrix::zeros(self.n);
        let mut right = CMatrix::zeros(self.n);
        for t in &rep {
            left += &(&t.a * &t.a.adjoint());
            right += &(&t.b.adjoint() * &t.b);
        }
        (left, right)
    }

    fn objective(&self, p: &[f64], width: f64, scale: f64) -> f64 {
        let (left, right) = self.factor_matrices(p);
        let v = soft_max_eig(&left, width) + soft_max_eig(&right, width);
        let diag = &p[..self.k];
        let spread = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let excess = spread - COND_BARRIER.ln();
        if excess > 0.0 {
            v + scale * excess * excess
        } else {
            v
        }
    }
}

fn lower_inverse(l: &CMatrix) -> CMatrix {
    let k = l.n();
    let mut inv = CMatrix::zeros(k);
    for c in 0..k {
        for i in c..k {
            let mut s = if i == c {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            for j in c..i {
                s -= l[(i, j)] * inv[(j, c)];
            }
            inv[(i, c)] = s / l[(i, i)];
        }
    }
    inv
}

/// Largest eigenvalue, smoothed by a log-sum-exp of width `width`
/// (exact when `width == 0`).
fn soft_max_eig(h: &CMatrix, width: f64) -> f64 {
    if width == 0.0 {
        return lambda_max(h);
    }
    let eigs: Vec<f64> = if h.n() == 2 {
        let p = h[(0, 0)].re;
        let r = h[(1, 1)].re;
        let rad = (0.25 * (p - r) * (p - r) + h[(0, 1)].norm_sqr()).sqrt();
        let mean = 0.5 * (p + r);
        vec![mean + rad, mean - rad]
    } else {
        eigh(&h.hermitian_part())
            .map(|e| e.0)
            .unwrap_or_else(|_| vec![lambda_max(h)])
    };
    let top = eigs[0];
    top + width
        * eigs
            .iter()
            .map(|&e| ((e - top) / width).exp())
            .sum::<f64>()
            .ln()
}

/// Upper bound on `||w||_h`, converging to it as the budget grows, with the
/// balanced representation that achieves it.
pub fn haagerup_norm(w: &ElemOp, budget: &Budget) -> Result<HaagerupResult> {
    if w.is_empty() {
        return Err(Error::EmptyTensor);
    }
    let w = if is_independent(w) {
        w.clone()
    } else {
        reduce(w)?
    };
    let k = w.len();
    if k == 1 {
        return Ok(finish(w.terms().to_vec()));
    }
    let prob = Problem {
        terms: w.terms(),
        k,
        n: w.dim(),
    };
    let dim = k * k;
    let origin = vec![0.0; dim];
    let scale = 0.5 * prob.objective(&origin, 0.0, 0.0);
    let widths = [1e-2, 1e-4, 1e-6, 1e-8, 0.0];
    let starts = budget.starts.clamp(1, 4);
    let opts = NelderMeadOptions {
        max_evals: 1500,
        ftol: 1e-16,
        xtol: 1e-12,
    };
    let runs = budget.exec.map(starts, |s| {
        let mut x = if s == 0 {
            origin.clone()
        } else {
            let mut rng = seeded_rng(budget.seed, HAAGERUP_STREAM + s as u64);
            (0..dim)
                .map(|_| {
                    let z = complex_gaussian(&mut rng);
                    0.7 * z.re
                })
                .collect()
        };
        let mut step = 0.5;
        for &wd in &widths {
            let f = |p: &[f64]| prob.objective(p, wd * scale, scale);
            x = nelder_mead_restarts(f, &x, step, 3, opts).0;
            step = (step * 0.2).max(1e-4);
        }
        let exact = prob.objective(&x, 0.0, 0.0);
        (x, exact)
    });
    let best = argmin_by_key(&runs, |r| r.1).unwrap();
    let l = prob.factor(&runs[best].0);
    Ok(finish(prob.transformed(&l)))
}

fn finish(rep: Vec<Term>) -> HaagerupResult {
    let rep = balance(&rep);
    let (left_norm, right_norm) = rep_norms(&rep);
    HaagerupResult {
        value: (left_norm * right_norm).sqrt(),
        rep,
        left_norm,
        right_norm,
    }
}

/// Sum of `a_i ⊗ b_i` on the flattened `n^2 x n^2` coordinates, used to
/// compare two representations of the same tensor.
pub fn tensor_residual(x: &[Term], y: &[Term]) -> Result<f64> {
    let fx = ElemOp::new(x.to_vec())?.flatten();
    let fy = ElemOp::new(y.to_vec())?.flatten();
    Ok((&fx - &fy).frob())
}
