//! Closed-form and one/two-parameter variational formulas for norms of
//! Jordan operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haagerup::ElemOp;
use crate::linalg::{c64, eigh, hs_norm, lambda_max, op_norm, CMatrix, C64};
use crate::optim::{golden_section, nelder_mead_restarts, NelderMeadOptions};

const SYM_TOL: f64 = 1e-12;
const NORMALIZED_TOL: f64 = 1e-12;
const STRUCTURE_TOL: f64 = 1e-10;
/// Below this sine of the angle between `a` and `b` the pair is treated as
/// dependent.
pub const DEPENDENCE_TOL: f64 = 1e-8;

/// `T_{a,b}(x) = a x b + b x a`.
pub fn jordan_op(a: &CMatrix, b: &CMatrix) -> Result<ElemOp> {
    ElemOp::from_pairs(vec![(a.clone(), b.clone()), (b.clone(), a.clone())])
}

/// `T(x) = a x b^* + b x a^*`, the self-adjoint variant.
pub fn selfadjoint_op(a: &CMatrix, b: &CMatrix) -> Result<ElemOp> {
    ElemOp::from_pairs(vec![(a.clone(), b.adjoint()), (b.clone(), a.adjoint())])
}

/// Sine of the angle between `a` and `b` as vectors; `0` if either is zero.
pub fn pair_angle(a: &CMatrix, b: &CMatrix) -> f64 {
    let (na, nb) = (a.frob(), b.frob());
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    // residual of b after projecting onto a; stable for nearly parallel pairs
    let r = b - &a.scale(b.inner(a) / a.inner(a));
    (r.frob() / nb).min(1.0)
}

pub fn is_dependent(a: &CMatrix, b: &CMatrix) -> bool {
    pair_angle(a, b) < DEPENDENCE_TOL
}

/// `||T_{a,b}|| = ||T_{a,b}||_cb = 2 ||a|| ||b||` for a dependent pair.
pub fn dependent_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    2.0 * op_norm(a) * op_norm(b)
}

fn check_symmetric(m: &CMatrix) -> Result<()> {
    let r = (m - &m.transpose()).max_abs();
    if r > SYM_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(r));
    }
    Ok(())
}

/// Minimizer and value of `x -> ||x a a^* + b b^*/x||` on `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarInfimum {
    pub x: f64,
    pub value: f64,
}

/// `inf_{x>0} ||x a a^* + (1/x) b b^*||`, scanning a logarithmic grid on
/// `[1e-6, 1e6]` and refining the best cell by golden section in `log x`.
pub fn positive_combination_infimum(a: &CMatrix, b: &CMatrix) -> ScalarInfimum {
    let p = a * &a.adjoint();
    let q = b * &b.adjoint();
    let f = |t: f64| {
        let x = t.exp();
        lambda_max(&(&p.scale_re(x) + &q.scale_re(1.0 / x)))
    };
    let (lo, hi) = (1e-6f64.ln(), 1e6f64.ln());
    let points = 1000;
    let h = (hi - lo) / (points - 1) as f64;
    let (mut best_i, mut best) = (0usize, f64::INFINITY);
    for i in 0..points {
        let v = f(lo + h * i as f64);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let l = lo + h * best_i.saturating_sub(1) as f64;
    let r = (lo + h * (best_i + 1) as f64).min(hi);
    let (t, v) = golden_section(f, l, r, 1e-12);
    let (t, v) = if v <= best {
        (t, v)
    } else {
        (lo + h * best_i as f64, best)
    };
    ScalarInfimum {
        x: t.exp(),
        value: v,
    }
}

/// `||T_{a,b}||_cb = ||T_{a,b}||` for complex symmetric 2x2 `a`, `b`, as
/// `inf_{x>0} ||x a a^* + (1/x) b b^*||`.
pub fn cb_symmetric_formula(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    a.check_dim(2)?;
    b.check_dim(2)?;
    check_symmetric(a)?;
    check_symmetric(b)?;
    Ok(positive_combination_infimum(a, b).value)
}

/// Which piece of the diagonal formula produced the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagBranch {
    SharedMaximum,
    Linear,
    Quotient,
}

/// The two pieces of the diagonal formula in the relabelled variables
/// `l = |lambda_2|`, `m = |mu_1|` with `m <= l`.
pub fn diag_branches(l: f64, m: f64) -> (f64, f64) {
    let linear = 2.0 * l;
    let quotient = (1.0 - m * m * l * l) / ((1.0 - m * m) * (1.0 - l * l)).sqrt();
    (linear, quotient)
}

/// Value and branch of `||T_{a,b}||` for `a = diag(l1, l2)`,
/// `b = diag(m1, m2)` with `max |l_i| = max |m_i| = 1`.
pub fn diag_commuting_branch(l1: C64, l2: C64, m1: C64, m2: C64) -> Result<(f64, DiagBranch)> {
    let (al1, al2, am1, am2) = (l1.norm(), l2.norm(), m1.norm(), m2.norm());
    for (name, top) in [("a", al1.max(al2)), ("b", am1.max(am2))] {
        if (top - 1.0).abs() > NORMALIZED_TOL {
            return Err(Error::NotNormalized(format!(
                "max modulus of {name} is {top}"
            )));
        }
    }
    let at_one = |x: f64| (x - 1.0).abs() <= NORMALIZED_TOL;
    if (at_one(al1) && at_one(am1)) || (at_one(al2) && at_one(am2)) {
        return Ok((2.0, DiagBranch::SharedMaximum));
    }
    // relabel so that |lambda_1| = 1 = |mu_2|
    let (lam2, mu1) = if at_one(al1) { (al2, am1) } else { (al1, am2) };
    // T_{a,b} = T_{b,a}: exchanging a and b swaps the two moduli
    let (l, m) = (lam2.max(mu1), lam2.min(mu1));
    let (linear, quotient) = diag_branches(l, m);
    if l >= std::f64::consts::FRAC_1_SQRT_2 && m * m < 2.0 - 1.0 / (l * l) {
        Ok((linear, DiagBranch::Linear))
    } else {
        Ok((quotient, DiagBranch::Quotient))
    }
}

pub fn diag_commuting_formula(l1: C64, l2: C64, m1: C64, m2: C64) -> Result<f64> {
    diag_commuting_branch(l1, l2, m1, m2).map(|r| r.0)
}

/// Diagonal formula for arbitrary (unnormalized) diagonal entries.
pub fn diag_jordan_norm(l: [C64; 2], m: [C64; 2]) -> Result<f64> {
    let sa = l[0].norm().max(l[1].norm());
    let sb = m[0].norm().max(m[1].norm());
    if sa == 0.0 || sb == 0.0 {
        return Ok(0.0);
    }
    let v = diag_commuting_formula(l[0] / sa, l[1] / sa, m[0] / sb, m[1] / sb)?;
    Ok(v * sa * sb)
}

/// Simultaneous unitary diagonalization of commuting normal matrices:
/// eigenvectors of a generic Hermitian combination.
pub fn common_eigenbasis(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let weights = [
        1.0,
        std::f64::consts::SQRT_2,
        std::f64::consts::E / 2.0,
        0.577_215_664_9,
    ];
    let h = &(&a.hermitian_part().scale_re(weights[0]) + &a.imaginary_part().scale_re(weights[1]))
        + &(&b.hermitian_part().scale_re(weights[2]) + &b.imaginary_part().scale_re(weights[3]));
    Ok(eigh(&h)?.1)
}

fn normality_residual(m: &CMatrix) -> f64 {
    (&(m * &m.adjoint()) - &(&m.adjoint() * m)).frob()
}

/// `||T_{a,b}||` for commuting normal 2x2 `a`, `b`, stated through
/// `||a||`, `||a||_2`, `||b||`, `||b||_2`.
pub fn normal_commuting_formula(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    a.check_dim(2)?;
    b.check_dim(2)?;
    let scale = a.frob().max(b.frob()).max(1.0);
    for m in [a, b] {
        let r = normality_residual(m);
        if r > STRUCTURE_TOL * scale * scale {
            return Err(Error::NotNormal(r));
        }
    }
    let comm = (&(a * b) - &(b * a)).frob();
    if comm > STRUCTURE_TOL * scale * scale {
        return Err(Error::NotCommuting(comm));
    }
    let (na, nb) = (op_norm(a), op_norm(b));
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    let w = common_eigenbasis(a, b)?;
    let common = (0..2).any(|j| {
        let v = w.col(j);
        let close =
            |m: &CMatrix, n: f64| (crate::linalg::vnorm(&m.matvec(&v)) - n).abs() <= 1e-10 * n;
        close(a, na) && close(b, nb)
    });
    if common {
        return Ok(2.0 * na * nb);
    }
    let (mut a2, mut b2) = (hs_norm(a), hs_norm(b));
    let (mut na, mut nb) = (na, nb);
    if a2 / na < b2 / nb {
        std::mem::swap(&mut a2, &mut b2);
        std::mem::swap(&mut na, &mut nb);
    }
    let (a2s, b2s, nas, nbs) = (a2 * a2, b2 * b2, na * na, nb * nb);
    let linear = a2 >= (1.5f64).sqrt() * na && b2s < 3.0 * nbs - nas * nbs / (a2s - nas);
    if linear {
        Ok(2.0 * nb * (a2s - nas).sqrt())
    } else {
        Ok((a2s * nbs + nas * b2s - a2s * b2s) / ((2.0 * nas - a2s) * (2.0 * nbs - b2s)).sqrt())
    }
}

/// Result of the constrained infimum for `T(x) = a x b^* + b x a^*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfAdjointCb {
    pub value: f64,
    pub p: f64,
    pub theta: f64,
    pub r: f64,
    pub s: f64,
    pub t: f64,
    /// Search box upper limit on `p` after any enlargements.
    pub p_max: f64,
    /// Set when the minimizer stayed on the boundary of the enlarged box.
    pub boundary_warning: bool,
}

/// `(r, s, t)` from `(p, theta)`, with `rs - t^2 = 1`.
pub fn rst(p: f64, theta: f64) -> (f64, f64, f64) {
    let ch = 2.0 * p * p - 1.0;
    let sh = 2.0 * p * (p * p - 1.0).max(0.0).sqrt();
    (
        ch + sh * theta.cos(),
        ch - sh * theta.cos(),
        sh * theta.sin(),
    )
}

/// `||r a a^* + s b b^* + 2 t Im(a b^*)||`.
pub fn selfadjoint_objective(a: &CMatrix, b: &CMatrix, r: f64, s: f64, t: f64) -> f64 {
    let im = (a * &b.adjoint()).imaginary_part();
    let m = &(&(a * &a.adjoint()).scale_re(r) + &(b * &b.adjoint()).scale_re(s))
        + &im.scale_re(2.0 * t);
    lambda_max(&m)
}

/// `||T||_cb` for `T(x) = a x b^* + b x a^*` as the infimum over
/// `r, s > 0`, `rs - t^2 = 1` of `||r a a^* + s b b^* + 2t Im(a b^*)||`.
///
/// The hyperboloid is swept in `(p, theta)` with `p` on a log grid over
/// `[1, p_max]`, and the best cell refined by Nelder-Mead in the
/// coordinates `tau (cos theta, sin theta)` where `cosh tau = 2p^2 - 1`.
pub fn selfadjoint_cb_formula(a: &CMatrix, b: &CMatrix) -> Result<SelfAdjointCb> {
    a.check_dim(b.n())?;
    if is_dependent(a, b) {
        return Err(Error::DependentPair);
    }
    let pa = a * &a.adjoint();
    let pb = b * &b.adjoint();
    let im2 = (a * &b.adjoint()).imaginary_part().scale_re(2.0);
    let eval = |tau: f64, theta: f64| {
        let (ch, sh) = (tau.cosh(), tau.sinh());
        let (r, s, t) = (
            ch + sh * theta.cos(),
            ch - sh * theta.cos(),
            sh * theta.sin(),
        );
        lambda_max(&(&(&pa.scale_re(r) + &pb.scale_re(s)) + &im2.scale_re(t)))
    };
    let tau_of = |p: f64| (2.0 * p * p - 1.0).acosh();
    let mut p_max: f64 = 50.0;
    let mut hits = 0;
    loop {
        let (np, nt) = (120, 96);
        let tau_max = tau_of(p_max);
        let mut best = (0.0, 0.0, eval(0.0, 0.0));
        for i in 1..np {
            // p log-spaced on (1, p_max]
            let p = (p_max.ln() * i as f64 / (np - 1) as f64).exp();
            let tau = tau_of(p);
            for j in 0..nt {
                let th = std::f64::consts::TAU * j as f64 / nt as f64;
                let v = eval(tau, th);
                if v < best.2 {
                    best = (tau, th, v);
                }
            }
        }
        let f = |z: &[f64]| {
            let tau = z[0].hypot(z[1]);
            if tau > tau_max {
                return f64::INFINITY;
            }
            eval(tau, z[1].atan2(z[0]))
        };
        let z0 = [best.0 * best.1.cos(), best.0 * best.1.sin()];
        let opts = NelderMeadOptions {
            max_evals: 2000,
            ftol: 1e-16,
            xtol: 1e-13,
        };
        let (z, v) = nelder_mead_restarts(f, &z0, 0.05 * tau_max.max(1.0) / 10.0, 6, opts);
        let (z, v) = if v <= best.2 {
            (z, v)
        } else {
            (z0.to_vec(), best.2)
        };
        let tau = z[0].hypot(z[1]);
        let theta = z[1].atan2(z[0]).rem_euclid(std::f64::consts::TAU);
        let on_boundary = tau >= tau_max * (1.0 - 1e-6);
        if on_boundary && hits < 2 {
            hits += 1;
            p_max *= 2.0;
            continue;
        }
        let p = ((tau.cosh() + 1.0) / 2.0).sqrt();
        let (r, s, t) = rst(p, theta);
        return Ok(SelfAdjointCb {
            value: v,
            p,
            theta,
            r,
            s,
            t,
            p_max,
            boundary_warning: on_boundary,
        });
    }
}

/// `(c1', c2')` realizing a given `(p, theta)`: with `c1 = (a + b)/sqrt 2`,
/// `c2 = (a - b)/sqrt 2`, `c1' = p c1 + q e^{-i theta} c2`,
/// `c2' = q e^{i theta} c1 + p c2`, `q = sqrt(p^2 - 1)`.
pub fn selfadjoint_witness(a: &CMatrix, b: &CMatrix, p: f64, theta: f64) -> (CMatrix, CMatrix) {
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let c1 = (a + b).scale_re(r2);
    let c2 = (a - b).scale_re(r2);
    let q = (p * p - 1.0).max(0.0).sqrt();
    let e = c64(theta.cos(), theta.sin());
    let d1 = &c1.scale_re(p) + &c2.scale(e.conj() * q);
    let d2 = &c1.scale(e * q) + &c2.scale_re(p);
    (d1, d2)
}
