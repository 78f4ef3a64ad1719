//! Joint numerical range of `(a a^*, b_s b_s^*)` for a canonical 2x2 pair,
//! its ellipse model, and the search for a point on or above the hyperbola
//! `4xy = 1 + |lambda|^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan::canonical::{reduce_to_canonical, symmetrize_b, BsData};
use crate::linalg::decomp::hermitian_residual;
use crate::linalg::{c64, eigh, hs_norm, lambda_max, op_norm, vdot, CMatrix, C64};
use crate::optim::golden_section;

const DEGENERATE_TOL: f64 = 1e-12;
/// Relative slack on the product target.
pub const PRODUCT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degeneracy {
    None,
    S12Zero,
    HorizontalLine,
}

/// `alpha11 (x-x0)^2 + 2 alpha12 (x-x0)(y-y0) + (y-y0)^2 + beta = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseModel {
    pub x0: f64,
    pub y0: f64,
    pub alpha11: f64,
    pub alpha12: f64,
    pub beta: f64,
    pub lambda_abs: f64,
    pub degenerate: Degeneracy,
    /// `(|b22|^2 - |b11|^2)/2`, the `sin` coefficient of `y`; equal to
    /// `alpha12 (1 - lambda^2)/2` but kept separately so the
    /// parametrization does not divide by `1 - lambda^2`.
    pub half_diff: f64,
}

impl EllipseModel {
    pub fn residual(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (x - self.x0, y - self.y0);
        self.alpha11 * dx * dx + 2.0 * self.alpha12 * dx * dy + dy * dy + self.beta
    }

    /// Point of the boundary at parameter `omega`; for the degenerate
    /// models this traces the segment that the range collapses to.
    pub fn boundary(&self, omega: f64) -> (f64, f64) {
        let l2 = self.lambda_abs * self.lambda_abs;
        let x = self.x0 + 0.5 * (1.0 - l2) * omega.sin();
        let y = self.y0 - self.half_diff * omega.sin() + (-self.beta).max(0.0).sqrt() * omega.cos();
        (x, y)
    }
}

/// A point `(x, y)` of the joint numerical range, with the unit vector
/// producing it when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JNRPoint {
    pub x: f64,
    pub y: f64,
    pub xi: Option<[C64; 2]>,
}

impl JNRPoint {
    pub fn from_vector(a: &CMatrix, b: &CMatrix, xi: [C64; 2]) -> JNRPoint {
        JNRPoint {
            x: vdot(&a.matvec(&xi), &xi).re,
            y: vdot(&b.matvec(&xi), &xi).re,
            xi: Some(xi),
        }
    }
}

fn check_pair(a: &CMatrix, b: &CMatrix) -> Result<()> {
    a.check_dim(2)?;
    b.check_dim(2)?;
    for m in [a, b] {
        let r = hermitian_residual(m);
        if r > 1e-12 * m.frob().max(1.0) {
            return Err(Error::NotHermitian(r));
        }
    }
    Ok(())
}

/// Range points from `xi = (cos t, e^{i phi} sin t)` with `phi` on a grid
/// of `grid` angles and `t` on a grid of the same spacing over `[0, pi/2]`.
pub fn jnr_sample(a: &CMatrix, b: &CMatrix, grid: usize) -> Result<Vec<JNRPoint>> {
    check_pair(a, b)?;
    let grid = grid.max(4);
    let nt = grid / 4;
    let mut out = Vec::with_capacity((nt + 1) * grid);
    for k in 0..=nt {
        let t = std::f64::consts::FRAC_PI_2 * k as f64 / nt as f64;
        for j in 0..grid {
            let phi = std::f64::consts::TAU * j as f64 / grid as f64;
            let xi = [c64(t.cos(), 0.0), c64(phi.cos(), phi.sin()) * t.sin()];
            out.push(JNRPoint::from_vector(a, b, xi));
        }
    }
    Ok(out)
}

/// Boundary points of the range: for each of `directions` angles `psi`,
/// the point produced by a top eigenvector of `cos(psi) a + sin(psi) b`.
pub fn jnr_boundary(a: &CMatrix, b: &CMatrix, directions: usize) -> Result<Vec<JNRPoint>> {
    check_pair(a, b)?;
    (0..directions.max(1))
        .map(|k| {
            let psi = std::f64::consts::TAU * k as f64 / directions.max(1) as f64;
            let h = &a.scale_re(psi.cos()) + &b.scale_re(psi.sin());
            let v = eigh(&h.hermitian_part())?.1.col(0);
            Ok(JNRPoint::from_vector(a, b, [v[0], v[1]]))
        })
        .collect()
}

/// Ellipse model of the range of `(diag(1, lambda^2), b_s b_s^*)`.
pub fn ellipse_model(lambda_abs: f64, bs: &BsData) -> Result<EllipseModel> {
    if !(0.0..1.0).contains(&lambda_abs) {
        return Err(Error::LambdaOutOfRange(lambda_abs));
    }
    let l2 = lambda_abs * lambda_abs;
    let diff = bs.b22.norm_sqr() - bs.b11.norm_sqr();
    let coupling = bs.diag_coupling();
    let alpha12 = diff / (1.0 - l2);
    let beta = -bs.s12 * bs.s12 * coupling * coupling;
    let degenerate = if bs.s12 <= DEGENERATE_TOL {
        Degeneracy::S12Zero
    } else if coupling <= DEGENERATE_TOL {
        Degeneracy::HorizontalLine
    } else {
        Degeneracy::None
    };
    Ok(EllipseModel {
        x0: 0.5 * (1.0 + l2),
        y0: 0.5 * bs.hs_sq,
        alpha11: alpha12 * alpha12 - 4.0 * beta / ((1.0 - l2) * (1.0 - l2)),
        alpha12,
        beta,
        lambda_abs,
        degenerate,
        half_diff: 0.5 * diff,
    })
}

pub fn ellipse_point(model: &EllipseModel, omega: f64) -> Result<JNRPoint> {
    if model.degenerate != Degeneracy::None {
        return Err(Error::DegenerateModel);
    }
    let (x, y) = model.boundary(omega);
    Ok(JNRPoint { x, y, xi: None })
}

/// How the witness angle was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessBranch {
    /// `|b11| >= |b22|`: the point `(1, mu1^2)`.
    TouchPoint,
    /// `tan omega = tan(theta)/sqrt 2` with `cos^2 theta >= 2 l^2/(1 + l^4)`.
    Theta,
    /// Same angle, in the regime where the bound through `|det b|` applies.
    DetFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub omega: f64,
    pub point: JNRPoint,
    /// `4 x y` at the point.
    pub product: f64,
    pub branch: WitnessBranch,
}

/// The explicit boundary point used to reach the hyperbola. Degenerate
/// models are evaluated on the segment they collapse to.
pub fn witness_omega(bs: &BsData, lambda_abs: f64) -> Result<Witness> {
    let model = ellipse_model(lambda_abs, bs)?;
    let (omega, branch) = if bs.eps12 <= 0.0 {
        (std::f64::consts::FRAC_PI_2, WitnessBranch::TouchPoint)
    } else {
        let omega = bs
            .theta
            .sin()
            .atan2(std::f64::consts::SQRT_2 * bs.theta.cos());
        let l2 = lambda_abs * lambda_abs;
        let branch = if bs.theta.cos().powi(2) >= 2.0 * l2 / (1.0 + l2 * l2) {
            WitnessBranch::Theta
        } else {
            WitnessBranch::DetFallback
        };
        (omega, branch)
    };
    let (x, y) = model.boundary(omega);
    Ok(Witness {
        omega,
        point: JNRPoint { x, y, xi: None },
        product: 4.0 * x * y,
        branch,
    })
}

/// Orders the pair so that `||a||_2/||a|| <= ||b||_2/||b||`; returns whether
/// the two were exchanged.
pub fn order_pair(a: &CMatrix, b: &CMatrix) -> (CMatrix, CMatrix, bool) {
    let ra = hs_norm(a) / op_norm(a);
    let rb = hs_norm(b) / op_norm(b);
    if ra > rb {
        (b.clone(), a.clone(), true)
    } else {
        (a.clone(), b.clone(), false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolaCheck {
    pub passed: bool,
    /// `max 4xy - (1 + lambda^2)` over the range.
    pub margin: f64,
    pub max_product: f64,
    pub target: f64,
    pub lambda_abs: f64,
    /// Parameter of the maximizing boundary point (`None` when the range
    /// is the vertical segment of `|lambda| = 1`).
    pub omega: Option<f64>,
    pub degenerate: Degeneracy,
    pub witness: Option<Witness>,
    pub swapped: bool,
}

/// Normalizes and reduces the pair, then maximizes `4xy` over the range on
/// a `grid`-point parameter sweep refined by golden section, and compares
/// with `1 + |lambda|^2`.
pub fn hyperbola_check(a: &CMatrix, b: &CMatrix, grid: usize) -> Result<HyperbolaCheck> {
    a.check_dim(2)?;
    b.check_dim(2)?;
    if op_norm(a) == 0.0 || op_norm(b) == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let (a, b, swapped) = order_pair(a, b);
    let canon = reduce_to_canonical(&a, &b)?;
    let bs = symmetrize_b(&canon);
    let lambda_abs = canon.lambda_abs();
    let target = 1.0 + lambda_abs * lambda_abs;
    if lambda_abs >= 1.0 - DEGENERATE_TOL {
        // a a^* = I: the range is the segment x = 1
        let top = lambda_max(&(&bs.b_s * &bs.b_s.adjoint()));
        let max_product = 4.0 * top;
        return Ok(HyperbolaCheck {
            passed: max_product >= target * (1.0 - PRODUCT_SLACK),
            margin: max_product - target,
            max_product,
            target,
            lambda_abs,
            omega: None,
            degenerate: Degeneracy::None,
            witness: None,
            swapped,
        });
    }
    let model = ellipse_model(lambda_abs, &bs)?;
    let prod = |w: f64| {
        let (x, y) = model.boundary(w);
        4.0 * x * y
    };
    let n = grid.max(8);
    let h = std::f64::consts::TAU / n as f64;
    let (mut best_w, mut best) = (0.0, f64::NEG_INFINITY);
    for k in 0..n {
        let w = h * k as f64;
        let v = prod(w);
        if v > best {
            best = v;
            best_w = w;
        }
    }
    let (w, v) = golden_section(|w| -prod(w), best_w - h, best_w + h, 1e-12);
    if -v > best {
        best = -v;
        best_w = w;
    }
    let witness = witness_omega(&bs, lambda_abs)?;
    if witness.product > best {
        best = witness.product;
        best_w = witness.omega;
    }
    Ok(HyperbolaCheck {
        passed: best >= target * (1.0 - PRODUCT_SLACK),
        margin: best - target,
        max_product: best,
        target,
        lambda_abs,
        omega: Some(best_w.rem_euclid(std::f64::consts::TAU)),
        degenerate: model.degenerate,
        witness: Some(witness),
        swapped,
    })
}

/// Range matrices `(a a^*, b_s b_s^*)` of a pair after normalization and
/// reduction, with the reduced data.
pub fn range_matrices(a: &CMatrix, b: &CMatrix) -> Result<(CMatrix, CMatrix, BsData, f64)> {
    let canon = reduce_to_canonical(a, b)?;
    let bs = symmetrize_b(&canon);
    let aa = &canon.a_norm * &canon.a_norm.adjoint();
    let bb = &bs.b_s * &bs.b_s.adjoint();
    Ok((aa, bb, bs, canon.lambda_abs()))
}
