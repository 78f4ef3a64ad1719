//! Derivative-free minimizers: golden-section search, a global grid scan
//! with golden refinement, and Nelder-Mead.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm);
    [(x1, f1), (x2, f2), (xm, fm)]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

/// Scans `points` equally spaced abscissae on `[lo, hi]` and refines the
/// best one by golden-section search on its bracketing interval. No
/// unimodality is assumed for the scan.
pub fn grid_then_golden(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> (f64, f64) {
    assert!(points >= 2);
    let h = (hi - lo) / (points - 1) as f64;
    let (mut best_i, mut best_f) = (0, f64::INFINITY);
    for i in 0..points {
        let v = f(lo + h * i as f64);
        if v < best_f {
            best_f = v;
            best_i = i;
        }
    }
    let a = lo + h * best_i.saturating_sub(1) as f64;
    let b = (lo + h * (best_i + 1) as f64).min(hi);
    let (x, fx) = golden_section(&f, a, b, tol);
    if fx <= best_f {
        (x, fx)
    } else {
        (lo + h * best_i as f64, best_f)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop when the spread of simplex values falls below this.
    pub ftol: f64,
    /// Stop when the simplex diameter falls below this.
    pub xtol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_evals: 4000,
            ftol: 1e-15,
            xtol: 1e-13,
        }
    }
}

/// Nelder-Mead simplex minimization from `x0` with initial edge `step`.
/// Returns the best vertex and its value.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    opts: NelderMeadOptions,
) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let mut evals = d + 1;
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        let diam = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.ftol * (1.0 + simplex[0].1.abs()) && diam <= opts.xtol.max(1e-300) {
            break;
        }
        if diam <= 1e-15 {
            break;
        }
        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / d as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-alpha);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-gamma);
            let fe = f(&xe);
            evals += 1;
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[d].1 {
                let xc = along(-rho);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(rho);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, fx) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + sigma * (*xi - bi);
                    }
                    *fx = f(x);
                }
                evals += d;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Nelder-Mead restarted from its own result with a shrinking step until
/// the value stops improving.
pub fn nelder_mead_restarts(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    restarts: usize,
    opts: NelderMeadOptions,
) -> (Vec<f64>, f64) {
    let (mut x, mut fx) = nelder_mead(&f, x0, step, opts);
    let mut s = step;
    for _ in 0..restarts {
        s = (s * 0.3).max(1e-9);
        let (y, fy) = nelder_mead(&f, &x, s, opts);
        let improved = fy < fx - 1e-16 * (1.0 + fx.abs());
        if fy <= fx {
            x = y;
            fx = fy;
        }
        if !improved && s <= 1e-6 {
            break;
        }
    }
    (x, fx)
}
