use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::report::{fmt17, RunConfig, RunReport};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{
    ellipse_model, hyperbola_check, order_pair, range_matrices, EllipseModel, HyperbolaCheck,
};
use crate::haagerup::{cb_norm_oracle, haagerup_norm, op_norm_estimate, Budget, NormCertificate};
use crate::jordan::{
    cb_symmetric_formula, compress_to_2d, dependent_norm, diag_jordan_norm, is_dependent,
    jordan_op, normal_commuting_formula, selfadjoint_cb_formula, selfadjoint_op,
    verify_lower_bounds_with,
};
use crate::linalg::{lambda_max, op_norm, CMatrix, Ensemble};

const REFINE_STEPS: usize = 500;
const HYPERBOLA_GRID: usize = 10_000;
// allowed increase of the estimated norm under compression
const COMPRESSION_SLACK: f64 = 1e-8;

/// Budget for one case; `exec` is sequential inside a parallel trial loop.
pub fn case_budget(cfg: &RunConfig, seed: u64, exec: Exec) -> Budget {
    Budget {
        starts: cfg.budget,
        steps: REFINE_STEPS,
        seed,
        exec,
    }
}

fn trial_seed(cfg: &RunConfig, i: usize) -> u64 {
    cfg.seed.wrapping_add(i as u64)
}

/// Slack of a named margin under the configured tolerances.
fn slack(cfg: &RunConfig, name: &str) -> f64 {
    match name {
        "sandwich" => cfg.tol("sandwich"),
        "hyperbola" => cfg.tol("product"),
        "monotone" => COMPRESSION_SLACK,
        "formula" => 0.0,
        _ => cfg.tol("inequality"),
    }
}

fn rejudge(cfg: &RunConfig, cert: &mut NormCertificate) {
    cert.passed = cert.margins.iter().all(|(k, v)| *v >= -slack(cfg, k));
}

fn failed_case(case: &str, seed: u64, e: &Error) -> NormCertificate {
    let mut c = NormCertificate::new(format!("{case}: {e}"), seed, 0.0, CMatrix::zeros(1));
    c.passed = false;
    c
}

fn run_trials(
    cfg: &RunConfig,
    case: &str,
    f: impl Fn(u64) -> Result<NormCertificate> + Sync + Send,
) -> Vec<NormCertificate> {
    Exec::default().map(cfg.trials, |i| {
        let seed = trial_seed(cfg, i);
        match f(seed) {
            Ok(mut c) => {
                rejudge(cfg, &mut c);
                c
            }
            Err(e) => failed_case(case, seed, &e),
        }
    })
}

/// Operator norm of `T_{a,b}` between the oracle and the Haagerup bound.
pub fn cmd_norm(cfg: &RunConfig, a: &CMatrix, b: &CMatrix) -> Result<RunReport> {
    let start = Instant::now();
    let budget = case_budget(cfg, cfg.seed, Exec::default());
    let t = jordan_op(a, b)?;
    let op = op_norm_estimate(&t, &budget);
    let h = haagerup_norm(&t, &budget)?;
    let mut c = NormCertificate::new("norm", cfg.seed, op.value, op.witness);
    if is_dependent(a, b) {
        c = c.with_formula(dependent_norm(a, b));
    }
    c.margin("sandwich", h.value - c.lower, 0.0);
    c = c.with_upper(h.value, h.rep);
    c.value("a_norm", op_norm(a));
    c.value("b_norm", op_norm(b));
    rejudge(cfg, &mut c);
    Ok(RunReport::new(
        cfg.clone(),
        vec![c],
        start.elapsed().as_secs_f64(),
    ))
}

/// CB norm oracle, compared with the operator norm oracle.
pub fn cmd_cbnorm(cfg: &RunConfig, a: &CMatrix, b: &CMatrix) -> Result<RunReport> {
    let start = Instant::now();
    let budget = case_budget(cfg, cfg.seed, Exec::default());
    let t = jordan_op(a, b)?;
    let cb = cb_norm_oracle(&t, &budget);
    let op = op_norm_estimate(&t, &budget);
    let mut c = NormCertificate::new("cbnorm", cfg.seed, cb.value, cb.witness);
    c.value("op", op.value);
    c.margin("cb_ge_op", cb.value - op.value, 0.0);
    rejudge(cfg, &mut c);
    Ok(RunReport::new(
        cfg.clone(),
        vec![c],
        start.elapsed().as_secs_f64(),
    ))
}

/// Haagerup norm of `a (x) b + b (x) a` with its optimal representation,
/// checked against the CB norm oracle from below.
pub fn cmd_haagerup(cfg: &RunConfig, a: &CMatrix, b: &CMatrix) -> Result<RunReport> {
    let start = Instant::now();
    let budget = case_budget(cfg, cfg.seed, Exec::default());
    let t = jordan_op(a, b)?;
    let cb = cb_norm_oracle(&t, &budget);
    let h = haagerup_norm(&t, &budget)?;
    let mut c = NormCertificate::new("haagerup", cfg.seed, cb.value, cb.witness);
    c.margin("sandwich", h.value - cb.value, 0.0);
    c.value("left_norm", h.left_norm);
    c.value("right_norm", h.right_norm);
    let mut c = c.with_upper(h.value, h.rep);
    rejudge(cfg, &mut c);
    Ok(RunReport::new(
        cfg.clone(),
        vec![c],
        start.elapsed().as_secs_f64(),
    ))
}

/// Lower bounds and the hyperbola check on seeded 2x2 Ginibre pairs.
pub fn cmd_verify(cfg: &RunConfig) -> Result<RunReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let start = Instant::now();
    let certs = run_trials(cfg, "ginibre-2x2", |seed| {
        let (a, b) = Ensemble::Ginibre.pair(2, seed);
        let mut c =
            verify_lower_bounds_with(&a, &b, &case_budget(cfg, seed, Exec::Sequential), true)?;
        c.case = "ginibre-2x2".into();
        let h = hyperbola_check(&a, &b, HYPERBOLA_GRID)?;
        c.margin("hyperbola", h.margin / h.target, 0.0);
        c.value("lambda", h.lambda_abs);
        Ok(c)
    });
    Ok(RunReport::new(
        cfg.clone(),
        certs,
        start.elapsed().as_secs_f64(),
    ))
}

fn formula_case(
    cfg: &RunConfig,
    family: &str,
    seed: u64,
    formula: Option<f64>,
    cb: f64,
    witness: CMatrix,
    op: Option<f64>,
) -> NormCertificate {
    let mut c = NormCertificate::new(family, seed, cb, witness);
    let mut dev = 0.0f64;
    if let Some(f) = formula {
        c = c.with_formula(f);
        dev = dev.max((f - cb).abs());
        if let Some(op) = op {
            dev = dev.max((f - op).abs());
        }
    } else if let Some(op) = op {
        dev = dev.max((cb - op).abs());
    }
    if let Some(op) = op {
        c.value("op", op);
    }
    c.value("deviation", dev);
    c.margin("formula", cfg.tol("formula") - dev, 0.0);
    c
}

/// Every closed form against the oracles on its own ensemble.
pub fn cmd_formulas(cfg: &RunConfig) -> Result<RunReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let start = Instant::now();
    let mut certs = Vec::new();
    let b = |seed| case_budget(cfg, seed, Exec::Sequential);
    certs.extend(run_trials(cfg, "symmetric", |seed| {
        let (x, y) = Ensemble::ComplexSymmetric.pair(2, seed);
        let f = cb_symmetric_formula(&x, &y)?;
        let t = jordan_op(&x, &y)?;
        let cb = cb_norm_oracle(&t, &b(seed));
        let op = op_norm_estimate(&t, &b(seed)).value;
        Ok(formula_case(
            cfg,
            "symmetric",
            seed,
            Some(f),
            cb.value,
            cb.witness,
            Some(op),
        ))
    }));
    certs.extend(run_trials(cfg, "commuting", |seed| {
        let (x, y) = Ensemble::CommutingPair.pair(2, seed);
        let t = jordan_op(&x, &y)?;
        let cb = cb_norm_oracle(&t, &b(seed));
        let op = op_norm_estimate(&t, &b(seed)).value;
        Ok(formula_case(
            cfg,
            "commuting",
            seed,
            None,
            cb.value,
            cb.witness,
            Some(op),
        ))
    }));
    certs.extend(run_trials(cfg, "normal-commuting", |seed| {
        let (x, y) = Ensemble::CommutingNormalPair.pair(2, seed);
        let f = normal_commuting_formula(&x, &y)?;
        let t = jordan_op(&x, &y)?;
        let cb = cb_norm_oracle(&t, &b(seed));
        Ok(formula_case(
            cfg,
            "normal-commuting",
            seed,
            Some(f),
            cb.value,
            cb.witness,
            None,
        ))
    }));
    certs.extend(run_trials(cfg, "diagonal", |seed| {
        let (x, y) = Ensemble::Diagonal.pair(2, seed);
        let f = diag_jordan_norm([x[(0, 0)], x[(1, 1)]], [y[(0, 0)], y[(1, 1)]])?;
        let cb = cb_norm_oracle(&jordan_op(&x, &y)?, &b(seed));
        Ok(formula_case(
            cfg,
            "diagonal",
            seed,
            Some(f),
            cb.value,
            cb.witness,
            None,
        ))
    }));
    certs.extend(run_trials(cfg, "selfadjoint", |seed| {
        let (x, y) = Ensemble::SelfadjointJordanPair.pair(2, seed);
        let f = selfadjoint_cb_formula(&x, &y)?;
        let cb = cb_norm_oracle(&selfadjoint_op(&x, &y)?, &b(seed));
        let mut c = formula_case(
            cfg,
            "selfadjoint",
            seed,
            Some(f.value),
            cb.value,
            cb.witness,
            None,
        );
        if f.boundary_warning {
            c.value("boundary_warning", 1.0);
        }
        Ok(c)
    }));
    let mut deviations = BTreeMap::new();
    for c in &certs {
        let family = c.case.split(':').next().unwrap_or(&c.case).to_string();
        let dev = c.values.get("deviation").copied().unwrap_or(f64::INFINITY);
        let e = deviations.entry(family).or_insert(0.0f64);
        *e = e.max(dev);
    }
    let mut report = RunReport::new(cfg.clone(), certs, start.elapsed().as_secs_f64());
    report.deviations = deviations;
    Ok(report)
}

fn compress_case(
    cfg: &RunConfig,
    a: &CMatrix,
    b: &CMatrix,
    seed: u64,
    exec: Exec,
) -> Result<NormCertificate> {
    let eps = cfg.tol("eps");
    let c = compress_to_2d(a, b, eps)?;
    let budget = case_budget(cfg, seed, exec);
    let op = op_norm_estimate(&jordan_op(a, b)?, &budget);
    let op2 = op_norm_estimate(&jordan_op(&c.a2, &c.b2)?, &budget).value;
    let (na, nb) = (op_norm(a), op_norm(b));
    let (na2, nb2) = (op_norm(&c.a2), op_norm(&c.b2));
    let mut cert = NormCertificate::new("compress", seed, op.value, op.witness);
    cert.value("compressed", op2);
    cert.margin("a_norm", na2 - (na - eps), 0.0);
    cert.margin("b_norm", nb2 - (nb - eps), 0.0);
    cert.margin("monotone", op.value - op2, 0.0);
    cert.margin("dim2", op2 - na2 * nb2, 0.0);
    cert.margin("certified", op.value - (na - eps) * (nb - eps), 0.0);
    Ok(cert)
}

/// Compression to dimension two of a given pair or of seeded 4x4 pairs.
pub fn cmd_compress(cfg: &RunConfig, pair: Option<(&CMatrix, &CMatrix)>) -> Result<RunReport> {
    let start = Instant::now();
    let certs = match pair {
        Some((a, b)) => {
            let mut c = compress_case(cfg, a, b, cfg.seed, Exec::default())?;
            rejudge(cfg, &mut c);
            vec![c]
        }
        None => {
            if cfg.trials == 0 {
                return Err(Error::InvalidArgument("trials must be at least 1".into()));
            }
            run_trials(cfg, "compress", |seed| {
                let (a, b) = Ensemble::Ginibre.pair(4, seed);
                compress_case(cfg, &a, &b, seed, Exec::Sequential)
            })
        }
    };
    Ok(RunReport::new(
        cfg.clone(),
        certs,
        start.elapsed().as_secs_f64(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipseRow {
    pub omega: f64,
    pub x: f64,
    pub y: f64,
    pub four_xy: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipseReport {
    pub version: String,
    pub config: RunConfig,
    pub lambda_abs: f64,
    /// `none`, `s12-zero`, `horizontal-line`, or `vertical-segment` when
    /// `|lambda| = 1`.
    pub degenerate: String,
    pub model: Option<EllipseModel>,
    pub check: HyperbolaCheck,
    pub max_residual: f64,
    pub rows: Vec<EllipseRow>,
}

impl EllipseReport {
    pub fn passed(&self) -> bool {
        self.check.passed && self.max_residual <= self.config.tol("residual")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,x,y,four_xy,residual\n");
        if self.degenerate != "none" {
            let _ = writeln!(out, "# degenerate,{}", self.degenerate);
        }
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(r.omega),
                fmt17(r.x),
                fmt17(r.y),
                fmt17(r.four_xy),
                fmt17(r.residual)
            );
        }
        out
    }
}

/// Boundary of the joint numerical range on a parameter grid, with the
/// ellipse equation residual and the product `4xy` at each point.
pub fn cmd_ellipse_report(cfg: &RunConfig, a: &CMatrix, b: &CMatrix) -> Result<EllipseReport> {
    a.check_dim(2)?;
    b.check_dim(2)?;
    if cfg.grid == 0 {
        return Err(Error::InvalidArgument("grid must be at least 1".into()));
    }
    let check = hyperbola_check(a, b, HYPERBOLA_GRID)?;
    let (a, b, _) = order_pair(a, b);
    let (_, bb, bs, lambda_abs) = range_matrices(&a, &b)?;
    let omegas = (0..cfg.grid).map(|k| std::f64::consts::TAU * k as f64 / cfg.grid as f64);
    let row = |omega: f64, x: f64, y: f64, residual: f64| EllipseRow {
        omega,
        x,
        y,
        four_xy: 4.0 * x * y,
        residual,
    };
    let (model, degenerate, rows) = match ellipse_model(lambda_abs, &bs) {
        Ok(m) => {
            let rows: Vec<EllipseRow> = omegas
                .map(|w| {
                    let (x, y) = m.boundary(w);
                    row(w, x, y, m.residual(x, y))
                })
                .collect();
            let tag = serde_json::to_value(m.degenerate).expect("tag serializes");
            (Some(m), tag.as_str().unwrap_or("none").to_string(), rows)
        }
        Err(Error::LambdaOutOfRange(_)) => {
            // a a^* = I: the range is the segment x = 1 between the
            // eigenvalues of b_s b_s^*
            let top = lambda_max(&bb);
            let bottom = -lambda_max(&bb.scale_re(-1.0));
            let (mid, half) = (0.5 * (top + bottom), 0.5 * (top - bottom));
            let rows: Vec<EllipseRow> = omegas
                .map(|w| row(w, 1.0, mid + half * w.sin(), 0.0))
                .collect();
            (None, "vertical-segment".to_string(), rows)
        }
        Err(e) => return Err(e),
    };
    let max_residual = rows
        .iter()
        .map(|r: &EllipseRow| r.residual.abs())
        .fold(0.0, f64::max);
    Ok(EllipseReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        lambda_abs,
        degenerate,
        model,
        check,
        max_residual,
        rows,
    })
}
