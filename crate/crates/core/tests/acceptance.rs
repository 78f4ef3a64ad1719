//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are fixed here and never read from the environment.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use jemo::cli::{cmd_verify, with_workers, RunConfig};
use jemo::exec::Exec;
use jemo::geometry::{
    ellipse_model, jnr_boundary, jnr_sample, order_pair, range_matrices, witness_omega,
};
use jemo::haagerup::{cb_norm_oracle, op_norm_estimate, Budget};
use jemo::jordan::formulas::{diag_branches, diag_commuting_branch};
use jemo::jordan::{
    cb_symmetric_formula, compress_to_2d, diag_jordan_norm, jordan_op, normal_commuting_formula,
    selfadjoint_cb_formula, selfadjoint_op, symmetrize, verify_lower_bounds_with,
};
use jemo::linalg::ensemble::haar_unitary;
use jemo::linalg::{c64, op_norm, seeded_rng, takagi, unitarity_residual, CMatrix, Ensemble};

const INEQ: f64 = 1e-9;
const FORMULA: f64 = 1e-5;

/// Outcome of one criterion: a summary plus the first violation, if any.
struct Criterion {
    id: usize,
    notes: Vec<String>,
    failure: Option<String>,
}

impl Criterion {
    fn new(id: usize) -> Self {
        Criterion {
            id,
            notes: Vec::new(),
            failure: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn report(&self) -> bool {
        let status = if self.failure.is_none() {
            "PASS"
        } else {
            "FAIL"
        };
        let mut line = format!("criterion {}: {status} {}", self.id, self.notes.join("; "));
        if let Some(f) = &self.failure {
            line.push_str(&format!(" | first violation: {f}"));
        }
        println!("{line}");
        self.failure.is_none()
    }
}

fn budget(seed: u64) -> Budget {
    Budget::default().seed(seed).exec(Exec::Sequential)
}

fn cb(a: &CMatrix, b: &CMatrix) -> f64 {
    cb_norm_oracle(&jordan_op(a, b).unwrap(), &budget(0)).value
}

fn op(a: &CMatrix, b: &CMatrix) -> f64 {
    op_norm_estimate(&jordan_op(a, b).unwrap(), &budget(0)).value
}

fn seeds<T: Send>(n: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    Exec::default().map(n, |i| f(i as u64))
}

fn worst(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::INFINITY, f64::min)
}

fn largest(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn lower_bounds() -> (Criterion, Criterion) {
    let (mut c1, mut c2) = (Criterion::new(1), Criterion::new(2));
    let start = Instant::now();
    let certs = seeds(1000, |seed| {
        let (a, b) = Ensemble::Ginibre.pair(2, seed);
        verify_lower_bounds_with(&a, &b, &budget(seed), false).unwrap()
    });
    let elapsed = start.elapsed().as_secs_f64();
    for name in ["m1", "m2", "m3"] {
        let c = if name == "m1" { &mut c1 } else { &mut c2 };
        for cert in &certs {
            let m = cert.margins[name];
            c.check(m >= -INEQ, || format!("seed {} {name} = {m:e}", cert.seed));
        }
        c.note(format!(
            "min {name} = {:.3e}",
            worst(certs.iter().map(|c| c.margins[name]))
        ));
    }
    let e11 = CMatrix::diag_real(&[1.0, 0.0]);
    let e22 = CMatrix::diag_real(&[0.0, 1.0]);
    let eq = verify_lower_bounds_with(&e11, &e22, &budget(0), false)
        .unwrap()
        .margins["m1"];
    c1.check(eq.abs() <= 1e-6, || format!("equality case m1 = {eq:e}"));
    c1.note(format!("equality case |m1| = {:.1e}", eq.abs()));
    c1.check(elapsed <= 300.0, || format!("runtime {elapsed:.1} s"));
    c1.note(format!("1000 pairs with cb in {elapsed:.1} s"));
    (c1, c2)
}

fn symmetric_reps() -> Criterion {
    let mut c = Criterion::new(3);
    let rows = seeds(1000, |seed| {
        let (a, b) = Ensemble::Ginibre.pair(2, seed);
        let rep = symmetrize(&a, &b, &budget(seed)).unwrap();
        let r = rep.residuals(&a, &b);
        let t = takagi(&rep.alpha).unwrap();
        let tak = (&t.reconstruct() - &rep.alpha)
            .frob()
            .max(unitarity_residual(&t.u));
        (seed, r, tak)
    });
    for (seed, r, tak) in &rows {
        c.check(r.tensor <= 1e-9, || {
            format!("seed {seed} tensor {:e}", r.tensor)
        });
        c.check(r.coefficients <= 1e-9, || {
            format!("seed {seed} coefficients {:e}", r.coefficients)
        });
        c.check(r.balance <= 1e-6, || {
            format!("seed {seed} balance {:e}", r.balance)
        });
        c.check(*tak <= 1e-10, || format!("seed {seed} takagi {tak:e}"));
    }
    c.note(format!(
        "max tensor {:.1e}, coefficients {:.1e}, balance {:.1e}, takagi {:.1e}",
        largest(rows.iter().map(|r| r.1.tensor)),
        largest(rows.iter().map(|r| r.1.coefficients)),
        largest(rows.iter().map(|r| r.1.balance)),
        largest(rows.iter().map(|r| r.2)),
    ));
    c
}

fn symmetric_formula() -> Criterion {
    let mut c = Criterion::new(4);
    let devs = seeds(100, |seed| {
        let (a, b) = Ensemble::ComplexSymmetric.pair(2, seed);
        let f = cb_symmetric_formula(&a, &b).unwrap();
        ((f - cb(&a, &b)).abs(), (f - op(&a, &b)).abs())
    });
    for (seed, (dc, dop)) in devs.iter().enumerate() {
        c.check(*dc <= FORMULA, || {
            format!("seed {seed} |formula - cb| = {dc:e}")
        });
        c.check(*dop <= FORMULA, || {
            format!("seed {seed} |formula - op| = {dop:e}")
        });
    }
    c.note(format!(
        "max |f - cb| = {:.1e}, max |f - op| = {:.1e}",
        largest(devs.iter().map(|d| d.0)),
        largest(devs.iter().map(|d| d.1))
    ));
    c
}

fn diagonal_formula() -> Criterion {
    let mut c = Criterion::new(5);
    let one = c64(1.0, 0.0);
    let devs = seeds(400, |k| {
        let (l, m) = ((k / 20) as f64 / 19.0, (k % 20) as f64 / 19.0);
        let (a, b) = (
            CMatrix::diag(&[one, c64(l, 0.0)]),
            CMatrix::diag(&[c64(m, 0.0), one]),
        );
        let f = diag_jordan_norm([one, c64(l, 0.0)], [c64(m, 0.0), one]).unwrap();
        (l, m, (f - cb(&a, &b)).abs())
    });
    for (l, m, d) in &devs {
        c.check(*d <= FORMULA, || {
            format!("(|l2|, |m1|) = ({l}, {m}) deviation {d:e}")
        });
    }
    c.note(format!(
        "20x20 grid max |f - cb| = {:.1e}",
        largest(devs.iter().map(|d| d.2))
    ));
    // both branches on the curve |m1|^2 = 2 - |l2|^-2
    let mut gap = 0.0f64;
    for k in 0..=200 {
        let l = FRAC_1_SQRT_2 + (1.0 - FRAC_1_SQRT_2) * k as f64 / 201.0;
        let m = (2.0 - 1.0 / (l * l)).max(0.0).sqrt();
        let (linear, quotient) = diag_branches(l, m);
        gap = gap.max((linear - quotient).abs());
        if k % 40 == 0 {
            let (a, b) = (CMatrix::diag_real(&[1.0, l]), CMatrix::diag_real(&[m, 1.0]));
            let (f, _) = diag_commuting_branch(one, c64(l, 0.0), c64(m, 0.0), one).unwrap();
            let d = (f - cb(&a, &b)).abs();
            c.check(d <= FORMULA, || {
                format!("boundary point l = {l} deviation {d:e}")
            });
        }
    }
    c.check(gap <= 1e-9, || format!("branch gap {gap:e}"));
    c.note(format!("branch gap {gap:.1e}"));
    for (l, m, expected) in [(0.9, 0.3, 1.8), (0.5, 0.2, 0.99 / 0.72f64.sqrt())] {
        let f = diag_jordan_norm([one, c64(l, 0.0)], [c64(m, 0.0), one]).unwrap();
        let o = cb(
            &CMatrix::diag_real(&[1.0, l]),
            &CMatrix::diag_real(&[m, 1.0]),
        );
        c.check((f - expected).abs() <= 1e-12, || {
            format!("spot ({l}, {m}) = {f}")
        });
        c.check((o - expected).abs() <= FORMULA, || {
            format!("spot ({l}, {m}) cb = {o}")
        });
    }
    c.note("spot values 1.8 and 0.99/sqrt(0.72) reproduced".into());
    c
}

fn commuting() -> Criterion {
    let mut c = Criterion::new(6);
    let devs = seeds(100, |seed| {
        let (a, b) = Ensemble::CommutingPair.pair(2, seed);
        (cb(&a, &b) - op(&a, &b)).abs()
    });
    for (seed, d) in devs.iter().enumerate() {
        c.check(*d <= FORMULA, || format!("seed {seed} |cb - op| = {d:e}"));
    }
    c.note(format!(
        "max |cb - op| = {:.1e}",
        largest(devs.iter().copied())
    ));
    // a common norming eigenvector: the formula is exactly 2 ||a|| ||b||
    let mut rng = seeded_rng(6, 0);
    for k in 0..20 {
        let u = haar_unitary(&mut rng, 2);
        let conj = |d: &[f64]| &(&u * &CMatrix::diag_real(d)) * &u.adjoint();
        let s = 1.0 + k as f64 / 7.0;
        let (a, b) = (conj(&[s, 0.4]), conj(&[-2.0, 0.3 * s]));
        let f = normal_commuting_formula(&a, &b).unwrap();
        let exact = 2.0 * op_norm(&a) * op_norm(&b);
        c.check(f == exact, || {
            format!("common vector case {k}: {f} != {exact}")
        });
        let o = cb(&a, &b);
        c.check((o - f).abs() <= FORMULA, || {
            format!("common vector case {k}: cb {o}")
        });
    }
    c.note("common-vector branch exact on 20 pairs".into());
    c
}

fn selfadjoint() -> Criterion {
    let mut c = Criterion::new(7);
    let devs = seeds(100, |seed| {
        let (a, b) = Ensemble::SelfadjointJordanPair.pair(2, seed);
        let f = selfadjoint_cb_formula(&a, &b).unwrap().value;
        (f - cb_norm_oracle(&selfadjoint_op(&a, &b).unwrap(), &budget(seed)).value).abs()
    });
    for (seed, d) in devs.iter().enumerate() {
        c.check(*d <= FORMULA, || {
            format!("seed {seed} |formula - cb| = {d:e}")
        });
    }
    c.note(format!(
        "max |f - cb| = {:.1e}",
        largest(devs.iter().copied())
    ));
    let spots = [
        (
            CMatrix::diag_real(&[1.0, 0.0]),
            CMatrix::diag_real(&[0.0, 1.0]),
            1.0,
        ),
        (CMatrix::identity(2), CMatrix::diag_real(&[1.0, -1.0]), 2.0),
    ];
    for (a, b, expected) in spots {
        let f = selfadjoint_cb_formula(&a, &b).unwrap().value;
        c.check((f - expected).abs() <= 1e-9, || {
            format!("spot value {f} != {expected}")
        });
    }
    c.note("spot values 1 and 2 reproduced".into());
    c
}

fn geometry() -> Criterion {
    let mut c = Criterion::new(8);
    let rows = seeds(1000, |seed| {
        let (a, b) = Ensemble::Ginibre.pair(2, seed);
        let (a, b, _) = order_pair(&a, &b);
        let (aa, bb, bs, l) = range_matrices(&a, &b).unwrap();
        let model = ellipse_model(l, &bs).unwrap();
        let directions = if seed < 100 { 10_000 } else { 1000 };
        let residual = largest(
            jnr_boundary(&aa, &bb, directions)
                .unwrap()
                .iter()
                .map(|p| model.residual(p.x, p.y).abs()),
        );
        let pts = jnr_sample(&aa, &bb, 40).unwrap();
        let min_x = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let max_x = pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        let touch = (min_x - l * l).abs().max((max_x - 1.0).abs());
        let w = witness_omega(&bs, l).unwrap();
        (seed, residual, touch, w.product / (1.0 + l * l), w.branch)
    });
    for (seed, residual, touch, ratio, _) in &rows {
        c.check(*residual <= 1e-6, || {
            format!("seed {seed} boundary residual {residual:e}")
        });
        c.check(*touch <= 1e-9, || {
            format!("seed {seed} touch point error {touch:e}")
        });
        c.check(*ratio >= 1.0 - 1e-9, || {
            format!("seed {seed} witness ratio {ratio}")
        });
    }
    let branches: std::collections::BTreeSet<String> =
        rows.iter().map(|r| format!("{:?}", r.4)).collect();
    c.note(format!(
        "max residual {:.1e}, max touch error {:.1e}, min 4xy/(1+l^2) = {:.6}, branches {branches:?}",
        largest(rows.iter().map(|r| r.1)),
        largest(rows.iter().map(|r| r.2)),
        worst(rows.iter().map(|r| r.3)),
    ));
    c
}

fn compression() -> Criterion {
    let mut c = Criterion::new(9);
    let eps = 1e-6;
    let rows = seeds(100, |seed| {
        let (a, b) = Ensemble::Ginibre.pair(4, seed);
        let p = compress_to_2d(&a, &b, eps).unwrap();
        let (na, nb, na2, nb2) = (op_norm(&a), op_norm(&b), op_norm(&p.a2), op_norm(&p.b2));
        let big = op_norm_estimate(&jordan_op(&a, &b).unwrap(), &budget(seed)).value;
        let small = op_norm_estimate(&jordan_op(&p.a2, &p.b2).unwrap(), &budget(seed)).value;
        (
            seed,
            na2 - (na - eps),
            nb2 - (nb - eps),
            big + 1e-8 - small,
            small - na2 * nb2,
            big - (na - eps) * (nb - eps),
        )
    });
    for (seed, ma, mb, mono, dim2, cert) in &rows {
        c.check(*ma >= 0.0 && *mb >= 0.0, || {
            format!("seed {seed} compressed norms {ma:e} {mb:e}")
        });
        c.check(*mono >= 0.0, || {
            format!(
                "seed {seed} compression raised the norm by {:e}",
                1e-8 - mono
            )
        });
        c.check(*dim2 >= -INEQ, || {
            format!("seed {seed} dim-2 bound {dim2:e}")
        });
        c.check(*cert >= -INEQ, || {
            format!("seed {seed} certified bound {cert:e}")
        });
    }
    c.note(format!(
        "min margins: norms {:.1e}, monotone {:.1e}, dim-2 {:.1e}, certified {:.1e}",
        worst(rows.iter().map(|r| r.1.min(r.2))),
        worst(rows.iter().map(|r| r.3)),
        worst(rows.iter().map(|r| r.4)),
        worst(rows.iter().map(|r| r.5)),
    ));
    c
}

fn determinism() -> Criterion {
    let mut c = Criterion::new(10);
    let mut cfg = RunConfig::new("verify");
    cfg.trials = 100;
    cfg.seed = 2026;
    let first = cmd_verify(&cfg).unwrap().without_timing();
    let second = cmd_verify(&cfg).unwrap().without_timing();
    let one = with_workers(Some(1), || cmd_verify(&cfg).unwrap()).without_timing();
    let many = with_workers(Some(8), || cmd_verify(&cfg).unwrap()).without_timing();
    c.check(first == second, || "two runs differ".into());
    c.check(one == many, || "1 and 8 workers differ".into());
    c.check(first == one, || "default pool differs from 1 worker".into());
    c.check(first.aggregate.failures == 0, || {
        format!("failing seeds {:?}", first.aggregate.failing_seeds)
    });
    c.note(format!(
        "{} certificates identical across runs and 1 vs 8 workers",
        first.certificates.len()
    ));
    c
}

fn main() {
    let start = Instant::now();
    let (c1, c2) = lower_bounds();
    let all = [
        c1,
        c2,
        symmetric_reps(),
        symmetric_formula(),
        diagonal_formula(),
        commuting(),
        selfadjoint(),
        geometry(),
        compression(),
        determinism(),
    ];
    let passed = all.iter().map(Criterion::report).filter(|&ok| ok).count();
    println!(
        "acceptance: {passed}/{} passed in {:.1} s",
        all.len(),
        start.elapsed().as_secs_f64()
    );
    if passed != all.len() {
        std::process::exit(1);
    }
}
