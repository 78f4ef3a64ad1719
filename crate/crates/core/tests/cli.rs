use std::io::Write;

use jemo::cli::{cmd_verify, run, with_workers, RunConfig, RunReport};

fn jemo(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("jemo").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn pair_file(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> tempfile::NamedTempFile {
    let m = |x: [[f64; 2]; 2]| format!("{{\"n\":2,\"re\":{x:?},\"im\":[[0.0,0.0],[0.0,0.0]]}}");
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{{\"a\":{},\"b\":{}}}", m(a), m(b)).unwrap();
    f
}

fn path(f: &tempfile::NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

#[test]
fn norm_of_identity_pair() {
    let f = pair_file([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]);
    let (code, out, _) = jemo(&["norm", "--input", path(&f)]);
    assert_eq!(code, 0);
    let r = RunReport::from_json(&out).unwrap();
    let c = &r.certificates[0];
    assert!((c.lower - 2.0).abs() < 1e-12);
    assert!((c.upper.unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn norm_of_diagonal_units() {
    let f = pair_file([[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]);
    let (code, out, _) = jemo(&["norm", "--input", path(&f), "--budget", "16"]);
    assert_eq!(code, 0);
    let r = RunReport::from_json(&out).unwrap();
    assert!((r.certificates[0].lower - 1.0).abs() < 1e-12);
}

#[test]
fn other_single_pair_commands() {
    let f = pair_file([[1.0, 2.0], [0.0, 1.0]], [[0.0, 0.5], [1.0, 0.0]]);
    for cmd in ["cbnorm", "haagerup", "compress"] {
        let (code, out, err) = jemo(&[cmd, "--input", path(&f), "--budget", "8"]);
        assert_eq!(code, 0, "{cmd}: {err}");
        assert!(RunReport::from_json(&out).unwrap().certificates[0].passed);
    }
}

#[test]
fn malformed_input_is_a_usage_error() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{{\"a\": [1, 2").unwrap();
    let (code, out, err) = jemo(&["norm", "--input", path(&f)]);
    assert_eq!(code, 2);
    assert!(out.is_empty() && !err.is_empty());
    let (code, _, err) = jemo(&["norm", "--input", "/nonexistent/pair.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"));
    // a 2x2 and a 3x3 matrix
    let mut g = tempfile::NamedTempFile::new().unwrap();
    write!(
        g,
        "[{{\"n\":2,\"re\":[[1,0],[0,1]],\"im\":[[0,0],[0,0]]}},{{\"n\":3,\"re\":[[1,0,0],[0,1,0],[0,0,1]],\"im\":[[0,0,0],[0,0,0],[0,0,0]]}}]"
    )
    .unwrap();
    assert_eq!(jemo(&["norm", "--input", path(&g)]).0, 2);
}

#[test]
fn usage_errors() {
    assert_eq!(jemo(&["verify", "--trials", "0"]).0, 2);
    assert_eq!(jemo(&["verify", "--budget", "0"]).0, 2);
    assert_eq!(jemo(&["verify", "--tol", "bogus=1"]).0, 2);
    assert_eq!(jemo(&["verify", "--tol", "formula"]).0, 2);
    assert_eq!(jemo(&["verify", "--tol", "formula=abc"]).0, 2);
    assert_eq!(jemo(&["frobnicate"]).0, 2);
    assert_eq!(jemo(&["verify", "--format", "xml"]).0, 2);
    assert_eq!(jemo(&["--help"]).0, 0);
}

#[test]
fn verify_passes_and_is_deterministic() {
    let args = ["verify", "--trials", "100", "--seed", "7"];
    let (code, first, _) = jemo(&args);
    assert_eq!(code, 0);
    let (_, second, _) = jemo(&args);
    let (r1, r2) = (
        RunReport::from_json(&first).unwrap(),
        RunReport::from_json(&second).unwrap(),
    );
    assert_eq!(r1.aggregate.failures, 0);
    assert_eq!(r1.certificates.len(), 100);
    assert_eq!(r1.without_timing(), r2.without_timing());
    assert_eq!(r1.without_timing().to_json(), r2.without_timing().to_json());
}

#[test]
fn verify_does_not_depend_on_worker_count() {
    let mut cfg = RunConfig::new("verify");
    cfg.trials = 6;
    cfg.budget = 8;
    cfg.seed = 11;
    let one = with_workers(Some(1), || cmd_verify(&cfg).unwrap());
    let four = with_workers(Some(4), || cmd_verify(&cfg).unwrap());
    assert_eq!(one.without_timing(), four.without_timing());
}

#[test]
fn report_json_round_trips() {
    let mut cfg = RunConfig::new("verify");
    cfg.trials = 3;
    cfg.budget = 8;
    let r = cmd_verify(&cfg).unwrap();
    assert_eq!(RunReport::from_json(&r.to_json()).unwrap(), r);
}

#[test]
fn impossible_tolerance_reports_violation() {
    // a negative slack is rejected, but a zero formula tolerance cannot be met
    let (code, _, err) = jemo(&[
        "formulas",
        "--trials",
        "2",
        "--budget",
        "8",
        "--tol",
        "formula=0",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("failing seed"));
}

#[test]
fn formulas_within_tolerance() {
    let (code, out, err) = jemo(&["formulas", "--trials", "4", "--budget", "16"]);
    assert_eq!(code, 0, "{err}");
    let r = RunReport::from_json(&out).unwrap();
    assert_eq!(r.deviations.len(), 5);
    assert!(r.deviations.values().all(|d| *d <= 1e-5));
}

#[test]
fn ellipse_report_csv() {
    let (code, out, _) = jemo(&[
        "ellipse-report",
        "--seed",
        "4",
        "--format",
        "csv",
        "--grid",
        "360",
    ]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("omega,x,y,four_xy,residual"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() >= 360);
    assert!(rows.iter().all(|r| r.len() == 5 && r[4].abs() <= 1e-6));
    // printed values round-trip exactly
    for r in &rows {
        assert!((r[3] - 4.0 * r[1] * r[2]).abs() <= 4.0 * f64::EPSILON * r[3].abs().max(1.0));
    }
}

#[test]
fn ellipse_report_degenerate_pairs() {
    let f = pair_file([[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]);
    let (code, out, _) = jemo(&[
        "ellipse-report",
        "--input",
        path(&f),
        "--format",
        "csv",
        "--grid",
        "8",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "# degenerate,s12-zero");
    let first: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[3] - 1.0).abs() < 1e-15);
    let f = pair_file([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]);
    let (code, out, _) = jemo(&[
        "ellipse-report",
        "--input",
        path(&f),
        "--format",
        "csv",
        "--grid",
        "8",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("# degenerate,vertical-segment"));
}

#[test]
fn output_file_and_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.csv");
    let (code, out, _) = jemo(&[
        "compress",
        "--trials",
        "2",
        "--budget",
        "8",
        "--format",
        "csv",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("case,seed,lower,upper,formula,min_margin,passed\n"));
    assert_eq!(text.lines().count(), 3);
}
