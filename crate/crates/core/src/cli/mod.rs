//! Command-line front end: argument parsing, input loading, report output
//! and the exit-code contract (0 passed, 1 violation, 2 usage or IO error).

mod commands;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Deserialize;

pub use commands::{
    case_budget, cmd_cbnorm, cmd_compress, cmd_ellipse_report, cmd_formulas, cmd_haagerup,
    cmd_norm, cmd_verify, EllipseReport, EllipseRow,
};
pub use report::{fmt17, Aggregate, Format, RunConfig, RunReport, TOLERANCES};

use crate::linalg::{CMatrix, Ensemble};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "JEMO_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "jemo",
    version,
    about = "Norms of Jordan elementary operators x -> axb + bxa"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of seeded cases (verify: 1000, formulas: 50 per family, compress: 100).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Multi-start count for the oracles.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Tolerance override, e.g. `--tol formula=1e-6`.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// JSON input: one file holding `{"a": .., "b": ..}`, or two matrix files.
    #[arg(long, global = true)]
    input: Vec<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Parameter grid for ellipse-report.
    #[arg(long, global = true)]
    grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Operator norm between the oracle and the Haagerup bound.
    Norm,
    /// Completely bounded norm oracle.
    Cbnorm,
    /// Haagerup tensor norm with its optimal representation.
    Haagerup,
    /// Seeded verification of the lower bounds and the hyperbola check.
    Verify,
    /// Closed-form norms against the oracles.
    Formulas,
    /// Boundary of the joint numerical range as CSV.
    EllipseReport,
    /// Compression of a pair to dimension two.
    Compress,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::Norm => "norm",
            Cmd::Cbnorm => "cbnorm",
            Cmd::Haagerup => "haagerup",
            Cmd::Verify => "verify",
            Cmd::Formulas => "formulas",
            Cmd::EllipseReport => "ellipse-report",
            Cmd::Compress => "compress",
        }
    }

    fn default_trials(self) -> usize {
        match self {
            Cmd::Formulas => 50,
            Cmd::Compress => 100,
            _ => 1000,
        }
    }
}

#[derive(Deserialize)]
struct PairJson {
    a: CMatrix,
    b: CMatrix,
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Reads a pair from one `{"a", "b"}` file, one file holding a two-element
/// array, or two single-matrix files.
pub fn load_pair(inputs: &[PathBuf]) -> Result<(CMatrix, CMatrix), String> {
    let (a, b) = match inputs {
        [one] => {
            let text = read(one)?;
            match serde_json::from_str::<PairJson>(&text) {
                Ok(p) => (p.a, p.b),
                Err(pair_err) => match serde_json::from_str::<Vec<CMatrix>>(&text) {
                    Ok(v) if v.len() == 2 => {
                        let mut it = v.into_iter();
                        (it.next().unwrap(), it.next().unwrap())
                    }
                    Ok(v) => return Err(format!("expected two matrices, found {}", v.len())),
                    Err(_) => return Err(format!("{}: {pair_err}", one.display())),
                },
            }
        }
        [p, q] => {
            let parse = |path: &PathBuf| {
                serde_json::from_str::<CMatrix>(&read(path)?)
                    .map_err(|e| format!("{}: {e}", path.display()))
            };
            (parse(p)?, parse(q)?)
        }
        _ => {
            return Err(format!(
                "expected one or two --input files, got {}",
                inputs.len()
            ))
        }
    };
    if a.n() != b.n() {
        return Err(format!(
            "matrices have different sizes {} and {}",
            a.n(),
            b.n()
        ));
    }
    Ok((a, b))
}

/// Runs `f` on a pool of at most `workers` threads (all available when
/// `None`). Output does not depend on the worker count.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    if let Some(n) = workers {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            return pool.install(f);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    f()
}

fn workers_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .map(Some)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got `{v}`")),
        Err(_) => Ok(None),
    }
}

struct Outcome {
    text: String,
    passed: bool,
    failing: Vec<u64>,
}

fn report_outcome(r: RunReport, format: Format) -> Outcome {
    let text = match format {
        Format::Json => r.to_json() + "\n",
        Format::Csv => r.to_csv(),
    };
    Outcome {
        passed: r.aggregate.failures == 0,
        failing: r.aggregate.failing_seeds.clone(),
        text,
    }
}

fn execute(cli: &Cli, cfg: &RunConfig) -> Result<Outcome, String> {
    let pair = || -> Result<(CMatrix, CMatrix), String> {
        if cli.input.is_empty() {
            Ok(Ensemble::Ginibre.pair(2, cfg.seed))
        } else {
            load_pair(&cli.input)
        }
    };
    let err = |e: crate::Error| e.to_string();
    Ok(match cli.command {
        Cmd::Norm => {
            let (a, b) = pair()?;
            report_outcome(cmd_norm(cfg, &a, &b).map_err(err)?, cfg.format)
        }
        Cmd::Cbnorm => {
            let (a, b) = pair()?;
            report_outcome(cmd_cbnorm(cfg, &a, &b).map_err(err)?, cfg.format)
        }
        Cmd::Haagerup => {
            let (a, b) = pair()?;
            report_outcome(cmd_haagerup(cfg, &a, &b).map_err(err)?, cfg.format)
        }
        Cmd::Verify => report_outcome(cmd_verify(cfg).map_err(err)?, cfg.format),
        Cmd::Formulas => report_outcome(cmd_formulas(cfg).map_err(err)?, cfg.format),
        Cmd::Compress => {
            let r = if cli.input.is_empty() {
                cmd_compress(cfg, None)
            } else {
                let (a, b) = load_pair(&cli.input)?;
                cmd_compress(cfg, Some((&a, &b)))
            };
            report_outcome(r.map_err(err)?, cfg.format)
        }
        Cmd::EllipseReport => {
            let (a, b) = pair()?;
            let r = cmd_ellipse_report(cfg, &a, &b).map_err(err)?;
            let text = match cfg.format {
                Format::Csv => r.to_csv(),
                Format::Json => serde_json::to_string_pretty(&r).expect("report serializes") + "\n",
            };
            Outcome {
                passed: r.passed(),
                failing: if r.passed() { vec![] } else { vec![cfg.seed] },
                text,
            }
        }
    })
}

fn config_from(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::new(cli.command.name());
    cfg.seed = cli.seed;
    cfg.trials = cli.trials.unwrap_or(cli.command.default_trials());
    cfg.budget = cli.budget.unwrap_or(cfg.budget);
    cfg.grid = cli.grid.unwrap_or(cfg.grid);
    cfg.format = cli.format;
    cfg.inputs = cli.input.iter().map(|p| p.display().to_string()).collect();
    if cfg.trials == 0 {
        return Err("--trials must be at least 1".into());
    }
    if cfg.budget == 0 {
        return Err("--budget must be at least 1".into());
    }
    if cfg.grid == 0 {
        return Err("--grid must be at least 1".into());
    }
    cfg.set_tolerances(&cli.tol)?;
    Ok(cfg)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    let usage = |stderr: &mut dyn Write, msg: String| {
        let _ = writeln!(stderr, "error: {msg}");
        2
    };
    let cfg = match config_from(&cli) {
        Ok(c) => c,
        Err(m) => return usage(stderr, m),
    };
    let workers = match workers_from_env() {
        Ok(w) => w,
        Err(m) => return usage(stderr, m),
    };
    let outcome = match with_workers(workers, || execute(&cli, &cfg)) {
        Ok(o) => o,
        Err(m) => return usage(stderr, m),
    };
    let Outcome {
        text,
        passed,
        failing,
    } = outcome;
    let written = match &cli.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(m) = written {
        return usage(stderr, m);
    }
    if passed {
        0
    } else {
        let seeds: Vec<String> = failing.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(stderr, "violation: failing seed(s) {}", seeds.join(" "));
        1
    }
}
