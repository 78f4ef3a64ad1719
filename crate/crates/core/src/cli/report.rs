use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::haagerup::NormCertificate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Tolerances with their defaults; `--tol name=value` may override any of
/// them and nothing else.
pub const TOLERANCES: [(&str, f64); 6] = [
    // one-sided slack on the norm inequalities
    ("inequality", 1e-9),
    // relative slack on 4xy >= 1 + |lambda|^2
    ("product", 1e-9),
    // gap allowed between oracle lower bound and Haagerup upper bound
    ("sandwich", 1e-6),
    // closed-form formula vs oracle
    ("formula", 1e-5),
    // ellipse equation residual in ellipse-report
    ("residual", 1e-6),
    // norm loss allowed by compress
    ("eps", 1e-6),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub trials: usize,
    /// Multi-start count for the oracles and the Haagerup minimizer.
    pub budget: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub inputs: Vec<String>,
    pub format: Format,
    /// Parameter grid for `ellipse-report`.
    pub grid: usize,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.to_string(),
            seed: 0,
            trials: 1000,
            budget: 64,
            tolerances: TOLERANCES
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            inputs: Vec::new(),
            format: Format::Json,
            grid: 1000,
        }
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    /// Applies `name=value` overrides, rejecting unknown names and
    /// non-positive or non-finite values.
    pub fn set_tolerances(&mut self, overrides: &[String]) -> Result<(), String> {
        for o in overrides {
            let (name, value) = o
                .split_once('=')
                .ok_or_else(|| format!("--tol expects name=value, got `{o}`"))?;
            if !self.tolerances.contains_key(name) {
                let known: Vec<&str> = TOLERANCES.iter().map(|t| t.0).collect();
                return Err(format!(
                    "unknown tolerance `{name}` (known: {})",
                    known.join(", ")
                ));
            }
            let v: f64 = value
                .parse()
                .map_err(|_| format!("tolerance `{name}` has non-numeric value `{value}`"))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!(
                    "tolerance `{name}` must be finite and non-negative"
                ));
            }
            self.tolerances.insert(name.to_string(), v);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// Smallest value of each named margin across certificates.
    pub min_margins: BTreeMap<String, f64>,
    pub failures: usize,
    pub failing_seeds: Vec<u64>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub config: RunConfig,
    pub certificates: Vec<NormCertificate>,
    /// Per-family maximum absolute deviation (`formulas` only).
    pub deviations: BTreeMap<String, f64>,
    pub aggregate: Aggregate,
}

impl RunReport {
    pub fn new(config: RunConfig, certificates: Vec<NormCertificate>, wall_time_s: f64) -> Self {
        let mut min_margins: BTreeMap<String, f64> = BTreeMap::new();
        for c in &certificates {
            for (k, v) in &c.margins {
                let e = min_margins.entry(k.clone()).or_insert(f64::INFINITY);
                *e = e.min(*v);
            }
        }
        let failing: Vec<&NormCertificate> = certificates.iter().filter(|c| !c.passed).collect();
        let aggregate = Aggregate {
            min_margins,
            failures: failing.len(),
            failing_seeds: failing.iter().map(|c| c.seed).collect(),
            wall_time_s,
        };
        RunReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            certificates,
            deviations: BTreeMap::new(),
            aggregate,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }

    pub fn from_json(s: &str) -> serde_json::Result<RunReport> {
        serde_json::from_str(s)
    }

    /// One row per certificate.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("case,seed,lower,upper,formula,min_margin,passed\n");
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        for c in &self.certificates {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.case,
                c.seed,
                fmt17(c.lower),
                opt(c.upper),
                opt(c.formula),
                fmt17(c.min_margin()),
                c.passed
            );
        }
        out
    }

    /// Same report with the wall time zeroed, for comparing runs.
    pub fn without_timing(&self) -> RunReport {
        let mut r = self.clone();
        r.aggregate.wall_time_s = 0.0;
        r
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}
