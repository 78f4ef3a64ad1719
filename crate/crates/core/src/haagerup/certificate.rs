use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::elemop::Term;
use crate::linalg::CMatrix;

/// A two-sided certificate for one norm computation: a lower bound with the
/// unit-norm input achieving it, an upper bound with the representation
/// achieving it, and the named margins that were checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormCertificate {
    pub case: String,
    pub seed: u64,
    pub lower: f64,
    pub lower_witness: CMatrix,
    /// Upper bound with the representation achieving it, when computed.
    pub upper: Option<f64>,
    pub upper_witness: Vec<Term>,
    /// Closed-form value, when the case has one.
    pub formula: Option<f64>,
    /// Margin name to value; each was checked against a one-sided slack.
    pub margins: BTreeMap<String, f64>,
    /// Auxiliary quantities (other oracle values, scalings).
    pub values: BTreeMap<String, f64>,
    pub passed: bool,
}

impl NormCertificate {
    pub fn new(case: impl Into<String>, seed: u64, lower: f64, lower_witness: CMatrix) -> Self {
        NormCertificate {
            case: case.into(),
            seed,
            lower,
            lower_witness,
            upper: None,
            upper_witness: Vec::new(),
            formula: None,
            margins: BTreeMap::new(),
            values: BTreeMap::new(),
            passed: true,
        }
    }

    pub fn with_upper(mut self, upper: f64, rep: Vec<Term>) -> Self {
        self.upper = Some(upper);
        self.upper_witness = rep;
        self
    }

    pub fn with_formula(mut self, value: f64) -> Self {
        self.formula = Some(value);
        self
    }

    /// Records a margin; the certificate fails if it is below `-slack`.
    pub fn margin(&mut self, name: &str, value: f64, slack: f64) {
        self.passed &= value >= -slack;
        self.margins.insert(name.to_string(), value);
    }

    pub fn value(&mut self, name: &str, value: f64) {
        self.values.insert(name.to_string(), value);
    }

    pub fn min_margin(&self) -> f64 {
        self.margins.values().cloned().fold(f64::INFINITY, f64::min)
    }
}
