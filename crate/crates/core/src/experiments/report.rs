//! Self-contained experiment reports: echoed inputs, quantities with
//! provenance, and tolerance-cited checks.

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// A computed number with its provenance (which estimator or oracle produced
/// it) and, when meaningful, an uncertainty estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<f64>,
    pub source: String,
}

/// One pass/fail comparison; every check cites the tolerance it used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub seed: u64,
    /// Echo of the full configuration; the report is re-runnable from it.
    pub config: serde_json::Value,
    pub quantities: Vec<Quantity>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub passed: bool,
    pub wall_clock_ms: u64,
}

impl Report {
    pub fn new(experiment: &str, seed: u64, config: serde_json::Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            seed,
            config,
            quantities: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            passed: true,
            wall_clock_ms: 0,
        }
    }

    pub fn quantity(&mut self, name: &str, value: f64, uncertainty: Option<f64>, source: &str) {
        self.quantities.push(Quantity {
            name: name.to_string(),
            value,
            uncertainty,
            source: source.to_string(),
        });
    }

    fn push_check(&mut self, check: Check) -> bool {
        let ok = check.passed;
        self.passed &= ok;
        self.checks.push(check);
        ok
    }

    /// |observed - reference| <= tol * max(|reference|, floor).
    pub fn check_rel(&mut self, name: &str, observed: f64, reference: f64, tol: f64, detail: &str) -> bool {
        let scale = reference.abs().max(1e-300);
        let passed = (observed - reference).abs() <= tol * scale;
        self.push_check(Check {
            name: name.to_string(),
            passed,
            observed,
            reference,
            tolerance: tol,
            detail: detail.to_string(),
        })
    }

    pub fn check_abs(&mut self, name: &str, observed: f64, reference: f64, tol: f64, detail: &str) -> bool {
        let passed = (observed - reference).abs() <= tol;
        self.push_check(Check {
            name: name.to_string(),
            passed,
            observed,
            reference,
            tolerance: tol,
            detail: detail.to_string(),
        })
    }

    /// A precomputed predicate, still recorded with the numbers behind it.
    pub fn check_that(
        &mut self,
        name: &str,
        passed: bool,
        observed: f64,
        reference: f64,
        tolerance: f64,
        detail: &str,
    ) -> bool {
        self.push_check(Check {
            name: name.to_string(),
            passed,
            observed,
            reference,
            tolerance,
            detail: detail.to_string(),
        })
    }

    pub fn note(&mut self, text: &str) {
        self.notes.push(text.to_string());
    }

    /// Records a failure instead of crashing the run.
    pub fn error(&mut self, context: &str, err: &crate::error::GmtError) {
        self.push_check(Check {
            name: format!("{context}_completed"),
            passed: false,
            observed: f64::NAN,
            reference: f64::NAN,
            tolerance: 0.0,
            detail: err.to_string(),
        });
    }

    pub fn finalize(&mut self, started: Instant) {
        self.wall_clock_ms = started.elapsed().as_millis() as u64;
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The report with volatile fields zeroed, for determinism comparisons.
    pub fn stable_value(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["wall_clock_ms"] = serde_json::Value::from(0u64);
        v
    }

    /// Flat table of the checks, one row each.
    pub fn csv_rows(&self) -> String {
        let mut out = String::from("experiment,check,passed,observed,reference,tolerance\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.experiment, c.name, c.passed, c.observed, c.reference, c.tolerance
            ));
        }
        out
    }
}
