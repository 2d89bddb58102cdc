use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The statement being tested.
    pub anchor: String,
    /// First 16 hex digits of sha256 over the inputs' JSON.
    pub inputs_digest: String,
    pub measured: Value,
    pub expected: Value,
    pub pass: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        anchor: impl Into<String>,
        inputs: &Value,
        measured: Value,
        expected: Value,
        pass: bool,
    ) -> Self {
        let digest = Sha256::digest(inputs.to_string().as_bytes());
        Self {
            name: name.into(),
            anchor: anchor.into(),
            inputs_digest: hex::encode(&digest[..8]),
            measured,
            expected,
            pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    /// Observations that are not pass/fail.
    pub findings: Vec<String>,
    /// Some required quantity lies beyond the precision window.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub precision_short: bool,
    /// Only bench reports carry wall-clock data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Value>,
}

pub const CSV_COLUMNS: [&str; 7] = ["experiment", "check", "anchor", "inputs_digest", "measured", "expected", "pass"];

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self { config: config.clone(), checks: Vec::new(), findings: Vec::new(), precision_short: false, timing: None }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn note(&mut self, finding: impl Into<String>) {
        self.findings.push(finding.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// 0 pass, 1 failed check, 3 pass but short of precision.
    pub fn exit_code(&self) -> i32 {
        if !self.passed() {
            1
        } else if self.precision_short {
            3
        } else {
            0
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                self.config.experiment.name(),
                &c.name,
                &c.anchor,
                &c.inputs_digest,
                &c.measured.to_string(),
                &c.expected.to_string(),
                if c.pass { "true" } else { "false" },
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}
