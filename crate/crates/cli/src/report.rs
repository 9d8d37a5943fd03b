//! Run reports, written to standard error as one JSON object.

use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Outcome of one verification step. `oracle` says what the result was
/// checked against.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub check: String,
    pub oracle: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub elapsed_ms: u128,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            command,
            inputs: Vec::new(),
            outputs: Vec::new(),
            verdicts: Vec::new(),
            error: None,
            elapsed_ms: 0,
            started: Some(Instant::now()),
        }
    }

    pub fn input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push(InputDigest { path: path.to_string(), sha256: hex::encode(Sha256::digest(bytes)) });
    }

    pub fn verdict(&mut self, check: &str, oracle: &str, passed: bool, witness: Option<String>) {
        self.verdicts.push(Verdict { check: check.to_string(), oracle: oracle.to_string(), passed, witness });
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// Stops the clock and renders the report.
    pub fn finish(&mut self) -> String {
        if let Some(t) = self.started {
            self.elapsed_ms = t.elapsed().as_millis();
        }
        serde_json::to_string(self).expect("report serializes")
    }
}
