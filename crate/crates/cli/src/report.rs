//! The JSON report every subcommand prints.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "metrize.report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Reported for information; does not affect the exit code.
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub scalars: BTreeMap<String, Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness: None,
            scalars: BTreeMap::new(),
        }
    }

    pub fn info(name: impl Into<String>) -> Self {
        Check { status: Status::Info, ..Check::new(name, true) }
    }

    pub fn witness(mut self, w: impl Serialize) -> Self {
        self.witness = Some(to_value(w));
        self
    }

    /// Attaches a witness only when the check failed.
    pub fn witness_on_fail(self, w: impl Serialize) -> Self {
        if self.status == Status::Fail {
            self.witness(w)
        } else {
            self
        }
    }

    pub fn scalar(mut self, key: &str, v: impl Serialize) -> Self {
        self.scalars.insert(key.into(), to_value(v));
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    /// SHA-256 over the input digests in order.
    pub digest: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub status: Outcome,
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: Vec<String>, seed: Option<u64>) -> Self {
        Report {
            schema: SCHEMA,
            command,
            seed,
            inputs: Vec::new(),
            digest: String::new(),
            checks: Vec::new(),
            output: None,
            error: None,
            status: Outcome::Pass,
            exit_code: 0,
        }
    }

    pub fn add_input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push(InputDigest { path: path.into(), sha256: hex::encode(Sha256::digest(bytes)) });
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn set_output(&mut self, v: impl Serialize) {
        self.output = Some(to_value(v));
    }

    /// Fixes the digest, status and exit code.
    pub fn finish(mut self, error: Option<(i32, String)>) -> Self {
        let mut h = Sha256::new();
        for input in &self.inputs {
            h.update(input.sha256.as_bytes());
        }
        self.digest = hex::encode(h.finalize());
        match error {
            Some((code, msg)) => {
                self.status = Outcome::Error;
                self.exit_code = code;
                self.error = Some(msg);
            }
            None if self.checks.iter().any(|c| c.status == Status::Fail) => {
                self.status = Outcome::Fail;
                self.exit_code = 1;
            }
            None => {}
        }
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable value")
}

/// Rounds to 15 significant digits so float fields print identically everywhere.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}
