#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use serde::Deserialize;
use serde_json::Value;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Runs the binary from the fixture directory.
pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metrize"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("binary runs")
}

pub fn report(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let code = out.status.code().expect("exited normally");
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

/// Status of the named check, if present.
pub fn status<'a>(report: &'a Value, name: &str) -> Option<&'a str> {
    report["checks"].as_array()?.iter().find(|c| c["name"] == name)?["status"].as_str()
}

#[derive(Deserialize)]
pub struct Case {
    pub args: Vec<String>,
    pub exit: i32,
}

pub fn manifest() -> Vec<Case> {
    let text = std::fs::read_to_string(fixtures().join("expected.json")).expect("manifest");
    serde_json::from_str(&text).expect("manifest parses")
}
