//! Loading input files and mapping failures onto exit codes.

use std::fmt;

use metrize::{check_metric_axioms, Error, FiniteMetricSpace, Scalar};
use serde::de::DeserializeOwned;

use crate::report::Report;

/// A failure that ends the command with an exit code and a message.
#[derive(Debug)]
pub struct Fail {
    pub code: i32,
    pub message: String,
}

impl Fail {
    pub fn input(message: impl Into<String>) -> Self {
        Fail { code: 2, message: message.into() }
    }

    pub fn math(message: impl Into<String>) -> Self {
        Fail { code: 1, message: message.into() }
    }
}

impl fmt::Display for Fail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        // a size cap means the input is too large to process, not that a hypothesis failed
        let code = match e {
            Error::Precondition(_) => 1,
            Error::Structural(_) | Error::Parse(_) | Error::CapExceeded { .. } => 2,
        };
        Fail { code, message: e.to_string() }
    }
}

pub type CmdResult<T = ()> = Result<T, Fail>;

/// Reads and parses a JSON file, recording its digest in the report.
pub fn load<T: DeserializeOwned>(report: &mut Report, path: &str) -> CmdResult<T> {
    let bytes = std::fs::read(path).map_err(|e| Fail::input(format!("cannot read {path}: {e}")))?;
    report.add_input(path, &bytes);
    serde_json::from_slice(&bytes).map_err(|e| Fail::input(format!("cannot parse {path}: {e}")))
}

/// Shape check for a deserialized space.
pub fn shaped(m: &FiniteMetricSpace, what: &str) -> CmdResult<()> {
    m.validate_shape().map_err(|e| Fail::input(format!("{what}: {e}")))
}

/// Shape check plus the metric axioms; a non-metric input is a failed hypothesis.
pub fn require_metric(m: &FiniteMetricSpace, what: &str) -> CmdResult<()> {
    shaped(m, what)?;
    let audit = check_metric_axioms(m, false)?;
    match audit.violations.first() {
        None => Ok(()),
        Some(v) => Err(Fail::math(format!(
            "{what} is not a metric: {} fails at {:?}",
            v.axiom, v.witness
        ))),
    }
}

/// Parses a comma-separated list of rationals. Any problem with it is a
/// failed precondition of the command, hence exit 1.
pub fn parse_csv(csv: &str, what: &str) -> CmdResult<Vec<Scalar>> {
    csv.split(',')
        .map(|s| s.parse::<Scalar>().map_err(|e| Fail::math(format!("{what}: {e}"))))
        .collect()
}

pub fn grid_or(csv: Option<&str>, default: &[(i64, i64)]) -> CmdResult<Vec<Scalar>> {
    match csv {
        Some(s) => parse_csv(s, "grid"),
        None => Ok(default.iter().map(|&(p, q)| Scalar::ratio(p, q)).collect()),
    }
}

/// Scales `m` down to diameter `bound` when `rescale` is set and it is larger.
pub fn maybe_rescale(m: FiniteMetricSpace, bound: &Scalar, rescale: bool) -> (FiniteMetricSpace, Scalar) {
    if rescale && m.diameter() > *bound {
        m.rescaled_to_diameter(bound)
    } else {
        (m, Scalar::one())
    }
}
