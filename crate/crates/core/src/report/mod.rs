//! Versioned JSON reports, shared acceptance criteria and CSV traces.

pub mod criteria;
pub mod plots;

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Unresolved,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Unresolved => 3,
        }
    }

    pub fn from_error(e: &Error) -> Self {
        if e.is_unresolved() {
            Status::Unresolved
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Unresolved => "UNRESOLVED",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub witness: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, status: Status, witness: Value) -> Self {
        CheckRecord {
            name: name.into(),
            status,
            witness,
            elapsed_ms: None,
        }
    }

    pub fn from_result(name: impl Into<String>, r: crate::Result<(bool, Value)>) -> Self {
        match r {
            Ok((ok, w)) => Self::new(name, if ok { Status::Pass } else { Status::Fail }, w),
            Err(e) => Self::new(
                name,
                Status::from_error(&e),
                serde_json::json!({ "error": e.to_string() }),
            ),
        }
    }
}

/// Checks are kept sorted by name; `overall` is the worst status.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub subcommand: String,
    pub parameters: Value,
    pub checks: Vec<CheckRecord>,
    pub overall: Status,
}

impl Report {
    pub fn new(subcommand: impl Into<String>, parameters: Value, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let overall = checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass);
        Report {
            schema: SCHEMA,
            subcommand: subcommand.into(),
            parameters,
            checks,
            overall,
        }
    }

    pub fn to_json(&self, compact: bool) -> String {
        if compact {
            serde_json::to_string(self).expect("report serializes")
        } else {
            serde_json::to_string_pretty(self).expect("report serializes")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overall_is_worst() {
        let r = Report::new(
            "x",
            json!({}),
            vec![
                CheckRecord::new("b", Status::Pass, json!(null)),
                CheckRecord::new("a", Status::Unresolved, json!(null)),
            ],
        );
        assert_eq!(r.overall, Status::Unresolved);
        assert_eq!(r.checks[0].name, "a");
        let r = Report::new("x", json!({}), vec![]);
        assert_eq!(r.overall, Status::Pass);
        assert!(r.to_json(true).starts_with("{\"schema\":1,"));
    }
}
