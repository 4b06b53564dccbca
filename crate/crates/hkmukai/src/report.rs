//! Reports emitted by the command-line verbs: named pass/fail checks plus a
//! JSON result payload, rendered as canonical JSON or plain text.

use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::io::canonical_json;

/// One named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Command echo, checks ordered by name, and a result payload.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: Vec<String>,
    checks: Vec<Check>,
    pub result: Value,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report {
            command,
            checks: Vec::new(),
            result: Value::Object(Map::new()),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    /// Records `Ok(true)` as a pass, `Ok(false)` as a failure and an error as
    /// a failure carrying the error message.
    pub fn check_result(
        &mut self,
        name: impl Into<String>,
        r: crate::Result<bool>,
        detail: impl Into<String>,
    ) {
        match r {
            Ok(pass) => self.check(name, pass, detail),
            Err(e) => self.check(name, false, format!("error: {e}")),
        }
    }

    pub fn merge(&mut self, prefix: &str, other: Report) {
        for c in other.checks {
            self.checks.push(Check {
                name: format!("{prefix}/{}", c.name),
                ..c
            });
        }
    }

    /// Inserts `key` into the result object.
    pub fn set(&mut self, key: &str, v: Value) {
        if let Value::Object(m) = &mut self.result {
            m.insert(key.to_string(), v);
        }
    }

    /// Checks sorted by name (stable for equal names).
    pub fn checks(&self) -> Vec<&Check> {
        let mut cs: Vec<&Check> = self.checks.iter().collect();
        cs.sort_by(|a, b| a.name.cmp(&b.name));
        cs
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks()
            .iter()
            .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
            .collect();
        json!({
            "command": self.command,
            "checks": checks,
            "pass": self.passed(),
            "result": self.result,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command.join(" "));
        for c in self.checks() {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                out.push_str(&format!("{mark} {}\n", c.name));
            } else {
                out.push_str(&format!("{mark} {}: {}\n", c.name, c.detail));
            }
        }
        if self.result.as_object().is_some_and(|m| !m.is_empty()) {
            out.push_str(&canonical_json(&self.result));
        }
        let total = self.checks.len();
        if total > 0 {
            out.push_str(&format!(
                "{} of {total} checks passed\n",
                total - self.failures()
            ));
        }
        out
    }
}

/// Machine-readable error object.
pub fn error_json(e: &Error) -> Value {
    json!({"error": {"kind": e.kind(), "message": e.to_string()}})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_status() {
        let mut r = Report::new(vec!["verify".into()]);
        r.check("b", true, "");
        r.check("a", false, "x");
        let names: Vec<&str> = r.checks().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["a", "b"]);
        assert!(!r.passed());
        assert!(r.to_text().contains("FAIL a: x"));
    }
}
