//! Check reports: one row per (check, instance), rendered as JSON or text.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::io::to_pretty;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub check: String,
    pub instance: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: impl Into<String>, instance: impl Into<String>, pass: bool, witness: Option<Value>) {
        self.rows.push(Row { check: check.into(), instance: instance.into(), pass, witness });
    }

    /// Adds a row whose witness is dropped when the check passes.
    pub fn check<W: Serialize>(&mut self, check: impl Into<String>, instance: impl Into<String>, pass: bool, witness: W) {
        let w = if pass { None } else { serde_json::to_value(witness).ok().filter(|v| !v.is_null()) };
        self.push(check, instance, pass, w);
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        to_pretty(self)
    }

    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.check.len()).max().unwrap_or(0);
        let mut out = String::new();
        for r in &self.rows {
            let status = if r.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}  {:width$}  {}", r.check, r.instance));
            if let Some(w) = &r.witness {
                out.push_str(&format!("  witness: {w}"));
            }
            out.push('\n');
        }
        let failed = self.failures().count();
        out.push_str(&format!("{} checks, {} failed\n", self.rows.len(), failed));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_only_on_failure() {
        let mut r = Report::new();
        r.check("a", "x", true, vec![1, 2]);
        r.check("b", "x", false, vec![1, 2]);
        assert!(r.rows[0].witness.is_none());
        assert_eq!(r.rows[1].witness, Some(serde_json::json!([1, 2])));
        assert!(!r.passed());
        assert_eq!(
            r.to_json().unwrap(),
            "[\n  {\n    \"check\": \"a\",\n    \"instance\": \"x\",\n    \"pass\": true\n  },\n  {\n    \"check\": \"b\",\n    \"instance\": \"x\",\n    \"pass\": false,\n    \"witness\": [1, 2]\n  }\n]\n"
        );
        assert_eq!(r.to_text(), "PASS  a  x\nFAIL  b  x  witness: [1,2]\n2 checks, 1 failed\n");
    }
}
