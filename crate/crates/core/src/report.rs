//! Machine-readable verification reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    HypothesisViolated,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::HypothesisViolated => "hypothesis-violated",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: &str, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Pass,
            detail: detail.into(),
            witness: None,
        }
    }

    /// A failing check always names a witness.
    pub fn fail(name: &str, detail: impl Into<String>, witness: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Fail,
            detail: detail.into(),
            witness: Some(witness.into()),
        }
    }

    pub fn hypothesis_violated(name: &str, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::HypothesisViolated,
            detail: detail.into(),
            witness: None,
        }
    }

    /// Pass when `ok`, otherwise fail with the given witness.
    pub fn expect(
        name: &str,
        ok: bool,
        detail: impl Into<String>,
        witness: impl FnOnce() -> String,
    ) -> Self {
        if ok {
            Check::pass(name, detail)
        } else {
            Check::fail(name, detail, witness())
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report {
            command: command.into(),
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            seed,
            elapsed_ms: 0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.into(), value.to_string());
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Checks ordered by name; ties keep insertion order.
    pub fn finish(&mut self, elapsed_ms: u64) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.elapsed_ms = elapsed_ms;
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn summary(&self) -> String {
        let mut out = self.command.clone();
        for (k, v) in &self.parameters {
            out.push_str(&format!(" {k}={v}"));
        }
        out.push('\n');
        for c in &self.checks {
            out.push_str(&format!("  [{}] {}: {}", c.status, c.name, c.detail));
            if let Some(w) = &c.witness {
                out.push_str(&format!(" (witness: {w})"));
            }
            out.push('\n');
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{verdict} in {} ms\n", self.elapsed_ms));
        out
    }
}
