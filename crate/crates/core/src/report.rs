//! Pass/fail records produced by the verification routines.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Measured and reported, not asserted.
    Info,
}

/// One named check. `anchor` is a stable identifier of the property checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Accumulates cases for one check, keeping the first failing witness.
#[derive(Debug)]
pub struct CheckBuilder {
    name: String,
    anchor: String,
    cases: u64,
    witness: Option<Value>,
    failed: bool,
}

impl CheckBuilder {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>) -> Self {
        CheckBuilder {
            name: name.into(),
            anchor: anchor.into(),
            cases: 0,
            witness: None,
            failed: false,
        }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok && !self.failed {
            self.failed = true;
            self.witness = Some(witness());
        }
    }

    pub fn failed(&self) -> bool {
        self.failed
    }

    pub fn finish(self) -> Check {
        Check {
            name: self.name,
            anchor: self.anchor,
            status: if self.failed { Status::Fail } else { Status::Pass },
            cases: self.cases,
            witness: self.witness,
            details: None,
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(Check::passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_witness_is_kept() {
        let mut b = CheckBuilder::new("x", "demo.anchor");
        b.record(true, || Value::Null);
        b.record(false, || serde_json::json!(1));
        b.record(false, || serde_json::json!(2));
        let c = b.finish();
        assert_eq!(c.status, Status::Fail);
        assert_eq!(c.cases, 3);
        assert_eq!(c.witness, Some(serde_json::json!(1)));
    }
}
