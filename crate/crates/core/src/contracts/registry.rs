use std::collections::BTreeSet;

use super::check::{ContractReport, Verdict};
use crate::error::{Error, Result};

/// Operations whose contracts have been checked (or are assumed).
///
/// A pass-level check relies on the contracts of its callees instead of
/// re-testing them, so it is refused until each callee is recorded here.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    verified: BTreeSet<String>,
}

impl Registry {
    pub fn new() -> Registry {
        Registry::default()
    }

    /// Record `report`; only a PASS marks the operation verified.
    pub fn record<I>(&mut self, report: &ContractReport<I>) -> Verdict {
        let v = report.verdict();
        if v == Verdict::Pass {
            self.verified.insert(report.op.clone());
        }
        v
    }

    /// Mark `op` verified without checking it here.
    pub fn assume(&mut self, op: impl Into<String>) {
        self.verified.insert(op.into());
    }

    pub fn is_verified(&self, op: &str) -> bool {
        self.verified.contains(op)
    }

    pub fn verified(&self) -> impl Iterator<Item = &str> {
        self.verified.iter().map(String::as_str)
    }

    /// Error on the first callee of `pass` that is not verified.
    pub fn require(&self, pass: &str, callees: &[&str]) -> Result<()> {
        match callees.iter().find(|c| !self.is_verified(c)) {
            Some(c) => Err(Error::Unverified {
                pass: pass.to_string(),
                callee: c.to_string(),
            }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::{check_contract, Budget, Cases, Contract};

    #[test]
    fn only_passing_reports_verify() {
        let op = |x: &usize| Ok(*x);
        let good = Contract::new("id").post(|x: &usize, y: &usize| x == y);
        let bad = Contract::new("id").post(|_: &usize, y: &usize| *y < 3);
        let mut reg = Registry::new();
        reg.record(&check_contract("id", &op, &bad, Cases::exhaustive(0..5usize), &Budget::default()));
        assert!(reg.require("p", &["id"]).is_err());
        reg.record(&check_contract("id", &op, &good, Cases::exhaustive(0..5usize), &Budget::default()));
        assert!(reg.require("p", &["id"]).is_ok());
        assert_eq!(
            reg.require("p", &["id", "other"]).unwrap_err(),
            Error::Unverified {
                pass: "p".into(),
                callee: "other".into()
            }
        );
    }
}
