//! Validation outcomes as data.
//!
//! Validators in this crate never abort on the first problem: they scan the
//! whole object and return every violated law together with a concrete
//! witness. An empty report means the object is valid.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// One violated law, with the witness that violates it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Short identifier of the law, e.g. `"associativity"` or `"functoriality"`.
    pub rule: String,
    /// Human-readable witness: the concrete elements, tuples, or opens at fault.
    pub witness: String,
}

/// Outcome of running one validator.
///
/// `bounds` records the parameters the check ran under (formula depth,
/// semantics mode, ...) so a report is meaningful on its own.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CheckReport {
    pub check: String,
    pub bounds: Vec<(String, String)>,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport { check: check.into(), bounds: Vec::new(), violations: Vec::new() }
    }

    pub fn bound(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.bounds.push((key.into(), value.into()));
        self
    }

    pub fn push(&mut self, rule: impl Into<String>, witness: impl Into<String>) {
        self.violations.push(Violation { rule: rule.into(), witness: witness.into() });
    }

    /// True when no violation was found.
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Append another report's violations, prefixing their rules with `prefix`.
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        for v in other.violations {
            let mut rule = String::from(prefix);
            rule.push('.');
            rule.push_str(&v.rule);
            self.violations.push(Violation { rule, witness: v.witness });
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            write!(f, "{}: ok", self.check)?;
        } else {
            write!(f, "{}: {} violation(s)", self.check, self.violations.len())?;
            for v in &self.violations {
                write!(f, "\n  [{}] {}", v.rule, v.witness)?;
            }
        }
        Ok(())
    }
}
