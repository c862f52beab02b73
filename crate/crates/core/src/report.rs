//! Verification reports: named checks with expected and computed values.

use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1";

/// How `computed` is compared with `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|computed − expected| ≤ tolerance`
    Absolute,
    /// `|computed − expected| ≤ tolerance·|expected|`
    Relative,
    /// `computed ≤ expected`
    AtMost,
    /// `computed ≥ expected`
    AtLeast,
    /// `computed < expected`
    Below,
    /// `computed > expected`
    Above,
    /// `computed == expected`
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    /// Acceptance criterion the check belongs to, if any.
    pub criterion: Option<u32>,
    pub name: String,
    /// The claim being checked.
    pub reference: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    pub fn new(
        criterion: Option<u32>,
        name: impl Into<String>,
        reference: impl Into<String>,
        expected: f64,
        computed: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let passed = match comparison {
            Comparison::Absolute => (computed - expected).abs() <= tolerance,
            Comparison::Relative => (computed - expected).abs() <= tolerance * expected.abs(),
            Comparison::AtMost => computed <= expected,
            Comparison::AtLeast => computed >= expected,
            Comparison::Below => computed < expected,
            Comparison::Above => computed > expected,
            Comparison::Exact => computed == expected,
        };
        Check {
            criterion,
            name: name.into(),
            reference: reference.into(),
            expected,
            computed,
            tolerance,
            comparison,
            passed,
        }
    }

    /// A yes/no check recorded as `1` (holds) against an expected `1`.
    pub fn flag(criterion: Option<u32>, name: impl Into<String>, reference: impl Into<String>, holds: bool) -> Self {
        Check::new(criterion, name, reference, 1.0, if holds { 1.0 } else { 0.0 }, 0.0, Comparison::Exact)
    }

    /// A check that could not be evaluated.
    pub fn failed(criterion: Option<u32>, name: impl Into<String>, reference: impl Into<String>, why: &str) -> Self {
        let mut c = Check::new(criterion, name, format!("{} ({why})", reference.into()), 1.0, f64::NAN, 0.0, Comparison::Exact);
        c.passed = false;
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, checks: Vec<Check>) -> Self {
        VerificationReport {
            schema: SCHEMA_VERSION,
            suite: suite.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Whether every check tagged with `criterion` passed; `None` when there are none.
    pub fn criterion_passed(&self, criterion: u32) -> Option<bool> {
        let mut any = false;
        for c in self.checks.iter().filter(|c| c.criterion == Some(criterion)) {
            any = true;
            if !c.passed {
                return Some(false);
            }
        }
        any.then_some(true)
    }

    /// Fixed-width summary, one line per check.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = c.criterion.map_or("-".to_string(), |n| n.to_string());
            out.push_str(&format!(
                "{:<4} {:<4} {:<58} expected {:>14.7e} computed {:>14.7e}\n",
                if c.passed { "ok" } else { "FAIL" },
                tag,
                c.name,
                c.expected,
                c.computed
            ));
        }
        let failed = self.failures().count();
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        out
    }
}
