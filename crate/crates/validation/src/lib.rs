//! Pass/fail bookkeeping for the acceptance suite in `tests/acceptance.rs`.

use std::fmt;

/// Outcome of one numbered acceptance criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(id: u32, title: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            id,
            title,
            passed,
            detail: detail.into(),
        }
    }

    /// Prints the verdict line and panics on failure so the test harness
    /// records it.
    pub fn report(&self) {
        println!("{self}");
        assert!(self.passed, "{self}");
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {} [{tag}] {}: {}", self.id, self.title, self.detail)
    }
}
