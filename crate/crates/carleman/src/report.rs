//! Report plumbing shared by the checkers.

use serde::Serialize;

/// Outcome of a numeric check. `Fail` means the asserted inequality was
/// violated on the scanned grid; `Inconclusive` means a supremum or lim-inf
/// proxy did not stabilize, so nothing can be claimed either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    /// Fail dominates, then Inconclusive.
    pub fn combine(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn from_flags(passed: bool, stabilized: bool) -> Status {
        if !stabilized {
            Status::Inconclusive
        } else if passed {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

pub fn combine_all<I: IntoIterator<Item = Status>>(statuses: I) -> Status {
    statuses
        .into_iter()
        .fold(Status::Pass, |acc, s| acc.combine(s))
}
