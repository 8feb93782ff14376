//! Error type shared by all modules.
//!
//! Two failure classes exist at the library level: inputs that violate an
//! operation's preconditions, and radius queries that fall beyond the last
//! breakpoint of a truncated weight representation. Condition failures and
//! non-stabilized suprema are *report states*, not errors; checkers return
//! them inside their report structs.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A precondition on the inputs does not hold.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The query radius lies beyond the last stored breakpoint, so the
    /// truncated supremum would silently underestimate the true value.
    #[error("truncation: ln r = {ln_r:.6} exceeds the last breakpoint t_K = {t_max:.6}; rebuild with a larger K")]
    Truncation { ln_r: f64, t_max: f64 },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
