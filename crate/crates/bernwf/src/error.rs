//! Error type shared by the whole crate.
//!
//! Domain violations always name the offending parameter so that CLI
//! wrappers can report usage errors precisely.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// A parameter lies outside the documented domain of an operation.
    #[error("parameter `{param}` out of domain: {reason}")]
    Domain { param: &'static str, reason: String },
}

impl Error {
    pub fn domain(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            param,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks that a float parameter is finite and inside `[0, 1]`.
pub(crate) fn check_unit_interval(param: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::domain(param, format!("{value} is not in [0, 1]")));
    }
    Ok(())
}
