use thiserror::Error;

/// Errors surfaced by the public evaluation and classification APIs.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the requested
    /// quantity (wrong sign, order out of range, point outside the kernel's
    /// domain of definition).
    #[error("domain error: {0}")]
    Domain(String),

    /// A grid or evaluation request touches a singular point where the
    /// requested quantity is not a finite number and no limiting convention
    /// applies.
    #[error("singular point: {0}")]
    Singular(String),

    /// A named side condition between parameters is violated.
    #[error("constraint violated: {0}")]
    Constraint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
