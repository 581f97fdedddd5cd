use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field parameters: {0}")]
    InvalidField(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("group order {order} exceeds the enumeration cap of {cap} elements")]
    CapExceeded { order: u128, cap: usize },

    #[error("subgroup is not normal in the parent group")]
    NotNormal,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An object whose existence is guaranteed by the structure theory was not
    /// found. The payload is a serialized counterexample.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("construction invariant broken: {0}")]
    Construction(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
