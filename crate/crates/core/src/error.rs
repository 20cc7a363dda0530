use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller-supplied value is out of its domain (empty input, NaN, k = 0, ...).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A combination of options that has no meaning, e.g. partial prefix sums for the
    /// maximum distance cost.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A window query outside the calculator's contract.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Internal state that should be unreachable, e.g. a broken argmin chain.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
