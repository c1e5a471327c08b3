use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {}", format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown color `{0}`")]
    UnknownColor(String),

    #[error("unknown side `{0}`")]
    UnknownSide(String),

    #[error("graph for generator g{generator} is not functional at letter `{letter}`")]
    NotFunctional { generator: usize, letter: String },

    #[error("invalid walk: {0}")]
    InvalidWalk(String),

    #[error("solution does not belong to this instance: {0}")]
    MismatchedInstance(String),

    #[error("solution entry for `{0}` is not an integer")]
    NonIntegerSolution(String),

    #[error("relator is not freely reduced at position {position}")]
    NotReduced { position: usize },

    #[error("cannot complete partial graph to a Hamiltonian cycle: {0}")]
    CannotComplete(String),

    #[error("search node budget of {budget} exhausted")]
    ResourceLimit { budget: u64 },

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("equivalence violated: {0}")]
    EquivalenceViolation(String),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
