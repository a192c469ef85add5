use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// The group or generating-set axiom that failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// A table entry is not an element index.
    Closure,
    /// No identity row, or the identity column is wrong.
    Identity,
    /// Some element has no two-sided inverse.
    Inverse,
    Associativity,
    ContainsIdentity,
    NotSymmetric,
    NotGenerating,
    DuplicateGenerator,
    EmptyGenerators,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::Closure => "Closure",
            Axiom::Identity => "Identity",
            Axiom::Inverse => "Inverse",
            Axiom::Associativity => "Associativity",
            Axiom::ContainsIdentity => "ContainsIdentity",
            Axiom::NotSymmetric => "NotSymmetric",
            Axiom::NotGenerating => "NotGenerating",
            Axiom::DuplicateGenerator => "DuplicateGenerator",
            Axiom::EmptyGenerators => "EmptyGenerators",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("group order {0} exceeds the limit of {limit}", limit = crate::group::MAX_ORDER)]
    SizeLimitExceeded(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invariant violated: {0}")]
    InvariantViolation(Axiom),
    #[error("row {row} sums to {sum}")]
    NonStochasticRow { row: usize, sum: f64 },
    #[error("detailed balance fails at ({a}, {b}) by {err:e}")]
    NotReversible { a: usize, b: usize, err: f64 },
    #[error("comparison inequality violated: {0}")]
    ComparisonViolated(String),
    #[error("positive part of the eigenvector has mass {0:e}")]
    DegenerateEigenvector(f64),
    #[error("rejection sampler gave up after {0} attempts")]
    RejectionBudgetExceeded(usize),
    #[error("updated pair carries mass {0:e}")]
    DegeneratePairMass(f64),
    #[error("domination violated at step {t}, coordinate {i}: gap {gap:e}")]
    DominationViolated { t: usize, i: usize, gap: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
