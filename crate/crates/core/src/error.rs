use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("coefficient vector has length {got}, expected {expected} for p = {p}")]
    CoefficientLength { p: u64, expected: usize, got: usize },

    #[error("elements live in different fields: p = {left} vs p = {right}")]
    IncompatibleFields { left: u64, right: u64 },

    #[error("box half-width must be at least 1")]
    EmptyBox,

    #[error("degenerate angle: both arguments must be non-zero")]
    DegenerateAngle,

    #[error("degenerate pair: visibility needs two distinct points")]
    DegeneratePair,

    #[error("Galois index {k} is not coprime to p = {p}")]
    GaloisIndex { p: u64, k: u64 },

    #[error("q = {0} must be odd")]
    EvenModulus(u64),

    #[error("q = {0} must be at least 3")]
    ModulusTooSmall(u64),

    #[error("exhaustive enumeration refused for p = {p} (limit {limit})")]
    OracleTooLarge { p: u64, limit: u64 },

    #[error("point lies outside the box B({p},{n})")]
    OutsideBox { p: u64, n: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rejection sampler gave up after {attempts} attempts")]
    AttemptsExhausted { attempts: u64 },

    #[error("scene needs {needed} points but the budget is {budget}")]
    BudgetExceeded { needed: String, budget: usize },
}

impl Error {
    /// True for refusals caused by size limits rather than bad input.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::OracleTooLarge { .. } | Error::BudgetExceeded { .. } | Error::AttemptsExhausted { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
