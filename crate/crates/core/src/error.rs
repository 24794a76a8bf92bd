use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field or problem too large: {0}")]
    FieldTooLarge(String),

    #[error("no irreducible polynomial of degree {degree} found over F_{p}")]
    NoIrreducibleFound { p: u64, degree: u32 },

    #[error("{d} does not divide q - 1 = {q_minus_one}")]
    OrderDoesNotDivide { d: u64, q_minus_one: u64 },

    #[error("polynomial does not split into distinct linear factors mod {q}: {found} roots (with multiplicity) for degree {degree}")]
    NotTotallySplit { q: u64, found: usize, degree: usize },

    #[error("direct summation needs {needed} terms, above the guard {limit}")]
    CostGuard { needed: f64, limit: f64 },

    #[error("characteristic 2 is not supported here")]
    EvenCharacteristic,

    #[error("value {value} outside [-2, 2]")]
    ValueOutOfRange { value: f64 },

    #[error("integer entry exceeds {bits} bits")]
    Overflow { bits: u64 },

    #[error("problem size {size} exceeds guard {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("total masses differ: {0} vs {1}")]
    MassMismatch(f64, f64),

    #[error("reference measure has unbounded support")]
    UnboundedSupport,

    #[error("lattice enumeration of {size} terms exceeds guard {limit}")]
    LatticeGuard { size: f64, limit: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("rate fit needs at least 3 points, got {0}")]
    InsufficientData(usize),

    #[error("wall-time limit exceeded at q = {q}: {secs:.1}s")]
    WallTime { q: u64, secs: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error comes from a mathematical guard (size caps, field
    /// conditions) rather than from user configuration.
    pub fn is_math_guard(&self) -> bool {
        !matches!(
            self,
            Error::Config(_) | Error::InvalidInput(_) | Error::Io(_) | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
