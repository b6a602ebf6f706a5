use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1} (lift both operands to a common modulus first)")]
    ModulusMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{s} is not coprime to the modulus {m}")]
    NotCoprime { s: u64, m: u64 },
    #[error("fields are not nested: {0}")]
    NotNested(String),
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("prime {0} is ramified")]
    Ramified(u64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("element is not in the annihilator ideal: {0}")]
    NotInAnnihilator(String),
    #[error("rational reconstruction failed: {0}")]
    RationalReconstruction(String),
    #[error("regulator block is singular: {0}")]
    SingularRegulator(String),
    #[error("field missing from family: {0}")]
    FieldMissing(String),
    #[error("degree {degree} exceeds the supported bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("group is not cyclic of the stated order: {0}")]
    NonCyclic(String),
    #[error("arithmetic budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported request: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
