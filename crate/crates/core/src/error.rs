use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("root closure exceeded {bound} roots; Cartan matrix is not of finite type")]
    NonFiniteType { bound: usize },
    #[error("unknown root system type {0:?}")]
    UnknownType(String),
    #[error("Weyl group has more than {bound} elements")]
    GroupTooLarge { bound: usize },
    #[error("simple index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("elements belong to different root systems")]
    MixedRootSystems,
    #[error("operation requires a root system of type A")]
    NotTypeA,
    #[error("not a permutation of 1..{n}: {input}")]
    NotAPermutation { n: usize, input: String },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("polynomial is not divisible by {divisor}")]
    NotDivisible { divisor: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("recurrence and oracle disagree at u = {u}: recurrence {recurrence}, oracle {oracle}")]
    EngineMismatch {
        u: String,
        recurrence: String,
        oracle: String,
    },
    #[error("length condition violated: {0}")]
    DimensionMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
