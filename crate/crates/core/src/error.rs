use num_bigint::BigInt;
use thiserror::Error;

use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("radicand mismatch: {left} vs {right}")]
    RadicandMismatch { left: Box<Rational>, right: Box<Rational> },

    #[error("radicand must be positive, got {0}")]
    NonPositiveRadicand(Box<Rational>),

    #[error("quaternion algebras differ: ({0}) vs ({1})")]
    AlgebraMismatch(String, String),

    #[error("quaternion algebra parameters must be nonzero")]
    ZeroAlgebraParameter,

    #[error("embedding into real matrices needs a > 0, got a = {0}")]
    NonRealEmbedding(Box<Rational>),

    #[error("Hilbert symbol arguments must be nonzero")]
    ZeroHilbertArgument,

    #[error("integer {0} is too large to factor by trial division")]
    FactorizationTooLarge(BigInt),

    #[error("no isotropic vector found with coordinates up to height {bound}")]
    SearchExhausted { bound: u64 },

    #[error("matrix has determinant {0}, expected 1")]
    NotUnimodular(BigInt),

    #[error("element with trace {0} is not hyperbolic")]
    NotHyperbolic(BigInt),

    #[error("form discriminant {0} must be positive and not a perfect square")]
    BadDiscriminant(BigInt),

    #[error("trace must be at least 3, got {0}")]
    TraceTooSmall(i64),

    #[error("level N = {got} is out of range (need N >= {min})")]
    LevelTooSmall { got: u64, min: u64 },

    #[error("p = {0} must be a prime congruent to 3 mod 4")]
    BadQuaternionPrime(u64),

    #[error("trace of beta is {trace}, expected +/-{level}")]
    WrongWitnessTrace { trace: BigInt, level: u64 },

    #[error("quaternion coordinates must be integers")]
    NonIntegral,

    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
