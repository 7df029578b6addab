use thiserror::Error;

use crate::element::SpaceDescriptor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TripleError {
    #[error("incompatible spaces: {left} vs {right}")]
    IncompatibleSpaces {
        left: SpaceDescriptor,
        right: SpaceDescriptor,
    },
    #[error("invalid space descriptor: {0}")]
    InvalidSpace(String),
    #[error("block {index} has shape {got:?}, descriptor expects {expected:?}")]
    BlockShape {
        index: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("element is not a tripotent (residual {residual:.3e})")]
    InvalidTripotent { residual: f64 },
    #[error("element is not in the Peirce 2-space of the tripotent (residual {residual:.3e})")]
    NotInPeirce2 { residual: f64 },
    #[error("exponent {0} must be an odd positive integer")]
    InvalidExponent(i64),
    #[error("operation undefined at the zero element")]
    ZeroElement,
    #[error("operation needs a single matrix factor, got {0}")]
    NotSingleFactor(SpaceDescriptor),
    #[error("element is not BP quasi-invertible")]
    NoQuasiInverse,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported decomposition: {0}")]
    UnsupportedDecomposition(String),
    #[error("norm {0} exceeds 1; lambda is defined on the closed unit ball")]
    OutsideUnitBall(f64),
    #[error("invalid rank profile {profile:?} for {space}")]
    InvalidRankProfile {
        space: SpaceDescriptor,
        profile: Vec<usize>,
    },
    #[error("certificate check failed: {0}")]
    CertificateFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, TripleError>;
