//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qudit dimension {d} outside supported range {min}..={max}")]
    DimensionOutOfRange { d: usize, min: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("vector not normalized: |Σ|x|² − 1| = {0:.3e}")]
    NotNormalized(f64),

    #[error("basis columns not orthonormal: max deviation {0:.3e}")]
    NotOrthonormal(f64),

    #[error("matrix not Hermitian: max deviation {0:.3e}")]
    NotHermitian(f64),

    #[error("trace deviates from one by {0:.3e}")]
    NotUnitTrace(f64),

    #[error("noise fraction {0} outside [0, 1]")]
    InvalidNoiseFraction(f64),

    #[error("{0} is not defined for amplitude-damping noise")]
    AmplitudeDampingUnsupported(&'static str),

    #[error("{0} is not defined for the noiseless kind")]
    NoiselessKindUnsupported(&'static str),

    #[error("register index {index} out of range for {registers} registers")]
    RegisterOutOfRange { index: usize, registers: usize },

    #[error("invalid register subset: {0}")]
    InvalidRegisterSubset(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("dimension {d} exceeds the 3-qudit simulation cap {cap}")]
    OracleDimensionCap { d: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
