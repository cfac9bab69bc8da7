use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported filter order {order} (supported: {min}..={max})")]
    UnsupportedOrder { order: usize, min: usize, max: usize },

    #[error("sequence length {0} is not a power of two")]
    LengthNotPowerOfTwo(usize),

    #[error("level {level} out of range for a transform with {levels} levels")]
    LevelOutOfRange { level: i64, levels: u32 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("wavelet at level {level} cannot be resolved on a grid with {levels} levels")]
    ResolutionTooCoarse { level: i64, levels: u32 },

    #[error("invalid exponent {name} = {value}")]
    InvalidExponent { name: &'static str, value: f64 },

    #[error("sequence entries must be finite and nonnegative (index {index}: {value})")]
    NegativeEntry { index: usize, value: f64 },

    #[error("empty sequence")]
    EmptySequence,

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("unknown kernel family `{0}`")]
    UnknownFamily(String),

    #[error("missing parameter `{0}`")]
    ParameterMissing(String),

    #[error("parameter `{name}` out of range: {reason}")]
    ParameterOutOfRange { name: String, reason: String },

    #[error("no admissible wavelet positions in the requested scale range")]
    ScaleRangeTooSmall,

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("format error at line {line}: {message}")]
    FormatError { line: usize, message: String },

    #[error("grid with {0} points is not a power of two")]
    NonPowerOfTwoGrid(usize),

    #[error("invalid Besov parameters: {0}")]
    InvalidBesovParams(String),

    #[error("kernel is identically zero")]
    ZeroKernel,

    #[error("singular value iteration did not converge after {0} sweeps")]
    ConvergenceFailure(usize),

    #[error("spectrum has {0} entries, at least {1} required")]
    SpectrumTooShort(usize, usize),

    #[error("spectrum is identically zero")]
    ZeroSpectrum,

    #[error("nonpositive singular value at index {0} inside the fit range")]
    NonpositiveValuesInRange(usize),

    #[error("partition has no strips")]
    EmptyPartition,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("matrix of size {0} exceeds the oracle limit of {1}")]
    MatrixTooLarge(usize, usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
