use thiserror::Error;

/// Errors raised by the operator, divergence and measure layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative residual {residual:.3e} exceeds {tol:.1e})")]
    NonHermitian { residual: f64, tol: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("scalar function undefined at eigenvalue {0}")]
    Domain(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("state is not normalized (trace {0})")]
    NotNormalized(f64),

    #[error("rank {rank} outside 1..={dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("alpha = {0} is not admissible: {1}")]
    BadAlpha(f64, &'static str),

    #[error("sigma is the zero operator")]
    DegenerateSigma,

    #[error("second argument of the f-divergence is singular")]
    SingularB,

    #[error("{0} is not positive definite")]
    RankDeficient(&'static str),

    #[error("relative entropy term is infinite")]
    InfiniteTerm,

    #[error("channel is not strict: N(I) has min eigenvalue {0:.3e}")]
    NotStrict(f64),

    #[error("inconsistent block dimensions: {0}")]
    InconsistentDims(String),

    #[error("channel is not trace preserving (residual {0:.3e})")]
    NotTracePreserving(f64),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
