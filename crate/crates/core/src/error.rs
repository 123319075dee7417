//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not symmetric: |s[{i}][{j}] - s[{j}][{i}]| = {gap:e}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("singular linear system (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("linear part not Hurwitz: {0}")]
    NotHurwitz(String),

    #[error("Q is singular: min |eigenvalue| = {0:e}")]
    SingularQ(f64),

    #[error("dissipation inequality violated: lambda_max(QA + A^T Q) = {margin} exceeds omega = {omega}")]
    DissipationViolated { margin: f64, omega: f64 },

    #[error("certificate check failed: {0}")]
    CertificateCheck(String),

    #[error("no positive basin: Fréchet hypothesis fails (gain modulus does not vanish at 0)")]
    NoBasin,

    #[error("certificate has no basin level delta")]
    MissingDelta,

    #[error("initial state outside the certified basin: V(x0) = {value:e} > delta = {delta:e}")]
    OutsideBasin { value: f64, delta: f64 },

    #[error("evaluation at t = {t} is at or past the escape time {t_star}")]
    PastEscapeTime { t: f64, t_star: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}
