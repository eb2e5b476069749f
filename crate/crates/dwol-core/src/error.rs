//! Error types shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// A squared trap frequency came out non-positive (inverted well).
    #[error("non-confining parameter set: omega_{axis}^2 = {omega_sq:.6e} <= 0")]
    NonConfining { axis: char, omega_sq: f64 },

    /// Parameter validation failed outside the confinement checks.
    #[error("invalid lattice parameters: {0}")]
    InvalidParams(String),

    /// A trajectory was queried with a model it was not designed for.
    #[error("axis mismatch: trajectory omega_{axis} = {expected:.6e}, model has {found:.6e}")]
    AxisMismatch { axis: char, expected: f64, found: f64 },

    /// Mode or polynomial index above the configured cap.
    #[error("index {index} exceeds the configured maximum {max}")]
    IndexTooLarge { index: usize, max: usize },

    /// The adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failure: error estimate {achieved:.3e} above tolerance {requested:.3e} after {panels} panels")]
    QuadratureFailure { achieved: f64, requested: f64, panels: usize },

    /// The correction-basis interpolation system cannot be satisfied.
    #[error("singular interpolation system for correction basis (degree {degree})")]
    SingularSystem { degree: usize },

    /// A wave field carried the wrong frame tag for the requested operation.
    #[error("frame mismatch: expected {expected}, found {found}")]
    FrameMismatch { expected: &'static str, found: &'static str },

    /// Two wave fields live on different grids.
    #[error("grid mismatch between wave fields")]
    GridMismatch,

    /// A non-finite amplitude appeared during propagation.
    #[error("non-finite amplitude encountered at t = {t:.6e}")]
    NonFiniteAmplitude { t: f64 },

    /// Adaptive stepping pushed dt below the hard floor t_f / 2^20.
    #[error("step underflow: dt = {dt:.3e} below floor {floor:.3e}")]
    StepUnderflow { dt: f64, floor: f64 },

    /// Imaginary-time evolution did not converge within the iteration cap.
    #[error("imaginary-time evolution did not converge after {iters} iterations (last |dE|/|E|/dtau = {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    /// Wave-packet amplitude reached the grid boundary (wrap-around risk).
    #[error("boundary contamination at t = {t:.6e}: boundary amplitude fraction {fraction:.3e} exceeds {limit:.3e}")]
    BoundaryContamination { t: f64, fraction: f64, limit: f64 },

    /// Binary wave-field file could not be decoded.
    #[error("malformed wave-field dump: {0}")]
    MalformedDump(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
