//! Library-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 8")]
    InvalidGridSize(usize),

    #[error("half-width must be positive, got {0}")]
    InvalidHalfWidth(f64),

    #[error("square half-side must be positive, got {0}")]
    InvalidHalfSide(f64),

    #[error("sampled formula returned a non-finite value at z = {0}")]
    NonFiniteSample(rustfft::num_complex::Complex64),

    #[error("field contains a non-finite value at flat index {0}")]
    NonFiniteField(usize),

    #[error("square {0} does not contain any grid sample")]
    EmptySquare(String),

    #[error("square {0} lies outside the window")]
    OutsideWindow(String),

    #[error("{0} must sit inside the central half-window, got {1}")]
    HalfWindowGuard(&'static str, String),

    #[error("truncation scale {eta} is below the resolvable minimum 2h = {min}")]
    TruncationTooFine { eta: f64, min: f64 },

    #[error("scale list is empty")]
    EmptyScales,

    #[error("square family must be non-empty")]
    EmptyFamily,

    #[error("field is not real-valued (imaginary part present at flat index {0})")]
    NotRealField(usize),

    #[error("weight must be strictly positive; value {value} at flat index {index}")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("exponent p must lie in (1, inf), got {0}")]
    InvalidExponent(f64),

    #[error("kappa must lie in (0, 1), got {0}")]
    InvalidKappa(f64),

    #[error("per-square quantity overflowed for {0} (not clipped)")]
    Overflow(String),

    #[error("need at least two usable subsets for a fit, got {0}")]
    DegenerateFit(usize),

    #[error("translation {0} is not an integer multiple of the grid spacing")]
    ShiftOffGrid(rustfft::num_complex::Complex64),

    #[error("oscillation {osc} on square {square} does not exceed the threshold {delta}")]
    OscillationBelowThreshold { square: String, osc: f64, delta: f64 },

    #[error("coefficient must satisfy max|b| < 1, got {0}")]
    NotContractive(f64),

    #[error("coefficient support leaks outside the central half-window (|b| = {0} there)")]
    SupportLeak(f64),

    #[error("dilated squares {0} and {1} are not disjoint")]
    NotDisjoint(String, String),

    #[error("radii are neither monotone nor pinched between positive bounds")]
    BadRadii,

    #[error("power N must be >= 1; use the identity directly for N = 0")]
    ZeroPower,

    #[error("right-hand side g vanishes; the requested ratio is undefined")]
    ZeroRhs,

    #[error("{0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
