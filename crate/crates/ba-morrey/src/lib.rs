//! Numerical toolkit for the Beurling–Ahlfors transform on a periodic grid:
//! the transform itself (spectral multiplier and truncated-kernel quadrature),
//! Muckenhoupt weights, weighted Morrey norms, mean-oscillation and median
//! machinery, commutator experiments, and a Neumann-series Beltrami solver.
//!
//! The window `[-L, L)^2` of the complex plane is sampled on an `n x n` grid
//! and identified with a torus, so the spectral paths are exact for
//! band-limited fields. Experiments keep their supports in the central
//! half-window; constructors that build shifted or dilated squares enforce
//! that guard.

pub mod beltrami;
pub mod commutator;
pub mod error;
pub mod experiments;
pub mod family;
pub mod fields;
pub mod grid;
pub mod morrey;
pub mod oscillation;
pub mod transforms;
pub mod weights;

pub use error::{Error, Result};
pub use family::SquareFamily;
pub use grid::{ComplexField, GridSpec, RealField, Square};
pub use morrey::MorreyParams;
pub use weights::Weight;

/// Complex sample type used throughout; re-exported from `rustfft`.
pub use rustfft::num_complex::Complex64;
