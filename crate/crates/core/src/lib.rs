//! Numerical laboratory for commutator growth in the quantum baker's map.
//!
//! The crate builds the quantum baker propagator and its semiquantum
//! counterpart from shifted discrete Fourier transforms, evaluates
//! out-of-time-ordered correlators through truncations of the time-evolved
//! propagator, and compares them with closed-form semiquantum sums and
//! circular-unitary-ensemble saturation values.
//!
//! Module map:
//!
//! - [`classical_baker`]: the classical map, bit reversal and period-t points.
//! - [`matrix_core`]: dense complex matrices, truncation, singular values and
//!   non-Hermitian eigenvalues.
//! - [`quantum_baker`]: the propagators `B`, `B^t` and the semiquantum `B_t`.
//! - [`otoc`]: `f2`, `f4` and `f` for projector and general observables.
//! - [`analytics`]: closed forms, digamma asymptotics and CUE baselines.
//! - [`cli`]: experiment configuration, CSV datasets and the verify suite.

pub mod analytics;
pub mod classical_baker;
pub mod cli;
pub mod error;
pub mod matrix_core;
pub mod otoc;
pub mod quantum_baker;

pub use error::{Error, Result};
pub use matrix_core::ComplexMatrix;
pub use otoc::ProjectorRange;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
