//! Pseudo-spectral solver core for compressible MHD coupled to a nonlinear
//! Schrödinger field written in Lagrangian coordinates, on the periodic unit
//! square. Needs only `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod coupling;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod fluid;
pub mod grid;
pub mod lagrangian;
pub mod magnetics;
pub mod momentum;
pub mod schrodinger;
pub mod stepper;
pub mod velocity;

pub use error::{Error, Result};
pub use grid::{ComplexField, Grid, ScalarField, Spectrum, VectorField};
pub use num_complex::Complex64;
