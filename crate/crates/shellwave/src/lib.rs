//! Fiber-level numerics for Dirac operators with squeezed potentials and
//! delta-shell interactions on a flat interface.

pub mod coupling_calculus;
pub mod dirac_algebra;
pub mod error;
pub mod fiber_operators;
pub mod green_kernels;
pub mod linalg;
pub mod parallel;
pub mod quadrature;
pub mod resolvent_engine;
pub mod special_functions;
pub mod spectral_probe;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
