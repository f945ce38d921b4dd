//! choimap computes finite-temperature reduced dynamical maps of linear
//! vibronic-coupling models from a single tensor-train propagation of a
//! thermofield-purified state, and post-processes the resulting Choi-matrix
//! series into channel diagnostics, memory kernels, transfer tensors, and
//! effective rate models.

extern crate blas_src;

pub mod error;
pub mod linalg;
pub mod tt;
pub mod units;

pub use error::{Error, Result};
