//! Finite and numerical verification of the orbit-method approach to the
//! sup-norm problem for PGL(2) newforms of large level and eigenvalue.

pub mod amplifier;
pub mod archimedean;
pub mod bessel;
pub mod config;
pub mod counting;
pub mod error;
pub mod exponents;
pub mod linalg;
pub mod padic;
pub mod principal;
pub mod quad;
pub mod report;
pub mod sl2;
pub mod suites;
pub mod volumes;
pub mod whittaker;

pub use error::{Error, Result};
pub use num_complex::Complex64;
