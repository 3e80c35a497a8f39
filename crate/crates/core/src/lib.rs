//! Bergman kernels, Green functions and logarithmic capacity on plane
//! domains: discs, annuli, Green sublevel sets and finitely punctured versions.
//!
//! Kernels follow the plane area normalisation, so the unit disc kernel is
//! `1 / (pi (1 - t conj(z))^2)`.

#![no_std]
// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bergman;
pub mod error;
pub mod extension;
pub mod gauss;
pub mod geometry;
pub mod green;
pub mod mapping;
pub mod quadrature;
pub mod roots;
pub mod suita;
pub mod variation;

pub use error::{Error, Result};
pub use geometry::{Connectivity, DomainSpec};
pub use num_complex::Complex64;

/// A point of the plane.
pub type Point = Complex64;
