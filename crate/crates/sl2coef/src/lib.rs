//! Matrix coefficients of the unitary and uniformly bounded representations
//! of `SL(2,ℝ)` and its universal cover, their Whittaker-function
//! approximations, and numerical certification of the error bounds.
//!
//! The special-function kernels are generic over [`Real`] (`f32`, `f64`);
//! scans and Fourier experiments run in `f64`.

// `!(a <= b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asym;
pub mod coeffs;
pub mod ddouble;
pub mod error;
pub mod fourier;
pub mod gammakit;
pub mod hyp2f1;
pub mod params;
pub mod polynomials;
pub mod quadrature;
pub mod real;
pub mod whittaker;

pub use error::{Error, Result};
pub use real::{Cx, Real};

/// Complex number over `f64`.
pub type C64 = num_complex::Complex<f64>;
/// Complex number over `f32`.
pub type C32 = num_complex::Complex<f32>;
