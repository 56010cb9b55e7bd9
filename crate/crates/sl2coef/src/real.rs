//! Scalar abstraction shared by all numerical kernels.
//!
//! Only `f32` and `f64` implement [`Real`]; the trait is sealed.

use std::fmt::{Debug, Display};
use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

use crate::quadrature::QuadTables;

mod sealed {
    pub trait Sealed {}
    impl Sealed for f32 {}
    impl Sealed for f64 {}
}

/// Floating-point scalar usable by the special-function kernels.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static + sealed::Sealed
{
    /// Converts an `f64` literal.
    fn c(v: f64) -> Self;
    /// Widens to `f64`.
    fn to_f64(self) -> f64;
    /// Complementary error function.
    fn erfc(self) -> Self;
    /// Relative truncation tolerance for convergent series.
    fn series_tol() -> Self;
    /// Process-wide quadrature tables for this scalar type.
    fn quad_tables() -> &'static QuadTables<Self>;
}

impl Real for f64 {
    #[inline]
    fn c(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
    fn series_tol() -> Self {
        1e-15
    }
    fn quad_tables() -> &'static QuadTables<Self> {
        static TABLES: OnceLock<QuadTables<f64>> = OnceLock::new();
        TABLES.get_or_init(QuadTables::new)
    }
}

impl Real for f32 {
    #[inline]
    fn c(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
    fn series_tol() -> Self {
        1e-7
    }
    fn quad_tables() -> &'static QuadTables<Self> {
        static TABLES: OnceLock<QuadTables<f32>> = OnceLock::new();
        TABLES.get_or_init(QuadTables::new)
    }
}

/// Complex number over `T`.
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// `true` when `v` is within `tol` of an integer.
#[inline]
pub(crate) fn near_int<T: Real>(v: T, tol: T) -> bool {
    (v - v.round()).abs() <= tol
}

/// `true` when `z` is real and within `tol` of a nonpositive integer.
pub(crate) fn is_nonpos_int<T: Real>(z: Cx<T>, tol: T) -> bool {
    z.im == T::zero() && z.re < T::c(0.5) && near_int(z.re, tol)
}

/// `(-1)^k` for an integer-valued `k`.
#[inline]
#[allow(dead_code)]
pub(crate) fn parity_sign<T: Real>(k: i64) -> T {
    if k.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}
