//! Double-word arithmetic (`hi + lo`) over a [`Real`] base type.
//!
//! Only what the hypergeometric series needs: add, sub, mul, div on real
//! and complex values, with error-free transformations built on `mul_add`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::real::{Cx, Real};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd<T> {
    pub hi: T,
    pub lo: T,
}

#[inline]
fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod<T: Real>(a: T, b: T) -> (T, T) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl<T: Real> Dd<T> {
    pub fn new(v: T) -> Self {
        Self { hi: v, lo: T::zero() }
    }

    pub fn zero() -> Self {
        Self::new(T::zero())
    }

    pub fn to_real(self) -> T {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < T::zero() {
            -self
        } else {
            self
        }
    }

    /// Unit roundoff of the double-word format.
    pub fn epsilon() -> T {
        T::epsilon() * T::epsilon()
    }
}

impl<T: Real> Add for Dd<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl<T: Real> Neg for Dd<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl<T: Real> Sub for Dd<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Mul for Dd<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl<T: Real> Div for Dd<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Complex double-word number.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CDd<T> {
    pub re: Dd<T>,
    pub im: Dd<T>,
}

impl<T: Real> CDd<T> {
    pub fn new(re: Dd<T>, im: Dd<T>) -> Self {
        Self { re, im }
    }

    pub fn from_cx(z: Cx<T>) -> Self {
        Self { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    pub fn real(v: Dd<T>) -> Self {
        Self { re: v, im: Dd::zero() }
    }

    /// Exact-as-possible sum of several single-word complex terms.
    pub fn sum_of(terms: &[Cx<T>]) -> Self {
        terms.iter().fold(Self::default(), |acc, &t| acc + Self::from_cx(t))
    }

    pub fn to_cx(self) -> Cx<T> {
        Cx::new(self.re.to_real(), self.im.to_real())
    }

    /// Approximate modulus, single-word accuracy.
    pub fn norm(self) -> T {
        self.to_cx().norm()
    }

    pub fn scale(self, s: Dd<T>) -> Self {
        Self { re: self.re * s, im: self.im * s }
    }
}

impl<T: Real> Add for CDd<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl<T: Real> Sub for CDd<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}

impl<T: Real> Neg for CDd<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

impl<T: Real> Mul for CDd<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl<T: Real> Div for CDd<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let den = o.re * o.re + o.im * o.im;
        let num = self * CDd { re: o.re, im: -o.im };
        Self { re: num.re / den, im: num.im / den }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_lost_bits() {
        let a = Dd::new(1.0f64) + Dd::new(1e-20);
        let b = a - Dd::new(1.0);
        assert!((b.to_real() - 1e-20).abs() < 1e-35);
        let third = Dd::new(1.0f64) / Dd::new(3.0);
        let back = third * Dd::new(3.0) - Dd::new(1.0);
        assert!(back.to_real().abs() < 1e-31);
    }

    #[test]
    fn complex_division() {
        let z = CDd::from_cx(Cx::new(0.3f64, -1.7));
        let w = CDd::from_cx(Cx::new(-2.1f64, 0.4));
        let r = (z / w) * w - z;
        assert!(r.norm() < 1e-30);
    }
}
