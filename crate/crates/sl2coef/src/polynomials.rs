//! Classical orthogonal polynomials used by the closed-form routes.

use crate::ddouble::Dd;
use crate::gammakit::binomial;
use crate::real::{cr, Cx, Real};

/// Generalized Laguerre polynomial `L_k^{(alpha)}(x)` by the three-term recurrence.
pub fn laguerre<T: Real>(k: u64, alpha: Cx<T>, x: T) -> Cx<T> {
    let one = cr(T::one());
    let xc = cr(x);
    if k == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = one + alpha - xc;
    for j in 1..k {
        let jf = T::from_u64(j).unwrap();
        let next = ((cr(T::c(2.0) * jf + T::one()) + alpha - xc) * cur - (cr(jf) + alpha) * prev) / (jf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Jacobi polynomial `P_k^{(alpha,beta)}(x)` from the explicit binomial sum
/// `Σ_s C(k+α, k-s) C(k+β, s) ((x-1)/2)^s ((x+1)/2)^{k-s}`.
///
/// The parameters may be negative integers; the generalized binomials are
/// finite products.
pub fn jacobi<T: Real>(k: u64, alpha: Cx<T>, beta: Cx<T>, x: T) -> Cx<T> {
    let kc = cr(T::from_u64(k).unwrap());
    let half = T::c(0.5);
    let xm = (x - T::one()) * half;
    let xp = (x + T::one()) * half;
    let mut acc = cr(T::zero());
    for s in 0..=k {
        let term = binomial(kc + alpha, k - s) * binomial(kc + beta, s);
        let pw = xm.powi(s as i32) * xp.powi((k - s) as i32);
        acc = acc + term * pw;
    }
    acc
}

/// Real-parameter [`jacobi`] accumulated in double-word arithmetic.
///
/// For `x > 1` and negative `β` the binomial sum alternates and can cancel
/// many digits. Returns the value and the cancellation ratio `Σ|term| / |sum|`.
pub fn jacobi_dd<T: Real>(k: u64, alpha: T, beta: T, x: T) -> (T, T) {
    let n = k as usize;
    let one = Dd::new(T::one());
    let kd = Dd::new(T::from_u64(k).unwrap());
    let binoms = |top: Dd<T>| {
        let mut c = vec![one; n + 1];
        for j in 0..n {
            let jd = Dd::new(T::from_usize(j).unwrap());
            c[j + 1] = c[j] * (top - jd) / (jd + one);
        }
        c
    };
    let ca = binoms(kd + Dd::new(alpha));
    let cb = binoms(kd + Dd::new(beta));
    let half = Dd::new(T::c(0.5));
    let powers = |base: Dd<T>| {
        let mut p = vec![one; n + 1];
        for j in 0..n {
            p[j + 1] = p[j] * base;
        }
        p
    };
    let pm = powers((Dd::new(x) - one) * half);
    let pp = powers((Dd::new(x) + one) * half);
    let mut acc = Dd::zero();
    let mut mag = T::zero();
    for s in 0..=n {
        let term = ca[n - s] * cb[s] * pm[s] * pp[n - s];
        mag = mag + term.to_real().abs();
        acc = acc + term;
    }
    let value = acc.to_real();
    (value, mag / value.abs().max(T::min_positive_value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Cx<f64>;

    #[test]
    fn laguerre_low_degree() {
        let a = C::new(0.3, -0.2);
        let x = 1.7;
        let l2 = laguerre(2, a, x);
        let expect = ((a + 1.0) * (a + 2.0) - (a + 2.0) * 2.0 * x + x * x) / 2.0;
        assert!((l2 - expect).norm() < 1e-14);
    }

    #[test]
    fn jacobi_reduces_to_legendre() {
        let z = C::new(0.0, 0.0);
        let x = 2.5f64;
        let p3 = jacobi(3, z, z, x);
        let expect = 0.5 * (5.0 * x.powi(3) - 3.0 * x);
        assert!((p3.re - expect).abs() < 1e-12);
    }

    #[test]
    fn jacobi_at_one() {
        let p = jacobi(4, C::new(2.0, 0.0), C::new(-7.0, 0.0), 1.0);
        // C(k+α, k)
        assert!((p.re - 15.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_dd_matches_plain_sum() {
        for &(k, a, b, x) in &[(3u64, 0.0, 0.0, 2.5), (4, 2.0, -7.0, 1.0), (6, 1.5, -0.25, 3.0)] {
            let (v, cond) = jacobi_dd(k, a, b, x);
            let p = jacobi(k, C::new(a, 0.0), C::new(b, 0.0), x);
            assert!((v - p.re).abs() <= 1e-13 * cond * v.abs().max(1.0), "{v} {}", p.re);
        }
    }

    #[test]
    fn jacobi_dd_survives_cancellation() {
        // reference from a 50-digit evaluation of the same sum
        let (v, cond): (f64, f64) = jacobi_dd(14, 11.0, -40.0, 60.0);
        assert!(cond > 1e12);
        assert!((v / 2.198_280_932_434_335e20 - 1.0).abs() < 1e-14, "{v}");
    }
}
