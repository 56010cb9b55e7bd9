//! Gauss hypergeometric function `₂F₁(a,b;c;z)` for real `z <= 0`.
//!
//! The argument is mapped into `[0,1)` with the Pfaff transformation
//! `F(a,b;c;z) = (1-z)^{-a} F(a,c-b;c;z/(z-1))` (or its `a↔b` twin) and the
//! power series is summed. Terminating series are summed verbatim.
//! Series that lose too many digits to cancellation are re-summed in
//! double-word arithmetic.

use num_traits::Zero;

use crate::ddouble::{CDd, Dd};
use crate::error::{domain, Error, Result};
use crate::real::{cr, Cx, Real};

/// Largest mapped argument accepted by the Pfaff series.
pub const MAX_MAPPED_ARG: f64 = 0.995;
/// Term limit for a single series.
pub const MAX_TERMS: usize = 100_000;
/// Relative accuracy targeted by the series.
pub const SERIES_REL_TOL: f64 = 1e-13;
// the unmapped series is only summed for |z| below this
const DIRECT_MAX_ABS: f64 = 0.75;
const INT_TOL: f64 = 1e-12;

/// Which representation produced the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hyp2F1Branch {
    Trivial,
    Direct,
    PfaffA,
    PfaffB,
}

/// Value with conditioning information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Value<T> {
    pub value: Cx<T>,
    /// `Σ|terms| / |sum|` of the chosen series.
    pub cond: T,
    pub terms: usize,
    pub branch: Hyp2F1Branch,
    pub est_rel_err: T,
}

/// Returns `Some(N)` when `a` is within tolerance of `-N`, `N ∈ ℕ₀`.
pub(crate) fn neg_int<T: Real>(a: Cx<T>) -> Option<u64> {
    if a.im != T::zero() {
        return None;
    }
    let r = a.re.round();
    let tol = T::c(INT_TOL) * T::one().max(a.re.abs());
    if r <= T::zero() && (a.re - r).abs() <= tol {
        Some((-r).to_f64() as u64)
    } else {
        None
    }
}

struct SeriesSum<T> {
    value: Cx<T>,
    abs: T,
    terms: usize,
}

fn sum_series<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, w: T, stop: Option<u64>) -> Result<SeriesSum<T>> {
    let tol = T::series_tol();
    let mut term = cr(T::one());
    let mut sum = term;
    let mut abs = T::one();
    if w == T::zero() {
        return Ok(SeriesSum { value: sum, abs, terms: 1 });
    }
    for k in 0..MAX_TERMS {
        if let Some(n) = stop {
            if k as u64 >= n {
                return Ok(SeriesSum { value: sum, abs, terms: k + 1 });
            }
        }
        let kf = T::from_usize(k).unwrap();
        let den = (c + cr(kf)) * (kf + T::one());
        if den.is_zero() {
            return Err(domain("hyp2f1: c is a nonpositive integer"));
        }
        term = term * (a + cr(kf)) * (b + cr(kf)) / den * w;
        sum = sum + term;
        let at = term.norm();
        abs = abs + at;
        if stop.is_none() && at <= tol * sum.norm() {
            let k1 = kf + T::one();
            let r = ((a + cr(k1)) * (b + cr(k1)) / ((c + cr(k1)) * (k1 + T::one()))).norm() * w;
            if r < T::one() && at * r / (T::one() - r) <= tol * sum.norm() {
                return Ok(SeriesSum { value: sum, abs, terms: k + 2 });
            }
        }
        if !(sum.re.is_finite() && sum.im.is_finite()) {
            return Err(Error::NonConvergence { func: "hyp2f1", limit: k });
        }
    }
    Err(Error::NonConvergence { func: "hyp2f1", limit: MAX_TERMS })
}

/// Same series in double-word arithmetic.
fn sum_series_dd<T: Real>(a: CDd<T>, b: CDd<T>, c: CDd<T>, w: Dd<T>, stop: Option<u64>) -> Result<SeriesSum<T>> {
    let tol = T::epsilon() * T::c(0.01);
    let one = Dd::new(T::one());
    let mut term = CDd::real(one);
    let mut sum = term;
    let mut abs = T::one();
    if w.hi == T::zero() {
        return Ok(SeriesSum { value: sum.to_cx(), abs, terms: 1 });
    }
    let mut kd = Dd::zero();
    for k in 0..MAX_TERMS {
        if let Some(n) = stop {
            if k as u64 >= n {
                return Ok(SeriesSum { value: sum.to_cx(), abs, terms: k + 1 });
            }
        }
        let k1 = kd + one;
        let den = (c + CDd::real(kd)).scale(k1);
        if den.re.hi == T::zero() && den.im.hi == T::zero() {
            return Err(domain("hyp2f1: c is a nonpositive integer"));
        }
        term = (term * (a + CDd::real(kd)) * (b + CDd::real(kd)) / den).scale(w);
        sum = sum + term;
        kd = k1;
        let at = term.norm();
        abs = abs + at;
        let sn = sum.norm();
        if !sn.is_finite() {
            return Err(Error::NonConvergence { func: "hyp2f1", limit: k });
        }
        if stop.is_none() && at <= tol * sn {
            let k2 = kd + one;
            let r = ((a + CDd::real(kd)) * (b + CDd::real(kd)) / (c + CDd::real(kd)).scale(k2)).norm() * w.to_real();
            if r < T::one() && at * r / (T::one() - r) <= tol * sn {
                return Ok(SeriesSum { value: sum.to_cx(), abs, terms: k + 2 });
            }
        }
    }
    Err(Error::NonConvergence { func: "hyp2f1", limit: MAX_TERMS })
}

fn finish<T: Real>(s: SeriesSum<T>, pref: Cx<T>, branch: Hyp2F1Branch, unit: T) -> Hyp2F1Value<T> {
    let value = s.value * pref;
    let cond = s.abs / s.value.norm().max(T::min_positive_value());
    let n = T::from_usize(s.terms).unwrap();
    let est = cond * unit * T::c(4.0) * n.sqrt() + T::series_tol();
    Hyp2F1Value { value, cond, terms: s.terms, branch, est_rel_err: est }
}

/// Parameters and argument in double-word form, so that callers can pass
/// values such as `-ℓ-n` or `(1-x)/2` without rounding them first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Args<T> {
    pub a: CDd<T>,
    pub b: CDd<T>,
    pub c: CDd<T>,
    pub z: Dd<T>,
}

impl<T: Real> Hyp2F1Args<T> {
    pub fn new(a: Cx<T>, b: Cx<T>, c: Cx<T>, z: T) -> Self {
        Self { a: CDd::from_cx(a), b: CDd::from_cx(b), c: CDd::from_cx(c), z: Dd::new(z) }
    }
}

fn merge_stops(x: Option<u64>, y: Option<u64>) -> Option<u64> {
    match (x, y) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

/// `₂F₁(a,b;c;z)` for real `z <= 0`.
///
/// Evaluates every applicable representation and keeps the best conditioned.
pub fn hyp2f1<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, z: T) -> Result<Hyp2F1Value<T>> {
    hyp2f1_args(Hyp2F1Args::new(a, b, c, z))
}

/// [`hyp2f1`] with double-word inputs.
///
/// When the chosen series misses [`SERIES_REL_TOL`] in working precision it
/// is summed again in double-word arithmetic.
pub fn hyp2f1_args<T: Real>(args: Hyp2F1Args<T>) -> Result<Hyp2F1Value<T>> {
    let z = args.z.to_real();
    if !(z <= T::zero()) {
        return Err(domain("hyp2f1 supports real z <= 0 only"));
    }
    if z == T::zero() {
        return Ok(Hyp2F1Value {
            value: cr(T::one()),
            cond: T::one(),
            terms: 1,
            branch: Hyp2F1Branch::Trivial,
            est_rel_err: T::zero(),
        });
    }
    let (a, b, c) = (args.a.to_cx(), args.b.to_cx(), args.c.to_cx());
    let stop_direct = merge_stops(neg_int(a), neg_int(b));
    if let Some(nc) = neg_int(c) {
        if stop_direct.is_none_or(|n| n > nc) {
            return Err(domain("hyp2f1: c is a nonpositive integer before termination"));
        }
    }
    let one = T::one();
    let zd = args.z;
    let wd = zd / (zd - Dd::new(one));
    let w = wd.to_real();
    let lnz = (one - z).ln();
    let unit = T::epsilon();
    let mut candidates: Vec<(Hyp2F1Value<T>, Option<u64>)> = Vec::with_capacity(3);
    let mut last_err = None;

    if stop_direct.is_some() || z.abs() < T::c(DIRECT_MAX_ABS) {
        match sum_series(a, b, c, z, stop_direct) {
            Ok(s) => candidates.push((finish(s, cr(one), Hyp2F1Branch::Direct, unit), stop_direct)),
            Err(e) => last_err = Some(e),
        }
    }
    let mapped_ok = w <= T::c(MAX_MAPPED_ARG);
    for (p, q, branch) in [(a, b, Hyp2F1Branch::PfaffA), (b, a, Hyp2F1Branch::PfaffB)] {
        let stop = merge_stops(neg_int(p), neg_int(c - q));
        if stop.is_none() && !mapped_ok {
            continue;
        }
        match sum_series(p, c - q, c, w, stop) {
            Ok(s) => candidates.push((finish(s, (-p * lnz).exp(), branch, unit), stop)),
            Err(e) => last_err = Some(e),
        }
    }
    let (best, stop) = candidates
        .into_iter()
        .filter(|(v, _)| v.value.re.is_finite() && v.value.im.is_finite())
        .min_by(|x, y| x.0.cond.partial_cmp(&y.0.cond).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or_else(|| last_err.unwrap_or(Error::NonConvergence { func: "hyp2f1", limit: MAX_TERMS }))?;
    if best.est_rel_err <= T::c(SERIES_REL_TOL) {
        return Ok(best);
    }
    let dd_unit = Dd::<T>::epsilon();
    let refined = match best.branch {
        Hyp2F1Branch::Direct => {
            sum_series_dd(args.a, args.b, args.c, zd, stop).map(|s| finish(s, cr(one), best.branch, dd_unit))
        }
        Hyp2F1Branch::PfaffA => sum_series_dd(args.a, args.c - args.b, args.c, wd, stop)
            .map(|s| finish(s, (-a * lnz).exp(), best.branch, dd_unit)),
        Hyp2F1Branch::PfaffB => sum_series_dd(args.b, args.c - args.a, args.c, wd, stop)
            .map(|s| finish(s, (-b * lnz).exp(), best.branch, dd_unit)),
        Hyp2F1Branch::Trivial => Ok(best),
    };
    match refined {
        Ok(r) if r.value.re.is_finite() && r.value.im.is_finite() => Ok(r),
        _ => Ok(best),
    }
}

/// Pfaff branch with the given parameter first, for consistency checks.
pub fn hyp2f1_pfaff<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, z: T) -> Result<Cx<T>> {
    if !(z <= T::zero()) {
        return Err(domain("hyp2f1 supports real z <= 0 only"));
    }
    let w = z / (z - T::one());
    let cb = c - b;
    let stop = merge_stops(neg_int(a), neg_int(cb));
    if stop.is_none() && w > T::c(MAX_MAPPED_ARG) {
        return Err(Error::NonConvergence { func: "hyp2f1", limit: MAX_TERMS });
    }
    let s = sum_series(a, cb, c, w, stop)?;
    Ok(s.value * (-a * (T::one() - z).ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Cx<f64>;

    #[test]
    fn trivial_and_terminating() {
        let a = C::new(0.3, 1.0);
        assert_eq!(hyp2f1(a, a, a, 0.0).unwrap().value, C::new(1.0, 0.0));
        let b = C::new(0.7, -0.4);
        let c = C::new(1.9, 0.0);
        let z = -3.5;
        let v = hyp2f1(C::new(-1.0, 0.0), b, c, z).unwrap().value;
        let expect = C::new(1.0, 0.0) - b * z / c;
        assert!((v - expect).norm() < 1e-14);
    }

    #[test]
    fn elementary_log() {
        // F(1,1;2;z) = -ln(1-z)/z
        let one = C::new(1.0, 0.0);
        for &z in &[-0.5, -3.0, -50.0] {
            let v = hyp2f1(one, one, C::new(2.0, 0.0), z).unwrap().value;
            let expect = -(1.0f64 - z).ln() / z;
            assert!((v.re - expect).abs() < 1e-14 * expect.abs(), "z={z}");
        }
    }

    #[test]
    fn mapped_limit() {
        let a = C::new(0.5, 1.0);
        let b = C::new(0.5, -1.0);
        let c = C::new(1.0, 0.0);
        assert!(hyp2f1(a, b, c, -500.0).is_err());
        assert!(hyp2f1(a, b, c, -150.0).is_ok());
    }
}
