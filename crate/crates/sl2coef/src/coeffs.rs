//! Matrix coefficients `𝔓ˡ_{mn}(x)` and the renormalized `𝒫ˡ_{mn}(x)`.
//!
//! Indices live in `ε + ℤ`; a [`CoeffIndex`] stores the integer offsets and
//! the value of `ε` comes from [`ReprParams`]. The argument is `x = cosh 2τ ≥ 1`.
//!
//! Two symmetries are used to reach a representation a route can handle:
//! `𝔓ˡ_{mn} = 𝔓ˡ_{-m,-n}` and `𝔓ˡ_{mn} = (-1)^{m-n} 𝔓^{-ℓ-1}_{nm}`.

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::gammakit::{binomial, ln_gamma, ln_gamma_real, recip_gamma};
use crate::ddouble::{CDd, Dd};
use crate::hyp2f1::{hyp2f1_args, Hyp2F1Args, SERIES_REL_TOL};
use crate::params::{classify, ReprParams, SeriesKind};
use crate::polynomials::jacobi_dd;
use crate::quadrature::{exp_sinh, QuadratureConfig};
use crate::real::{cr, Cx, Real};
use crate::whittaker::{whittaker_w, whittaker_w_batch, WhittakerQuery};

/// `Auto` uses the hypergeometric route for `x <= AUTO_HYPER_RATIO * max(1, |m|)`.
pub const AUTO_HYPER_RATIO: f64 = 50.0;

/// Series condition number below which the other orientation is not tried.
const WELL_CONDITIONED: f64 = 16.0;
const INT_TOL: f64 = 1e-12;
// exponent below which an integrand factor is treated as zero
const LN_NEGLIGIBLE: f64 = -700.0;

/// Integer offsets of an index pair: `m = m_off + ε`, `n = n_off + ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoeffIndex {
    pub m_off: i64,
    pub n_off: i64,
}

impl CoeffIndex {
    pub fn new(m_off: i64, n_off: i64) -> Self {
        Self { m_off, n_off }
    }

    /// `m - n`, always an integer.
    pub fn diff(&self) -> i64 {
        self.m_off - self.n_off
    }

    pub fn m<T: Real>(&self, eps: T) -> T {
        T::from_i64(self.m_off).unwrap() + eps
    }

    pub fn n<T: Real>(&self, eps: T) -> T {
        T::from_i64(self.n_off).unwrap() + eps
    }
}

/// One coefficient request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffQuery<T> {
    pub params: ReprParams<T>,
    pub idx: CoeffIndex,
    pub x: T,
}

impl<T: Real> CoeffQuery<T> {
    pub fn new(params: ReprParams<T>, idx: CoeffIndex, x: T) -> Self {
        Self { params, idx, x }
    }

    pub fn m(&self) -> T {
        self.idx.m(self.params.eps)
    }

    pub fn n(&self) -> T {
        self.idx.n(self.params.eps)
    }
}

/// Evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoeffMethod {
    Hypergeometric,
    GammaAverage,
    Jacobi,
    Auto,
}

/// Route that produced a value; `Identity` is the `x = 1` short-circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UsedMethod {
    Identity,
    Hypergeometric,
    GammaAverage,
    Jacobi,
}

impl UsedMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            UsedMethod::Identity => "identity",
            UsedMethod::Hypergeometric => "hypergeometric",
            UsedMethod::GammaAverage => "gamma_average",
            UsedMethod::Jacobi => "jacobi",
        }
    }
}

/// Value, route and a-posteriori relative error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult<T> {
    pub value: Cx<T>,
    pub method: UsedMethod,
    pub est_err: T,
}

/// `sign · 𝔓^L_{AB}`, with double-word copies of `L` and `B`.
#[derive(Debug, Clone, Copy)]
struct Rep<T> {
    ell: Cx<T>,
    a: T,
    b: T,
    sign: T,
    ell_dd: CDd<T>,
    b_dd: Dd<T>,
}

/// The four equivalent forms of `𝔓ˡ_{mn}`.
fn reps<T: Real>(ell: Cx<T>, eps: T, idx: CoeffIndex) -> [Rep<T>; 4] {
    let s = if idx.diff().rem_euclid(2) == 0 { T::one() } else { -T::one() };
    let one = T::one();
    let dual = -ell - cr(one);
    let ell_dd = CDd::from_cx(ell);
    let dual_dd = CDd::sum_of(&[-ell, cr(-one)]);
    let ix = |off: i64, sgn: T| {
        let v = Dd::new(T::from_i64(off).unwrap() * sgn) + Dd::new(eps * sgn);
        (v.to_real(), v)
    };
    let (m, m_dd) = ix(idx.m_off, one);
    let (n, n_dd) = ix(idx.n_off, one);
    let (mn, mn_dd) = ix(idx.m_off, -one);
    let (nn, nn_dd) = ix(idx.n_off, -one);
    [
        Rep { ell, a: m, b: n, sign: one, ell_dd, b_dd: n_dd },
        Rep { ell, a: mn, b: nn, sign: one, ell_dd, b_dd: nn_dd },
        Rep { ell: dual, a: n, b: m, sign: s, ell_dd: dual_dd, b_dd: m_dd },
        Rep { ell: dual, a: nn, b: mn, sign: s, ell_dd: dual_dd, b_dd: mn_dd },
    ]
}

fn check_x<T: Real>(x: T) -> Result<()> {
    if x >= T::one() && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("coefficient argument must satisfy x >= 1, got {x}")))
    }
}

fn identity<T: Real>(idx: CoeffIndex) -> EvalResult<T> {
    let v = if idx.diff() == 0 { T::one() } else { T::zero() };
    EvalResult { value: cr(v), method: UsedMethod::Identity, est_err: T::zero() }
}

/// `𝔓^L_{AB}(x)` for `A - B = k ∈ ℕ₀` by the hypergeometric formula.
fn hyper_rep<T: Real>(r: &Rep<T>, k: u64, x: T) -> Result<(Cx<T>, T, T)> {
    let half = T::c(0.5);
    let one = cr(T::one());
    let (a, b) = (r.a, r.b);
    let kf = T::from_u64(k).unwrap();
    let binom = binomial(r.ell - cr(b), k);
    if binom.is_zero() {
        return Ok((Cx::zero(), T::zero(), T::one()));
    }
    let ln_gap = if k == 0 { T::zero() } else { kf * half * ((x - T::one()) * half).ln() };
    let ln_pre = ln_gap - (a + b) * half * ((x + T::one()) * half).ln();
    let z = (Dd::new(T::one()) - Dd::new(x)) * Dd::new(half);
    let bd = CDd::real(r.b_dd);
    let args = Hyp2F1Args {
        a: -r.ell_dd - bd,
        b: r.ell_dd + CDd::from_cx(one) - bd,
        c: CDd::from_cx(cr(kf + T::one())),
        z,
    };
    let f = hyp2f1_args(args)?;
    let v = binom * f.value * ln_pre.exp() * r.sign;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NonConvergence { func: "frak_p(hypergeometric)", limit: f.terms });
    }
    Ok((v, f.est_rel_err, f.cond))
}

/// Hypergeometric route over both orientations with `A - B ∈ ℕ₀`; the
/// better-conditioned series wins.
///
/// Unlike [`frak_p`] this does not short-circuit `x = 1`; the formula itself
/// reduces to `δ_{mn}` there.
pub fn frak_p_hypergeometric<T: Real>(q: &CoeffQuery<T>) -> Result<EvalResult<T>> {
    check_x(q.x)?;
    let mut best: Option<(Cx<T>, T, T)> = None;
    let mut last_err = None;
    for r in reps(q.params.ell, q.params.eps, q.idx) {
        let d = (r.a - r.b).round();
        if d < T::zero() {
            continue;
        }
        match hyper_rep(&r, d.to_f64() as u64, q.x) {
            Ok(c) => {
                if best.is_none_or(|b| c.2 < b.2) {
                    best = Some(c);
                }
                if c.2 <= T::c(WELL_CONDITIONED) && c.1 <= T::c(SERIES_REL_TOL) {
                    break;
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some((value, est, _)) => Ok(EvalResult { value, method: UsedMethod::Hypergeometric, est_err: est }),
        None => Err(last_err.unwrap_or_else(|| Error::RouteInapplicable("hypergeometric".into()))),
    }
}

/// Jacobi-polynomial route, available when some form `𝔓^L_{AB}` has
/// `B - A ∈ ℕ₀` and `L + A ∈ ℕ₀`.
pub fn frak_p_jacobi<T: Real>(q: &CoeffQuery<T>) -> Result<EvalResult<T>> {
    check_x(q.x)?;
    if q.x == T::one() {
        return Ok(identity(q.idx));
    }
    let tol = T::c(INT_TOL);
    let x = q.x;
    for r in reps(q.params.ell, q.params.eps, q.idx) {
        if r.ell.im != T::zero() {
            continue;
        }
        let gap = r.b - r.a;
        let deg = r.ell.re + r.a;
        let gap_ok = (gap - gap.round()).abs() <= tol && gap.round() >= T::zero();
        let deg_ok = (deg - deg.round()).abs() <= tol * T::one().max(deg.abs()) && deg.round() >= T::zero();
        if !(gap_ok && deg_ok) {
            continue;
        }
        let degree = deg.round().to_f64() as u64;
        let half = T::c(0.5);
        let ln_pre = r.a * T::c(2.0).ln() + gap * half * (x - T::one()).ln() - (r.a + r.b) * half * (x + T::one()).ln();
        let (p, cond) = jacobi_dd(degree, gap, -r.a - r.b, x);
        let value = cr(p * ln_pre.exp() * r.sign);
        let terms = T::from_u64(degree + 1).unwrap() * T::c(16.0);
        let est = terms * (T::epsilon() * (T::one() + ln_pre.abs()) + Dd::<T>::epsilon() * cond);
        return Ok(EvalResult { value, method: UsedMethod::Jacobi, est_err: est });
    }
    Err(Error::RouteInapplicable("jacobi route needs ell + m in N0 and n - m in N0 after symmetry".into()))
}

/// `(1/Γ(B)) ∫ e^{-t} t^{B-1} W_{A,L+1/2}(2t/x) dt` (or, for `B = 0`, the
/// cancelled `∫ e^{-t} t^{-1} W dt`) by double-exponential quadrature.
fn gamma_average_de<T: Real>(nu: Cx<T>, rho: Cx<T>, b: T, x: T, cfg: &QuadratureConfig) -> Result<(Cx<T>, T)> {
    let lg = if b > T::zero() { ln_gamma(cr(b))?.re } else { T::zero() };
    let two_over_x = T::c(2.0) / x;
    let failed = std::sync::Mutex::new(None);
    let fu = |lnu: T| -> Cx<T> {
        let u = lnu.exp();
        let ln_w = -u + b * lnu - lg;
        if ln_w < T::c(LN_NEGLIGIBLE) || u == T::zero() {
            return Cx::zero();
        }
        match whittaker_w(WhittakerQuery::new(nu, rho, two_over_x * u)) {
            Ok(w) => w.value * ln_w.exp(),
            Err(e) => {
                failed.lock().unwrap().get_or_insert(e);
                Cx::zero()
            }
        }
    };
    let r = exp_sinh(fu, T::c(cfg.de_tol).max(T::epsilon() * T::c(16.0)), cfg.de_max_level)?;
    if let Some(e) = failed.into_inner().unwrap() {
        return Err(e);
    }
    Ok((r.value, r.est_rel_err))
}

/// Gauss–Laguerre average `E[W_{A,L+1/2}(2T/x)]`, `T ~ Gamma(B)`.
fn gamma_average_gl<T: Real>(nu: Cx<T>, rho: Cx<T>, b: T, x: T, nodes: usize) -> Result<Cx<T>> {
    let rule = T::quad_tables().laguerre(nodes, (b - T::one()).to_f64())?;
    let two_over_x = T::c(2.0) / x;
    let args: Vec<T> = rule.nodes.iter().map(|&t| two_over_x * t).collect();
    let ws = whittaker_w_batch(nu, rho, &args);
    let mut acc = Cx::zero();
    for (w, r) in rule.weights.iter().zip(ws) {
        if *w == T::zero() {
            continue;
        }
        acc = acc + r?.value * *w;
    }
    Ok(acc)
}

/// Gamma-average route with the default quadrature configuration.
pub fn frak_p_gamma_average<T: Real>(q: &CoeffQuery<T>) -> Result<EvalResult<T>> {
    frak_p_gamma_average_with(q, &QuadratureConfig::default())
}

/// Gamma-average route: `𝔓^L_{AB}` for `A <= B`, `B >= 0`, as the
/// gamma-weighted average of `W_{A,L+1/2}(2t/x)`.
///
/// Of the two forms with `A <= B` the one with the larger `B` is used.
/// Gauss–Laguerre with `n` and `2n` nodes is tried first; when the two
/// disagree the average is recomputed by double-exponential quadrature.
pub fn frak_p_gamma_average_with<T: Real>(q: &CoeffQuery<T>, cfg: &QuadratureConfig) -> Result<EvalResult<T>> {
    check_x(q.x)?;
    if q.x == T::one() {
        return Ok(identity(q.idx));
    }
    let half = T::c(0.5);
    let x = q.x;
    let mut chosen: Option<Rep<T>> = None;
    for r in reps(q.params.ell, q.params.eps, q.idx) {
        let ordered = r.b - r.a >= -T::c(INT_TOL);
        let valid = r.b >= T::zero() && r.b + half > (r.ell.re + half).abs();
        if ordered && valid && chosen.is_none_or(|c| r.b > c.b) {
            chosen = Some(r);
        }
    }
    let r = chosen.ok_or_else(|| {
        Error::RouteInapplicable("gamma average needs an index form with B + 1/2 > |Re(L + 1/2)|".into())
    })?;
    let nu = cr(r.a);
    let rho = r.ell + cr(half);
    let b = if r.b.abs() <= T::c(INT_TOL) { T::zero() } else { r.b };
    let ln_x1 = (x - T::one()).ln();
    let ln_xp = (x + T::one()).ln();
    // (1 - 1/x²)^{B/2} ((x+1)/(x-1))^{A/2}
    let ln_pre = b * half * (ln_x1 + ln_xp - T::c(2.0) * x.ln()) + r.a * half * (ln_xp - ln_x1);
    let front = recip_gamma(r.ell + cr(r.a + T::one())) * r.sign;
    if front.is_zero() {
        return Ok(EvalResult { value: Cx::zero(), method: UsedMethod::GammaAverage, est_err: T::zero() });
    }
    let (avg, est, ratio) = if b == T::zero() {
        let (v, est) = gamma_average_de(nu, rho, b, x, cfg)?;
        (v, est, recip_gamma(-r.ell))
    } else {
        let ratio = (ln_gamma(cr(b))? - ln_gamma(cr(b) - r.ell)?).exp();
        let n1 = cfg.laguerre_nodes;
        let coarse = gamma_average_gl(nu, rho, b, x, n1);
        let fine = gamma_average_gl(nu, rho, b, x, 2 * n1);
        let tol = T::c(cfg.laguerre_doubling_tol);
        match (coarse, fine) {
            (Ok(c), Ok(f)) if (c - f).norm() <= tol * f.norm() => {
                let est = (c - f).norm() / f.norm().max(T::min_positive_value());
                (f, est.max(T::epsilon()), ratio)
            }
            _ => {
                let (v, est) = gamma_average_de(nu, rho, b, x, cfg)?;
                (v, est, ratio)
            }
        }
    };
    let target = T::c(cfg.laguerre_doubling_tol);
    if !(est <= target) {
        return Err(Error::Accuracy { estimate: est.to_f64(), target: target.to_f64() });
    }
    let value = front * ratio * avg * ln_pre.exp();
    Ok(EvalResult { value, method: UsedMethod::GammaAverage, est_err: est })
}

/// `𝔓ˡ_{mn}(x)` by the requested route.
pub fn frak_p<T: Real>(q: &CoeffQuery<T>, method: CoeffMethod) -> Result<EvalResult<T>> {
    check_x(q.x)?;
    if q.x == T::one() {
        return Ok(identity(q.idx));
    }
    match method {
        CoeffMethod::Hypergeometric => frak_p_hypergeometric(q),
        CoeffMethod::GammaAverage => frak_p_gamma_average(q),
        CoeffMethod::Jacobi => frak_p_jacobi(q),
        CoeffMethod::Auto => {
            let hyper_first = q.x <= T::c(AUTO_HYPER_RATIO) * T::one().max(q.m().abs());
            let first = if hyper_first { frak_p_hypergeometric(q) } else { frak_p_gamma_average(q) };
            match first {
                Ok(r) => Ok(r),
                Err(e1) => {
                    let alt = if hyper_first { frak_p_gamma_average(q) } else { frak_p_hypergeometric(q) };
                    alt.or_else(|_| frak_p_jacobi(q)).map_err(|_| e1)
                }
            }
        }
    }
}

/// Normalization `[Γ(n-ℓ)Γ(ℓ+m+1) / (Γ(m-ℓ)Γ(ℓ+n+1))]^{1/2}` for real `ℓ`,
/// computed from `ln|Γ|` and signs.
pub fn cal_factor<T: Real>(ell: T, m: T, n: T) -> Result<T> {
    let (a, sa) = ln_gamma_real(n - ell)?;
    let (b, sb) = ln_gamma_real(ell + m + T::one())?;
    let (c, sc) = ln_gamma_real(m - ell)?;
    let (d, sd) = ln_gamma_real(ell + n + T::one())?;
    if sa * sb * sc * sd < T::zero() {
        return Err(domain("normalization quotient is negative for these indices"));
    }
    Ok(((a + b - c - d) * T::c(0.5)).exp())
}

fn lattice_offset<T: Real>(v: T, base: T) -> Option<i64> {
    let d = v - base;
    if (d - d.round()).abs() <= T::c(INT_TOL) * T::one().max(v.abs()) {
        Some(d.round().to_f64() as i64)
    } else {
        None
    }
}

/// `𝒫ˡ_{mn}(x)` for the discrete series (either branch) and the
/// complementary series.
///
/// The minus branch is evaluated through `𝒫ˡ_{mn} = 𝒫ˡ_{-m,-n}`.
pub fn cal_p<T: Real>(q: &CoeffQuery<T>) -> Result<EvalResult<T>> {
    cal_p_with(q, CoeffMethod::Auto)
}

/// [`cal_p`] with an explicit route for the underlying `𝔓`.
pub fn cal_p_with<T: Real>(q: &CoeffQuery<T>, method: CoeffMethod) -> Result<EvalResult<T>> {
    check_x(q.x)?;
    if !q.params.is_real_ell() {
        return Err(domain("cal_p needs real ell"));
    }
    let ell = q.params.ell.re;
    let (m, n) = (q.m(), q.n());
    let kind = classify(&q.params, Some(&[m, n])).kind;
    let plus = |v: T| lattice_offset(v, -ell).is_some_and(|k| k >= 0);
    let (mm, nn) = if plus(m) && plus(n) {
        (m, n)
    } else if plus(-m) && plus(-n) {
        (-m, -n)
    } else if kind == SeriesKind::Complementary {
        (m, n)
    } else {
        return Err(domain(format!("indices ({m}, {n}) are not in a discrete or complementary branch for ell = {ell}")));
    };
    let factor = cal_factor(ell, mm, nn)?;
    let r = frak_p(q, method)?;
    Ok(EvalResult { value: r.value * factor, method: r.method, est_err: r.est_err })
}

/// Which coefficient family a column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    /// `𝔓ˡ_{mn}`.
    Frak,
    /// `𝒫ˡ_{mn}`.
    Cal,
}

/// `m ↦ coefficient(m, n)` for `m_off` in `m_range` (inclusive), evaluated
/// in parallel with the `Auto` route.
pub fn coeff_column<T: Real>(
    params: ReprParams<T>,
    n_off: i64,
    x: T,
    m_range: std::ops::RangeInclusive<i64>,
    kind: ColumnKind,
) -> Result<Vec<Cx<T>>> {
    check_x(x)?;
    let offs: Vec<i64> = m_range.collect();
    offs.par_iter()
        .map(|&m_off| {
            let q = CoeffQuery::new(params, CoeffIndex::new(m_off, n_off), x);
            match kind {
                ColumnKind::Frak => frak_p(&q, CoeffMethod::Auto).map(|r| r.value),
                ColumnKind::Cal => cal_p(&q).map(|r| r.value),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Cx<f64>;

    fn q(ell: C, eps: f64, m: i64, n: i64, x: f64) -> CoeffQuery<f64> {
        CoeffQuery::new(ReprParams::new(ell, eps), CoeffIndex::new(m, n), x)
    }

    fn rel(a: C, b: C) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn identity_short_circuit() {
        let qq = q(C::new(-0.5, 1.0), 0.2, 2, 2, 1.0);
        assert_eq!(frak_p(&qq, CoeffMethod::Auto).unwrap().value, C::new(1.0, 0.0));
        let qq = q(C::new(-0.5, 1.0), 0.2, 3, 2, 1.0);
        assert_eq!(frak_p(&qq, CoeffMethod::GammaAverage).unwrap().value, C::new(0.0, 0.0));
        assert!(frak_p(&q(C::new(-0.5, 1.0), 0.2, 3, 2, 0.9), CoeffMethod::Auto).is_err());
    }

    #[test]
    fn routes_agree_principal() {
        let qq = q(C::new(-0.5, 1.0), 0.0, 3, 1, 5.0);
        let a = frak_p(&qq, CoeffMethod::Hypergeometric).unwrap().value;
        let b = frak_p(&qq, CoeffMethod::GammaAverage).unwrap().value;
        assert!(rel(b, a) < 1e-8, "{a} {b}");
        let qq = q(C::new(-0.5, 1.0), 0.0, 0, 2, 3.0);
        let a = frak_p(&qq, CoeffMethod::Hypergeometric).unwrap().value;
        let b = frak_p(&qq, CoeffMethod::GammaAverage).unwrap().value;
        assert!(rel(b, a) < 1e-8, "{a} {b}");
    }

    #[test]
    fn zonal_gamma_average_uses_cancelled_form() {
        let qq = q(C::new(-0.5, 0.0), 0.0, 0, 0, 7.0);
        let a = frak_p(&qq, CoeffMethod::Hypergeometric).unwrap().value;
        let b = frak_p(&qq, CoeffMethod::GammaAverage).unwrap().value;
        assert!(rel(b, a) < 1e-8, "{a} {b}");
    }

    #[test]
    fn elementary_discrete_case() {
        // ℓ = -1, m = n = 1: 𝔓 = 2/(x+1)
        for &x in &[1.5, 2.0, 30.0] {
            let qq = q(C::new(-1.0, 0.0), 0.0, 1, 1, x);
            let e = 2.0 / (x + 1.0);
            for m in [CoeffMethod::Hypergeometric, CoeffMethod::GammaAverage, CoeffMethod::Jacobi] {
                let v = frak_p(&qq, m).unwrap().value;
                assert!((v.re - e).abs() < 1e-9 * e && v.im.abs() < 1e-12, "{m:?} {v} {e}");
            }
        }
    }

    #[test]
    fn jacobi_matches_hypergeometric() {
        let qq = q(C::new(-2.0, 0.0), 0.0, 5, 3, 4.0);
        let a = frak_p(&qq, CoeffMethod::Hypergeometric).unwrap().value;
        let b = frak_p(&qq, CoeffMethod::Jacobi).unwrap().value;
        assert!(rel(b, a) < 1e-12, "{a} {b}");
        assert!(frak_p(&q(C::new(-0.5, 1.0), 0.0, 1, 0, 2.0), CoeffMethod::Jacobi).is_err());
    }

    #[test]
    fn cal_normalization() {
        let half = q(C::new(-0.5, 0.0), 0.5, 2, 0, 3.0);
        let a = cal_p(&half).unwrap().value;
        let b = frak_p(&half, CoeffMethod::Auto).unwrap().value;
        assert!(rel(a, b) < 1e-14);
        assert!((cal_factor(-1.0f64, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-14);
        let minus = q(C::new(-1.0, 0.0), 0.0, -2, -1, 3.0);
        let plus = q(C::new(-1.0, 0.0), 0.0, 2, 1, 3.0);
        assert!(rel(cal_p(&minus).unwrap().value, cal_p(&plus).unwrap().value) < 1e-14);
        assert!(cal_p(&q(C::new(-1.0, 0.0), 0.0, 0, 1, 3.0)).is_err());
    }

    #[test]
    fn column_unit_vector_at_identity() {
        let col = coeff_column(ReprParams::principal(1.0, 0.0), 0, 1.0, -5..=5, ColumnKind::Frak).unwrap();
        for (i, v) in col.iter().enumerate() {
            let e = if i == 5 { 1.0 } else { 0.0 };
            assert_eq!(*v, C::new(e, 0.0));
        }
    }
}
