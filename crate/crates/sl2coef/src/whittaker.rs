//! Whittaker function `W_{ν,ρ}(t)` for real `t > 0` and complex `ν, ρ`.
//!
//! Four evaluation methods are available and dispatched in this order:
//!
//! | method | applies when |
//! |---|---|
//! | Laguerre closed form | `ν ± ρ - 1/2 ∈ ℕ₀` |
//! | defining integral (double-exponential rule) | `Re(±ρ - ν + 1/2) > 0` |
//! | Kummer two-series connection | `2ρ` at least `1e-3` away from ℤ |
//! | backward ODE integration | always |
//!
//! The ODE route seeds the large-`t` asymptotic series at a point where its
//! smallest term is negligible and integrates Whittaker's equation downward
//! with local Taylor expansions. It is the universal reference and covers the
//! logarithmic case `2ρ ∈ ℤ`.

use num_traits::Zero;

use crate::error::{domain, Error, Result};
use crate::gammakit::{digamma, euler_gamma, ln_gamma, recip_gamma};
use crate::quadrature::exp_sinh;
use crate::real::{cr, cx, Cx, Real};

/// Accuracy required from a method before the dispatcher accepts it.
pub const ACCEPT_REL_ERR: f64 = 1e-9;
/// Below this argument the small-`t` branch is used.
pub const SMALL_T: f64 = 1e-8;
/// Minimum distance of `2ρ` from the integers for the Kummer route.
pub const KUMMER_INT_GUARD: f64 = 1e-3;
const KUMMER_MAX_T: f64 = 40.0;
const LAGUERRE_MAX_DEGREE: u64 = 150;
const INTEGRAL_MIN_RE: f64 = 1e-3;
const ODE_MAX_STEP: f64 = 4.0;
const ODE_MAX_TERMS: usize = 600;

/// Evaluation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WhittakerMethod {
    Laguerre,
    Integral,
    KummerSeries,
    OdeBackward,
    /// Leading small-argument form, used below [`SMALL_T`].
    SmallArgument,
}

/// Arguments of `W_{ν,ρ}(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerQuery<T> {
    pub nu: Cx<T>,
    pub rho: Cx<T>,
    pub t: T,
}

impl<T: Real> WhittakerQuery<T> {
    pub fn new(nu: Cx<T>, rho: Cx<T>, t: T) -> Self {
        Self { nu, rho, t }
    }
}

/// Value with provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerResult<T> {
    pub value: Cx<T>,
    pub method: WhittakerMethod,
    pub est_rel_error: T,
    /// Set when the answer comes from the small-argument leading form.
    pub small_t_warning: bool,
}

fn int_dist<T: Real>(z: Cx<T>) -> T {
    let r = z.re - z.re.round();
    (r * r + z.im * z.im).sqrt()
}

fn as_nonneg_int<T: Real>(z: Cx<T>) -> Option<u64> {
    let tol = T::c(1e-12) * T::one().max(z.re.abs());
    if z.im.abs() <= tol && (z.re - z.re.round()).abs() <= tol && z.re.round() >= T::zero() {
        Some(z.re.round().to_f64() as u64)
    } else {
        None
    }
}

/// Sign choice `ρ' = ±ρ` and degree for the Laguerre closed form.
fn laguerre_degree<T: Real>(nu: Cx<T>, rho: Cx<T>) -> Option<(Cx<T>, u64)> {
    let half = cr(T::c(0.5));
    for r in [rho, -rho] {
        if let Some(k) = as_nonneg_int(nu + r - half) {
            if k <= LAGUERRE_MAX_DEGREE {
                return Some((r, k));
            }
        }
    }
    None
}

fn finite<T: Real>(z: Cx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `W = e^{-t/2} t^{1/2-ρ} k! (-1)^k L_k^{(-2ρ)}(t)` with `k = ν+ρ-1/2`.
fn by_laguerre<T: Real>(q: &WhittakerQuery<T>) -> Option<WhittakerResult<T>> {
    let (rho, k) = laguerre_degree(q.nu, q.rho)?;
    let t = q.t;
    let alpha = -rho * T::c(2.0);
    let kf = T::from_u64(k).unwrap();
    let lt = t.ln();
    // k!(-1)^k L_k^{(α)}(t) = Σ_j (-1)^{k+j} (k!/j!) C(k+α, k-j) t^j, summed from j = k down
    let mut log_scale = kf * lt;
    let mut term = cr(T::one());
    let mut sum = term;
    let mut abs = T::one();
    for j in (0..k).rev() {
        let j1 = T::from_u64(j + 1).unwrap();
        term = term * (alpha + cr(j1)) * (-j1) / ((kf - j1 + T::one()) * t);
        sum = sum + term;
        abs = abs + term.norm();
        if abs > T::c(1e30) {
            term = term / abs;
            sum = sum / abs;
            log_scale = log_scale + abs.ln();
            abs = T::one();
        }
    }
    let pref = (cr(-t / T::c(2.0) + log_scale) + (cr(T::c(0.5)) - rho) * lt).exp();
    let value = pref * sum;
    let cond = abs / sum.norm().max(T::min_positive_value());
    Some(WhittakerResult {
        value,
        method: WhittakerMethod::Laguerre,
        est_rel_error: cond * T::epsilon() * T::c(4.0) * (kf + T::one()),
        small_t_warning: false,
    })
}

/// Defining integral `t^ν e^{-t/2}/Γ(p) ∫ e^{-v} v^{p-1} (1+v/t)^{q} dv`, `p = ρ-ν+1/2`, `q = ρ+ν-1/2`.
fn by_integral<T: Real>(q: &WhittakerQuery<T>) -> Option<Result<WhittakerResult<T>>> {
    let half = cr(T::c(0.5));
    let (p_plus, p_minus) = (q.rho - q.nu + half, -q.rho - q.nu + half);
    let rho = if p_plus.re >= p_minus.re { q.rho } else { -q.rho };
    let p = rho - q.nu + half;
    if p.re <= T::c(INTEGRAL_MIN_RE) {
        return None;
    }
    let qe = rho + q.nu - half;
    let t = q.t;
    let lt = t.ln();
    let tol = T::c(1e-12).max(T::series_tol() * T::c(10.0));
    let res = if t >= T::one() {
        // v-scaled: ∫ e^{-v} v^{p-1} (1+v/t)^q dv
        exp_sinh(
            |lv: T| {
                let v = lv.exp();
                (p * lv + qe * (v / t).ln_1p() - cr(v)).exp()
            },
            tol,
            10,
        )
        .map(|r| (r, (cr(-t / T::c(2.0)) + q.nu * lt).exp()))
    } else {
        // u-scaled: ∫ e^{-tu} u^{p-1} (1+u)^q du, prefactor t^{ρ+1/2} e^{-t/2}
        exp_sinh(
            |lu: T| {
                let u = lu.exp();
                (p * lu + qe * u.ln_1p() - cr(t * u)).exp()
            },
            tol,
            10,
        )
        .map(|r| (r, (cr(-t / T::c(2.0)) + (rho + half) * lt).exp()))
    };
    Some(res.map(|(r, pref)| {
        let rg = recip_gamma(p);
        let value = pref * rg * r.value;
        let est = r.est_rel_err.max(r.cond * T::epsilon() * T::c(16.0));
        WhittakerResult { value, method: WhittakerMethod::Integral, est_rel_error: est, small_t_warning: false }
    }))
}

/// Kummer series `M(a,b,t)` with sum of absolute terms.
fn kummer_m<T: Real>(a: Cx<T>, b: Cx<T>, t: T) -> (Cx<T>, T) {
    let mut term = cr(T::one());
    let mut sum = term;
    let mut abs = T::one();
    for k in 0..4000usize {
        let kf = T::from_usize(k).unwrap();
        term = term * (a + cr(kf)) / ((b + cr(kf)) * (kf + T::one())) * t;
        sum = sum + term;
        let at = term.norm();
        abs = abs + at;
        if at <= T::epsilon() * T::c(0.01) * abs && kf > t {
            break;
        }
    }
    (sum, abs)
}

fn by_kummer<T: Real>(q: &WhittakerQuery<T>) -> Option<Result<WhittakerResult<T>>> {
    let two_rho = q.rho * T::c(2.0);
    if int_dist(two_rho) <= T::c(KUMMER_INT_GUARD) || q.t > T::c(KUMMER_MAX_T) {
        return None;
    }
    Some(kummer_value(q))
}

fn kummer_value<T: Real>(q: &WhittakerQuery<T>) -> Result<WhittakerResult<T>> {
    let half = cr(T::c(0.5));
    let one = cr(T::one());
    let (nu, rho, t) = (q.nu, q.rho, q.t);
    let two_rho = rho * T::c(2.0);
    let lg_m = ln_gamma(-two_rho)?;
    let lg_p = ln_gamma(two_rho)?;
    let a_coef = lg_m.exp() * recip_gamma(half - rho - nu);
    let b_coef = lg_p.exp() * recip_gamma(half + rho - nu);
    let lt = t.ln();
    let e1 = (cr(-t / T::c(2.0)) + (rho + half) * lt).exp();
    let e2 = (cr(-t / T::c(2.0)) + (half - rho) * lt).exp();
    let (m1, s1) = kummer_m(half + rho - nu, one + two_rho, t);
    let (m2, s2) = kummer_m(half - rho - nu, one - two_rho, t);
    let p1 = a_coef * e1;
    let p2 = b_coef * e2;
    let value = p1 * m1 + p2 * m2;
    let mag = p1.norm() * s1 + p2.norm() * s2;
    let cond = mag / value.norm().max(T::min_positive_value());
    let gamma_err = T::epsilon() * (T::one() + lg_m.norm() + lg_p.norm());
    Ok(WhittakerResult {
        value,
        method: WhittakerMethod::KummerSeries,
        est_rel_error: cond * (T::epsilon() * T::c(8.0) + gamma_err),
        small_t_warning: false,
    })
}

/// Large-`t` series `Σ (1/2+ρ-ν)_s (1/2-ρ-ν)_s / (s! (-t)^s)`, optimally truncated.
///
/// Returns `(S, Σ s c_s, relative size of the first omitted term)`.
fn asymptotic_series<T: Real>(nu: Cx<T>, rho: Cx<T>, t: T) -> (Cx<T>, Cx<T>, T) {
    let half = cr(T::c(0.5));
    let a = half + rho - nu;
    let b = half - rho - nu;
    let mut c = cr(T::one());
    let mut s = c;
    let mut ds = Cx::zero();
    let mut prev = T::infinity();
    for k in 0..2000usize {
        let kf = T::from_usize(k).unwrap();
        let next = c * (a + cr(kf)) * (b + cr(kf)) / ((kf + T::one()) * (-t));
        let nn = next.norm();
        if nn == T::zero() {
            return (s, ds, T::zero());
        }
        if nn >= prev {
            return (s, ds, nn / s.norm());
        }
        c = next;
        s = s + c;
        ds = ds + c * (kf + T::one());
        prev = nn;
        if nn <= T::epsilon() * T::c(1e-3) * s.norm() {
            return (s, ds, nn / s.norm());
        }
    }
    (s, ds, prev / s.norm())
}

/// State of the backward integration: `W = e^{scale} w`, `W' = e^{scale} dw`.
#[derive(Debug, Clone, Copy)]
struct OdeState<T> {
    t: T,
    scale: T,
    w: Cx<T>,
    dw: Cx<T>,
}

struct OdeSeed<T> {
    state: OdeState<T>,
    seed_err: T,
}

fn ode_seed<T: Real>(nu: Cx<T>, rho: Cx<T>, t_top: T) -> OdeSeed<T> {
    let target = T::epsilon() * T::c(0.05);
    let mut t0 = t_top;
    loop {
        let (s, ds, err) = asymptotic_series(nu, rho, t0);
        if err <= target || t0 > T::c(1e5) {
            let lt = t0.ln();
            let phase = cx(T::zero(), nu.im * lt).exp();
            let scale = -t0 / T::c(2.0) + nu.re * lt;
            let w = s * phase;
            // W'/W = -1/2 + ν/t + S'/S, S' = -(1/t) Σ s c_s
            let dw = (s * (cr(T::c(-0.5)) + nu / t0) - ds / t0) * phase;
            return OdeSeed { state: OdeState { t: t0, scale, w, dw }, seed_err: err };
        }
        t0 = t0 * T::c(1.5);
    }
}

/// One Taylor step of `t^2 W'' = (t^2/4 - νt + ρ^2 - 1/4) W` from `τ` by `h`.
fn taylor_step<T: Real>(nu: Cx<T>, c: Cx<T>, st: &OdeState<T>, h: T) -> (Cx<T>, Cx<T>, T) {
    let tau = st.t;
    let p = cr(tau * tau / T::c(4.0)) - nu * tau + c;
    let qq = cr(tau / T::c(2.0)) - nu;
    let h2 = h * h;
    let h3 = h2 * h;
    let h4 = h2 * h2;
    let tau2 = tau * tau;
    let mut b = [Cx::<T>::zero(); 4]; // rolling b_{k-2}, b_{k-1}, b_k, b_{k+1}
    b[2] = st.w;
    b[3] = st.dw * h;
    let mut val = b[2] + b[3];
    let mut der = b[3];
    let mut abs = b[2].norm() + b[3].norm();
    let tiny = T::epsilon() * T::c(1e-3);
    let mut quiet = 0;
    for k in 0..ODE_MAX_TERMS {
        let kf = T::from_usize(k).unwrap();
        let num = (p - cr(kf * (kf - T::one()))) * h2 * b[2] + qq * h3 * b[1] + b[0] * (h4 / T::c(4.0))
            - b[3] * (T::c(2.0) * tau * h * kf * (kf + T::one()));
        let next = num / (tau2 * (kf + T::one()) * (kf + T::c(2.0)));
        b = [b[1], b[2], b[3], next];
        val = val + next;
        der = der + next * (kf + T::c(2.0));
        let an = next.norm();
        abs = abs + an;
        if an * (kf + T::c(2.0)) <= tiny * (val.norm() + der.norm()) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let cond = abs / val.norm().max(T::min_positive_value());
    (val, der / h, cond)
}

fn rescale<T: Real>(st: &mut OdeState<T>) {
    let n = st.w.norm().max(st.dw.norm());
    if n > T::zero() && n.is_finite() {
        st.scale = st.scale + n.ln();
        st.w = st.w / n;
        st.dw = st.dw / n;
    }
}

/// Backward ODE sweep through the (descending) targets.
///
/// Returns, for each target, `(ln-scale, mantissa, relative error estimate)`.
fn ode_sweep<T: Real>(nu: Cx<T>, rho: Cx<T>, targets_desc: &[T]) -> Vec<(T, Cx<T>, T)> {
    if targets_desc.is_empty() {
        return Vec::new();
    }
    let c = rho * rho - cr(T::c(0.25));
    let top = targets_desc[0];
    let seed = ode_seed(nu, rho, (top + T::c(30.0)).max(T::c(40.0)));
    let mut st = seed.state;
    let mut out = Vec::with_capacity(targets_desc.len());
    let mut steps = 0usize;
    let mut worst_cond = T::one();
    let max_step = T::c(ODE_MAX_STEP);
    for &target in targets_desc {
        while st.t > target {
            let h_nat = (st.t / T::c(2.0)).min(max_step);
            let h = -(h_nat.min(st.t - target));
            let (w, dw, cond) = taylor_step(nu, c, &st, h);
            worst_cond = worst_cond.max(cond);
            st = OdeState { t: if -h == st.t - target { target } else { st.t + h }, scale: st.scale, w, dw };
            rescale(&mut st);
            steps += 1;
        }
        let est = seed.seed_err + T::epsilon() * T::c(4.0) * worst_cond * T::from_usize(steps + 1).unwrap();
        out.push((st.scale, st.w, est));
    }
    out
}

fn by_ode<T: Real>(q: &WhittakerQuery<T>) -> WhittakerResult<T> {
    let r = ode_sweep(q.nu, q.rho, &[q.t]);
    let (scale, w, est) = r[0];
    WhittakerResult {
        value: w * scale.exp(),
        method: WhittakerMethod::OdeBackward,
        est_rel_error: est,
        small_t_warning: false,
    }
}

/// Leading small-argument behaviour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmallTLeading<T> {
    /// Two-term form, valid for `2ρ ∉ ℤ`.
    TwoTerm(Cx<T>),
    /// Dominant single term for `2ρ ∈ ℤ \ {0}`.
    Dominant(Cx<T>),
    /// `ρ = 0`: `-√t (ln t + ψ(1/2-ν) + 2γ)/Γ(1/2-ν)`, the `O(√t log t)` regime.
    Log(Cx<T>),
}

impl<T: Real> SmallTLeading<T> {
    pub fn value(&self) -> Cx<T> {
        match *self {
            SmallTLeading::TwoTerm(v) | SmallTLeading::Dominant(v) | SmallTLeading::Log(v) => v,
        }
    }
}

/// Leading terms for large and small arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerAsymptotics<T> {
    /// `e^{-t/2} t^ν`.
    pub large_t_leading: Cx<T>,
    pub small_t_leading: SmallTLeading<T>,
}

fn small_t_leading<T: Real>(nu: Cx<T>, rho: Cx<T>, t: T) -> Result<SmallTLeading<T>> {
    let half = cr(T::c(0.5));
    let lt = t.ln();
    let two_rho = rho * T::c(2.0);
    if int_dist(two_rho) > T::zero() {
        let a = ln_gamma(-two_rho)?.exp() * recip_gamma(half - rho - nu) * ((rho + half) * lt).exp();
        let b = ln_gamma(two_rho)?.exp() * recip_gamma(half + rho - nu) * ((half - rho) * lt).exp();
        return Ok(SmallTLeading::TwoTerm(a + b));
    }
    let r = if rho.re >= T::zero() { rho } else { -rho };
    if r.re.round() == T::zero() && two_rho.re.round() == T::zero() {
        let rg = recip_gamma(half - nu);
        let psi = if rg == Cx::zero() { Cx::zero() } else { digamma(half - nu)? };
        let v = -rg * t.sqrt() * (cr(lt) + psi + cr(T::c(2.0) * euler_gamma::<T>()));
        return Ok(SmallTLeading::Log(v));
    }
    let v = ln_gamma(r * T::c(2.0))?.exp() * recip_gamma(half + r - nu) * ((half - r) * lt).exp();
    Ok(SmallTLeading::Dominant(v))
}

/// Leading large-`t` and small-`t` forms.
pub fn whittaker_asymptotics<T: Real>(q: WhittakerQuery<T>) -> Result<WhittakerAsymptotics<T>> {
    if !(q.t > T::zero()) {
        return Err(Error::InvalidParameter("whittaker_asymptotics requires t > 0".into()));
    }
    let large = (cr(-q.t / T::c(2.0)) + q.nu * q.t.ln()).exp();
    Ok(WhittakerAsymptotics { large_t_leading: large, small_t_leading: small_t_leading(q.nu, q.rho, q.t)? })
}

fn small_t_answer<T: Real>(q: &WhittakerQuery<T>) -> Result<WhittakerResult<T>> {
    if let Some(r) = by_laguerre(q) {
        return Ok(r);
    }
    if int_dist(q.rho * T::c(2.0)) > T::c(KUMMER_INT_GUARD) {
        return kummer_value(q);
    }
    let lead = small_t_leading(q.nu, q.rho, q.t)?;
    let lt = q.t.ln().abs();
    Ok(WhittakerResult {
        value: lead.value(),
        method: WhittakerMethod::SmallArgument,
        est_rel_error: q.t * (T::one() + q.nu.norm() + q.rho.norm()) * (T::one() + lt),
        small_t_warning: true,
    })
}

/// `W_{ν,ρ}(t)` by the first method that reaches [`ACCEPT_REL_ERR`].
pub fn whittaker_w<T: Real>(q: WhittakerQuery<T>) -> Result<WhittakerResult<T>> {
    if !(q.t > T::zero()) || !q.t.is_finite() {
        return Err(Error::InvalidParameter(format!("whittaker_w requires t > 0, got {}", q.t)));
    }
    if q.t < T::c(SMALL_T) {
        return small_t_answer(&q);
    }
    let accept = T::c(ACCEPT_REL_ERR);
    let mut best: Option<WhittakerResult<T>> = None;
    let consider = |r: WhittakerResult<T>, best: &mut Option<WhittakerResult<T>>| -> bool {
        if !finite(r.value) {
            return false;
        }
        let ok = r.est_rel_error <= accept;
        if best.is_none_or(|b| r.est_rel_error < b.est_rel_error) {
            *best = Some(r);
        }
        ok
    };
    if let Some(r) = by_laguerre(&q) {
        if consider(r, &mut best) {
            return Ok(r);
        }
    }
    if let Some(Ok(r)) = by_integral(&q) {
        if consider(r, &mut best) {
            return Ok(r);
        }
    }
    if let Some(Ok(r)) = by_kummer(&q) {
        if consider(r, &mut best) {
            return Ok(r);
        }
    }
    let r = by_ode(&q);
    if consider(r, &mut best) {
        return Ok(r);
    }
    let b = best.unwrap_or(r);
    Err(Error::Accuracy { estimate: b.est_rel_error.to_f64(), target: ACCEPT_REL_ERR })
}

/// `W_{ν,ρ}(t)` by one specific method.
pub fn whittaker_w_with<T: Real>(q: WhittakerQuery<T>, method: WhittakerMethod) -> Result<WhittakerResult<T>> {
    if !(q.t > T::zero()) {
        return Err(Error::InvalidParameter("whittaker_w requires t > 0".into()));
    }
    let na = |what: &str| Error::RouteInapplicable(format!("{what} not applicable"));
    match method {
        WhittakerMethod::Laguerre => by_laguerre(&q).ok_or_else(|| na("laguerre")),
        WhittakerMethod::Integral => by_integral(&q).ok_or_else(|| na("integral"))?,
        WhittakerMethod::KummerSeries => {
            if int_dist(q.rho * T::c(2.0)) <= T::c(KUMMER_INT_GUARD) {
                Err(na("kummer"))
            } else {
                kummer_value(&q)
            }
        }
        WhittakerMethod::OdeBackward => Ok(by_ode(&q)),
        WhittakerMethod::SmallArgument => {
            let lead = small_t_leading(q.nu, q.rho, q.t)?;
            Ok(WhittakerResult {
                value: lead.value(),
                method,
                est_rel_error: T::infinity(),
                small_t_warning: true,
            })
        }
    }
}

/// Methods applicable to a query (excluding the small-argument form).
pub fn applicable_methods<T: Real>(q: &WhittakerQuery<T>) -> Vec<WhittakerMethod> {
    let mut v = Vec::new();
    if laguerre_degree(q.nu, q.rho).is_some() {
        v.push(WhittakerMethod::Laguerre);
    }
    let half = T::c(0.5);
    if (q.rho.re - q.nu.re + half).max(-q.rho.re - q.nu.re + half) > T::c(INTEGRAL_MIN_RE) {
        v.push(WhittakerMethod::Integral);
    }
    if int_dist(q.rho * T::c(2.0)) > T::c(KUMMER_INT_GUARD) && q.t <= T::c(KUMMER_MAX_T) {
        v.push(WhittakerMethod::KummerSeries);
    }
    v.push(WhittakerMethod::OdeBackward);
    v
}

/// `W_{ν,ρ}` at many arguments sharing `ν, ρ`.
///
/// Uses the closed form when available and otherwise a single backward ODE
/// sweep through all arguments; arguments below [`SMALL_T`] go through the
/// small-argument branch. Any point whose sweep estimate misses the target is
/// re-evaluated through [`whittaker_w`].
pub fn whittaker_w_batch<T: Real>(nu: Cx<T>, rho: Cx<T>, ts: &[T]) -> Vec<Result<WhittakerResult<T>>> {
    let mut out: Vec<Option<Result<WhittakerResult<T>>>> = vec![None; ts.len()];
    let closed = laguerre_degree(nu, rho).is_some();
    let mut order: Vec<usize> = Vec::new();
    for (i, &t) in ts.iter().enumerate() {
        if !(t > T::zero()) || !t.is_finite() {
            out[i] = Some(Err(domain(format!("whittaker argument must be positive, got {t}"))));
        } else if closed || t < T::c(SMALL_T) {
            out[i] = Some(whittaker_w(WhittakerQuery::new(nu, rho, t)));
        } else {
            order.push(i);
        }
    }
    order.sort_by(|&a, &b| ts[b].partial_cmp(&ts[a]).unwrap());
    let targets: Vec<T> = order.iter().map(|&i| ts[i]).collect();
    let swept = ode_sweep(nu, rho, &targets);
    for (&i, (scale, w, est)) in order.iter().zip(swept) {
        let r = WhittakerResult {
            value: w * scale.exp(),
            method: WhittakerMethod::OdeBackward,
            est_rel_error: est,
            small_t_warning: false,
        };
        out[i] = Some(if est <= T::c(ACCEPT_REL_ERR) && finite(r.value) {
            Ok(r)
        } else {
            whittaker_w(WhittakerQuery::new(nu, rho, ts[i]))
        });
    }
    out.into_iter().map(|o| o.unwrap()).collect()
}

/// `W'_{ν,ρ}(t) = -W_{ν+1,ρ}(t)/t - (ν/t - 1/2) W_{ν,ρ}(t)`.
pub fn whittaker_w_prime<T: Real>(q: WhittakerQuery<T>) -> Result<Cx<T>> {
    let w0 = whittaker_w(q)?.value;
    let w1 = whittaker_w(WhittakerQuery::new(q.nu + cr(T::one()), q.rho, q.t))?.value;
    Ok(-w1 / q.t - (q.nu / q.t - cr(T::c(0.5))) * w0)
}

/// Right-hand side coefficient of Whittaker's equation `W'' = f(t) W`.
pub fn ode_coefficient<T: Real>(nu: Cx<T>, rho: Cx<T>, t: T) -> Cx<T> {
    cr(T::c(0.25)) - nu / t + (rho * rho - cr(T::c(0.25))) / (t * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Cx<f64>;

    fn q(nu: C, rho: C, t: f64) -> WhittakerQuery<f64> {
        WhittakerQuery::new(nu, rho, t)
    }

    #[test]
    fn exponential_case() {
        let r = whittaker_w(q(C::new(0.0, 0.0), C::new(0.5, 0.0), 2.0)).unwrap();
        assert!((r.value - C::new((-1.0f64).exp(), 0.0)).norm() < 1e-15);
        assert_eq!(r.method, WhittakerMethod::Laguerre);
    }

    #[test]
    fn linear_exponential_case() {
        for &t in &[0.3, 2.0, 17.0] {
            let r = whittaker_w(q(C::new(1.0, 0.0), C::new(-0.5, 0.0), t)).unwrap();
            let e = t * (-t / 2.0f64).exp();
            assert!((r.value.re - e).abs() < 1e-14 * e);
        }
    }

    #[test]
    fn methods_agree() {
        let qq = q(C::new(2.0, 0.0), C::new(0.0, 0.7), 3.5);
        let a = whittaker_w_with(qq, WhittakerMethod::OdeBackward).unwrap().value;
        let b = whittaker_w_with(qq, WhittakerMethod::KummerSeries).unwrap().value;
        assert!(((a - b) / b).norm() < 1e-10, "{a} {b}");
        let qq = q(C::new(-0.3, 0.2), C::new(0.25, 1.1), 1.7);
        let a = whittaker_w_with(qq, WhittakerMethod::OdeBackward).unwrap().value;
        let b = whittaker_w_with(qq, WhittakerMethod::KummerSeries).unwrap().value;
        let c = whittaker_w_with(qq, WhittakerMethod::Integral).unwrap().value;
        assert!(((a - b) / b).norm() < 1e-10, "{a} {b}");
        assert!(((a - c) / c).norm() < 1e-10, "{a} {c}");
    }

    #[test]
    fn log_case_ode_vs_integral() {
        let qq = q(C::new(0.0, 0.0), C::new(0.0, 0.0), 0.37);
        let a = whittaker_w_with(qq, WhittakerMethod::OdeBackward).unwrap().value;
        let c = whittaker_w_with(qq, WhittakerMethod::Integral).unwrap().value;
        assert!(((a - c) / c).norm() < 1e-11, "{a} {c}");
    }

    #[test]
    fn batch_matches_single() {
        let nu = C::new(0.5, 0.0);
        let rho = C::new(0.0, 1.0);
        let ts = [0.01, 5.0, 0.5, 80.0, 2.0];
        let b = whittaker_w_batch(nu, rho, &ts);
        for (t, r) in ts.iter().zip(b) {
            let s = whittaker_w(q(nu, rho, *t)).unwrap().value;
            let v = r.unwrap().value;
            assert!(((v - s) / s).norm() < 1e-10, "t={t}");
        }
    }
}
