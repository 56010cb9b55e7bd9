//! Whittaker-function approximants of the coefficients, their residual
//! scans, the constant term at `x → ∞`, and the Laplace-type gamma-average
//! machinery behind them.
//!
//! Everything here is `f64`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{cal_p_with, frak_p, CoeffIndex, CoeffMethod, CoeffQuery, EvalResult, UsedMethod};
use crate::error::{Error, Result};
use crate::gammakit::{inc_gamma_pq, ln_gamma_real, pochhammer, recip_gamma};
use crate::params::ReprParams;
use crate::quadrature::{gauss_legendre_f64, gauss_legendre_panel, tanh_sinh};
use crate::whittaker::{whittaker_w, whittaker_w_batch, WhittakerQuery};
use crate::C64;

/// Relative disagreement between the two exact routes above which a scan
/// point is excluded.
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-7;
/// Largest allowed log-log slope of the per-m and per-x maxima.
pub const TREND_SLOPE_MAX: f64 = 0.1;
/// Smallest `m` accepted by the two-term gamma-average approximant.
pub const TAYLOR_MIN_M: f64 = 0.5;

const LATTICE_TOL: f64 = 1e-12;

/// Approximation regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `ℓ = -1/2 + iλ`, unnormalized `𝔓`.
    Principal,
    /// Real `ℓ < 0`, `n ∈ -ℓ + ℕ₀`, normalized `𝒫`.
    Discrete,
    /// Complementary series, normalized `𝒫`.
    Complementary,
    /// Any `ℓ`, unnormalized `𝔓`, with the general error scale.
    General,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Principal => "principal",
            Regime::Discrete => "discrete",
            Regime::Complementary => "complementary",
            Regime::General => "general",
        }
    }
}

/// Exact value, approximant and scaled residual at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxResult {
    pub approx: C64,
    pub exact: C64,
    /// `exact - approx`.
    pub residual: C64,
    /// `|residual|` times the regime's scaling.
    pub scaled_sup_stat: f64,
}

fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// `ℓ₁ = 1/2 - |Re ℓ + 1/2|`.
fn ell_one(ell: C64) -> f64 {
    0.5 - (ell.re + 0.5).abs()
}

fn check_common(idx: CoeffIndex, m: f64, x: f64) -> Result<()> {
    if idx.diff() < 0 {
        return Err(invalid(format!("approximants need m - n >= 0, got {}", idx.diff())));
    }
    if !(m > 0.0) {
        return Err(invalid(format!("approximants need m > 0, got {m}")));
    }
    if !(x >= 1.0) || !x.is_finite() {
        return Err(invalid(format!("x must be finite and >= 1, got {x}")));
    }
    Ok(())
}

/// Checks the regime's hypotheses and returns the factor multiplying
/// `W_{n,ℓ+1/2}(2m/x)`.
fn prefactor(regime: Regime, p: &ReprParams<f64>, idx: CoeffIndex, x: f64) -> Result<C64> {
    let (m, n) = (idx.m(p.eps), idx.n(p.eps));
    check_common(idx, m, x)?;
    let ell = p.ell;
    let sign = parity(idx.diff());
    match regime {
        Regime::Principal | Regime::General => {
            if regime == Regime::Principal && !p.is_principal() {
                return Err(invalid(format!("principal approximant needs Re ell = -1/2, got {ell}")));
            }
            if regime == Regime::General && m <= (-ell_one(ell)).max(0.0) {
                return Err(invalid(format!("general approximant needs m > max(0, -ell_1), got m = {m}")));
            }
            let rg = recip_gamma(C64::new(n, 0.0) - ell);
            Ok(rg * (-(ell + 1.0) * m.ln()).exp() * sign)
        }
        Regime::Discrete => {
            let l = ell.re;
            let k = n + l;
            if !p.is_real_ell() || l >= 0.0 || (k - k.round()).abs() > LATTICE_TOL || k.round() < 0.0 {
                return Err(invalid(format!("discrete approximant needs real ell < 0 and n in -ell + N0, got ell = {ell}, n = {n}")));
            }
            let (a, _) = ln_gamma_real(l + n + 1.0)?;
            let (b, _) = ln_gamma_real(n - l)?;
            Ok(C64::new(sign * (-0.5 * (m.ln() + a + b)).exp(), 0.0))
        }
        Regime::Complementary => {
            if !p.is_complementary() {
                return Err(invalid(format!("complementary approximant needs a complementary character, got {ell}, {}", p.eps)));
            }
            let l = ell.re;
            let (a, sa) = ln_gamma_real(n - l)?;
            let (b, _) = ln_gamma_real(n + l + 1.0)?;
            Ok(C64::new(sign * sa * (-0.5 * (m.ln() + a + b)).exp(), 0.0))
        }
    }
}

fn approx_with(regime: Regime, p: &ReprParams<f64>, idx: CoeffIndex, x: f64) -> Result<C64> {
    let pre = prefactor(regime, p, idx, x)?;
    if pre == C64::new(0.0, 0.0) {
        return Ok(pre);
    }
    let (m, n) = (idx.m(p.eps), idx.n(p.eps));
    let w = whittaker_w(WhittakerQuery::new(C64::new(n, 0.0), p.ell + 0.5, 2.0 * m / x))?;
    Ok(pre * w.value)
}

/// Principal-series main term `(-1)^{m-n} W_{n,iλ}(2m/x) / (m^{ℓ+1} Γ(n-ℓ))`.
///
/// Exactly zero when `n - ℓ` is a nonpositive integer.
pub fn approx_principal(p: &ReprParams<f64>, idx: CoeffIndex, x: f64) -> Result<C64> {
    approx_with(Regime::Principal, p, idx, x)
}

/// Discrete-series main term
/// `(-1)^{m-n} W_{n,ℓ+1/2}(2m/x) / (m Γ(ℓ+n+1) Γ(n-ℓ))^{1/2}` for `𝒫`.
pub fn approx_discrete(p: &ReprParams<f64>, idx: CoeffIndex, x: f64) -> Result<C64> {
    approx_with(Regime::Discrete, p, idx, x)
}

/// Complementary-series main term
/// `(-1)^{m-n} sgn Γ(n-ℓ) W_{n,ℓ+1/2}(2m/x) / (m Γ(n-ℓ) Γ(n+ℓ+1))^{1/2}` for `𝒫`.
pub fn approx_complementary(p: &ReprParams<f64>, idx: CoeffIndex, x: f64) -> Result<C64> {
    approx_with(Regime::Complementary, p, idx, x)
}

/// Main term for arbitrary `ℓ` and its error scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralApprox {
    pub main: C64,
    /// `m^{-Re ℓ - 3} (m/x)^{ℓ₁}` with `ℓ₁ = 1/2 - |Re ℓ + 1/2|`.
    pub error_scale: f64,
}

pub fn approx_general(p: &ReprParams<f64>, idx: CoeffIndex, x: f64) -> Result<GeneralApprox> {
    let main = approx_with(Regime::General, p, idx, x)?;
    let m = idx.m(p.eps);
    Ok(GeneralApprox { main, error_scale: general_error_scale(p.ell, m, x) })
}

fn general_error_scale(ell: C64, m: f64, x: f64) -> f64 {
    m.powf(-ell.re - 3.0) * (m / x).powf(ell_one(ell))
}

/// Factor turning `|residual|` into the regime's bounded statistic.
pub fn regime_scaling(regime: Regime, ell: C64, m: f64, x: f64) -> f64 {
    match regime {
        Regime::Principal | Regime::Discrete => x.sqrt() * m * m,
        Regime::Complementary => m.powf(2.5) * (m / x).powf((ell.re + 0.5).abs() - 0.5),
        Regime::General => 1.0 / general_error_scale(ell, m, x),
    }
}

/// The approximant of `regime` against the exact coefficient from `Auto`.
pub fn approx_result(regime: Regime, p: &ReprParams<f64>, idx: CoeffIndex, x: f64) -> Result<ApproxResult> {
    let approx = approx_with(regime, p, idx, x)?;
    let exact = exact_value(regime, p, idx, x, CoeffMethod::Auto)?.value;
    let residual = exact - approx;
    let m = idx.m(p.eps);
    let scaled_sup_stat = residual.norm() * regime_scaling(regime, p.ell, m, x);
    Ok(ApproxResult { approx, exact, residual, scaled_sup_stat })
}

fn exact_value(regime: Regime, p: &ReprParams<f64>, idx: CoeffIndex, x: f64, method: CoeffMethod) -> Result<EvalResult<f64>> {
    let q = CoeffQuery::new(*p, idx, x);
    match regime {
        Regime::Principal | Regime::General => frak_p(&q, method),
        Regime::Discrete | Regime::Complementary => cal_p_with(&q, method),
    }
}

/// Exact coefficient confirmed by a second route.
fn cross_validated(regime: Regime, p: &ReprParams<f64>, idx: CoeffIndex, x: f64) -> std::result::Result<C64, String> {
    let first = exact_value(regime, p, idx, x, CoeffMethod::Auto).map_err(|e| format!("no exact value: {e}"))?;
    if first.method == UsedMethod::Identity {
        return Ok(first.value);
    }
    let other = match first.method {
        UsedMethod::Hypergeometric => CoeffMethod::GammaAverage,
        _ => CoeffMethod::Hypergeometric,
    };
    let second = exact_value(regime, p, idx, x, other).or_else(|e| {
        if regime == Regime::Discrete && first.method != UsedMethod::Jacobi {
            exact_value(regime, p, idx, x, CoeffMethod::Jacobi)
        } else {
            Err(e)
        }
    });
    let second = second.map_err(|e| format!("second route unavailable: {e}"))?;
    let scale = first.value.norm().max(second.value.norm());
    let gap = (first.value - second.value).norm();
    if gap > ROUTE_AGREEMENT_TOL * scale {
        return Err(format!("routes {} and {} disagree by {:.3e} relative", first.method.as_str(), second.method.as_str(), gap / scale));
    }
    Ok(first.value)
}

/// Constant term `α` of `√x·𝔓ˡ_{mn}(x) ≈ |α| cos(λ log x + β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantTerm {
    /// `|α|` times the phase of `(ℓ-m+1)_{m-n}` (a sign for real `ℓ`).
    pub alpha: C64,
    pub alpha_abs: f64,
}

/// Closed form `α = phase((ℓ-m+1)_{m-n}) · 2|cos π(ε-iλ)| / √(πλ sinh 2πλ)`.
pub fn constant_term(p: &ReprParams<f64>, idx: CoeffIndex) -> Result<ConstantTerm> {
    let lambda = p.lambda();
    if !p.is_principal() {
        return Err(invalid("constant term needs Re ell = -1/2"));
    }
    if lambda == 0.0 {
        return Err(Error::Domain("lambda = 0 has a logarithmic limit, see log_limit_ell_half".into()));
    }
    if lambda < 0.0 {
        return Err(invalid("constant term needs lambda > 0"));
    }
    if idx.diff() < 0 {
        return Err(invalid("constant term needs m - n >= 0"));
    }
    let pi = std::f64::consts::PI;
    let m = idx.m(p.eps);
    let poch = pochhammer(p.ell - m + 1.0, idx.diff() as u64);
    let phase = poch / poch.norm();
    let c = (C64::new(p.eps, -lambda) * pi).cos().norm();
    let alpha_abs = 2.0 * c / (pi * lambda * (2.0 * pi * lambda).sinh()).sqrt();
    Ok(ConstantTerm { alpha: phase * alpha_abs, alpha_abs })
}

/// Least-squares fit `√x·𝔓 ≈ c₁ cos(λ log x) + c₂ sin(λ log x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFit {
    pub c1: C64,
    pub c2: C64,
    /// `√(|c₁|² + |c₂|²)`.
    pub amplitude: f64,
    /// Phase with `c₁ = a cos β`, `c₂ = -a sin β` for a common complex `a`.
    pub beta: f64,
    /// Root-mean-square misfit.
    pub rms: f64,
}

/// `n_samples` log-uniform points in `[x_lo, x_hi]`.
pub fn fit_envelope(p: &ReprParams<f64>, idx: CoeffIndex, x_lo: f64, x_hi: f64, n_samples: usize) -> Result<EnvelopeFit> {
    if n_samples < 3 || !(x_hi > x_lo) || x_lo < 1.0 {
        return Err(invalid("envelope fit needs at least 3 samples on an increasing range in [1, ∞)"));
    }
    let lambda = p.lambda();
    let xs: Vec<f64> = (0..n_samples)
        .map(|i| (x_lo.ln() + (x_hi / x_lo).ln() * i as f64 / (n_samples - 1) as f64).exp())
        .collect();
    let ys: Vec<C64> = xs
        .par_iter()
        .map(|&x| frak_p(&CoeffQuery::new(*p, idx, x), CoeffMethod::Auto).map(|r| r.value * x.sqrt()))
        .collect::<Result<_>>()?;
    let (mut scc, mut scs, mut sss) = (0.0, 0.0, 0.0);
    let (mut rc, mut rs) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for (&x, &y) in xs.iter().zip(&ys) {
        let (s, c) = (lambda * x.ln()).sin_cos();
        scc += c * c;
        scs += c * s;
        sss += s * s;
        rc += y * c;
        rs += y * s;
    }
    let det = scc * sss - scs * scs;
    let c1 = (rc * sss - rs * scs) / det;
    let c2 = (rs * scc - rc * scs) / det;
    let amplitude = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
    let a = (c1 * c1 + c2 * c2).sqrt();
    let u = if a.norm() > 0.0 { a / a.norm() } else { C64::new(1.0, 0.0) };
    let beta = (-(c2 * u.conj()).re).atan2((c1 * u.conj()).re);
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| {
            let (s, c) = (lambda * x.ln()).sin_cos();
            (y - c1 * c - c2 * s).norm_sqr()
        })
        .sum::<f64>()
        / n_samples as f64)
        .sqrt();
    Ok(EnvelopeFit { c1, c2, amplitude, beta, rms })
}

/// `lim √x·𝔓^{-1/2}_{mn}(x) / log x = √2 cos(πm)/π`.
pub fn log_limit_ell_half(m: f64) -> f64 {
    std::f64::consts::SQRT_2 * (std::f64::consts::PI * m).cos() / std::f64::consts::PI
}

/// `f(ym) + (y²m/2) f''(ym)`, the two-term approximant of
/// `E f(yT)` for `T ~ Gamma(m, 1)`.
pub fn gamma_average_taylor_mean<F, F2>(f: F, f2: F2, m: f64, y: f64) -> Result<C64>
where
    F: Fn(f64) -> C64,
    F2: Fn(f64) -> C64,
{
    if !(m >= TAYLOR_MIN_M) || !(y > 0.0) {
        return Err(invalid(format!("gamma-average approximant needs m >= {TAYLOR_MIN_M} and y > 0")));
    }
    let s = y * m;
    Ok(f(s) + f2(s) * (y * y * m / 2.0))
}

/// `Γ(m)(f(ym) + (y²m/2) f''(ym))`, approximating `∫₀^∞ e^{-t} t^{m-1} f(yt) dt`.
///
/// Overflows for `m` beyond about 171; use [`gamma_average_taylor_mean`] there.
pub fn gamma_average_taylor<F, F2>(f: F, f2: F2, m: f64, y: f64) -> Result<C64>
where
    F: Fn(f64) -> C64,
    F2: Fn(f64) -> C64,
{
    let mean = gamma_average_taylor_mean(f, f2, m, y)?;
    let (lg, _) = ln_gamma_real(m)?;
    Ok(mean * lg.exp())
}

const EXPECT_PANELS: usize = 96;
const EXPECT_NODES: usize = 32;

/// `E g(T)` for `T ~ Gamma(m, 1)` by quadrature.
///
/// Gauss–Legendre panels over `m ± 40√m` (clipped at 0) for `m ≥ 2`,
/// tanh-sinh over the same range below that.
pub fn gamma_expectation<G: Fn(f64) -> C64 + Sync>(g: G, m: f64) -> Result<C64> {
    if !(m > 0.0) {
        return Err(invalid("gamma expectation needs m > 0"));
    }
    let (lgm, _) = ln_gamma_real(m)?;
    let density = |t: f64| if t > 0.0 { ((m - 1.0) * t.ln() - t - lgm).exp() } else { 0.0 };
    let spread = 40.0 * m.sqrt() + 60.0;
    let (lo, hi) = ((m - spread).max(0.0), m + spread);
    if m < 2.0 {
        let r = tanh_sinh(|t: f64| g(t) * density(t), lo, hi, 1e-14, 12)?;
        return Ok(r.value);
    }
    let rule = gauss_legendre_f64(EXPECT_NODES);
    let h = (hi - lo) / EXPECT_PANELS as f64;
    let parts: Vec<C64> = (0..EXPECT_PANELS)
        .into_par_iter()
        .map(|k| {
            let a = lo + h * k as f64;
            gauss_legendre_panel(&rule, a, a + h, |t| g(t) * density(t))
        })
        .collect();
    Ok(parts.into_iter().sum())
}

/// `E (T - m)^k`, `k = 0..4`, for `T ~ Gamma(m, 1)` by quadrature.
pub fn central_moments(m: f64) -> Result<[f64; 5]> {
    let mut out = [0.0; 5];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = gamma_expectation(|t| C64::new((t - m).powi(k as i32), 0.0), m)?.re;
    }
    Ok(out)
}

/// `1, 0, m, 2m, 3m(m+2)`.
pub fn central_moments_exact(m: f64) -> [f64; 5] {
    [1.0, 0.0, m, 2.0 * m, 3.0 * m * (m + 2.0)]
}

/// Tails of `∫ e^{-t} t^{m-1} (yt)^α dt` outside `[m/2, 2m]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailMass {
    /// `∫₀^{m/2}`, in units of `y^α Γ(m+α)`, i.e. `P(m+α, m/2)`.
    pub lower_tail: f64,
    /// `∫_{2m}^∞`, in units of `y^α Γ(m+α)`, i.e. `Q(m+α, 2m)`.
    pub upper_tail: f64,
    /// Larger tail divided by the bound `y^α (m+1)^{-β} Γ(m+α)`.
    pub bound_ratio: f64,
}

pub fn gamma_tail_mass(alpha: f64, m: f64, y: f64, beta: f64) -> Result<TailMass> {
    if !(alpha >= 0.0) || !(m > 0.0) || !(y > 0.0) || !(beta > 0.0) {
        return Err(invalid("gamma_tail_mass needs alpha >= 0 and m, y, beta > 0"));
    }
    let a = m + alpha;
    let lower_tail = inc_gamma_pq(a, m / 2.0)?.p;
    let upper_tail = inc_gamma_pq(a, 2.0 * m)?.q;
    let bound_ratio = lower_tail.max(upper_tail) * (m + 1.0).powf(beta);
    Ok(TailMass { lower_tail, upper_tail, bound_ratio })
}

/// Parameters of a residual scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub regime: Regime,
    pub params: ReprParams<f64>,
    pub n_off: i64,
    pub x_grid: Vec<f64>,
    /// First-index offsets, `m = m_off + ε`.
    pub m_grid: Vec<i64>,
    /// Extra power of `m` multiplied into the scaling; nonzero only to
    /// check that the harness detects a wrong scaling.
    pub extra_m_power: f64,
}

/// Snaps real `m` values to offsets with `m ∈ n + ℕ₀`, `m > 0`, `m ∈ [lo, hi]`.
/// The result is sorted and free of duplicates.
pub fn snap_m_grid(values: &[f64], eps: f64, n_off: i64, lo: f64, hi: f64) -> Vec<i64> {
    let min_off = ((lo - eps).ceil() as i64).max(n_off);
    let max_off = (hi - eps).floor() as i64;
    let mut out: Vec<i64> = values
        .iter()
        .map(|&v| ((v - eps).round() as i64).clamp(min_off, max_off.max(min_off)))
        .filter(|&o| o as f64 + eps > 0.0 && o <= max_off)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// One grid point of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub x: f64,
    pub m: f64,
    pub exact: [f64; 2],
    pub approx: [f64; 2],
    pub residual_abs: f64,
    pub scaled: f64,
}

/// A grid point dropped from the statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedPoint {
    pub x: f64,
    pub m: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of [`residual_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub regime: Regime,
    pub ell: [f64; 2],
    pub eps: f64,
    pub n: f64,
    pub extra_m_power: f64,
    /// `(x, m)` in scan order (x outer, m inner).
    pub grid: Vec<[f64; 2]>,
    pub stats: Vec<ScanPoint>,
    pub sup_stat: f64,
    /// `max(trend_slope_m, trend_slope_x)`.
    pub trend_slope: f64,
    /// Log-log slope of the per-m maxima against `m`.
    pub trend_slope_m: f64,
    /// Log-log slope of the per-x maxima against `x`.
    pub trend_slope_x: f64,
    pub verdict: Verdict,
    pub excluded_points: Vec<ExcludedPoint>,
}

/// Least-squares slope of `ln v` against `ln u` over positive finite pairs.
fn log_log_slope(pairs: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(u, v)| *u > 0.0 && *v > 0.0 && v.is_finite())
        .map(|(u, v)| (u.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let k = pts.len() as f64;
    let mu = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let mv = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let suu: f64 = pts.iter().map(|p| (p.0 - mu).powi(2)).sum();
    let suv: f64 = pts.iter().map(|p| (p.0 - mu) * (p.1 - mv)).sum();
    if suu == 0.0 {
        0.0
    } else {
        suv / suu
    }
}

/// Exact-versus-approximant scan over `x_grid × m_grid`.
///
/// Points are computed in parallel and assembled in grid order, so the report
/// does not depend on scheduling.
pub fn residual_scan(spec: &ScanSpec) -> Result<ScanReport> {
    let p = spec.params;
    if spec.x_grid.is_empty() || spec.m_grid.is_empty() {
        return Err(invalid("scan grids must be nonempty"));
    }
    // Fail early on hypotheses violated at every point.
    for &m_off in &spec.m_grid {
        prefactor(spec.regime, &p, CoeffIndex::new(m_off, spec.n_off), spec.x_grid[0])?;
    }
    let n = spec.n_off as f64 + p.eps;
    let nm = spec.m_grid.len();
    let grid: Vec<[f64; 2]> = spec
        .x_grid
        .iter()
        .flat_map(|&x| spec.m_grid.iter().map(move |&mo| [x, mo as f64 + p.eps]))
        .collect();

    let rows: Vec<Result<Vec<C64>>> = spec
        .x_grid
        .par_iter()
        .map(|&x| approx_row(spec, x))
        .collect();
    let exacts: Vec<std::result::Result<C64, String>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = spec.x_grid[i / nm];
            let idx = CoeffIndex::new(spec.m_grid[i % nm], spec.n_off);
            cross_validated(spec.regime, &p, idx, x)
        })
        .collect();

    let mut stats = Vec::with_capacity(grid.len());
    let mut excluded_points = Vec::new();
    let mut per_m = vec![0.0f64; nm];
    let mut per_x = vec![0.0f64; spec.x_grid.len()];
    for (i, ex) in exacts.into_iter().enumerate() {
        let (xi, mi) = (i / nm, i % nm);
        let [x, m] = grid[i];
        let approx = match &rows[xi] {
            Ok(row) => row[mi],
            Err(e) => return Err(e.clone()),
        };
        let exact = match ex {
            Ok(v) => v,
            Err(reason) => {
                excluded_points.push(ExcludedPoint { x, m, reason });
                continue;
            }
        };
        let residual_abs = (exact - approx).norm();
        let scaled = residual_abs * regime_scaling(spec.regime, p.ell, m, x) * m.powf(spec.extra_m_power);
        per_m[mi] = per_m[mi].max(scaled);
        per_x[xi] = per_x[xi].max(scaled);
        stats.push(ScanPoint { x, m, exact: [exact.re, exact.im], approx: [approx.re, approx.im], residual_abs, scaled });
    }
    let sup_stat = stats.iter().map(|s| s.scaled).fold(0.0, f64::max);
    let trend_slope_m = log_log_slope(&spec.m_grid.iter().map(|&mo| mo as f64 + p.eps).zip(per_m).collect::<Vec<_>>());
    let trend_slope_x = log_log_slope(&spec.x_grid.iter().copied().zip(per_x).collect::<Vec<_>>());
    let trend_slope = trend_slope_m.max(trend_slope_x);
    let ok = !stats.is_empty() && sup_stat.is_finite() && trend_slope <= TREND_SLOPE_MAX;
    Ok(ScanReport {
        regime: spec.regime,
        ell: [p.ell.re, p.ell.im],
        eps: p.eps,
        n,
        extra_m_power: spec.extra_m_power,
        grid,
        stats,
        sup_stat,
        trend_slope,
        trend_slope_m,
        trend_slope_x,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        excluded_points,
    })
}

/// Approximants along one `x` row, sharing a single Whittaker sweep.
fn approx_row(spec: &ScanSpec, x: f64) -> Result<Vec<C64>> {
    let p = spec.params;
    let n = spec.n_off as f64 + p.eps;
    let pres: Vec<C64> = spec
        .m_grid
        .iter()
        .map(|&mo| prefactor(spec.regime, &p, CoeffIndex::new(mo, spec.n_off), x))
        .collect::<Result<_>>()?;
    if pres.iter().all(|v| *v == C64::new(0.0, 0.0)) {
        return Ok(pres);
    }
    let ts: Vec<f64> = spec.m_grid.iter().map(|&mo| 2.0 * (mo as f64 + p.eps) / x).collect();
    let ws = whittaker_w_batch(C64::new(n, 0.0), p.ell + 0.5, &ts);
    pres.into_iter()
        .zip(ws)
        .map(|(pre, w)| if pre == C64::new(0.0, 0.0) { Ok(pre) } else { w.map(|w| pre * w.value) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn principal_trivial_zero() {
        let p = ReprParams::principal(0.0, 0.5);
        for (m_off, n_off) in [(0, -1), (3, -1), (5, -2)] {
            let v = approx_principal(&p, CoeffIndex::new(m_off, n_off), 7.0).unwrap();
            assert_eq!(v, C64::new(0.0, 0.0));
        }
        let p = ReprParams::principal(0.0, 0.0);
        assert_ne!(approx_principal(&p, CoeffIndex::new(2, -1), 3.0).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn discrete_elementary() {
        // ℓ = -1, n = m = 1: W_{1,-1/2}(t) = t e^{-t/2}
        let p = ReprParams::real(-1.0, 0.0);
        let x = 3.0;
        let v = approx_discrete(&p, CoeffIndex::new(1, 1), x).unwrap();
        let t = 2.0 / x;
        assert!(rel(v, C64::new(t * (-t / 2.0).exp(), 0.0)) < 1e-13);
    }

    #[test]
    fn general_matches_principal() {
        let p = ReprParams::principal(1.3, 0.2);
        let idx = CoeffIndex::new(9, 1);
        let a = approx_principal(&p, idx, 6.0).unwrap();
        let g = approx_general(&p, idx, 6.0).unwrap();
        assert!(rel(g.main, a) < 1e-12);
        let m: f64 = idx.m(0.2);
        assert!((g.error_scale - m.powf(-2.5) * (m / 6.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn complementary_signs() {
        let p = ReprParams::real(-0.6, 0.05);
        let idx = CoeffIndex::new(10, 0);
        let r = approx_result(Regime::Complementary, &p, idx, 10.0).unwrap();
        assert!(r.approx.re * r.exact.re > 0.0);
        assert!(r.residual.norm() < 0.05 * r.exact.norm());
    }

    #[test]
    fn hypotheses_are_checked() {
        let p = ReprParams::principal(1.0, 0.0);
        assert!(approx_principal(&p, CoeffIndex::new(0, 1), 2.0).is_err());
        assert!(approx_principal(&p, CoeffIndex::new(0, 0), 2.0).is_err());
        assert!(approx_principal(&p, CoeffIndex::new(2, 0), 0.5).is_err());
        assert!(approx_discrete(&ReprParams::real(-1.0, 0.0), CoeffIndex::new(2, 0), 2.0).is_err());
        assert!(approx_complementary(&ReprParams::real(-0.6, 0.45), CoeffIndex::new(2, 0), 2.0).is_err());
    }

    #[test]
    fn constant_term_closed_form() {
        let pi = std::f64::consts::PI;
        let c = constant_term(&ReprParams::principal(1.0, 0.0), CoeffIndex::new(0, 0)).unwrap();
        let expect = 2.0 * pi.cosh() / (pi * (2.0 * pi).sinh()).sqrt();
        assert!((c.alpha_abs - expect).abs() < 1e-14);
        assert_eq!(c.alpha, C64::new(c.alpha_abs, 0.0));
        assert!(constant_term(&ReprParams::principal(0.0, 0.0), CoeffIndex::new(0, 0)).is_err());
    }

    #[test]
    fn log_limit_values() {
        assert!(log_limit_ell_half(0.5).abs() < 1e-16);
        assert!((log_limit_ell_half(0.0) - 0.450_158_158_078_553).abs() < 1e-14);
        assert!((log_limit_ell_half(1.0) + log_limit_ell_half(0.0)).abs() < 1e-15);
    }

    #[test]
    fn taylor_exact_cases() {
        let one = |_: f64| C64::new(1.0, 0.0);
        let zero = |_: f64| C64::new(0.0, 0.0);
        let (m, y) = (6.5, 0.3);
        let g = gamma_average_taylor(one, zero, m, y).unwrap();
        let (lg, _) = ln_gamma_real(m).unwrap();
        assert!((g.re / lg.exp() - 1.0).abs() < 1e-14);
        let sq = |t: f64| C64::new(t * t, 0.0);
        let two = |_: f64| C64::new(2.0, 0.0);
        let g = gamma_average_taylor(sq, two, m, y).unwrap();
        let (lg2, _) = ln_gamma_real(m + 2.0).unwrap();
        assert!((g.re / (y * y * lg2.exp()) - 1.0).abs() < 1e-13);
        assert!(gamma_average_taylor_mean(one, zero, 0.25, 1.0).is_err());
    }

    #[test]
    fn moments_by_quadrature() {
        for m in [1.5, 5.0, 20.0, 100.0] {
            let q = central_moments(m).unwrap();
            let e = central_moments_exact(m);
            for k in 0..5 {
                let scale = m.powf(k as f64 / 2.0).max(1.0);
                assert!((q[k] - e[k]).abs() <= 1e-9 * scale.max(e[k].abs()), "m={m} k={k}: {} vs {}", q[k], e[k]);
            }
        }
    }

    #[test]
    fn tails_shrink() {
        let ratios: Vec<f64> = [25.0, 50.0, 100.0, 200.0, 400.0]
            .iter()
            .map(|&m| gamma_tail_mass(0.0, m, 1.0, 2.0).unwrap().bound_ratio)
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
        let t = gamma_tail_mass(0.5, 50.0, 0.2, 3.0).unwrap();
        assert!(t.bound_ratio.is_finite() && t.lower_tail > 0.0 && t.upper_tail > 0.0);
    }

    #[test]
    fn snapping() {
        let offs = snap_m_grid(&[0.2, 1.0, 1.4, 3.7, 250.0], 0.3, 0, 1.0, 200.0);
        assert_eq!(offs, vec![1, 3, 199]);
        let offs = snap_m_grid(&[1.0, 2.0], 0.0, 2, 1.0, 200.0);
        assert_eq!(offs, vec![2]);
    }

    #[test]
    fn slope_of_power_law() {
        let pairs: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 3.0 * (i as f64).powf(1.5))).collect();
        assert!((log_log_slope(&pairs) - 1.5).abs() < 1e-12);
    }
}
