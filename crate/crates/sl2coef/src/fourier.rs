//! Basis functions on the line, their Fourier transforms, and the limit
//! objects built from coefficient columns: step-function embeddings,
//! ℓ²-distances to the Whittaker approximant and the `h_x` pairing.
//!
//! Fourier convention: `f̂(y) = (2π)^{-1/2} ∫ e^{-ity} f(t) dt`. Everything here
//! is `f64`.

use std::io::Write;

use rayon::prelude::*;

use crate::coeffs::{coeff_column, ColumnKind};
use crate::error::{Error, Result};
use crate::gammakit::recip_gamma;
use crate::params::ReprParams;
use crate::quadrature::{gauss_legendre_f64, gauss_legendre_panel, Rule};
use crate::whittaker::{whittaker_w, whittaker_w_batch, WhittakerQuery};
use crate::C64;

const PI: f64 = std::f64::consts::PI;

/// Target for the analytic-tail remainder of [`basis_ft_quadrature`].
pub const FT_TAIL_TOL: f64 = 1e-8;
const FT_TAIL_GOAL: f64 = 1e-11;
const FT_MAX_CUTOFF: f64 = 1e7;
const FT_PANEL_NODES: usize = 24;
const CELL_NODES: usize = 8;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn need_principal(p: &ReprParams<f64>) -> Result<()> {
    if p.is_principal() {
        Ok(())
    } else {
        Err(invalid(format!("principal series required, got ell = {}", p.ell)))
    }
}

/// `e_m(t) = π^{-1/2} e^{-iπm} e^{2im·arctan t} (t²+1)^ℓ` with `m = m_off + ε`.
pub fn basis_fn(p: &ReprParams<f64>, m_off: i64, t: f64) -> C64 {
    let m = m_off as f64 + p.eps;
    let phase = C64::from_polar(1.0, -PI * m + 2.0 * m * t.atan());
    phase * (p.ell * (t * t).ln_1p()).exp() / PI.sqrt()
}

/// `d/dt e_m(t) = e_m(t) (2im + 2ℓt)/(1+t²)`.
fn basis_fn_prime(p: &ReprParams<f64>, m_off: i64, t: f64) -> C64 {
    let m = m_off as f64 + p.eps;
    basis_fn(p, m_off, t) * (C64::new(0.0, 2.0 * m) + p.ell * (2.0 * t)) / (1.0 + t * t)
}

fn ft_prefactor(p: &ReprParams<f64>, n: f64, y: f64) -> (C64, f64) {
    let nu = y.signum() * n;
    let pre = C64::from_polar(1.0, -PI * n)
        * (p.ell + 0.5).exp2()
        * (-(p.ell + 1.0) * y.abs().ln()).exp()
        * recip_gamma(C64::new(nu, 0.0) - p.ell);
    (pre, nu)
}

/// `ê_n(y) = e^{-iπn} 2^{ℓ+1/2} |y|^{-ℓ-1} W_{sgn(y)n, ℓ+1/2}(2|y|) / Γ(sgn(y)n - ℓ)`.
///
/// Vanishes where the reciprocal gamma factor does.
pub fn basis_ft_closed(p: &ReprParams<f64>, n_off: i64, y: f64) -> Result<C64> {
    if y == 0.0 || !y.is_finite() {
        return Err(Error::Domain(format!("basis Fourier transform needs finite y != 0, got {y}")));
    }
    let n = n_off as f64 + p.eps;
    let (pre, nu) = ft_prefactor(p, n, y);
    if pre == C64::new(0.0, 0.0) {
        return Ok(pre);
    }
    let w = whittaker_w(WhittakerQuery::new(C64::new(nu, 0.0), p.ell + 0.5, 2.0 * y.abs()))?;
    Ok(pre * w.value)
}

/// [`basis_ft_closed`] at many points, one Whittaker sweep per sign of `y`.
pub fn basis_ft_closed_batch(p: &ReprParams<f64>, n_off: i64, ys: &[f64]) -> Result<Vec<C64>> {
    let n = n_off as f64 + p.eps;
    let mut out = vec![C64::new(0.0, 0.0); ys.len()];
    for side in [1.0, -1.0] {
        let picks: Vec<usize> = (0..ys.len()).filter(|&i| ys[i] * side > 0.0).collect();
        if picks.is_empty() {
            continue;
        }
        let (_, nu) = ft_prefactor(p, n, side);
        if recip_gamma(C64::new(nu, 0.0) - p.ell) == C64::new(0.0, 0.0) {
            continue;
        }
        let ts: Vec<f64> = picks.iter().map(|&i| 2.0 * ys[i].abs()).collect();
        let ws = whittaker_w_batch(C64::new(nu, 0.0), p.ell + 0.5, &ts);
        for (&i, w) in picks.iter().zip(ws) {
            out[i] = ft_prefactor(p, n, ys[i]).0 * w?.value;
        }
    }
    if let Some(y) = ys.iter().find(|y| **y == 0.0 || !y.is_finite()) {
        return Err(Error::Domain(format!("basis Fourier transform needs finite y != 0, got {y}")));
    }
    Ok(out)
}

/// Direct quadrature value of `ê_n(y)` for `Re ℓ < -1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtQuadrature {
    pub value: C64,
    /// Cutoff `T`; `|t| > T` is handled by two integrations by parts.
    pub cutoff: f64,
    /// Bound on what the by-parts tail formula leaves out.
    pub tail_bound: f64,
}

/// `(2π)^{-1/2} ∫ e^{-ity} e_n(t) dt` by Gauss–Legendre panels on `[-T, T]`
/// (no longer than one period `2π/|y|`) and a two-term by-parts expansion of
/// the tails.
pub fn basis_ft_quadrature(p: &ReprParams<f64>, n_off: i64, y: f64) -> Result<FtQuadrature> {
    if !(p.ell.re < -0.5) {
        return Err(invalid(format!("quadrature transform needs Re ell < -1/2, got {}", p.ell)));
    }
    if y == 0.0 || !y.is_finite() {
        return Err(Error::Domain(format!("quadrature transform needs finite y != 0, got {y}")));
    }
    let n = n_off as f64 + p.eps;
    // |g'(t)| ≲ |t|^{2 Re ℓ - 1} (2|n| + 2|ℓ|) / √π; remainder ≤ 2|g'(T)|/y²
    let slope_coef = (2.0 * n.abs() + 2.0 * p.ell.norm()) / PI.sqrt();
    let remainder = |t: f64| 2.0 * slope_coef * t.powf(2.0 * p.ell.re - 1.0) / (y * y) / (2.0 * PI).sqrt();
    let mut cutoff = 16.0;
    while remainder(cutoff) > FT_TAIL_GOAL && cutoff < FT_MAX_CUTOFF {
        cutoff *= 2.0;
    }
    let tail_bound = remainder(cutoff);
    if tail_bound > FT_TAIL_TOL {
        return Err(Error::Accuracy { estimate: tail_bound, target: FT_TAIL_TOL });
    }
    let period = 2.0 * PI / y.abs();
    let mut edges = vec![0.0];
    while *edges.last().unwrap() < cutoff {
        let a: f64 = *edges.last().unwrap();
        edges.push((a + period.min(1.0 + a / 4.0)).min(cutoff));
    }
    let rule = gauss_legendre_f64(FT_PANEL_NODES);
    let integrand = |t: f64| C64::from_polar(1.0, -t * y) * basis_fn(p, n_off, t);
    let inner: C64 = edges
        .par_windows(2)
        .map(|w| {
            gauss_legendre_panel(&rule, w[0], w[1], integrand) + gauss_legendre_panel(&rule, -w[1], -w[0], integrand)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let iy = C64::new(0.0, y);
    let up = C64::from_polar(1.0, -cutoff * y)
        * (basis_fn(p, n_off, cutoff) / iy + basis_fn_prime(p, n_off, cutoff) / (iy * iy));
    let down = -C64::from_polar(1.0, cutoff * y)
        * (basis_fn(p, n_off, -cutoff) / iy + basis_fn_prime(p, n_off, -cutoff) / (iy * iy));
    let value = (inner + up + down) / (2.0 * PI).sqrt();
    Ok(FtQuadrature { value, cutoff, tail_bound })
}

/// Piecewise-constant function on cells `[m/x, (m+1)/x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    pub cell_width: f64,
    /// `(left endpoint, value)`, contiguous and increasing.
    pub cells: Vec<(f64, C64)>,
}

impl StepFunction {
    pub fn l2_norm(&self) -> f64 {
        (self.cell_width * self.cells.iter().map(|c| c.1.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Covered interval `[first left, last right)`.
    pub fn support(&self) -> (f64, f64) {
        match (self.cells.first(), self.cells.last()) {
            (Some(a), Some(b)) => (a.0, b.0 + self.cell_width),
            _ => (0.0, 0.0),
        }
    }

    /// `left,right,re,im` rows after a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "left,right,re,im")?;
        for (left, v) in &self.cells {
            writeln!(out, "{},{},{:e},{:e}", left, left + self.cell_width, v.re, v.im)?;
        }
        Ok(())
    }

    /// Parses the output of [`StepFunction::write_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        let mut width = None;
        for (k, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| invalid(format!("line {}: {e}", k + 1)))?;
            if f.len() != 4 {
                return Err(invalid(format!("line {}: expected 4 columns", k + 1)));
            }
            width.get_or_insert(f[1] - f[0]);
            cells.push((f[0], C64::new(f[2], f[3])));
        }
        Ok(Self { cell_width: width.unwrap_or(0.0), cells })
    }

    /// `‖self - f‖` in `L²` of [`StepFunction::support`], Gauss–Legendre per cell.
    pub fn l2_distance_to_batch<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<Vec<C64>>,
    {
        let rule = gauss_legendre_f64(CELL_NODES);
        let h = self.cell_width / 2.0;
        let ys: Vec<f64> = self
            .cells
            .iter()
            .flat_map(|(left, _)| rule.nodes.iter().map(move |z| left + h * (1.0 + z)))
            .collect();
        let fv = f(&ys)?;
        let mut acc = 0.0;
        for (k, (_, v)) in self.cells.iter().enumerate() {
            for (j, w) in rule.weights.iter().enumerate() {
                acc += w * h * (v - fv[k * CELL_NODES + j]).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }
}

/// `(2x)^{ℓ+1} 2^{-1/2} Σ_m e^{-iπm} 𝔓ˡ_{mn}(x) 1_{[m/x,(m+1)/x)}` over the
/// window of first-index offsets.
pub fn column_step_fn(
    p: &ReprParams<f64>,
    n_off: i64,
    x: f64,
    window: std::ops::RangeInclusive<i64>,
) -> Result<StepFunction> {
    need_principal(p)?;
    if !(x >= 1.0) {
        return Err(invalid(format!("x must be >= 1, got {x}")));
    }
    let offs: Vec<i64> = window.clone().collect();
    let col = coeff_column(*p, n_off, x, window, ColumnKind::Frak)?;
    let scale = ((p.ell + 1.0) * (2.0 * x).ln()).exp() / std::f64::consts::SQRT_2;
    let cells = offs
        .iter()
        .zip(col)
        .map(|(&mo, v)| {
            let m = mo as f64 + p.eps;
            (m / x, scale * C64::from_polar(1.0, -PI * m) * v)
        })
        .collect();
    Ok(StepFunction { cell_width: 1.0 / x, cells })
}

/// `L²` distance from [`column_step_fn`] to `ê_n` over the window's support.
pub fn step_fn_distance(p: &ReprParams<f64>, n_off: i64, step: &StepFunction) -> Result<f64> {
    step.l2_distance_to_batch(|ys| basis_ft_closed_batch(p, n_off, ys))
}

/// Coefficient argument and Whittaker argument scaling of [`apl2_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Apl2Variant {
    /// `𝔓(x)` against `W(2m/x)`.
    Direct,
    /// `𝔓((x + 1/x)/2)` against `W(4m/x)`.
    Cayley,
}

/// `(Σ_{m>0} |𝔓ˡ_{mn}(X) - (-1)^{m-n} W_{n,iλ}(s m) / (m^{ℓ+1} Γ(n-ℓ))|²)^{1/2}`,
/// summed for `m ≤ 40x + 40`.
pub fn apl2_distance(p: &ReprParams<f64>, n_off: i64, x: f64, variant: Apl2Variant) -> Result<f64> {
    need_principal(p)?;
    if !(x >= 1.0) {
        return Err(invalid(format!("x must be >= 1, got {x}")));
    }
    let (arg, s) = match variant {
        Apl2Variant::Direct => (x, 2.0 / x),
        Apl2Variant::Cayley => ((x + 1.0 / x) / 2.0, 4.0 / x),
    };
    let first = (-p.eps).floor() as i64 + 1;
    let first = if first as f64 + p.eps <= 0.0 { first + 1 } else { first };
    let last = (40.0 * x + 40.0).ceil() as i64;
    let offs: Vec<i64> = (first..=last).collect();
    let col = coeff_column(*p, n_off, arg, first..=last, ColumnKind::Frak)?;
    let n = n_off as f64 + p.eps;
    let rg = recip_gamma(C64::new(n, 0.0) - p.ell);
    let ts: Vec<f64> = offs.iter().map(|&mo| s * (mo as f64 + p.eps)).collect();
    let ws: Vec<C64> = if rg == C64::new(0.0, 0.0) {
        vec![C64::new(0.0, 0.0); ts.len()]
    } else {
        whittaker_w_batch(C64::new(n, 0.0), p.ell + 0.5, &ts)
            .into_iter()
            .map(|w| w.map(|w| w.value))
            .collect::<Result<_>>()?
    };
    let mut acc = 0.0;
    for ((&mo, v), w) in offs.iter().zip(col).zip(ws) {
        let m = mo as f64 + p.eps;
        let sign = if (mo - n_off).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let approx = rg * (-(p.ell + 1.0) * m.ln()).exp() * w * sign;
        acc += (v - approx).norm_sqr();
    }
    Ok(acc.sqrt())
}

/// Both sides of the `h_x` pairing at one `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pairing {
    /// `(T(diag(x, 1/x)) g | h_x)`.
    pub lhs: C64,
    /// `(ĝ | h)`.
    pub rhs: C64,
}

impl Pairing {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

const PAIRING_PANELS: usize = 64;

/// `(ĝ | h) = ∫ ĝ(y) h(y) dy` for real `h` supported in `support`.
pub fn ft_pairing<H: Fn(f64) -> f64 + Sync>(
    p: &ReprParams<f64>,
    g: &[(i64, C64)],
    h: &H,
    support: (f64, f64),
) -> Result<C64> {
    let (a, b) = support;
    let rule: Rule<f64> = gauss_legendre_f64(16);
    let width = (b - a) / PAIRING_PANELS as f64;
    let ys: Vec<f64> = (0..PAIRING_PANELS)
        .flat_map(|k| {
            let lo = a + width * k as f64;
            rule.nodes.iter().map(move |z| lo + width / 2.0 * (1.0 + z)).collect::<Vec<_>>()
        })
        .collect();
    let ws: Vec<f64> = (0..PAIRING_PANELS).flat_map(|_| rule.weights.iter().map(|w| w * width / 2.0)).collect();
    let mut acc = C64::new(0.0, 0.0);
    for &(n_off, coef) in g {
        let fv = basis_ft_closed_batch(p, n_off, &ys)?;
        acc += coef * ys.iter().zip(&fv).zip(&ws).map(|((&y, f), w)| f * h(y) * w).sum::<C64>();
    }
    Ok(acc)
}

/// `(2/x²) Σ_m ê_n(2m/x²) h(2m/x²)`, a Riemann sum for `(ê_n | h)`.
pub fn riemann_pairing<H: Fn(f64) -> f64 + Sync>(
    p: &ReprParams<f64>,
    n_off: i64,
    h: &H,
    support: (f64, f64),
    x: f64,
) -> Result<C64> {
    let step = 2.0 / (x * x);
    let (lo, hi) = ((support.0 / step - p.eps).floor() as i64, (support.1 / step - p.eps).ceil() as i64);
    let ys: Vec<f64> = (lo..=hi).map(|mo| (mo as f64 + p.eps) * step).filter(|&y| y != 0.0).collect();
    let fv = basis_ft_closed_batch(p, n_off, &ys)?;
    Ok(ys.iter().zip(fv).map(|(&y, f)| f * h(y)).sum::<C64>() * step)
}

/// Both sides of `(T(diag(x,1/x)) g | h_x) → (ĝ | h)` for
/// `g = Σ coef·e_{n_off}` and real `h` supported in `support`, with
/// `h_x = √2 x^{-1-2iλ} Σ_m e^{iπm} h(2m/x²) e_{m-ε}` and the coefficients taken
/// at `(x² + x^{-2})/2`.
pub fn apfour_pairing<H: Fn(f64) -> f64 + Sync>(
    p: &ReprParams<f64>,
    g: &[(i64, C64)],
    h: &H,
    support: (f64, f64),
    x: f64,
) -> Result<Pairing> {
    need_principal(p)?;
    if !(x >= 1.0) || !(support.1 > support.0) {
        return Err(invalid("apfour_pairing needs x >= 1 and a nonempty support"));
    }
    let step = 2.0 / (x * x);
    let lo = (support.0 / step - p.eps).floor() as i64;
    let hi = (support.1 / step - p.eps).ceil() as i64;
    let arg = (x * x + 1.0 / (x * x)) / 2.0;
    let lambda = p.lambda();
    // conj(√2 x^{-1-2iλ} e^{iπm})
    let hx_conj = |m: f64| C64::from_polar(std::f64::consts::SQRT_2 / x, 2.0 * lambda * x.ln() - PI * m);
    let mut lhs = C64::new(0.0, 0.0);
    for &(n_off, coef) in g {
        let col = coeff_column(*p, n_off, arg, lo..=hi, ColumnKind::Frak)?;
        for (mo, v) in (lo..=hi).zip(col) {
            let m = mo as f64 + p.eps;
            let hv = h(m * step);
            if hv != 0.0 {
                lhs += coef * v * hx_conj(m) * hv;
            }
        }
    }
    let rhs = ft_pairing(p, g, h, support)?;
    Ok(Pairing { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `∫_ℝ f(t) dt` via `t = tan θ`.
    fn line_integral<F: Fn(f64) -> C64>(f: F) -> C64 {
        let rule = gauss_legendre_f64(32);
        let panels = 200;
        let h = PI / panels as f64;
        (0..panels)
            .map(|k| {
                let a = -PI / 2.0 + h * k as f64;
                gauss_legendre_panel(&rule, a, a + h, |th: f64| {
                    let c = th.cos();
                    f(th.tan()) / (c * c)
                })
            })
            .sum()
    }

    #[test]
    fn basis_special_case() {
        let p = ReprParams::real(-1.0, 0.0);
        for t in [-3.0, -0.2, 0.0, 1.7] {
            let v = basis_fn(&p, 0, t);
            assert!((v - C64::new(1.0 / (PI.sqrt() * (1.0 + t * t)), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn basis_branch_identity() {
        let p = ReprParams::new(C64::new(-0.7, 0.4), 0.3);
        for m_off in [-3, 0, 2] {
            let m = m_off as f64 + p.eps;
            for t in [-5.0, -0.4, 0.0, 0.9, 12.0] {
                let lhs = basis_fn(&p, m_off, t) * PI.sqrt() / (p.ell * (1.0f64 + t * t).ln()).exp();
                let rhs = (C64::new(t, -1.0).ln() * m - C64::new(t, 1.0).ln() * m).exp();
                assert!((lhs - rhs).norm() < 1e-12, "m={m} t={t}");
            }
        }
    }

    #[test]
    fn principal_basis_orthonormal() {
        let p = ReprParams::principal(1.0, 0.3);
        let nrm = line_integral(|t| C64::new(basis_fn(&p, 2, t).norm_sqr(), 0.0));
        assert!((nrm.re - 1.0).abs() < 1e-10);
        let ip = line_integral(|t| basis_fn(&p, 1, t) * basis_fn(&p, 0, t).conj());
        assert!(ip.norm() < 1e-8);
    }

    #[test]
    fn classical_pair() {
        let p = ReprParams::real(-1.0, 0.0);
        for y in [-2.5, -0.3, 0.4, 1.0, 3.0] {
            let expect = (-f64::abs(y)).exp() / std::f64::consts::SQRT_2;
            let c = basis_ft_closed(&p, 0, y).unwrap();
            assert!((c - C64::new(expect, 0.0)).norm() < 1e-12, "closed y={y}");
            let q = basis_ft_quadrature(&p, 0, y).unwrap();
            assert!((q.value - C64::new(expect, 0.0)).norm() < 1e-8, "quadrature y={y}: {}", q.value);
        }
    }

    #[test]
    fn discrete_transform_vanishes_on_negative_side() {
        let p = ReprParams::real(-1.0, 0.0);
        assert_eq!(basis_ft_closed(&p, 1, -0.8).unwrap(), C64::new(0.0, 0.0));
        assert_ne!(basis_ft_closed(&p, 1, 0.8).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn closed_matches_quadrature() {
        let p = ReprParams::real(-0.8, 0.1);
        for y in [0.7, 3.0, -1.2] {
            let c = basis_ft_closed(&p, 1, y).unwrap();
            let q = basis_ft_quadrature(&p, 1, y).unwrap();
            assert!((c - q.value).norm() < 1e-6, "y={y}: {c} vs {}", q.value);
        }
        assert!(basis_ft_quadrature(&ReprParams::principal(1.0, 0.0), 0, 1.0).is_err());
        assert!(basis_ft_closed(&p, 0, 0.0).is_err());
    }

    #[test]
    fn batch_matches_pointwise() {
        let p = ReprParams::principal(1.0, 0.3);
        let ys = [-2.0, -0.05, 0.3, 1.0, 4.0];
        let b = basis_ft_closed_batch(&p, 1, &ys).unwrap();
        for (y, v) in ys.iter().zip(b) {
            let s = basis_ft_closed(&p, 1, *y).unwrap();
            assert!((v - s).norm() <= 1e-9 * s.norm().max(1e-300));
        }
    }

    #[test]
    fn step_fn_at_identity() {
        let p = ReprParams::principal(1.0, 0.0);
        let s = column_step_fn(&p, 0, 1.0, -5..=5).unwrap();
        assert_eq!(s.cells.len(), 11);
        assert_eq!(s.cell_width, 1.0);
        assert!((s.cells[5].1.norm() - 1.0).abs() < 1e-14);
        assert!(s.cells.iter().enumerate().all(|(k, c)| k == 5 || c.1.norm() == 0.0));
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = StepFunction::from_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.cells.len(), 11);
        assert_eq!(back.cells[5], s.cells[5]);
    }

    #[test]
    fn empty_pairing() {
        let p = ReprParams::principal(1.0, 0.0);
        let r = apfour_pairing(&p, &[(0, C64::new(1.0, 0.0))], &|_| 0.0, (1.0, 2.0), 5.0).unwrap();
        assert_eq!(r.lhs, C64::new(0.0, 0.0));
        assert_eq!(r.rhs, C64::new(0.0, 0.0));
    }
}
