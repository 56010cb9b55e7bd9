//! Quadrature rules.
//!
//! Gauss–Legendre and generalized Gauss–Laguerre tables (computed once and
//! shared), and double-exponential trapezoid rules on `[0,∞)`, `[a,b]` and `ℝ`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::real::{Cx, Real};

/// Nodes and weights of an interpolatory rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

/// Node counts and tolerances for the integral routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Gauss–Legendre order for fixed panels.
    pub legendre_nodes: usize,
    /// Generalized Gauss–Laguerre order for the gamma-weighted average.
    pub laguerre_nodes: usize,
    /// Relative change allowed between Laguerre orders `n` and `2n`.
    pub laguerre_doubling_tol: f64,
    /// Relative tolerance for double-exponential refinement.
    pub de_tol: f64,
    /// Maximum number of step halvings in double-exponential rules.
    pub de_max_level: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            legendre_nodes: 64,
            laguerre_nodes: 96,
            laguerre_doubling_tol: 1e-9,
            de_tol: 1e-12,
            de_max_level: 9,
        }
    }
}

const LAGUERRE_CACHE_CAP: usize = 64;

/// Gauss–Laguerre rules keyed by `(alpha bits, nodes)`.
type LaguerreCache<T> = Vec<((u64, usize), Arc<Rule<T>>)>;

/// Shared node tables for one scalar type.
#[derive(Debug, Default)]
pub struct QuadTables<T> {
    legendre: Mutex<HashMap<usize, Arc<Rule<T>>>>,
    // most recently used at the back
    laguerre: Mutex<LaguerreCache<T>>,
}

impl<T: Real> QuadTables<T> {
    pub fn new() -> Self {
        Self { legendre: Mutex::new(HashMap::new()), laguerre: Mutex::new(Vec::new()) }
    }

    /// Gauss–Legendre rule on `[-1, 1]`.
    pub fn legendre(&self, n: usize) -> Arc<Rule<T>> {
        if let Some(r) = self.legendre.lock().unwrap().get(&n) {
            return r.clone();
        }
        let rule = Arc::new(cast_rule(gauss_legendre_f64(n)));
        self.legendre.lock().unwrap().entry(n).or_insert(rule).clone()
    }

    /// Generalized Gauss–Laguerre rule for the weight `t^alpha e^{-t}/Γ(alpha+1)`.
    ///
    /// `alpha` is rounded to 12 significant digits before lookup.
    pub fn laguerre(&self, n: usize, alpha: f64) -> Result<Arc<Rule<T>>> {
        let alpha = round_sig(alpha, 12);
        let key = (alpha.to_bits(), n);
        {
            let mut cache = self.laguerre.lock().unwrap();
            if let Some(pos) = cache.iter().position(|(k, _)| *k == key) {
                let entry = cache.remove(pos);
                let rule = entry.1.clone();
                cache.push(entry);
                return Ok(rule);
            }
        }
        let rule = Arc::new(cast_rule(gauss_laguerre_f64(n, alpha)?));
        let mut cache = self.laguerre.lock().unwrap();
        if !cache.iter().any(|(k, _)| *k == key) {
            if cache.len() >= LAGUERRE_CACHE_CAP {
                cache.remove(0);
            }
            cache.push((key, rule.clone()));
        }
        Ok(rule)
    }

    /// Number of cached Laguerre rules.
    pub fn laguerre_cached(&self) -> usize {
        self.laguerre.lock().unwrap().len()
    }
}

fn round_sig(v: f64, digits: i32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let p = digits - 1 - v.abs().log10().floor() as i32;
    let s = 10f64.powi(p);
    (v * s).round() / s
}

fn cast_rule<T: Real>(r: Rule<f64>) -> Rule<T> {
    Rule {
        nodes: r.nodes.into_iter().map(T::c).collect(),
        weights: r.weights.into_iter().map(T::c).collect(),
    }
}

/// Gauss–Legendre nodes by Newton iteration on `P_n`.
pub fn gauss_legendre_f64(n: usize) -> Rule<f64> {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// Generalized Gauss–Laguerre rule (normalized weights) by Golub–Welsch.
pub fn gauss_laguerre_f64(n: usize, alpha: f64) -> Result<Rule<f64>> {
    if !(alpha > -1.0) || n == 0 {
        return Err(Error::InvalidParameter(format!("laguerre rule needs alpha > -1, got {alpha}")));
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jac[(k, k)] = 2.0 * k as f64 + alpha + 1.0;
        if k + 1 < n {
            let b = ((k as f64 + 1.0) * (k as f64 + 1.0 + alpha)).sqrt();
            jac[(k, k + 1)] = b;
            jac[(k + 1, k)] = b;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    })
}

/// Result of a double-exponential integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeResult<T> {
    pub value: Cx<T>,
    /// Relative change between the last two refinement levels.
    pub est_rel_err: T,
    /// `Σ|terms| / |sum|`.
    pub cond: T,
    pub evals: usize,
}

/// Trapezoid rule in the transformed variable with step halving.
///
/// `g` is the transformed integrand; `s_lo`, `s_hi` bound the search for the
/// truncation points.
fn de_driver<T: Real, G: Fn(T) -> Cx<T>>(g: G, s_lo: T, s_hi: T, tol: T, max_level: u32) -> Result<DeResult<T>> {
    let h0 = T::c(0.5);
    let g0 = g(T::zero());
    if !(g0.re.is_finite() && g0.im.is_finite()) {
        return Err(Error::Domain("de quadrature: non-finite integrand at centre".into()));
    }
    let mut peak = g0.norm();
    let mut evals = 1usize;
    let cutoff = T::epsilon() * T::c(1e-4);
    // outward search on the coarse grid
    let mut bounds = [T::zero(); 2];
    for (side, dir) in [(0usize, -T::one()), (1usize, T::one())] {
        let limit = if side == 0 { s_lo } else { s_hi };
        let mut s = T::zero();
        let mut quiet = 0;
        loop {
            s = s + dir * h0;
            if (dir < T::zero() && s < limit) || (dir > T::zero() && s > limit) {
                s = s - dir * h0;
                break;
            }
            let v = g(s);
            evals += 1;
            let a = v.norm();
            if !a.is_finite() {
                s = s - dir * h0;
                break;
            }
            peak = peak.max(a);
            if a <= cutoff * peak {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        bounds[side] = s;
    }
    let (lo, hi) = (bounds[0], bounds[1]);
    let mut sum = Cx::<T>::zero();
    let mut abs_sum = T::zero();
    let n0 = ((hi - lo) / h0).round().to_f64() as i64;
    for j in 0..=n0 {
        let v = g(lo + h0 * T::from_i64(j).unwrap());
        if v.re.is_finite() && v.im.is_finite() {
            sum = sum + v;
            abs_sum = abs_sum + v.norm();
        }
        evals += 1;
    }
    let mut h = h0;
    let mut prev = sum * h;
    let mut est = T::infinity();
    for level in 1..=max_level {
        h = h / T::c(2.0);
        let count = n0 * (1i64 << level) / 2;
        for j in 0..count {
            let s = lo + h * T::from_i64(2 * j + 1).unwrap();
            let v = g(s);
            if v.re.is_finite() && v.im.is_finite() {
                sum = sum + v;
                abs_sum = abs_sum + v.norm();
            }
            evals += 1;
        }
        let cur = sum * h;
        let scale = cur.norm().max(T::min_positive_value());
        est = (cur - prev).norm() / scale;
        prev = cur;
        if level >= 3 && est <= tol {
            break;
        }
    }
    let value = prev;
    let cond = abs_sum * h / value.norm().max(T::min_positive_value());
    Ok(DeResult { value, est_rel_err: est, cond, evals })
}

/// `∫_0^∞ f(u) du` by the exp-sinh rule.
///
/// `fu(ln u)` must return `u·f(u)`, so that integrable endpoint singularities
/// never meet an underflowed `u`.
pub fn exp_sinh<T: Real, F: Fn(T) -> Cx<T>>(fu: F, tol: T, max_level: u32) -> Result<DeResult<T>> {
    let half_pi = T::FRAC_PI_2();
    let g = |s: T| {
        let lnu = half_pi * s.sinh();
        fu(lnu) * (half_pi * s.cosh())
    };
    de_driver(g, T::c(-10.0), T::c(6.0), tol, max_level)
}

/// `∫_a^b f(x) dx` by the tanh-sinh rule.
pub fn tanh_sinh<T: Real, F: Fn(T) -> Cx<T>>(f: F, a: T, b: T, tol: T, max_level: u32) -> Result<DeResult<T>> {
    let half_pi = T::FRAC_PI_2();
    let c = (a + b) / T::c(2.0);
    let r = (b - a) / T::c(2.0);
    let g = |s: T| {
        let v = half_pi * s.sinh();
        let ch = v.cosh();
        let w = r * half_pi * s.cosh() / (ch * ch);
        if w == T::zero() {
            return Cx::zero();
        }
        let x = c + r * v.tanh();
        if x <= a || x >= b {
            return Cx::zero();
        }
        f(x) * w
    };
    de_driver(g, T::c(-4.5), T::c(4.5), tol, max_level)
}

/// `∫_ℝ f(t) dt` by the sinh-sinh rule.
pub fn sinh_sinh<T: Real, F: Fn(T) -> Cx<T>>(f: F, tol: T, max_level: u32) -> Result<DeResult<T>> {
    let half_pi = T::FRAC_PI_2();
    let g = |s: T| {
        let v = half_pi * s.sinh();
        f(v.sinh()) * (half_pi * s.cosh() * v.cosh())
    };
    de_driver(g, T::c(-6.0), T::c(6.0), tol, max_level)
}

/// Fixed-order Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre_panel<T: Real, F: FnMut(T) -> Cx<T>>(rule: &Rule<T>, a: T, b: T, mut f: F) -> Cx<T> {
    let c = (a + b) / T::c(2.0);
    let r = (b - a) / T::c(2.0);
    let mut acc = Cx::zero();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc = acc + f(c + r * *x) * *w;
    }
    acc * r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::cr;

    #[test]
    fn legendre_exact_polys() {
        let r = gauss_legendre_f64(64);
        let s: f64 = r.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let x4: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(4)).sum();
        assert!((x4 - 0.4).abs() < 1e-14);
    }

    #[test]
    fn laguerre_moments() {
        // E[T] = alpha+1, E[T^2] = (alpha+1)(alpha+2)
        for &alpha in &[-0.5, 0.0, 4.0, 30.5] {
            let r = gauss_laguerre_f64(96, alpha).unwrap();
            let m1: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x).sum();
            let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
            assert!((m1 / (alpha + 1.0) - 1.0).abs() < 1e-12, "alpha={alpha}");
            assert!((m2 / ((alpha + 1.0) * (alpha + 2.0)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lru_evicts() {
        let t = QuadTables::<f64>::new();
        for k in 0..70 {
            t.laguerre(8, k as f64).unwrap();
        }
        assert_eq!(t.laguerre_cached(), LAGUERRE_CACHE_CAP);
    }

    #[test]
    fn exp_sinh_gamma() {
        // ∫ u^{-1/2} e^{-u} du = √π
        let r = exp_sinh(|l: f64| cr((0.5 * l - l.exp()).exp()), 1e-13, 9).unwrap();
        assert!((r.value.re - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_sqrt() {
        let r = tanh_sinh(|x: f64| cr(x.sqrt()), 0.0, 1.0, 1e-13, 9).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn sinh_sinh_lorentz() {
        let r = sinh_sinh(|t: f64| cr(1.0 / (1.0 + t * t)), 1e-13, 9).unwrap();
        assert!((r.value.re - std::f64::consts::PI).abs() < 1e-12);
    }
}
