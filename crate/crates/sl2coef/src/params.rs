//! Representation parameters `χ = (ℓ, ε)`, series classification and the
//! closed-form uniform-boundedness norms.

use crate::error::{domain, Error, Result};
use crate::real::{cr, Cx, Real};

/// Tolerance used when testing `Re ℓ = -1/2` and index lattice membership.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// The character `χ = (ℓ, ε)`. `eps` is never reduced mod 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReprParams<T> {
    pub ell: Cx<T>,
    pub eps: T,
}

impl<T: Real> ReprParams<T> {
    pub fn new(ell: Cx<T>, eps: T) -> Self {
        Self { ell, eps }
    }

    /// Principal series with `ℓ = -1/2 + iλ`.
    pub fn principal(lambda: T, eps: T) -> Self {
        Self { ell: Cx::new(T::c(-0.5), lambda), eps }
    }

    /// Real `ℓ`.
    pub fn real(ell: T, eps: T) -> Self {
        Self { ell: cr(ell), eps }
    }

    /// `λ = Im ℓ`.
    pub fn lambda(&self) -> T {
        self.ell.im
    }

    pub fn is_real_ell(&self) -> bool {
        self.ell.im == T::zero()
    }

    pub fn is_principal(&self) -> bool {
        (self.ell.re + T::c(0.5)).abs() <= T::c(CLASSIFY_TOL)
    }

    /// `ℓ ∈ (-1,0)` real and `|ε| < 1/2 - |1/2 + ℓ|`.
    pub fn is_complementary(&self) -> bool {
        let l = self.ell.re;
        self.is_real_ell()
            && l > -T::one()
            && l < T::zero()
            && self.eps.abs() < T::c(0.5) - (T::c(0.5) + l).abs()
    }

    /// The same character with `ε` replaced by a representative in `[-1/2, 1/2)`,
    /// together with the integer shift `k` such that `ε = ε' + k`.
    pub fn reduce_eps(&self) -> (Self, i64) {
        let k = (self.eps + T::c(0.5)).floor();
        (Self { ell: self.ell, eps: self.eps - k }, k.to_f64() as i64)
    }
}

/// Series tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    Principal,
    DiscretePlus,
    DiscreteMinus,
    Complementary,
    UniformlyBoundedOnly,
    Invalid,
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub kind: SeriesKind,
    /// Set at `ℓ = -1/2`, `ε ∈ 1/2 + ℤ`, where the principal series splits
    /// into two discrete-series pieces.
    pub reducible: bool,
}

fn on_lattice<T: Real>(v: T, base: T) -> Option<i64> {
    let d = v - base;
    let r = d.round();
    if (d - r).abs() <= T::c(CLASSIFY_TOL) * T::one().max(v.abs()) {
        Some(r.to_f64() as i64)
    } else {
        None
    }
}

/// Classifies `p`. `indices`, when given, are the index values `m, n, …`
/// the caller intends to use; they decide between the discrete series.
pub fn classify<T: Real>(p: &ReprParams<T>, indices: Option<&[T]>) -> Classification {
    let half = T::c(0.5);
    let finite = p.ell.re.is_finite() && p.ell.im.is_finite() && p.eps.is_finite();
    if !finite {
        return Classification { kind: SeriesKind::Invalid, reducible: false };
    }
    if p.is_principal() {
        let reducible = p.is_real_ell() && on_lattice(p.eps, half).is_some();
        return Classification { kind: SeriesKind::Principal, reducible };
    }
    let l = p.ell.re;
    if p.is_real_ell() && l < T::zero() {
        if let Some(ix) = indices.filter(|ix| !ix.is_empty()) {
            if ix.iter().all(|&v| on_lattice(v, -l).is_some_and(|k| k >= 0)) {
                return Classification { kind: SeriesKind::DiscretePlus, reducible: false };
            }
            if ix.iter().all(|&v| on_lattice(v, l).is_some_and(|k| k <= 0)) {
                return Classification { kind: SeriesKind::DiscreteMinus, reducible: false };
            }
        }
    }
    if p.is_complementary() {
        return Classification { kind: SeriesKind::Complementary, reducible: false };
    }
    if l > -T::one() && l < T::zero() {
        return Classification { kind: SeriesKind::UniformlyBoundedOnly, reducible: false };
    }
    Classification { kind: SeriesKind::Invalid, reducible: false }
}

fn check_ub_ell<T: Real>(ell: T) -> Result<()> {
    if ell > -T::one() && ell < T::zero() {
        Ok(())
    } else {
        Err(domain(format!("uniform-boundedness norms need -1 < ell < 0, got {ell}")))
    }
}

/// `‖T^{1,1}‖²` in closed form.
pub fn ub_norm_11_squared<T: Real>(ell: T, eps: T) -> Result<T> {
    check_ub_ell(ell)?;
    let pi = T::PI();
    let (sl, cl) = (pi * ell).sin_cos();
    let (se, ce) = (pi * eps).sin_cos();
    let cl2 = cl * cl;
    let rad = (T::one() - cl2 * ce * ce).max(T::zero()).sqrt();
    Ok(T::one() + T::c(2.0) / (sl * sl) * (cl2 * se * se + (cl * se).abs() * rad))
}

/// `1 + 2cos²πℓ + 2|cos πℓ|·√(1+cos²πℓ)`, the value of [`ub_norm_11_squared`]
/// when `|sin πε| = |sin πℓ|`.
pub fn ub_norm_11_squared_special<T: Real>(ell: T) -> Result<T> {
    check_ub_ell(ell)?;
    let cl = (T::PI() * ell).cos();
    let cl2 = cl * cl;
    Ok(T::one() + T::c(2.0) * cl2 + T::c(2.0) * cl.abs() * (T::one() + cl2).sqrt())
}

/// Minimal uniform norm over the weights, `(|sin πε| + √(sin²πε − sin²πℓ))/|sin πℓ|`.
pub fn ub_norm_min<T: Real>(ell: T, eps: T) -> Result<T> {
    check_ub_ell(ell)?;
    let pi = T::PI();
    let sl = (pi * ell).sin().abs();
    let se = (pi * eps).sin().abs();
    let rad = se * se - sl * sl;
    // rounding at the boundary |sin πε| = |sin πℓ|
    let slack = T::c(64.0) * T::epsilon();
    if rad < -slack {
        return Err(domain("ub_norm_min: eps lies in the complementary range, the norm is 1"));
    }
    Ok((se + rad.max(T::zero()).sqrt()) / sl)
}

/// Weight ratio `b/a = |sin π(ℓ-ε) / sin π(ℓ+ε)|` attaining [`ub_norm_min`].
pub fn optimal_weight_ratio<T: Real>(ell: Cx<T>, eps: T) -> Result<T> {
    let pi = T::PI();
    let num = ((ell - cr(eps)) * pi).sin();
    let den = ((ell + cr(eps)) * pi).sin();
    if den.norm() <= T::c(1e-14) {
        return Err(Error::Pole { func: "optimal_weight_ratio", at: format!("ell + eps = {}", ell + cr(eps)) });
    }
    Ok(num.norm() / den.norm())
}
