//! Closed-form comparison objects for a geodesic ball of radius `r` whose
//! radial sectional curvatures lie in `[a, b]`.
//!
//! Everything here is a pure function of its arguments. Mean curvature uses
//! the unnormalized trace convention `H = Tr α`, so a round sphere of radius
//! `R` has `|H| = 2/R`.

mod jacobi;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use jacobi::{jacobi_ratio, jacobi_ratio_with, JacobiOptions};

/// Below this value of `|b|·t²` the comparison function is evaluated from its
/// Taylor expansion around `b = 0`.
const SERIES_CUTOFF: f64 = 1e-6;

/// Bounds `a ≤ K_rad ≤ b` on the radial sectional curvature of the ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureInterval {
    pub a: f64,
    pub b: f64,
}

impl CurvatureInterval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::domain("curvature bounds must be finite"));
        }
        if a > b {
            return Err(Error::domain(format!(
                "a > b ({a} > {b}): lower curvature bound exceeds upper bound"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn flat() -> Self {
        Self { a: 0.0, b: 0.0 }
    }
}

/// Parameters of every closed-form bound: ambient curvature interval, ball
/// radius `r`, submanifold dimension `m`, Euclidean factor dimension `ell`
/// (zero for the ball case) and `sup |H|`.
///
/// The injectivity radius of the ambient space at the ball center is not
/// modeled. Callers must ensure `r` does not exceed it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonProfile {
    pub curvature: CurvatureInterval,
    pub r: f64,
    pub m: u32,
    pub ell: u32,
    pub sup_h: f64,
}

impl ComparisonProfile {
    pub fn new(curvature: CurvatureInterval, r: f64, m: u32, ell: u32, sup_h: f64) -> Result<Self> {
        let profile = Self {
            curvature,
            r,
            m,
            ell,
            sup_h,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Ball case (`ell = 0`).
    pub fn ball(a: f64, b: f64, r: f64, m: u32, sup_h: f64) -> Result<Self> {
        Self::new(CurvatureInterval::new(a, b)?, r, m, 0, sup_h)
    }

    pub fn validate(&self) -> Result<()> {
        let CurvatureInterval { a, b } = self.curvature;
        CurvatureInterval::new(a, b)?;
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::domain(format!("r ≤ 0 (r = {}): ball radius must be positive", self.r)));
        }
        if b > 0.0 && self.r >= PI / (2.0 * b.sqrt()) {
            return Err(Error::domain(format!(
                "r ≥ π/(2√b) (r = {}, π/(2√b) = {}): ball radius must stay below π/(2√b)",
                self.r,
                PI / (2.0 * b.sqrt())
            )));
        }
        if self.m < 1 {
            return Err(Error::domain("m < 1: submanifold dimension must be at least 1"));
        }
        if self.m < self.ell + 1 {
            return Err(Error::domain(format!(
                "m − ℓ < 1 (m = {}, ℓ = {}): need m ≥ ℓ + 1",
                self.m, self.ell
            )));
        }
        if !(self.sup_h >= 0.0) || !self.sup_h.is_finite() {
            return Err(Error::domain(format!(
                "sup|H| < 0 (sup|H| = {}): mean-curvature supremum must be a nonnegative number",
                self.sup_h
            )));
        }
        Ok(())
    }

    /// `(m − ℓ)·C_b(r)`.
    pub fn threshold(&self) -> Result<f64> {
        threshold(self.m, self.ell, self.curvature.b, self.r)
    }

    /// Whether `sup|H|` lies strictly below the threshold.
    pub fn is_admissible(&self) -> Result<bool> {
        Ok(self.sup_h < self.threshold()?)
    }
}

/// Bounds on `Hess ρ(X, X)/‖X‖²` for `X` orthogonal to the radial direction,
/// together with the radial component, which vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianEnvelope {
    /// `C_b(t)`
    pub lower: f64,
    /// `C_a(t)`
    pub upper: f64,
    pub radial: f64,
}

impl HessianEnvelope {
    pub fn contains(&self, value: f64, tol: f64) -> bool {
        value >= self.lower - tol && value <= self.upper + tol
    }
}

/// An exterior fundamental-tone lower bound. When `admissible` is false the
/// mean-curvature hypothesis fails and `value` carries no guarantee (it is
/// non-positive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneBound {
    pub value: f64,
    pub admissible: bool,
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t ≤ 0 (t = {t}): comparison function needs t > 0")));
    }
    Ok(())
}

/// Comparison function `C_b(t)`: `√b cot(√b t)`, `1/t` or `√−b coth(√−b t)`
/// according to the sign of `b`.
///
/// Near `b = 0` the three branches are joined through the Taylor expansion
/// `1/t − b t/3 − b² t³/45 − 2 b³ t⁵/945`, so the result is continuous in `b`.
pub fn eval_c(b: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    if !b.is_finite() {
        return Err(Error::domain("curvature bound must be finite"));
    }
    if b > 0.0 && t >= PI / b.sqrt() {
        return Err(Error::domain(format!(
            "t ≥ π/√b (t = {t}, π/√b = {}): past the first conjugate point",
            PI / b.sqrt()
        )));
    }
    let x = b * t * t;
    if x.abs() < SERIES_CUTOFF {
        let t3 = t * t * t;
        return Ok(1.0 / t - b * t / 3.0 - b * b * t3 / 45.0 - 2.0 * b * b * b * t3 * t * t / 945.0);
    }
    if b > 0.0 {
        let s = b.sqrt();
        let (sin, cos) = (s * t).sin_cos();
        Ok(s * cos / sin)
    } else {
        let s = (-b).sqrt();
        Ok(s / (s * t).tanh())
    }
}

fn check_phi_args(a: f64, r: f64, t: f64) -> Result<()> {
    if !a.is_finite() {
        return Err(Error::domain("curvature bound must be finite"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("r ≤ 0 (r = {r}): ball radius must be positive")));
    }
    if a > 0.0 && r >= PI / (2.0 * a.sqrt()) {
        return Err(Error::domain(format!(
            "r ≥ π/(2√a) (r = {r}, π/(2√a) = {}): radial test function needs r < π/(2√a)",
            PI / (2.0 * a.sqrt())
        )));
    }
    if !(0.0..=r).contains(&t) {
        return Err(Error::domain(format!("t ∉ [0, r] (t = {t}, r = {r})")));
    }
    Ok(())
}

/// Radial test function `φ_a(t)` on `[0, r]`: `cos(√a t) − cos(√a r)`,
/// `r² − t²` or `cosh(√−a r) − cosh(√−a t)`.
///
/// Differences of cosines are evaluated in product form, so `φ_a(r)` is
/// exactly zero and there is no cancellation near `t = r`.
pub fn eval_phi(a: f64, r: f64, t: f64) -> Result<f64> {
    check_phi_args(a, r, t)?;
    let v = if a > 0.0 {
        let s = a.sqrt();
        2.0 * (0.5 * s * (r + t)).sin() * (0.5 * s * (r - t)).sin()
    } else if a < 0.0 {
        let s = (-a).sqrt();
        2.0 * (0.5 * s * (r + t)).sinh() * (0.5 * s * (r - t)).sinh()
    } else {
        (r - t) * (r + t)
    };
    Ok(v)
}

/// `φ_a′(t)`, strictly negative on `(0, r]`.
pub fn eval_phi_prime(a: f64, r: f64, t: f64) -> Result<f64> {
    check_phi_args(a, r, t)?;
    let v = if a > 0.0 {
        let s = a.sqrt();
        -s * (s * t).sin()
    } else if a < 0.0 {
        let s = (-a).sqrt();
        -s * (s * t).sinh()
    } else {
        -2.0 * t
    };
    Ok(v)
}

/// Mean-curvature threshold `(m − ℓ)·C_b(r)`. With `ell = 0` this is the
/// ball case `m·C_b(r)`; for surfaces in flat space it reduces to `2/r`.
pub fn threshold(m: u32, ell: u32, b: f64, r: f64) -> Result<f64> {
    if m < ell + 1 {
        return Err(Error::domain(format!("m − ℓ < 1 (m = {m}, ℓ = {ell}): need m ≥ ℓ + 1")));
    }
    Ok(f64::from(m - ell) * eval_c(b, r)?)
}

/// Lower bound `−φ_a′(r_i)/φ_a(r_i)·[(m − ℓ)C_b(r) − sup|H|]` for the
/// fundamental tone of the part of the submanifold outside the closed ball of
/// radius `r_i`.
pub fn exterior_tone_bound(profile: &ComparisonProfile, r_i: f64) -> Result<ToneBound> {
    profile.validate()?;
    if !(r_i > 0.0 && r_i < profile.r) {
        return Err(Error::domain(format!(
            "r_i ∉ (0, r) (r_i = {r_i}, r = {}): exhaustion radius must lie inside the ball",
            profile.r
        )));
    }
    let a = profile.curvature.a;
    let phi = eval_phi(a, profile.r, r_i)?;
    let dphi = eval_phi_prime(a, profile.r, r_i)?;
    let thr = profile.threshold()?;
    let gap = thr - profile.sup_h;
    Ok(ToneBound {
        value: -(dphi / phi) * gap,
        admissible: gap > 0.0,
    })
}

/// Envelope `C_b(t) ≤ Hess ρ(X,X)/‖X‖² ≤ C_a(t)` for unit `X ⊥ grad ρ`.
pub fn hessian_envelope(interval: CurvatureInterval, t: f64) -> Result<HessianEnvelope> {
    let interval = CurvatureInterval::new(interval.a, interval.b)?;
    Ok(HessianEnvelope {
        lower: eval_c(interval.b, t)?,
        upper: eval_c(interval.a, t)?,
        radial: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn c_branches() {
        assert_eq!(eval_c(0.0, 2.0).unwrap(), 0.5);
        assert!(close(eval_c(1.0, PI / 4.0).unwrap(), 1.0, 1e-15));
        // coth(0.5) = (e + 1)/(e − 1) evaluated with 50 digits
        assert!(close(eval_c(-1.0, 0.5).unwrap(), 2.163_953_413_738_653, 1e-14));
    }

    #[test]
    fn c_domain_errors() {
        assert!(matches!(eval_c(0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(eval_c(0.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(eval_c(1.0, PI), Err(Error::Domain(_))));
        assert!(eval_c(1.0, PI - 1e-9).is_ok());
        let msg = eval_c(4.0, 2.0).unwrap_err().to_string();
        assert!(msg.contains("π/√b"), "{msg}");
    }

    #[test]
    fn c_series_joins_branches() {
        for &t in &[0.1, 0.5, 1.0, 3.0, 10.0] {
            for &b in &[1e-8, -1e-8] {
                assert!(close(eval_c(b, t).unwrap(), 1.0 / t, 1e-7));
            }
            // Both sides of the series cutoff agree.
            let edge = SERIES_CUTOFF / (t * t);
            for &sgn in &[1.0, -1.0] {
                let inside = eval_c(sgn * edge * (1.0 - 1e-9), t).unwrap();
                let outside = eval_c(sgn * edge * (1.0 + 1e-9), t).unwrap();
                assert!(close(inside, outside, 1e-12 / t), "t={t} {inside} {outside}");
            }
        }
    }

    #[test]
    fn phi_values() {
        assert_eq!(eval_phi(0.0, 1.0, 0.5).unwrap(), 0.75);
        assert_eq!(eval_phi(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(eval_phi(1.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(eval_phi(-2.0, 1.3, 1.3).unwrap(), 0.0);
        // cos(0.5) − cos(1)
        assert!(close(eval_phi(1.0, 1.0, 0.5).unwrap(), 0.337_280_256_022_233, 1e-15));
        assert!(matches!(eval_phi(0.0, 1.0, 1.5), Err(Error::Domain(_))));
        assert!(matches!(eval_phi(0.0, 1.0, -0.1), Err(Error::Domain(_))));
        assert!(matches!(eval_phi(4.0, 1.0, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_prime_values() {
        assert_eq!(eval_phi_prime(0.0, 1.0, 0.5).unwrap(), -1.0);
        assert!(close(eval_phi_prime(-1.0, 1.0, 0.5).unwrap(), -0.521_095_305_493_747_4, 1e-15));
        assert!(eval_phi_prime(1.0, 1.0, 1e-300).unwrap().abs() < 1e-299);
        let h = 1e-6;
        let fd = (eval_phi(-1.0, 1.0, 0.5 + h).unwrap() - eval_phi(-1.0, 1.0, 0.5 - h).unwrap()) / (2.0 * h);
        assert!(close(fd, eval_phi_prime(-1.0, 1.0, 0.5).unwrap(), 1e-8));
    }

    #[test]
    fn thresholds() {
        assert_eq!(threshold(2, 0, 0.0, 1.0).unwrap(), 2.0);
        assert_eq!(threshold(3, 1, 0.0, 2.0).unwrap(), 1.0);
        assert_eq!(threshold(2, 0, 0.0, 0.5).unwrap(), 4.0);
        assert!(matches!(threshold(1, 1, 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tone_bound_examples() {
        let p = ComparisonProfile::ball(0.0, 0.0, 1.0, 2, 0.0).unwrap();
        let b9 = exterior_tone_bound(&p, 0.9).unwrap();
        assert!(b9.admissible);
        assert!(close(b9.value, 1.8 / 0.19 * 2.0, 1e-12));
        let b99 = exterior_tone_bound(&p, 0.99).unwrap();
        assert!(close(b99.value, 1.98 / 0.0199 * 2.0, 1e-9));
        assert!(b99.value > b9.value);

        let edge = ComparisonProfile::ball(0.0, 0.0, 1.0, 2, 2.0).unwrap();
        let b = exterior_tone_bound(&edge, 0.5).unwrap();
        assert_eq!(b.value, 0.0);
        assert!(!b.admissible);

        let over = ComparisonProfile::ball(0.0, 0.0, 1.0, 2, 4.0).unwrap();
        let b = exterior_tone_bound(&over, 0.5).unwrap();
        assert!(b.value < 0.0 && !b.admissible);

        assert!(exterior_tone_bound(&p, 1.0).is_err());
        assert!(exterior_tone_bound(&p, 0.0).is_err());
    }

    #[test]
    fn profile_validation_names_hypothesis() {
        let e = ComparisonProfile::ball(0.0, 1.0, 2.0, 2, 0.0).unwrap_err().to_string();
        assert!(e.contains("r ≥ π/(2√b)"), "{e}");
        let e = ComparisonProfile::ball(1.0, 0.0, 1.0, 2, 0.0).unwrap_err().to_string();
        assert!(e.contains("a > b"), "{e}");
        let e = ComparisonProfile::new(CurvatureInterval::flat(), 1.0, 2, 2, 0.0).unwrap_err().to_string();
        assert!(e.contains("m − ℓ"), "{e}");
    }

    #[test]
    fn envelopes() {
        let e = hessian_envelope(CurvatureInterval::flat(), 1.0).unwrap();
        assert_eq!((e.upper, e.lower, e.radial), (1.0, 1.0, 0.0));
        let e = hessian_envelope(CurvatureInterval::new(-1.0, 0.0).unwrap(), 1.0).unwrap();
        assert!(close(e.upper, 1.313_035_285_499_331_3, 1e-14));
        assert_eq!(e.lower, 1.0);
        let e = hessian_envelope(CurvatureInterval::new(-1.0, 1.0).unwrap(), 0.5).unwrap();
        assert!(close(e.upper, 2.163_953_413_738_653, 1e-14));
        assert!(close(e.lower, 1.830_487_721_712_452, 1e-14));
        assert!(e.lower <= e.upper);
        assert!(e.contains(2.0, 0.0));
    }
}
