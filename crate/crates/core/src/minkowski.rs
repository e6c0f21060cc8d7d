//! Minkowski arithmetic in 1+1 dimensions.
//!
//! Points carry the time component first. The indefinite product is
//! `a·b = a₀b₀ − a₁b₁`; on complexified points it is extended bilinearly,
//! so `z·z` is the holomorphic square used by every quadric in the crate.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for causal classification and region boundaries.
pub const TAU_CLASS: f64 = 1e-9;

/// A real point of two-dimensional Minkowski space, `(t, x) = (x₀, x₁)`.
#[derive(Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct RealPoint2 {
    pub t: f64,
    pub x: f64,
}

impl RealPoint2 {
    pub const ORIGIN: RealPoint2 = RealPoint2 { t: 0.0, x: 0.0 };

    #[inline]
    pub const fn new(t: f64, x: f64) -> Self {
        Self { t, x }
    }

    /// Checked constructor used at API boundaries.
    pub fn try_new(t: f64, x: f64) -> Result<Self> {
        let p = Self { t, x };
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::NonFinite("RealPoint2"))
        }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite()
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> f64 {
        self.t * other.t - self.x * other.x
    }

    #[inline]
    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm of the coordinate vector.
    #[inline]
    pub fn norm(&self) -> f64 {
        self.t.hypot(self.x)
    }

    #[inline]
    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.t * s, self.x * s)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }

    pub fn classify(&self) -> CausalClass {
        classify(*self)
    }

    /// Light-cone coordinates `(t + x, t − x)`.
    #[inline]
    pub fn light_cone(&self) -> (f64, f64) {
        (self.t + self.x, self.t - self.x)
    }

    #[inline]
    pub fn from_light_cone(u: f64, v: f64) -> Self {
        Self::new(0.5 * (u + v), 0.5 * (u - v))
    }

    pub fn complexify(&self) -> ComplexPoint2 {
        ComplexPoint2::from_parts(*self, RealPoint2::ORIGIN)
    }
}

impl fmt::Debug for RealPoint2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.t, self.x)
    }
}

impl fmt::Display for RealPoint2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.t, self.x)
    }
}

impl TryFrom<[f64; 2]> for RealPoint2 {
    type Error = Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        Self::try_new(v[0], v[1])
    }
}

impl From<RealPoint2> for [f64; 2] {
    fn from(p: RealPoint2) -> Self {
        [p.t, p.x]
    }
}

impl Add for RealPoint2 {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.t + rhs.t, self.x + rhs.x)
    }
}

impl Sub for RealPoint2 {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.t - rhs.t, self.x - rhs.x)
    }
}

impl Neg for RealPoint2 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.t, -self.x)
    }
}

impl Mul<RealPoint2> for f64 {
    type Output = RealPoint2;
    #[inline]
    fn mul(self, rhs: RealPoint2) -> RealPoint2 {
        rhs.scale(self)
    }
}

/// A point of complexified Minkowski space `z = re + i·im`.
#[derive(Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexPoint2 {
    pub t: Complex64,
    pub x: Complex64,
}

impl ComplexPoint2 {
    #[inline]
    pub const fn new(t: Complex64, x: Complex64) -> Self {
        Self { t, x }
    }

    #[inline]
    pub fn from_parts(re: RealPoint2, im: RealPoint2) -> Self {
        Self { t: Complex64::new(re.t, im.t), x: Complex64::new(re.x, im.x) }
    }

    pub fn try_from_parts(re: RealPoint2, im: RealPoint2) -> Result<Self> {
        if re.is_finite() && im.is_finite() {
            Ok(Self::from_parts(re, im))
        } else {
            Err(Error::NonFinite("ComplexPoint2"))
        }
    }

    #[inline]
    pub fn re(&self) -> RealPoint2 {
        RealPoint2::new(self.t.re, self.x.re)
    }

    #[inline]
    pub fn im(&self) -> RealPoint2 {
        RealPoint2::new(self.t.im, self.x.im)
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }

    /// Bilinear (not sesquilinear) Minkowski product.
    #[inline]
    pub fn dot(&self, other: &Self) -> Complex64 {
        self.t * other.t - self.x * other.x
    }

    #[inline]
    pub fn square(&self) -> Complex64 {
        self.dot(self)
    }

    /// Euclidean norm in `ℂ² ≅ ℝ⁴`.
    pub fn norm(&self) -> f64 {
        (self.t.norm_sqr() + self.x.norm_sqr()).sqrt()
    }

    #[inline]
    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.t * s, self.x * s)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.im().norm() <= tol
    }
}

impl fmt::Debug for ComplexPoint2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + i{:?}", self.re(), self.im())
    }
}

impl From<RealPoint2> for ComplexPoint2 {
    fn from(p: RealPoint2) -> Self {
        p.complexify()
    }
}

impl Add for ComplexPoint2 {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.t + rhs.t, self.x + rhs.x)
    }
}

impl Sub for ComplexPoint2 {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.t - rhs.t, self.x - rhs.x)
    }
}

impl Neg for ComplexPoint2 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.t, -self.x)
    }
}

/// A point of 1+3 dimensional Minkowski space.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct RealPoint4 {
    pub t: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl RealPoint4 {
    pub const fn new(t: f64, s1: f64, s2: f64, s3: f64) -> Self {
        Self { t, s1, s2, s3 }
    }

    pub fn try_new(t: f64, s1: f64, s2: f64, s3: f64) -> Result<Self> {
        if [t, s1, s2, s3].iter().all(|c| c.is_finite()) {
            Ok(Self::new(t, s1, s2, s3))
        } else {
            Err(Error::NonFinite("RealPoint4"))
        }
    }

    pub fn square(&self) -> f64 {
        self.t * self.t - self.s1 * self.s1 - self.s2 * self.s2 - self.s3 * self.s3
    }
}

/// Causal character of a real vector under the [`TAU_CLASS`] tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalClass {
    TimelikeForward,
    TimelikeBackward,
    SpacelikePt,
    LightlikeForward,
    LightlikeBackward,
    Zero,
}

impl CausalClass {
    pub fn is_timelike(self) -> bool {
        matches!(self, CausalClass::TimelikeForward | CausalClass::TimelikeBackward)
    }

    pub fn is_lightlike(self) -> bool {
        matches!(self, CausalClass::LightlikeForward | CausalClass::LightlikeBackward)
    }
}

#[inline]
pub fn mink_dot(a: RealPoint2, b: RealPoint2) -> f64 {
    a.dot(&b)
}

#[inline]
pub fn mink_square(a: RealPoint2) -> f64 {
    a.square()
}

#[inline]
pub fn mink_dot_c(a: ComplexPoint2, b: ComplexPoint2) -> Complex64 {
    a.dot(&b)
}

/// Sign tests on `y²` and `y₀`; `Zero` iff the Euclidean norm is within tolerance.
pub fn classify(y: RealPoint2) -> CausalClass {
    if y.norm() <= TAU_CLASS {
        return CausalClass::Zero;
    }
    let sq = y.square();
    if sq > TAU_CLASS {
        if y.t > 0.0 {
            CausalClass::TimelikeForward
        } else {
            CausalClass::TimelikeBackward
        }
    } else if sq < -TAU_CLASS {
        CausalClass::SpacelikePt
    } else if y.t > 0.0 {
        CausalClass::LightlikeForward
    } else {
        CausalClass::LightlikeBackward
    }
}

/// The forward timelike unit vector Minkowski-orthogonal to a spacelike `y`:
/// `ŷ = sgn(y₁)/√(−y²) · (y₁, y₀)`.
pub fn hat_dual(y: RealPoint2) -> Result<RealPoint2> {
    let sq = y.square();
    if !(sq < -TAU_CLASS) {
        return Err(Error::NotSpacelike { square: sq, tol: TAU_CLASS });
    }
    let k = y.x.signum() / (-sq).sqrt();
    Ok(RealPoint2::new(k * y.x, k * y.t))
}

/// `(t, s) ↦ (t, |s|)`: rotationally symmetric regions in 1+3 dimensions are
/// decided on this reduced point.
pub fn reduce_rotational(p: RealPoint4) -> RealPoint2 {
    let r = (p.s1 * p.s1 + p.s2 * p.s2 + p.s3 * p.s3).sqrt();
    RealPoint2::new(p.t, r)
}

/// Sign function with `sgn(0) = 0`.
#[inline]
pub(crate) fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dot_examples() {
        let e = RealPoint2::new(1.0, 0.0);
        assert_eq!(mink_dot(e, e), 1.0);
        let l = RealPoint2::new(1.0, 1.0);
        assert_eq!(mink_square(l), 0.0);
        assert_eq!(mink_dot(RealPoint2::new(3.0, 1.0), RealPoint2::new(2.0, 2.0)), 4.0);
    }

    #[test]
    fn complex_square_is_bilinear() {
        // (i, 0)² = −1, not |i|² = 1
        let z = ComplexPoint2::from_parts(RealPoint2::ORIGIN, RealPoint2::new(1.0, 0.0));
        assert_eq!(z.square(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn hat_dual_examples() {
        let h = hat_dual(RealPoint2::new(0.0, 1.0)).unwrap();
        assert_eq!(h, RealPoint2::new(1.0, 0.0));
        let h = hat_dual(RealPoint2::new(0.0, -2.0)).unwrap();
        assert_eq!(h, RealPoint2::new(1.0, 0.0));
        let h = hat_dual(RealPoint2::new(1.0, 2.0)).unwrap();
        assert_abs_diff_eq!(h.t, 2.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(h.x, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(h.square(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn hat_dual_rejects_non_spacelike() {
        assert!(matches!(hat_dual(RealPoint2::new(1.0, 1.0)), Err(Error::NotSpacelike { .. })));
        assert!(hat_dual(RealPoint2::new(2.0, 1.0)).is_err());
        assert!(hat_dual(RealPoint2::ORIGIN).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(RealPoint2::new(2.0, 1.0)), CausalClass::TimelikeForward);
        assert_eq!(classify(RealPoint2::new(0.0, 1.0)), CausalClass::SpacelikePt);
        assert_eq!(classify(RealPoint2::new(-1.0, 1.0)), CausalClass::LightlikeBackward);
        assert_eq!(classify(RealPoint2::new(1.0, -1.0)), CausalClass::LightlikeForward);
        assert_eq!(classify(RealPoint2::new(-3.0, 0.5)), CausalClass::TimelikeBackward);
        assert_eq!(classify(RealPoint2::new(1e-10, 0.0)), CausalClass::Zero);
    }

    #[test]
    fn rotational_reduction() {
        assert_eq!(reduce_rotational(RealPoint4::new(1.0, 0.0, 0.0, 0.0)), RealPoint2::new(1.0, 0.0));
        assert_eq!(reduce_rotational(RealPoint4::new(2.0, 3.0, 0.0, 4.0)), RealPoint2::new(2.0, 5.0));
        assert_eq!(reduce_rotational(RealPoint4::new(0.0, 1.0, 2.0, 2.0)), RealPoint2::new(0.0, 3.0));
    }

    #[test]
    fn construction_rejects_non_finite() {
        assert!(RealPoint2::try_new(f64::NAN, 0.0).is_err());
        assert!(RealPoint4::try_new(0.0, f64::INFINITY, 0.0, 0.0).is_err());
        assert!(serde_json::from_str::<RealPoint2>("[1.0, 2.0]").is_ok());
    }
}
