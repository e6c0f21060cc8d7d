//! Membership in envelopes of holomorphy of `T⁺ ∪ T⁻ ∪ G̃` for real
//! coincidence regions `G`.
//!
//! Closed forms cover the mass cone, the hyperboloid shell and the
//! complement of the shell cap; [`jld_excluded`] searches admissible
//! hyperboloids and planes for any region. The remaining predicates decide
//! points on specific curves and quadrics known to lie in an envelope.

mod dhat;
mod jld;

pub use dhat::{
    dhat, double_cone_theorem_hull, tangent_point, two_double_cone_extension, DhatPiece, DhatRegion, ExtensionKind,
    ExtensionRegion,
};
pub use jld::{jld_excluded, jld_search, JldWitness, SearchBudget, SearchOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{classify, hat_dual, sgn, CausalClass, ComplexPoint2, RealPoint2, TAU_CLASS};
use crate::regions::{boundary_distance, contains, Region};
use crate::sampling::linspace;

/// Boundary band for closed-form predicates.
pub const TOL_ENV: f64 = 1e-9;
/// Boundary band for search-based predicates.
pub const TOL_SEARCH: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum EnvelopeVerdict {
    Inside,
    Excluded,
    Boundary { margin: f64 },
}

impl EnvelopeVerdict {
    /// Positive margins are inside; `|margin| ≤ tol` is reported as a boundary hit.
    pub fn from_margin(margin: f64, tol: f64) -> Self {
        if margin.abs() <= tol {
            EnvelopeVerdict::Boundary { margin }
        } else if margin > 0.0 {
            EnvelopeVerdict::Inside
        } else {
            EnvelopeVerdict::Excluded
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EnvelopeVerdict::Inside => "inside",
            EnvelopeVerdict::Excluded => "excluded",
            EnvelopeVerdict::Boundary { .. } => "boundary",
        }
    }

    pub fn is_inside(&self) -> bool {
        matches!(self, EnvelopeVerdict::Inside)
    }

    pub fn is_excluded(&self) -> bool {
        matches!(self, EnvelopeVerdict::Excluded)
    }
}

/// `x₀ − x₁·sgn(y₀)·sgn(y₁)`, the deciding quantity for lightlike imaginary parts.
fn lightlike_margin(x: RealPoint2, y: RealPoint2) -> f64 {
    x.t - x.x * sgn(y.t) * sgn(y.x)
}

/// Signed margin for the envelope of `T⁺ ∪ T⁻ ∪ Ṽ_μ⁺`; `+∞` on the tubes.
pub fn mu_cone_margin(z: ComplexPoint2, mu: f64) -> f64 {
    let (x, y) = (z.re(), z.im());
    match classify(y) {
        CausalClass::TimelikeForward | CausalClass::TimelikeBackward => f64::INFINITY,
        CausalClass::Zero => x.t - (x.x * x.x + mu * mu).sqrt(),
        CausalClass::SpacelikePt => x.dot(&hat_dual(y).expect("spacelike")) - mu,
        CausalClass::LightlikeForward | CausalClass::LightlikeBackward => lightlike_margin(x, y),
    }
}

pub fn envelope_mu_cone(z: ComplexPoint2, mu: f64) -> Result<EnvelopeVerdict> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::PreconditionFailed(format!("mu must be >= 0, got {mu}")));
    }
    Ok(EnvelopeVerdict::from_margin(mu_cone_margin(z, mu), TOL_ENV))
}

/// `(F⁻, F⁺)` bounding `x₀` for a spacelike imaginary part, or `None` when
/// `y² ≤ −((m₂ − m₁)/2)²` and the band is empty.
pub fn g1_bounds(x1: f64, y: RealPoint2, m1: f64, m2: f64) -> Option<(f64, f64)> {
    let yh = hat_dual(y).ok()?;
    let h = 0.5 * (m2 - m1);
    let c = 0.5 * (m1 + m2);
    let q = h * h + y.square();
    if q <= 0.0 {
        return None;
    }
    Some(g1_bounds_raw(x1, yh, c, q.sqrt()))
}

fn g1_bounds_raw(x1: f64, yh: RealPoint2, c: f64, r: f64) -> (f64, f64) {
    let lo = -yh.t * r + (c * c + (x1 + yh.x * r).powi(2)).sqrt();
    let hi = yh.t * r + (c * c + (x1 - yh.x * r).powi(2)).sqrt();
    (lo, hi)
}

/// Signed margin for the envelope of `T⁺ ∪ T⁻ ∪ G̃₁`.
pub fn g1_margin(z: ComplexPoint2, m1: f64, m2: f64) -> f64 {
    let (x, y) = (z.re(), z.im());
    match classify(y) {
        CausalClass::TimelikeForward | CausalClass::TimelikeBackward => f64::INFINITY,
        CausalClass::Zero => {
            let lo = (x.x * x.x + m1 * m1).sqrt();
            let hi = (x.x * x.x + m2 * m2).sqrt();
            (x.t - lo).min(hi - x.t)
        }
        CausalClass::SpacelikePt => {
            let yh = hat_dual(y).expect("spacelike");
            let h = 0.5 * (m2 - m1);
            // past q = 0 the band is empty; the extra term keeps the margin continuous and negative
            let q = h * h + y.square();
            let (lo, hi) = g1_bounds_raw(x.x, yh, 0.5 * (m1 + m2), q.max(0.0).sqrt());
            (x.t - lo).min(hi - x.t) - (-q).max(0.0).sqrt()
        }
        CausalClass::LightlikeForward | CausalClass::LightlikeBackward => lightlike_margin(x, y),
    }
}

pub fn envelope_g1(z: ComplexPoint2, m1: f64, m2: f64) -> Result<EnvelopeVerdict> {
    if !(m1.is_finite() && m2.is_finite() && m1 > 0.0 && m1 < m2) {
        return Err(Error::PreconditionFailed(format!("need 0 < m1 < m2, got ({m1}, {m2})")));
    }
    Ok(EnvelopeVerdict::from_margin(g1_margin(z, m1, m2), TOL_ENV))
}

/// Distance of `z²` from the real segment `[0, m²]`.
pub fn shell_complement_margin(z: ComplexPoint2, m: f64) -> f64 {
    let w = z.square();
    let re = w.re.clamp(0.0, m * m);
    (w.re - re).hypot(w.im)
}

/// Envelope of the complement of `{z : z² ∈ [0, m²]}`. Points of the
/// segment itself are excluded except within `TOL_ENV` of its two ends,
/// which are reported as boundary hits.
pub fn envelope_shell_complement(z: ComplexPoint2, m: f64) -> Result<EnvelopeVerdict> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::PreconditionFailed(format!("m must be positive, got {m}")));
    }
    let d = shell_complement_margin(z, m);
    if d > TOL_ENV {
        return Ok(EnvelopeVerdict::Inside);
    }
    let w = z.square();
    let near_end = w.norm() <= TOL_ENV || (w - m * m).norm() <= TOL_ENV;
    Ok(if near_end { EnvelopeVerdict::Boundary { margin: d } } else { EnvelopeVerdict::Excluded })
}

/// Parameter range scanned when a line must be shown to meet a region.
pub const LINE_SCAN: (f64, f64, usize) = (-1e3, 1e3, 200_001);

fn line_hit(a: RealPoint2, y: RealPoint2, r: &Region) -> Option<RealPoint2> {
    let scale = y.norm();
    linspace(LINE_SCAN.0 / scale, LINE_SCAN.1 / scale, LINE_SCAN.2)
        .into_iter()
        .map(|t| a + y.scale(t))
        .find(|p| contains(r, *p))
}

/// Decides `a + (t + iτ)y` for a forward-invariant region met by the line `a + ℝy`.
///
/// The verdict is obtained by shifting the problem to a forward cone
/// `b + V⁺ ⊂ r` with `b` just below a point of the line inside `r`.
pub fn line_point_in_envelope(a: RealPoint2, y: RealPoint2, t: f64, tau: f64, r: &Region) -> Result<EnvelopeVerdict> {
    if y.norm() <= TAU_CLASS {
        return Err(Error::PreconditionFailed("direction y must be nonzero".into()));
    }
    if tau == 0.0 {
        return Err(Error::PreconditionFailed("tau must be nonzero".into()));
    }
    r.validate()?;
    if !r.is_forward_invariant() {
        return Err(Error::PreconditionFailed(format!("{} is not invariant under V+ translations", r.tag())));
    }
    let p = line_hit(a, y, r).ok_or_else(|| Error::PreconditionFailed("line does not meet the region".into()))?;
    let eps = 0.9 * boundary_distance(r, p);
    let b = p - RealPoint2::new(eps, 0.0);
    let z = ComplexPoint2::from_parts(a + y.scale(t) - b, y.scale(tau));
    envelope_mu_cone(z, 0.0)
}

fn closure_contains(r: &Region, p: RealPoint2) -> bool {
    contains(r, p) || boundary_distance(r, p) <= TAU_CLASS
}

/// Points on the complex quadric `(z − z̃)² = m` for a wedge-invariant region.
/// Points off the quadric are not decided here and return `PreconditionFailed`.
pub fn wedge_hyperbola_membership(
    z: ComplexPoint2,
    ztilde: RealPoint2,
    mparam: f64,
    r: &Region,
) -> Result<EnvelopeVerdict> {
    r.validate()?;
    if !r.is_wedge_invariant() {
        return Err(Error::PreconditionFailed(format!("{} is not invariant under wedge translations", r.tag())));
    }
    if z.im().norm() <= TAU_CLASS {
        return Err(Error::PreconditionFailed("z must have a nonzero imaginary part".into()));
    }
    if closure_contains(r, ztilde) {
        if mparam == 0.0 {
            return Err(Error::PreconditionFailed("quadric parameter must be nonzero".into()));
        }
    } else if !(mparam < 0.0) {
        return Err(Error::PreconditionFailed("quadric parameter must be negative off the region".into()));
    }
    let meets = [RealPoint2::new(1.0, 1.0), RealPoint2::new(1.0, -1.0)]
        .iter()
        .any(|d| lightlike_line_meets_closure(ztilde, *d, r));
    if !meets {
        return Err(Error::PreconditionFailed("no lightlike line through the centre meets the region".into()));
    }
    let res = ((z - ztilde.complexify()).square() - mparam).norm();
    if res > TOL_ENV * (1.0 + mparam.abs()) {
        return Err(Error::PreconditionFailed(format!("z is off the quadric (residual {res:.3e})")));
    }
    Ok(EnvelopeVerdict::Inside)
}

fn lightlike_line_meets_closure(a: RealPoint2, d: RealPoint2, r: &Region) -> bool {
    linspace(LINE_SCAN.0, LINE_SCAN.1, 20_001).into_iter().any(|s| closure_contains(r, a + d.scale(s)))
}

/// `a + (t + iτ)b` with lightlike `b`, for a wedge-invariant region whose
/// closure meets the line `a + ℝb`.
pub fn lightlike_line_membership(a: RealPoint2, b: RealPoint2, tau: f64, r: &Region) -> Result<EnvelopeVerdict> {
    r.validate()?;
    if !r.is_wedge_invariant() {
        return Err(Error::PreconditionFailed(format!("{} is not invariant under wedge translations", r.tag())));
    }
    if b.norm() <= TAU_CLASS || b.square().abs() > TAU_CLASS * (1.0 + b.norm().powi(2)) {
        return Err(Error::PreconditionFailed(format!("direction {b} is not lightlike")));
    }
    if tau == 0.0 {
        return Err(Error::PreconditionFailed("tau must be nonzero".into()));
    }
    let unit = b.scale(1.0 / b.norm());
    if !lightlike_line_meets_closure(a, unit, r) {
        return Err(Error::PreconditionFailed("line does not meet the region".into()));
    }
    Ok(EnvelopeVerdict::Inside)
}

/// Points on `(z − x̃)² = (b − x̃)²` with `x̃` in the upper half of `D_{a,b}`.
/// Points off the quadric return `PreconditionFailed`.
pub fn double_cone_quadric_membership(
    z: ComplexPoint2,
    xtilde: RealPoint2,
    a: RealPoint2,
    b: RealPoint2,
) -> Result<EnvelopeVerdict> {
    let dc = Region::double_cone(a, b)?;
    if z.im().norm() <= TAU_CLASS {
        return Err(Error::PreconditionFailed("z must have a nonzero imaginary part".into()));
    }
    if !contains(&dc, xtilde) {
        return Err(Error::PreconditionFailed("centre must lie in the double cone".into()));
    }
    let (da, db) = ((xtilde - a).square(), (xtilde - b).square());
    if !(da > db) {
        return Err(Error::PreconditionFailed(format!(
            "centre must be in the upper half: (x-a)^2 = {da} <= (x-b)^2 = {db}"
        )));
    }
    let res = ((z - xtilde.complexify()).square() - db).norm();
    if res > TOL_ENV * (1.0 + db.abs()) {
        return Err(Error::PreconditionFailed(format!("z is off the quadric (residual {res:.3e})")));
    }
    Ok(EnvelopeVerdict::Inside)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(t: f64, x: f64) -> RealPoint2 {
        RealPoint2::new(t, x)
    }

    fn z(re: (f64, f64), im: (f64, f64)) -> ComplexPoint2 {
        ComplexPoint2::from_parts(p(re.0, re.1), p(im.0, im.1))
    }

    #[test]
    fn mu_cone_examples() {
        use EnvelopeVerdict::*;
        assert_eq!(envelope_mu_cone(z((2.0, 0.0), (0.0, 1.0)), 1.0).unwrap(), Inside);
        assert_eq!(envelope_mu_cone(z((0.5, 0.0), (0.0, 1.0)), 1.0).unwrap(), Excluded);
        assert_eq!(envelope_mu_cone(z((1.0, 0.0), (1.0, 1.0)), 1.0).unwrap(), Inside);
        assert_eq!(envelope_mu_cone(z((2.0, 0.0), (0.0, 0.0)), 1.0).unwrap(), Inside);
        assert!(matches!(envelope_mu_cone(z((1.0, 0.0), (0.0, 1.0)), 1.0).unwrap(), Boundary { .. }));
        assert_eq!(envelope_mu_cone(z((-9.0, 0.0), (2.0, 1.0)), 1.0).unwrap(), Inside);
    }

    #[test]
    fn g1_examples() {
        use EnvelopeVerdict::*;
        assert_eq!(envelope_g1(z((2.0, 0.0), (0.0, 0.0)), 1.0, 3.0).unwrap(), Inside);
        let (lo, hi) = g1_bounds(0.0, p(0.0, 0.5), 1.0, 3.0).unwrap();
        assert_abs_diff_eq!(lo, 2.0 - 0.75f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 2.0 + 0.75f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(lo, 1.133975, epsilon = 1e-6);
        assert_eq!(envelope_g1(z((2.0, 0.0), (0.0, 0.5)), 1.0, 3.0).unwrap(), Inside);
        assert_eq!(envelope_g1(z((0.9, 0.0), (0.0, 0.5)), 1.0, 3.0).unwrap(), Excluded);
        // beyond the band the set is empty
        assert!(g1_bounds(0.0, p(0.0, 1.5), 1.0, 3.0).is_none());
        assert_eq!(envelope_g1(z((2.0, 0.0), (0.0, 1.5)), 1.0, 3.0).unwrap(), Excluded);
        assert!(envelope_g1(z((2.0, 0.0), (0.0, 0.0)), 3.0, 1.0).is_err());
    }

    #[test]
    fn shell_complement_examples() {
        use EnvelopeVerdict::*;
        let i = |t: f64| ComplexPoint2::new(num_complex::Complex64::new(0.0, t), 0.0.into());
        assert_eq!(envelope_shell_complement(i(1.0), 1.0).unwrap(), Inside);
        assert_eq!(envelope_shell_complement(z((0.5, 0.0), (0.0, 0.0)), 1.0).unwrap(), Excluded);
        assert_eq!(envelope_shell_complement(z((1.0, 0.0), (1.0, 0.0)), 1.0).unwrap(), Inside);
        assert!(matches!(envelope_shell_complement(z((1.0, 0.0), (0.0, 0.0)), 1.0).unwrap(), Boundary { .. }));
    }

    #[test]
    fn line_point_examples() {
        let fc = Region::forward_cone(RealPoint2::ORIGIN);
        let v = line_point_in_envelope(p(1.0, 0.0), p(0.0, 1.0), 0.0, 0.3, &fc).unwrap();
        assert_eq!(v, EnvelopeVerdict::Inside);
        let v = line_point_in_envelope(p(1.0, 0.0), p(1.0, 0.0), 4.0, 1.0, &fc).unwrap();
        assert_eq!(v, EnvelopeVerdict::Inside);
        let mc = Region::mu_cone(1.0);
        let v = line_point_in_envelope(p(2.0, 0.0), p(0.0, 1.0), 5.0, -0.1, &mc).unwrap();
        assert_eq!(v, EnvelopeVerdict::Inside);
        // the horizontal line x₀ = −1 misses the cone
        assert!(line_point_in_envelope(p(-1.0, 0.0), p(0.0, 1.0), 0.0, 0.1, &mc).is_err());
        let dc = Region::double_cone(p(0.0, 0.0), p(1.0, 0.0)).unwrap();
        assert!(line_point_in_envelope(p(0.5, 0.0), p(0.0, 1.0), 0.0, 0.1, &dc).is_err());
    }

    #[test]
    fn wedge_examples() {
        let w = Region::Wedge { shift: p(0.0, 1.0) };
        let zz = z((1.0, 2.0), (2.0, 0.0));
        assert_eq!(wedge_hyperbola_membership(zz, p(1.0, 2.0), -4.0, &w).unwrap(), EnvelopeVerdict::Inside);
        assert!(wedge_hyperbola_membership(p(1.0, 2.0).complexify(), p(1.0, 2.0), -4.0, &w).is_err());
        assert!(wedge_hyperbola_membership(zz, p(1.0, 2.0), -3.0, &w).is_err());
        let w0 = Region::Wedge { shift: RealPoint2::ORIGIN };
        assert_eq!(lightlike_line_membership(p(0.0, 2.0), p(1.0, 1.0), 0.5, &w0).unwrap(), EnvelopeVerdict::Inside);
        assert!(lightlike_line_membership(p(0.0, 2.0), p(1.0, 0.5), 0.5, &w0).is_err());
    }

    #[test]
    fn quadric_examples() {
        let (a, b) = (p(-1.0, 0.0), p(0.0, 0.0));
        let xt = p(-0.25, 0.0);
        let zz = z((-0.05, 0.0), (0.0, 0.15));
        assert_eq!(double_cone_quadric_membership(zz, xt, a, b).unwrap(), EnvelopeVerdict::Inside);
        assert!(double_cone_quadric_membership(zz, p(-0.75, 0.0), a, b).is_err());
        assert!(double_cone_quadric_membership(p(0.0, 0.0).complexify(), xt, a, b).is_err());
    }

    #[test]
    fn quadric_matches_reciprocal_line() {
        // with b = 0, (z − x̃)² = x̃² is the φ-preimage of the line x₀ = (x̃₁/x̃₀)x₁ − 1/(2x̃₀)
        let xt = p(-0.25, 0.05);
        for s in [0.1, 0.3, -0.2] {
            for tau in [0.05, -0.1, 0.2] {
                let w = ComplexPoint2::new(
                    num_complex::Complex64::new((xt.x / xt.t) * s - 0.5 / xt.t, (xt.x / xt.t) * tau),
                    num_complex::Complex64::new(s, tau),
                );
                let zz = crate::transforms::phi(w).unwrap();
                let v = double_cone_quadric_membership(zz, xt, p(-1.0, 0.0), p(0.0, 0.0)).unwrap();
                assert_eq!(v, EnvelopeVerdict::Inside);
            }
        }
    }
}
