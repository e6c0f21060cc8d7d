//! Admissible hyperboloids `(x′, λ)` and planes `(x′, a)` for a real region.
//!
//! A hyperboloid is admissible when `(x − x′)² < λ²` for every `x ∈ r`; a
//! plane when `a·(x − x′) < 0` for every `x ∈ r`. Both tests are phrased as
//! slack functions: the slack is `≥ 0` exactly when the parameter is
//! admissible, and `−∞` when no bound exists. Every region type has a
//! closed form; the sampled versions are kept for cross-checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{RealPoint2, TAU_CLASS};
use crate::regions::{double_cone_corners, sample_region, Region};
use crate::sampling::SampleConfig;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperboloidParam {
    pub xprime: RealPoint2,
    pub lambda: f64,
}

impl HyperboloidParam {
    pub fn new(xprime: RealPoint2, lambda: f64) -> Result<Self> {
        if !xprime.is_finite() || !lambda.is_finite() {
            return Err(Error::NonFinite("HyperboloidParam"));
        }
        if lambda <= 0.0 {
            return Err(Error::PreconditionFailed(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { xprime, lambda })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneParam {
    pub xprime: RealPoint2,
    pub a: RealPoint2,
}

impl PlaneParam {
    pub fn new(xprime: RealPoint2, a: RealPoint2) -> Result<Self> {
        if !xprime.is_finite() || !a.is_finite() {
            return Err(Error::NonFinite("PlaneParam"));
        }
        if a.norm() <= TAU_CLASS || a.square() < -TAU_CLASS {
            return Err(Error::PreconditionFailed(format!("plane normal must be causal and nonzero, got {a}")));
        }
        Ok(Self { xprime, a })
    }
}

/// `sup_{x ∈ apex + cone(e1, e2)} a·x`, where the cone is spanned by the two rays.
fn cone_sup(a: RealPoint2, apex: RealPoint2, e1: RealPoint2, e2: RealPoint2) -> f64 {
    if a.dot(&e1) <= 0.0 && a.dot(&e2) <= 0.0 {
        a.dot(&apex)
    } else {
        f64::INFINITY
    }
}

const R_PLUS: RealPoint2 = RealPoint2::new(1.0, 1.0);
const R_MINUS: RealPoint2 = RealPoint2::new(1.0, -1.0);

/// `sup_{x∈r} a·x`, possibly `+∞`.
pub fn plane_sup(a: RealPoint2, r: &Region) -> f64 {
    // √(a²) for causal a; lightlike a gives 0
    let alen = a.square().max(0.0).sqrt();
    match r {
        Region::ForwardCone { apex } => cone_sup(a, *apex, R_PLUS, R_MINUS),
        Region::BackwardCone { apex } => cone_sup(a, *apex, -R_PLUS, -R_MINUS),
        Region::MuCone { mu, apex } => cone_sup(a, *apex, R_PLUS, R_MINUS) - mu * alen,
        Region::HyperboloidShell { m1, .. } => cone_sup(a, RealPoint2::ORIGIN, R_PLUS, R_MINUS) - m1 * alen,
        Region::ShellCap { .. } => cone_sup(a, RealPoint2::ORIGIN, -R_PLUS, -R_MINUS),
        Region::DoubleCone { a: lo, b: hi } => {
            let (right, left) = double_cone_corners(*lo, *hi);
            [*lo, *hi, right, left].iter().map(|v| a.dot(v)).fold(f64::NEG_INFINITY, f64::max)
        }
        Region::SpacelikeComplementOfDoubleCone { a: lo, b: hi } => {
            let (right, left) = double_cone_corners(*lo, *hi);
            cone_sup(a, right, R_PLUS, -R_MINUS).max(cone_sup(a, left, R_MINUS, -R_PLUS))
        }
        Region::SpacelikeSet {} => {
            cone_sup(a, RealPoint2::ORIGIN, R_PLUS, -R_MINUS).max(cone_sup(a, RealPoint2::ORIGIN, R_MINUS, -R_PLUS))
        }
        Region::Wedge { shift } => cone_sup(a, *shift, R_PLUS, -R_MINUS),
        Region::UnionOf { parts } => parts.iter().map(|q| plane_sup(a, q)).fold(f64::NEG_INFINITY, f64::max),
    }
}

/// `a·x′ − sup_{x∈r} a·x`. The plane is admissible iff this is `≥ 0`: the
/// supremum is never attained on an open region.
pub fn plane_slack(p: &PlaneParam, r: &Region) -> f64 {
    p.a.dot(&p.xprime) - plane_sup(p.a, r)
}

pub fn is_admissible_plane(p: &PlaneParam, r: &Region) -> bool {
    plane_slack(p, r) >= 0.0
}

/// Sampled version of [`plane_slack`]; always `≥` the exact slack.
pub fn plane_slack_sampled(p: &PlaneParam, r: &Region, cfg: &SampleConfig) -> f64 {
    sample_region(r, cfg).iter().map(|x| p.a.dot(&(p.xprime - *x))).fold(f64::INFINITY, f64::min)
}

/// `sup_{x∈r} (x − x′)²`, possibly `+∞`.
pub fn hyperboloid_sup(xprime: RealPoint2, r: &Region) -> f64 {
    match r {
        Region::ForwardCone { .. } | Region::BackwardCone { .. } | Region::MuCone { .. } => f64::INFINITY,
        Region::HyperboloidShell { m1, m2 } => shell_sup(xprime, *m1, *m2),
        // reflect through the origin onto the mass band (0, 1/m)
        Region::ShellCap { m } => shell_sup(-xprime, 0.0, 1.0 / m),
        Region::DoubleCone { a, b } => {
            // (x − x′)² is bilinear in light-cone coordinates, so its maximum
            // over the rectangle sits at a corner
            let (right, left) = double_cone_corners(*a, *b);
            [*a, *b, right, left].iter().map(|v| (*v - xprime).square()).fold(f64::NEG_INFINITY, f64::max)
        }
        Region::SpacelikeComplementOfDoubleCone { a, b } => {
            // union of two opposite wedges at the side corners: differences stay
            // spacelike only from inside the closed double cone
            let (right, left) = double_cone_corners(*a, *b);
            let from_right = xprime - right;
            let from_left = xprime - left;
            if in_closed_wedge(-from_right) && in_closed_wedge(from_left) {
                0.0
            } else {
                f64::INFINITY
            }
        }
        Region::SpacelikeSet {} => {
            if xprime.norm() <= TAU_CLASS {
                0.0
            } else {
                f64::INFINITY
            }
        }
        Region::Wedge { shift } => {
            if in_closed_wedge(*shift - xprime) {
                0.0
            } else {
                f64::INFINITY
            }
        }
        Region::UnionOf { parts } => parts.iter().map(|q| hyperboloid_sup(xprime, q)).fold(f64::NEG_INFINITY, f64::max),
    }
}

/// `d ∈ closure{x² < 0, x₁ > 0}`, with the tolerance band included.
fn in_closed_wedge(d: RealPoint2) -> bool {
    d.x - d.t >= -TAU_CLASS && d.x + d.t >= -TAU_CLASS
}

fn shell_sup(xprime: RealPoint2, m1: f64, m2: f64) -> f64 {
    // only centres in the closed forward cone see a bounded proper time;
    // the reverse triangle inequality then gives the two branch distances
    if !(xprime.t >= -TAU_CLASS && xprime.square() >= -TAU_CLASS) {
        return f64::INFINITY;
    }
    let alpha = xprime.square().max(0.0).sqrt();
    let tau = (m2 - alpha).max(alpha - m1);
    tau * tau
}

/// `λ − √(max(sup (x − x′)², 0))`; admissible iff `≥ 0`.
pub fn hyperboloid_slack(h: &HyperboloidParam, r: &Region) -> f64 {
    let s = hyperboloid_sup(h.xprime, r);
    if s.is_infinite() {
        f64::NEG_INFINITY
    } else {
        h.lambda - s.max(0.0).sqrt()
    }
}

/// Sampled version of [`hyperboloid_slack`]; always `≥` the exact slack.
pub fn hyperboloid_slack_sampled(h: &HyperboloidParam, r: &Region, cfg: &SampleConfig) -> f64 {
    let s = sample_region(r, cfg).iter().map(|x| (*x - h.xprime).square()).fold(f64::NEG_INFINITY, f64::max);
    h.lambda - s.max(0.0).sqrt()
}

/// Closed-form admissibility for every region type. `nsamples` sizes the
/// sampled cross-check used for bounded regions.
pub fn is_admissible_hyperboloid(h: &HyperboloidParam, r: &Region, nsamples: usize) -> Result<bool> {
    if nsamples == 0 {
        return Err(Error::PreconditionFailed("nsamples must be at least 1".into()));
    }
    r.validate()?;
    let exact = hyperboloid_slack(h, r) >= 0.0;
    if r.is_bounded() {
        let cfg = SampleConfig { nsamples, ..Default::default() };
        let sampled = hyperboloid_slack_sampled(h, r, &cfg) >= 0.0;
        // samples are interior points, so they can never refute an exact pass
        debug_assert!(!exact || sampled);
        return Ok(exact && sampled);
    }
    Ok(exact)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: f64, x: f64) -> RealPoint2 {
        RealPoint2::new(t, x)
    }

    #[test]
    fn hyperboloid_examples() {
        let shell = Region::shell(1.0, 3.0).unwrap();
        let h = HyperboloidParam::new(p(2.0, 0.0), 2.0).unwrap();
        assert!(is_admissible_hyperboloid(&h, &shell, 1000).unwrap());
        let h = HyperboloidParam::new(p(2.0, 0.0), 0.5).unwrap();
        assert!(!is_admissible_hyperboloid(&h, &shell, 1000).unwrap());
        let dc = Region::double_cone(p(0.0, 0.0), p(1.0, 0.0)).unwrap();
        let h = HyperboloidParam::new(p(0.5, 0.0), 10.0).unwrap();
        assert!(is_admissible_hyperboloid(&h, &dc, 1000).unwrap());
        assert!(HyperboloidParam::new(p(0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn plane_examples() {
        let mc = Region::mu_cone(1.0);
        let ok = |x: RealPoint2, a: RealPoint2| is_admissible_plane(&PlaneParam::new(x, a).unwrap(), &mc);
        assert!(ok(p(0.0, 0.0), p(-1.0, 0.0)));
        assert!(!ok(p(2.0, 0.0), p(-1.0, 0.0)));
        assert!(ok(p(0.0, 0.0), p(-1.0, 1.0)));
        // the bound a·x′ = −μ√(a²) itself is admissible
        assert!(ok(p(1.0, 0.0), p(-1.0, 0.0)));
        assert!(!ok(p(0.0, 0.0), p(1.0, 0.0)));
        assert!(PlaneParam::new(p(0.0, 0.0), p(0.0, 1.0)).is_err());
    }

    #[test]
    fn sampled_slack_bounds_exact() {
        let cfg = SampleConfig { nsamples: 4000, ..Default::default() };
        let regions = [
            Region::mu_cone(1.0),
            Region::shell(1.0, 3.0).unwrap(),
            Region::double_cone(p(0.0, 0.0), p(1.0, 0.3)).unwrap(),
            Region::Wedge { shift: p(0.0, 1.0) },
            Region::ShellCap { m: 2.0 },
        ];
        for r in &regions {
            for (x, a) in [(p(0.0, 0.0), p(-1.0, 0.0)), (p(0.5, 0.2), p(-1.0, -1.0)), (p(1.0, 1.0), p(1.0, 0.5))] {
                let pp = PlaneParam::new(x, a).unwrap();
                assert!(plane_slack_sampled(&pp, r, &cfg) >= plane_slack(&pp, r) - 1e-9, "{}", r.tag());
            }
            for (x, l) in [(p(2.0, 0.0), 2.0), (p(-0.5, 0.0), 0.3), (p(0.5, 0.15), 1.0)] {
                let h = HyperboloidParam::new(x, l).unwrap();
                assert!(hyperboloid_slack_sampled(&h, r, &cfg) >= hyperboloid_slack(&h, r) - 1e-9, "{}", r.tag());
            }
        }
    }

    #[test]
    fn wedge_and_complement_closed_forms() {
        let w = Region::Wedge { shift: p(0.0, 1.0) };
        let h = HyperboloidParam::new(p(0.0, 0.0), 0.1).unwrap();
        assert!(hyperboloid_slack(&h, &w) >= 0.0);
        let h = HyperboloidParam::new(p(0.0, 2.0), 0.1).unwrap();
        assert_eq!(hyperboloid_slack(&h, &w), f64::NEG_INFINITY);
        let comp = Region::SpacelikeComplementOfDoubleCone { a: p(0.0, 0.0), b: p(1.0, 0.0) };
        let h = HyperboloidParam::new(p(0.5, 0.0), 0.1).unwrap();
        assert!(hyperboloid_slack(&h, &comp) >= 0.0);
        let h = HyperboloidParam::new(p(2.0, 0.0), 0.1).unwrap();
        assert!(hyperboloid_slack(&h, &comp) < 0.0);
    }
}
