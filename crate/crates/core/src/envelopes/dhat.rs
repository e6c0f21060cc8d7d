//! Enlargements of double cones: the tangent-line sweep next to a mass
//! cone, the timelike-path hull, and the two-double-cone configuration
//! handled through the reciprocal-radii map.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::jld::{jld_excluded, SearchBudget};
use super::EnvelopeVerdict;
use crate::error::{Error, Result};
use crate::minkowski::{ComplexPoint2, RealPoint2, TAU_CLASS};
use crate::regions::{contains, double_cone_corners, Region};
use crate::sampling::Halton;
use crate::transforms::phi_real;

/// Contact point of the line through `v` tangent to `V_μ⁺`, i.e. the point
/// `μ(cosh u, sinh u)` with `v₀ cosh u − v₁ sinh u = μ`. For `μ = 0` the
/// contact point is the apex.
///
/// Spacelike vertices have exactly one tangent. Forward timelike vertices
/// below the hyperbola have two; the one continuous with the spacelike
/// solution on the vertex's side is returned.
pub fn tangent_point(v: RealPoint2, mu: f64) -> Result<RealPoint2> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::PreconditionFailed(format!("mu must be >= 0, got {mu}")));
    }
    let sq = v.square();
    let none = || Error::NoTangent(v.t, v.x);
    if mu == 0.0 {
        return if sq < -TAU_CLASS { Ok(RealPoint2::ORIGIN) } else { Err(none()) };
    }
    // with w = e^u: A w² − μ w + B = 0
    let a = 0.5 * (v.t - v.x);
    let b = 0.5 * (v.t + v.x);
    let w = if sq < -TAU_CLASS {
        let d = (mu * mu - 4.0 * a * b).sqrt();
        if a > 0.0 {
            (mu + d) / (2.0 * a)
        } else {
            2.0 * b / (mu + d)
        }
    } else if v.t > 0.0 && sq.abs() <= TAU_CLASS {
        if v.x > 0.0 {
            b / mu
        } else {
            mu / a
        }
    } else if v.t > 0.0 && sq < mu * mu - TAU_CLASS {
        let th = (v.x / v.t).atanh();
        let k = (mu / sq.sqrt()).acosh();
        (if v.x >= 0.0 { th - k } else { th + k }).exp()
    } else {
        return Err(none());
    };
    if !(w.is_finite() && w > 0.0) {
        return Err(none());
    }
    Ok(RealPoint2::new(0.5 * mu * (w + 1.0 / w), 0.5 * mu * (w - 1.0 / w)))
}

/// Interval of `s` where `c0 + c1·s < bound`, intersected with `(lo, hi)`.
fn strict_below(c0: f64, c1: f64, bound: f64, lo: f64, hi: f64) -> (f64, f64) {
    if c1 == 0.0 {
        return if c0 < bound { (lo, hi) } else { (1.0, 0.0) };
    }
    let s = (bound - c0) / c1;
    if c1 > 0.0 {
        (lo, hi.min(s))
    } else {
        (lo.max(s), hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DhatPiece {
    /// `(segment[from, to] + V⁺) ∩ (cap + V⁻)`
    UpperSweep { from: RealPoint2, to: RealPoint2, cap: RealPoint2 },
    /// `((from + ℝ₊·dir) + V⁻) ∩ (floor + V⁺)`
    LowerSweep { from: RealPoint2, dir: RealPoint2, floor: RealPoint2 },
}

impl DhatPiece {
    pub fn contains(&self, p: RealPoint2) -> bool {
        let (pu, pv) = p.light_cone();
        match *self {
            DhatPiece::UpperSweep { from, to, cap } => {
                if !crate::regions::in_backward_cone(p - cap) {
                    return false;
                }
                let (u0, v0) = from.light_cone();
                let (u1, v1) = to.light_cone();
                // some q(s) on the segment with q_u < p_u and q_v < p_v
                let (lo, hi) = strict_below(u0, u1 - u0, pu, 0.0, 1.0);
                let (lo, hi) = strict_below(v0, v1 - v0, pv, lo, hi);
                lo < hi || (lo == hi && u0 + (u1 - u0) * lo < pu && v0 + (v1 - v0) * lo < pv)
            }
            DhatPiece::LowerSweep { from, dir, floor } => {
                if !crate::regions::in_forward_cone(p - floor) {
                    return false;
                }
                let (u0, v0) = from.light_cone();
                let (du, dv) = dir.light_cone();
                // some q(s), s ≥ 0, with p_u < q_u and p_v < q_v
                let (lo, hi) = strict_below(-u0, -du, -pu, 0.0, f64::INFINITY);
                let (lo, hi) = strict_below(-v0, -dv, -pv, lo, hi);
                lo < hi || (lo == hi && pu < u0 + du * lo && pv < v0 + dv * lo)
            }
        }
    }
}

/// The enlargement of `D_{a,b}` next to the mass cone `V_μ⁺`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DhatRegion {
    pub a: RealPoint2,
    pub b: RealPoint2,
    pub mu: f64,
    pub pieces: Vec<DhatPiece>,
    /// No enlargement: the region is the double cone itself.
    pub degenerate: bool,
}

impl DhatRegion {
    pub fn contains(&self, p: RealPoint2) -> bool {
        contains(&Region::DoubleCone { a: self.a, b: self.b }, p) || self.pieces.iter().any(|q| q.contains(p))
    }
}

fn in_closed_backward(v: RealPoint2) -> bool {
    v.t <= TAU_CLASS && v.square() >= -TAU_CLASS
}

fn in_closed_forward(v: RealPoint2) -> bool {
    v.t >= -TAU_CLASS && v.square() >= -TAU_CLASS
}

/// Builds the enlarged region from the tangent lines through the vertices.
///
/// Both vertices outside `V̄⁻` give two sweeps; only the upper vertex
/// outside gives the lower sweep. A double cone inside `V⁺` is returned
/// unchanged, and so is one with both vertices in `V̄⁻`, for which no
/// enlargement is claimed.
pub fn dhat(a: RealPoint2, b: RealPoint2, mu: f64) -> Result<DhatRegion> {
    Region::double_cone(a, b)?;
    let mut out = DhatRegion { a, b, mu, pieces: Vec::new(), degenerate: false };
    if in_closed_forward(a) {
        out.degenerate = true;
        return Ok(out);
    }
    let upper = |ta: RealPoint2| DhatPiece::UpperSweep { from: a, to: ta, cap: b };
    let lower = |tb: RealPoint2| DhatPiece::LowerSweep { from: b, dir: b - tb, floor: a };
    match (in_closed_backward(a), in_closed_backward(b)) {
        (false, false) => {
            out.pieces.push(upper(tangent_point(a, mu)?));
            out.pieces.push(lower(tangent_point(b, mu)?));
        }
        // b ∈ V̄⁻ forces a ∈ V⁻, so this arm only guards malformed input
        (false, true) => out.pieces.push(upper(tangent_point(a, mu)?)),
        (true, false) => out.pieces.push(lower(tangent_point(b, mu)?)),
        (true, true) => out.degenerate = true,
    }
    Ok(out)
}

const HULL_LATTICE: usize = 64;
const SEGMENT_CHECKS: usize = 8;

fn segment_inside(r: &Region, p: RealPoint2, q: RealPoint2, n: usize) -> bool {
    (0..=n).all(|k| contains(r, p + (q - p).scale(k as f64 / n as f64)))
}

/// Certifies `D_{x,y}` for a region in which `x` and `y` are joined by a
/// timelike path. Tries the straight segment first, then a breadth-first
/// search over monotone lattice paths in light-cone coordinates.
pub fn double_cone_theorem_hull(b_region: &Region, x: RealPoint2, y: RealPoint2) -> Result<Region> {
    b_region.validate()?;
    if !(contains(b_region, x) && contains(b_region, y)) {
        return Err(Error::PreconditionFailed("both endpoints must lie in the region".into()));
    }
    let d = y - x;
    if !(d.t > 0.0 && d.square() > TAU_CLASS) {
        return Err(Error::PreconditionFailed(format!("{y} is not in the future of {x}")));
    }
    let found = segment_inside(b_region, x, y, 256) || lattice_path(b_region, x, y);
    if !found {
        return Err(Error::PreconditionFailed("no timelike path inside the region".into()));
    }
    Region::double_cone(x, y)
}

fn lattice_path(r: &Region, x: RealPoint2, y: RealPoint2) -> bool {
    let n = HULL_LATTICE;
    let (du, dv) = (y - x).light_cone();
    let node = |i: usize, j: usize| x + RealPoint2::from_light_cone(du * i as f64 / n as f64, dv * j as f64 / n as f64);
    let mut seen = vec![false; (n + 1) * (n + 1)];
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    seen[0] = true;
    // each step increases both light-cone coordinates, so it is timelike
    let steps = [(1, 1), (2, 1), (1, 2), (3, 1), (1, 3), (4, 1), (1, 4)];
    while let Some((i, j)) = queue.pop_front() {
        if (i, j) == (n, n) {
            return true;
        }
        for (si, sj) in steps {
            let (ni, nj) = (i + si, j + sj);
            if ni > n || nj > n || seen[ni * (n + 1) + nj] {
                continue;
            }
            if segment_inside(r, node(i, j), node(ni, nj), SEGMENT_CHECKS) {
                seen[ni * (n + 1) + nj] = true;
                queue.push_back((ni, nj));
            }
        }
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionKind {
    /// The second double cone is spacelike to the first.
    SpacelikeSeparated,
    /// The second double cone lies in `V⁺` or below the first.
    NoExtension,
    Extended,
}

/// Enlargement of `D_{c,d}` next to the double cone `D_{(−a,0),0}`.
///
/// A real point `p` belongs to it when `p ∈ D_{c,d}`, or when `φ(p)`,
/// shifted by `−(1/a, 0)`, lies in the sweep region `image`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionRegion {
    pub a: f64,
    pub c: RealPoint2,
    pub d: RealPoint2,
    pub kind: ExtensionKind,
    /// Sweep region in the translated image coordinates.
    pub image: Option<DhatRegion>,
}

impl ExtensionRegion {
    pub fn shift(&self) -> RealPoint2 {
        RealPoint2::new(1.0 / self.a, 0.0)
    }

    pub fn contains(&self, p: RealPoint2) -> bool {
        if contains(&Region::DoubleCone { a: self.c, b: self.d }, p) {
            return true;
        }
        match &self.image {
            None => false,
            Some(img) => match phi_real(p) {
                Ok(w) => img.contains(w - self.shift()),
                Err(_) => false,
            },
        }
    }

    /// Quasi-random points of the enlargement that are not in `D_{c,d}`,
    /// drawn from a box three times the double cone's extent.
    pub fn added_points(&self, n: usize, seed: u64) -> Vec<RealPoint2> {
        if self.image.is_none() {
            return Vec::new();
        }
        let mid = (self.c + self.d).scale(0.5);
        let half = 1.5 * (self.d - self.c).norm().max(1e-3) + 0.5 / self.a;
        let base = Region::DoubleCone { a: self.c, b: self.d };
        Halton::<2>::new(seed)
            .take(n)
            .map(|[s, w]| mid + RealPoint2::new((2.0 * s - 1.0) * half, (2.0 * w - 1.0) * half))
            .filter(|p| !contains(&base, *p) && self.contains(*p))
            .collect()
    }

    /// Cross-checks added points in the image configuration: each `φ(p)`
    /// must be inside the search-based envelope of the forward cone at
    /// `(1/a, 0)` together with `φ(D_{c,d})`. Returns the failures.
    pub fn verify_added(&self, n: usize, seed: u64, budget: &SearchBudget) -> Result<Vec<RealPoint2>> {
        let Some(img) = &self.image else { return Ok(Vec::new()) };
        let shift = self.shift();
        let g = Region::UnionOf {
            parts: vec![Region::ForwardCone { apex: shift }, Region::DoubleCone { a: img.a + shift, b: img.b + shift }],
        };
        let mut bad = Vec::new();
        for p in self.added_points(n, seed) {
            let w = phi_real(p)?;
            if jld_excluded(ComplexPoint2::from(w), &g, budget)? != EnvelopeVerdict::Inside {
                bad.push(p);
            }
        }
        Ok(bad)
    }
}

/// Pipeline for the pair `D_{(−a,0),0}`, `D_{c,d}`: map `D_{c,d}` through
/// `φ` (a double cone again when its closure avoids the light cone), apply
/// the `μ = 0` sweep relative to the cone `(1/a, 0) + V⁺`, and read the
/// result back through `φ`.
pub fn two_double_cone_extension(a: f64, c: RealPoint2, d: RealPoint2) -> Result<ExtensionRegion> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::PreconditionFailed(format!("a must be positive, got {a}")));
    }
    Region::double_cone(c, d)?;
    let (uc, vc) = c.light_cone();
    let (ud, vd) = d.light_cone();
    // x² = u·v on the closed rectangle vanishes iff an axis crosses it
    if uc * ud <= 0.0 || vc * vd <= 0.0 {
        return Err(Error::UnsupportedConfiguration("closure of the second double cone meets the light cone".into()));
    }
    let mut out = ExtensionRegion { a, c, d, kind: ExtensionKind::Extended, image: None };

    let (right, left) = double_cone_corners(RealPoint2::new(-a, 0.0), RealPoint2::ORIGIN);
    let (ur, vr) = right.light_cone();
    let (ul, vl) = left.light_cone();
    let right_wedge = uc >= ur && vd <= vr;
    let left_wedge = ud <= ul && vc >= vl;
    if right_wedge || left_wedge {
        out.kind = ExtensionKind::SpacelikeSeparated;
        return Ok(out);
    }
    let below = RealPoint2::new(-a, 0.0);
    let in_future = uc > 0.0 && vc > 0.0;
    let in_past_of_first = ud < below.light_cone().0 && vd < below.light_cone().1;
    if in_future || in_past_of_first {
        out.kind = ExtensionKind::NoExtension;
        return Ok(out);
    }
    // φ acts as (u, v) ↦ (−1/v, −1/u), so corners map to corners
    let ia = phi_real(c)?;
    let ib = phi_real(d)?;
    let shift = out.shift();
    out.image = Some(dhat(ia - shift, ib - shift, 0.0)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(t: f64, x: f64) -> RealPoint2 {
        RealPoint2::new(t, x)
    }

    #[test]
    fn tangent_examples() {
        let t = tangent_point(p(0.0, -2.0), 1.0).unwrap();
        assert_abs_diff_eq!(t.t, 5f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.x, 0.5, epsilon = 1e-12);
        assert!(tangent_point(p(3.0, 0.0), 1.0).is_err());
        assert!(tangent_point(p(-1.0, 0.0), 1.0).is_err());
        assert_eq!(tangent_point(p(0.0, 2.0), 0.0).unwrap(), RealPoint2::ORIGIN);
    }

    #[test]
    fn tangent_lines_touch() {
        for v in [p(0.0, 3.0), p(-1.0, 2.0), p(0.5, 0.3), p(0.5, -0.3), p(2.0, 2.0), p(1.0, -5.0)] {
            for mu in [0.5, 1.0, 2.0] {
                let Ok(t) = tangent_point(v, mu) else { continue };
                assert_abs_diff_eq!(t.square(), mu * mu, epsilon = 1e-9);
                // v lies on the tangent line {x·t = μ²}
                assert_abs_diff_eq!(v.dot(&t), mu * mu, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn tangent_branch_is_continuous_across_the_light_cone() {
        for side in [1.0, -1.0] {
            let before = tangent_point(p(1.0, side * (1.0 + 1e-6)), 1.0).unwrap();
            let after = tangent_point(p(1.0, side * (1.0 - 1e-6)), 1.0).unwrap();
            assert!(before.distance(&after) < 1e-3, "{before} vs {after}");
        }
    }

    #[test]
    fn dhat_cases() {
        let r = dhat(p(1.0, 0.0), p(2.0, 0.0), 1.0).unwrap();
        assert!(r.degenerate && r.pieces.is_empty());
        let r = dhat(p(-1.0, 2.5), p(0.5, 3.0), 1.0).unwrap();
        assert_eq!(r.pieces.len(), 2);
        let r = dhat(p(-3.0, 0.0), p(0.0, 2.0), 1.0).unwrap();
        assert_eq!(r.pieces.len(), 1);
        assert!(matches!(r.pieces[0], DhatPiece::LowerSweep { .. }));
    }

    #[test]
    fn dhat_contains_the_double_cone_and_more() {
        let (a, b) = (p(0.0, 2.0), p(1.0, 2.5));
        let r = dhat(a, b, 1.0).unwrap();
        let dc = Region::DoubleCone { a, b };
        let mut extra = 0;
        for [s, w] in Halton::<2>::new(5).take(4000) {
            let q = p(-1.0 + 4.0 * s, 4.0 * w);
            if contains(&dc, q) {
                assert!(r.contains(q));
            } else if r.contains(q) {
                extra += 1;
                // added points are never inside the mass cone's causal shadow
                assert!(!(q.t > 0.0 && q.square() > 1.0));
            }
        }
        assert!(extra > 0);
    }

    #[test]
    fn hull_examples() {
        let fc = Region::forward_cone(RealPoint2::ORIGIN);
        let h = double_cone_theorem_hull(&fc, p(1.0, 0.0), p(3.0, 0.0)).unwrap();
        assert_eq!(h, Region::DoubleCone { a: p(1.0, 0.0), b: p(3.0, 0.0) });
        assert!(double_cone_theorem_hull(&fc, p(1.0, 0.0), p(1.5, 2.0)).is_err());
        let two = Region::UnionOf {
            parts: vec![
                Region::DoubleCone { a: p(0.0, 0.0), b: p(1.0, 0.0) },
                Region::DoubleCone { a: p(2.0, 0.0), b: p(3.0, 0.0) },
            ],
        };
        assert!(double_cone_theorem_hull(&two, p(0.5, 0.0), p(2.5, 0.0)).is_err());
    }

    #[test]
    fn hull_goes_around_a_corner() {
        // an L-shaped union where the straight segment leaves the region
        let r = Region::UnionOf {
            parts: vec![
                Region::DoubleCone { a: p(0.0, 0.0), b: p(3.0, 1.0) },
                Region::DoubleCone { a: p(1.5, 1.5), b: p(4.0, 0.0) },
            ],
        };
        let (x, y) = (p(0.5, 0.0), p(3.45, 0.45));
        assert!(!segment_inside(&r, x, y, 256));
        let h = double_cone_theorem_hull(&r, x, y);
        assert!(h.is_ok(), "{h:?}");
    }

    #[test]
    fn extension_identity_cases() {
        let e = two_double_cone_extension(1.0, p(0.0, 2.0), p(0.5, 2.0)).unwrap();
        assert_eq!(e.kind, ExtensionKind::SpacelikeSeparated);
        let e = two_double_cone_extension(1.0, p(2.0, 0.0), p(3.0, 0.0)).unwrap();
        assert_eq!(e.kind, ExtensionKind::NoExtension);
        assert!(two_double_cone_extension(1.0, p(-0.5, 0.0), p(3.0, 0.0)).is_err());
    }

    #[test]
    fn generic_extension_grows_and_verifies() {
        // spacelike to the right of the origin, in the future of the first cone's corner
        let e = two_double_cone_extension(1.0, p(-0.2, 0.6), p(0.2, 0.7)).unwrap();
        assert_eq!(e.kind, ExtensionKind::Extended);
        let added = e.added_points(4000, 1);
        assert!(added.len() > 20, "{}", added.len());
        let budget = SearchBudget { grid: 24, refine: 20, directions: 64 };
        let bad = e.verify_added(400, 1, &budget).unwrap();
        assert!(bad.is_empty(), "{bad:?}");
    }
}
