//! Real coincidence regions, their membership predicates, boundary
//! distances, the edge-of-the-wedge complex thickening, and the Pflug
//! growth functions.
//!
//! Every region is open; points within [`TAU_CLASS`] of the boundary count
//! as outside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{ComplexPoint2, RealPoint2, TAU_CLASS};
use crate::sampling::{Halton, SampleConfig};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;
const FWD_RIGHT: RealPoint2 = RealPoint2::new(SQRT_HALF, SQRT_HALF);
const FWD_LEFT: RealPoint2 = RealPoint2::new(SQRT_HALF, -SQRT_HALF);

/// Real coincidence-region primitives. JSON form: `{"type": "<Tag>", ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Region {
    /// `apex + V⁺`
    ForwardCone {
        #[serde(default)]
        apex: RealPoint2,
    },
    /// `apex + V⁻`
    BackwardCone {
        #[serde(default)]
        apex: RealPoint2,
    },
    /// `apex + V_μ⁺`, `V_μ⁺ = {x² > μ², x₀ > 0}`
    MuCone {
        mu: f64,
        #[serde(default)]
        apex: RealPoint2,
    },
    /// `(a + V⁺) ∩ (b + V⁻)`
    DoubleCone {
        a: RealPoint2,
        b: RealPoint2,
    },
    /// Points spacelike to every point of the double cone spanned by `a`, `b`.
    SpacelikeComplementOfDoubleCone {
        a: RealPoint2,
        b: RealPoint2,
    },
    /// `{x² < 0}`
    SpacelikeSet {},
    /// `{√(x₁² + m1²) < x₀ < √(x₁² + m2²)}`
    HyperboloidShell {
        m1: f64,
        m2: f64,
    },
    /// `shift + {x² < 0, x₁ > 0}`
    Wedge {
        #[serde(default)]
        shift: RealPoint2,
    },
    /// `{x ∈ V⁻, 0 < x² < 1/m²}`
    ShellCap {
        m: f64,
    },
    UnionOf {
        parts: Vec<Region>,
    },
}

impl Region {
    pub fn forward_cone(apex: RealPoint2) -> Self {
        Region::ForwardCone { apex }
    }

    pub fn mu_cone(mu: f64) -> Self {
        Region::MuCone { mu, apex: RealPoint2::ORIGIN }
    }

    pub fn double_cone(a: RealPoint2, b: RealPoint2) -> Result<Self> {
        let r = Region::DoubleCone { a, b };
        r.validate()?;
        Ok(r)
    }

    pub fn shell(m1: f64, m2: f64) -> Result<Self> {
        let r = Region::HyperboloidShell { m1, m2 };
        r.validate()?;
        Ok(r)
    }

    /// Parses the JSON schema and validates the parameters.
    pub fn from_json(s: &str) -> Result<Self> {
        let r: Region = serde_json::from_str(s).map_err(|e| Error::InvalidRegion(e.to_string()))?;
        r.validate()?;
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("region serializes")
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Region::ForwardCone { .. } => "ForwardCone",
            Region::BackwardCone { .. } => "BackwardCone",
            Region::MuCone { .. } => "MuCone",
            Region::DoubleCone { .. } => "DoubleCone",
            Region::SpacelikeComplementOfDoubleCone { .. } => "SpacelikeComplementOfDoubleCone",
            Region::SpacelikeSet {} => "SpacelikeSet",
            Region::HyperboloidShell { .. } => "HyperboloidShell",
            Region::Wedge { .. } => "Wedge",
            Region::ShellCap { .. } => "ShellCap",
            Region::UnionOf { .. } => "UnionOf",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |p: &RealPoint2, what: &str| {
            if p.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidRegion(format!("{what} is not finite")))
            }
        };
        match self {
            Region::ForwardCone { apex } | Region::BackwardCone { apex } => finite(apex, "apex"),
            Region::MuCone { mu, apex } => {
                finite(apex, "apex")?;
                if !(mu.is_finite() && *mu >= 0.0) {
                    return Err(Error::InvalidRegion(format!("MuCone needs mu >= 0, got {mu}")));
                }
                Ok(())
            }
            Region::DoubleCone { a, b } | Region::SpacelikeComplementOfDoubleCone { a, b } => {
                finite(a, "a")?;
                finite(b, "b")?;
                let d = *b - *a;
                if !(d.square() > TAU_CLASS && d.t > 0.0) {
                    return Err(Error::InvalidRegion(format!("double cone needs b - a forward timelike, got {d:?}")));
                }
                Ok(())
            }
            Region::SpacelikeSet {} => Ok(()),
            Region::HyperboloidShell { m1, m2 } => {
                if !(m1.is_finite() && m2.is_finite() && *m1 > 0.0 && m1 < m2) {
                    return Err(Error::InvalidRegion(format!("HyperboloidShell needs 0 < m1 < m2, got ({m1}, {m2})")));
                }
                Ok(())
            }
            Region::Wedge { shift } => finite(shift, "shift"),
            Region::ShellCap { m } => {
                if !(m.is_finite() && *m > 0.0) {
                    return Err(Error::InvalidRegion(format!("ShellCap needs m > 0, got {m}")));
                }
                Ok(())
            }
            Region::UnionOf { parts } => parts.iter().try_for_each(Region::validate),
        }
    }

    pub fn contains(&self, p: RealPoint2) -> bool {
        contains(self, p)
    }

    pub fn boundary_distance(&self, p: RealPoint2) -> f64 {
        boundary_distance(self, p)
    }

    /// Distance to the boundary, positive inside and negative outside.
    pub fn signed_distance(&self, p: RealPoint2) -> f64 {
        let d = boundary_distance(self, p);
        if contains(self, p) {
            d
        } else {
            -d
        }
    }

    /// `r + V⁺ = r`.
    pub fn is_forward_invariant(&self) -> bool {
        match self {
            Region::ForwardCone { .. } | Region::MuCone { .. } => true,
            Region::UnionOf { parts } => !parts.is_empty() && parts.iter().all(Region::is_forward_invariant),
            _ => false,
        }
    }

    /// `r + W = r` for the right wedge `W`.
    pub fn is_wedge_invariant(&self) -> bool {
        match self {
            Region::Wedge { .. } => true,
            Region::UnionOf { parts } => !parts.is_empty() && parts.iter().all(Region::is_wedge_invariant),
            _ => false,
        }
    }

    /// Whether the region is bounded (compact closure).
    pub fn is_bounded(&self) -> bool {
        match self {
            Region::DoubleCone { .. } => true,
            Region::UnionOf { parts } => parts.iter().all(Region::is_bounded),
            _ => false,
        }
    }
}

/// Light-cone corners of the double cone spanned by `a`, `b`: `(right, left)`,
/// where `right` lies on the ray `a + s(1, 1)` and `left` on `a + s(1, −1)`.
pub fn double_cone_corners(a: RealPoint2, b: RealPoint2) -> (RealPoint2, RealPoint2) {
    let d = b - a;
    let (u, v) = d.light_cone();
    let right = a + RealPoint2::new(0.5 * u, 0.5 * u);
    let left = a + RealPoint2::new(0.5 * v, -0.5 * v);
    (right, left)
}

#[inline]
pub(crate) fn in_forward_cone(d: RealPoint2) -> bool {
    d.t > 0.0 && d.square() > TAU_CLASS
}

#[inline]
pub(crate) fn in_backward_cone(d: RealPoint2) -> bool {
    d.t < 0.0 && d.square() > TAU_CLASS
}

/// Outside the closed forward cone, with the tolerance band counted as inside it.
#[inline]
fn outside_closed_forward(d: RealPoint2) -> bool {
    !(d.square() >= -TAU_CLASS && d.t >= -TAU_CLASS)
}

#[inline]
fn outside_closed_backward(d: RealPoint2) -> bool {
    !(d.square() >= -TAU_CLASS && d.t <= TAU_CLASS)
}

/// Strict-interior membership.
pub fn contains(r: &Region, p: RealPoint2) -> bool {
    match r {
        Region::ForwardCone { apex } => in_forward_cone(p - *apex),
        Region::BackwardCone { apex } => in_backward_cone(p - *apex),
        Region::MuCone { mu, apex } => {
            let d = p - *apex;
            d.t > 0.0 && d.square() - mu * mu > TAU_CLASS
        }
        Region::DoubleCone { a, b } => in_forward_cone(p - *a) && in_backward_cone(p - *b),
        Region::SpacelikeComplementOfDoubleCone { a, b } => {
            outside_closed_forward(p - *a) && outside_closed_backward(p - *b)
        }
        Region::SpacelikeSet {} => p.square() < -TAU_CLASS,
        Region::HyperboloidShell { m1, m2 } => {
            let lo = (p.x * p.x + m1 * m1).sqrt();
            let hi = (p.x * p.x + m2 * m2).sqrt();
            p.t - lo > TAU_CLASS && hi - p.t > TAU_CLASS
        }
        Region::Wedge { shift } => {
            let d = p - *shift;
            d.square() < -TAU_CLASS && d.x > 0.0
        }
        Region::ShellCap { m } => {
            let sq = p.square();
            p.t < 0.0 && sq > TAU_CLASS && sq < 1.0 / (m * m) - TAU_CLASS
        }
        Region::UnionOf { parts } => parts.iter().any(|q| contains(q, p)),
    }
}

fn dist_to_ray(p: RealPoint2, origin: RealPoint2, dir: RealPoint2) -> f64 {
    let d = p - origin;
    let s = (d.t * dir.t + d.x * dir.x).max(0.0);
    (d - dir.scale(s)).norm()
}

fn dist_to_segment(p: RealPoint2, a: RealPoint2, b: RealPoint2) -> f64 {
    let e = b - a;
    let len2 = e.t * e.t + e.x * e.x;
    if len2 == 0.0 {
        return p.distance(&a);
    }
    let d = p - a;
    let s = ((d.t * e.t + d.x * e.x) / len2).clamp(0.0, 1.0);
    (d - e.scale(s)).norm()
}

fn forward_rays_distance(p: RealPoint2, apex: RealPoint2) -> f64 {
    dist_to_ray(p, apex, FWD_RIGHT).min(dist_to_ray(p, apex, FWD_LEFT))
}

fn backward_rays_distance(p: RealPoint2, apex: RealPoint2) -> f64 {
    dist_to_ray(p, apex, -FWD_LEFT).min(dist_to_ray(p, apex, -FWD_RIGHT))
}

/// Euclidean distance from `p` to the hyperbola branch `sign·mass·(cosh θ, sinh θ)`.
pub(crate) fn hyperbola_branch_distance(p: RealPoint2, mass: f64, sign: f64) -> f64 {
    if mass <= 0.0 {
        return if sign > 0.0 {
            forward_rays_distance(p, RealPoint2::ORIGIN)
        } else {
            backward_rays_distance(p, RealPoint2::ORIGIN)
        };
    }
    let f = |th: f64| {
        let q = RealPoint2::new(sign * mass * th.cosh(), mass * th.sinh());
        let d = p - q;
        d.t * d.t + d.x * d.x
    };
    // Beyond |θ| = asinh((‖p‖ + 1)/mass) + 1 every branch point is farther than the vertex.
    let lim = ((p.norm() + 1.0) / mass).asinh() + 1.0;
    let n = 256;
    let h = 2.0 * lim / n as f64;
    let mut best = (f(-lim), 0usize);
    for i in 1..=n {
        let v = f(-lim + h * i as f64);
        if v < best.0 {
            best = (v, i);
        }
    }
    let c = -lim + h * best.1 as f64;
    let (mut lo, mut hi) = (c - h, c + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-13 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2).min(best.0).sqrt()
}

/// Euclidean distance from `p` to `∂r`.
///
/// Closed form for piecewise-linear boundaries; the hyperbolic pieces are
/// projected numerically (golden section, 1e-13 in rapidity). For unions the
/// value is exact when the parts are disjoint and a lower bound otherwise.
pub fn boundary_distance(r: &Region, p: RealPoint2) -> f64 {
    match r {
        Region::ForwardCone { apex } => forward_rays_distance(p, *apex),
        Region::BackwardCone { apex } => backward_rays_distance(p, *apex),
        Region::MuCone { mu, apex } => hyperbola_branch_distance(p - *apex, *mu, 1.0),
        Region::DoubleCone { a, b } => {
            let (right, left) = double_cone_corners(*a, *b);
            [
                dist_to_segment(p, *a, right),
                dist_to_segment(p, *a, left),
                dist_to_segment(p, right, *b),
                dist_to_segment(p, left, *b),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min)
        }
        Region::SpacelikeComplementOfDoubleCone { a, b } => {
            // ∂ is four rays leaving the two side corners
            let (right, left) = double_cone_corners(*a, *b);
            [
                dist_to_ray(p, right, FWD_RIGHT),
                dist_to_ray(p, right, -FWD_LEFT),
                dist_to_ray(p, left, FWD_LEFT),
                dist_to_ray(p, left, -FWD_RIGHT),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min)
        }
        Region::SpacelikeSet {} => {
            forward_rays_distance(p, RealPoint2::ORIGIN).min(backward_rays_distance(p, RealPoint2::ORIGIN))
        }
        Region::HyperboloidShell { m1, m2 } => {
            hyperbola_branch_distance(p, *m1, 1.0).min(hyperbola_branch_distance(p, *m2, 1.0))
        }
        Region::Wedge { shift } => dist_to_ray(p, *shift, FWD_RIGHT).min(dist_to_ray(p, *shift, -FWD_LEFT)),
        Region::ShellCap { m } => {
            backward_rays_distance(p, RealPoint2::ORIGIN).min(hyperbola_branch_distance(p, 1.0 / m, -1.0))
        }
        Region::UnionOf { parts } => {
            let inside: Vec<f64> = parts.iter().filter(|q| contains(q, p)).map(|q| boundary_distance(q, p)).collect();
            if inside.is_empty() {
                parts.iter().map(|q| boundary_distance(q, p)).fold(f64::INFINITY, f64::min)
            } else {
                inside.into_iter().fold(0.0, f64::max)
            }
        }
    }
}

/// Witness search used by [`edge_neighborhood_contains`]: `rings × per_ring`
/// points on concentric circles of radius up to `33·‖Im z‖` around `Re z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSearch {
    pub rings: usize,
    pub per_ring: usize,
}

impl Default for EdgeSearch {
    fn default() -> Self {
        Self { rings: 8, per_ring: 8 }
    }
}

/// Membership in the thickening `⋃_{x∈r} {z : ‖z − x‖ < dist(x, ∂r)/32}`.
pub fn edge_neighborhood_contains(r: &Region, z: ComplexPoint2) -> bool {
    edge_neighborhood_contains_with(r, z, EdgeSearch::default())
}

pub fn edge_neighborhood_contains_with(r: &Region, z: ComplexPoint2, search: EdgeSearch) -> bool {
    let x = z.re();
    let y = z.im();
    let ny = y.norm();
    let witness = |c: RealPoint2| -> bool {
        if !contains(r, c) {
            return false;
        }
        let dz = (x - c).norm().hypot(ny);
        dz < boundary_distance(r, c) / 32.0
    };
    if witness(x) {
        return true;
    }
    if ny == 0.0 {
        return false;
    }
    let radius = 33.0 * ny;
    for k in 1..=search.rings {
        let rad = radius * k as f64 / search.rings as f64;
        for j in 0..search.per_ring {
            let ang = std::f64::consts::TAU * (j as f64 + 0.5 * (k % 2) as f64) / search.per_ring as f64;
            if witness(x + RealPoint2::new(rad * ang.cos(), rad * ang.sin())) {
                return true;
            }
        }
    }
    false
}

/// Pflug's growth functions at a point with boundary distance `zdist` and norm `znorm`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEval {
    /// `min{dist, (1 + ‖z‖²)^(−1/2)}`
    pub delta: f64,
    /// `(1 + ‖z‖²)^(−1/2) · min{1, dist}`
    pub delta_tilde: f64,
}

impl GrowthEval {
    /// Slack of `Δ² ≤ Δ̃ ≤ Δ`, the smaller of the two gaps.
    pub fn inequality_slack(&self) -> f64 {
        (self.delta_tilde - self.delta * self.delta).min(self.delta - self.delta_tilde)
    }
}

pub fn pflug_growth(zdist: f64, znorm: f64) -> Result<GrowthEval> {
    if !(zdist > 0.0) || !znorm.is_finite() {
        return Err(Error::PreconditionFailed(format!(
            "pflug_growth needs zdist > 0 and finite norm, got ({zdist}, {znorm})"
        )));
    }
    let w = 1.0 / (1.0 + znorm * znorm).sqrt();
    Ok(GrowthEval { delta: zdist.min(w), delta_tilde: w * zdist.min(1.0) })
}

/// Deterministic quasi-random points of `r`, at most `cfg.nsamples`.
///
/// Cones and shells are sampled in (mass, rapidity) coordinates with the mass
/// excess log-spaced down to 1e-9 so the hyperbolic boundary is resolved;
/// double cones in light-cone coordinates; everything else by rejection from
/// the box of half-width `cfg.radius`.
pub fn sample_region(r: &Region, cfg: &SampleConfig) -> Vec<RealPoint2> {
    let n = cfg.nsamples;
    let mut out = Vec::with_capacity(n);
    match r {
        Region::ForwardCone { apex } => mass_samples(*apex, 0.0, cfg, &mut out),
        Region::MuCone { mu, apex } => mass_samples(*apex, *mu, cfg, &mut out),
        Region::BackwardCone { apex } => {
            mass_samples(RealPoint2::ORIGIN, 0.0, cfg, &mut out);
            for p in out.iter_mut() {
                *p = *apex - *p;
            }
        }
        Region::DoubleCone { a, b } => {
            let (u, v) = (*b - *a).light_cone();
            for [s, w] in Halton::<2>::new(cfg.seed).take(n) {
                let p = *a + RealPoint2::from_light_cone(s * u, w * v);
                if contains(r, p) {
                    out.push(p);
                }
            }
        }
        Region::HyperboloidShell { m1, m2 } => {
            for [s, w] in Halton::<2>::new(cfg.seed).take(n) {
                // cluster masses toward both boundary hyperbolas
                let c = 0.5 - 0.5 * (std::f64::consts::PI * s).cos();
                let m = m1 + (m2 - m1) * c;
                let lim = (cfg.radius / m).max(1.0).acosh();
                let th = (2.0 * w - 1.0) * lim;
                let p = RealPoint2::new(m * th.cosh(), m * th.sinh());
                if contains(r, p) {
                    out.push(p);
                }
            }
        }
        Region::UnionOf { parts } => {
            if parts.is_empty() {
                return out;
            }
            let k = parts.len();
            for (i, q) in parts.iter().enumerate() {
                let sub = SampleConfig {
                    nsamples: n / k + usize::from(i < n % k),
                    seed: cfg.seed.wrapping_add(i as u64),
                    ..*cfg
                };
                out.extend(sample_region(q, &sub));
            }
        }
        _ => {
            let rad = cfg.radius;
            for [s, w] in Halton::<2>::new(cfg.seed).take(n) {
                let p = RealPoint2::new((2.0 * s - 1.0) * rad, (2.0 * w - 1.0) * rad);
                if contains(r, p) {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn mass_samples(apex: RealPoint2, mu: f64, cfg: &SampleConfig, out: &mut Vec<RealPoint2>) {
    let lo = 1e-9f64.ln();
    let hi = cfg.radius.max(1.0).ln();
    for [s, w] in Halton::<2>::new(cfg.seed).take(cfg.nsamples) {
        let m = mu + (lo + (hi - lo) * s).exp();
        let lim = (cfg.radius / m).max(1.0).acosh();
        let th = (2.0 * w - 1.0) * lim;
        let p = apex + RealPoint2::new(m * th.cosh(), m * th.sinh());
        if p.t - apex.t > 0.0 && (p - apex).square() - mu * mu > TAU_CLASS {
            out.push(p);
        }
    }
}
