//! Lorentz-invariant support sets in momentum space, their reflection
//! algebra, and the scan for a mass-gap contradiction.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::RealPoint2;
use crate::regions::Region;
use crate::sampling::{linspace, rng};

/// Bisection tolerance on the rapidity of the `q² = 0` crossing.
pub const THETA_TOL: f64 = 1e-10;
pub const THETA_MAX: f64 = 10.0;
pub const THETA_GRID: usize = 4001;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum SupportSet {
    /// `{p² = m², p₀ > 0}`
    MassShell {
        m: f64,
    },
    /// `{m² ≤ p² ≤ m1², p₀ > 0}`
    ShellBand {
        m: f64,
        m1: f64,
    },
    PointSet {
        pts: Vec<RealPoint2>,
    },
    Origin,
    UnionOf {
        parts: Vec<SupportSet>,
    },
    /// `c − of`
    Reflected {
        c: RealPoint2,
        of: Box<SupportSet>,
    },
}

impl SupportSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            SupportSet::MassShell { m } if !(m.is_finite() && *m > 0.0) => {
                Err(Error::InvalidSupport(format!("mass shell needs m > 0, got {m}")))
            }
            SupportSet::ShellBand { m, m1 } if !(m.is_finite() && *m > 0.0 && *m1 >= *m) => {
                Err(Error::InvalidSupport(format!("shell band needs 0 < m <= m1, got {m}, {m1}")))
            }
            SupportSet::PointSet { pts } if pts.iter().any(|p| !(p.t.is_finite() && p.x.is_finite())) => {
                Err(Error::InvalidSupport("point set has non-finite coordinates".into()))
            }
            SupportSet::UnionOf { parts } => parts.iter().try_for_each(SupportSet::validate),
            SupportSet::Reflected { c, of } => {
                if !(c.t.is_finite() && c.x.is_finite()) {
                    return Err(Error::InvalidSupport("reflection centre is not finite".into()));
                }
                of.validate()
            }
            _ => Ok(()),
        }
    }

    /// Membership with a tolerance on squares and coordinates.
    pub fn contains(&self, p: RealPoint2, tol: f64) -> bool {
        match self {
            SupportSet::MassShell { m } => p.t > 0.0 && (p.square() - m * m).abs() <= tol,
            SupportSet::ShellBand { m, m1 } => {
                let sq = p.square();
                p.t > 0.0 && sq >= m * m - tol && sq <= m1 * m1 + tol
            }
            SupportSet::PointSet { pts } => pts.iter().any(|q| q.distance(&p) <= tol),
            SupportSet::Origin => p.norm() <= tol,
            SupportSet::UnionOf { parts } => parts.iter().any(|s| s.contains(p, tol)),
            SupportSet::Reflected { c, of } => of.contains(*c - p, tol),
        }
    }

    /// `n` seeded sample points; shells are sampled in rapidity on `[−4, 4]`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<RealPoint2> {
        let mut g = rng(seed);
        self.sample_with(n, &mut g)
    }

    fn sample_with<R: Rng>(&self, n: usize, g: &mut R) -> Vec<RealPoint2> {
        match self {
            SupportSet::MassShell { m } => (0..n).map(|_| on_shell(*m, g.gen_range(-4.0..4.0))).collect(),
            SupportSet::ShellBand { m, m1 } => {
                (0..n).map(|_| on_shell(g.gen_range(*m..=*m1), g.gen_range(-4.0..4.0))).collect()
            }
            SupportSet::PointSet { pts } if pts.is_empty() => Vec::new(),
            SupportSet::PointSet { pts } => (0..n).map(|k| pts[k % pts.len()]).collect(),
            SupportSet::Origin => vec![RealPoint2::ORIGIN; n],
            SupportSet::UnionOf { parts } if parts.is_empty() => Vec::new(),
            SupportSet::UnionOf { parts } => {
                let per = n.div_ceil(parts.len());
                parts.iter().flat_map(|s| s.sample_with(per, g)).take(n).collect()
            }
            SupportSet::Reflected { c, of } => of.sample_with(n, g).into_iter().map(|p| *c - p).collect(),
        }
    }
}

fn on_shell(m: f64, theta: f64) -> RealPoint2 {
    RealPoint2::new(m * theta.cosh(), m * theta.sinh())
}

/// `c − S`. Reflecting a reflection about the same centre undoes it.
pub fn reflect_shift(s: &SupportSet, c: RealPoint2) -> SupportSet {
    match s {
        SupportSet::PointSet { pts } => SupportSet::PointSet { pts: pts.iter().map(|p| c - *p).collect() },
        SupportSet::Origin => SupportSet::PointSet { pts: vec![c] },
        SupportSet::UnionOf { parts } => {
            SupportSet::UnionOf { parts: parts.iter().map(|p| reflect_shift(p, c)).collect() }
        }
        SupportSet::Reflected { c: c0, of } if *c0 == c => (**of).clone(),
        _ => SupportSet::Reflected { c, of: Box::new(s.clone()) },
    }
}

/// Support of `F⁻`: `supp Ψ + supp Ψ − spectrum(U)`, for finite `supp Ψ`.
pub fn support_fminus(supp_psi: &SupportSet, spectrum_u: &SupportSet) -> Result<SupportSet> {
    supp_psi.validate()?;
    spectrum_u.validate()?;
    let pts = match supp_psi {
        SupportSet::PointSet { pts } => pts.clone(),
        SupportSet::Origin => vec![RealPoint2::ORIGIN],
        other => {
            return Err(Error::UnsupportedConfiguration(format!(
                "supp Psi must be a finite point set, got {}",
                serde_json::to_string(other).unwrap_or_default()
            )))
        }
    };
    let mut centres: Vec<RealPoint2> = Vec::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i..] {
            let c = *a + *b;
            if !centres.contains(&c) {
                centres.push(c);
            }
        }
    }
    let mut parts: Vec<SupportSet> = centres.into_iter().map(|c| reflect_shift(spectrum_u, c)).collect();
    Ok(if parts.len() == 1 { parts.remove(0) } else { SupportSet::UnionOf { parts } })
}

/// Spectrum assumed to lie in the band `m² ≤ p² ≤ m1²` (`m1` may be infinite),
/// with `supp Ψ` shrunk to the point `m·s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumHypothesis {
    pub m: f64,
    pub m1: f64,
    pub s: RealPoint2,
    pub epsilon: f64,
}

impl SpectrumHypothesis {
    pub fn new(m: f64, m1: f64, s: RealPoint2, epsilon: f64) -> Result<Self> {
        let h = Self { m, m1, s, epsilon };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite() && self.m > 0.0 && self.m1 >= self.m) {
            return Err(Error::PreconditionFailed(format!("need 0 < m <= m1, got {}, {}", self.m, self.m1)));
        }
        if !(self.s.t > 0.0 && (self.s.square() - 1.0).abs() <= 1e-9) {
            return Err(Error::PreconditionFailed(format!("s must be a forward unit vector, got {}", self.s)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::PreconditionFailed(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }

    pub fn band(&self) -> SupportSet {
        SupportSet::ShellBand { m: self.m, m1: self.m1 }
    }

    /// `q(θ) = 2m·s − m(cosh θ, sinh θ)`.
    pub fn q(&self, theta: f64) -> RealPoint2 {
        self.s.scale(2.0 * self.m) - on_shell(self.m, theta)
    }

    /// `q(θ)² = 5m² − 4m² cosh(θ − θ_s)`.
    pub fn q_square_closed_form(&self, theta: f64) -> f64 {
        let ts = rapidity(self.s);
        self.m * self.m * (5.0 - 4.0 * (theta - ts).cosh())
    }

    /// Whether `q(θ)` lies off `{0 ≤ p² ≤ m1²}`.
    pub fn is_witness(&self, theta: f64) -> bool {
        let sq = self.q(theta).square();
        sq < 0.0 || sq > self.m1 * self.m1
    }

    pub fn witness_at(&self, theta: f64) -> Option<MassGapWitness> {
        (self.m1.is_finite() && self.is_witness(theta)).then(|| MassGapWitness::at(self, theta, None))
    }
}

fn rapidity(s: RealPoint2) -> f64 {
    (s.x / s.t).atanh()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassGapWitness {
    pub theta: f64,
    pub q: RealPoint2,
    pub q_square: f64,
    /// Rapidity where `q²` crosses the witness threshold, bisected to [`THETA_TOL`].
    pub crossing: Option<f64>,
}

impl MassGapWitness {
    fn at(h: &SpectrumHypothesis, theta: f64, crossing: Option<f64>) -> Self {
        let q = h.q(theta);
        Self { theta, q, q_square: q.square(), crossing }
    }
}

/// Region where the two boundary values agree:
/// `{p² > m1², p₀ > 0} ∪ (D_{0,(2m+ε)s})′`. The cone is dropped for `m1 = ∞`.
pub fn coincidence_region(h: &SpectrumHypothesis) -> Result<Region> {
    h.validate()?;
    let mut parts = Vec::new();
    if h.m1.is_finite() {
        parts.push(Region::mu_cone(h.m1));
    }
    parts.push(Region::SpacelikeComplementOfDoubleCone { a: RealPoint2::ORIGIN, b: h.s.scale(2.0 * h.m + h.epsilon) });
    Ok(Region::UnionOf { parts })
}

/// Scans `θ ∈ [−10, 10]` on a 4001-point grid, walking outward from the
/// rapidity of `s` (positive side first at each step), and returns the first
/// grid point where `q(θ)` leaves `{0 ≤ p² ≤ m1²}`. `None` for `m1 = ∞`.
pub fn massgap_contradiction(h: &SpectrumHypothesis) -> Result<Option<MassGapWitness>> {
    h.validate()?;
    if !h.m1.is_finite() {
        return Ok(None);
    }
    let grid = linspace(-THETA_MAX, THETA_MAX, THETA_GRID);
    let ts = rapidity(h.s);
    let start = grid
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - ts).abs().total_cmp(&(b.1 - ts).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let n = grid.len() as isize;
    for k in 0..n {
        for idx in [start as isize + k, start as isize - k] {
            if k == 0 && idx != start as isize {
                continue;
            }
            if !(0..n).contains(&idx) {
                continue;
            }
            let i = idx as usize;
            if h.is_witness(grid[i]) {
                let prev = if idx > start as isize { i - 1 } else { i + 1 };
                let crossing = (i != start && !h.is_witness(grid[prev])).then(|| bisect(h, grid[prev], grid[i]));
                return Ok(Some(MassGapWitness::at(h, grid[i], crossing)));
            }
            if k == 0 {
                break;
            }
        }
    }
    Ok(None)
}

fn bisect(h: &SpectrumHypothesis, mut inside: f64, mut outside: f64) -> f64 {
    while (outside - inside).abs() > THETA_TOL {
        let mid = 0.5 * (inside + outside);
        if h.is_witness(mid) {
            outside = mid;
        } else {
            inside = mid;
        }
    }
    0.5 * (inside + outside)
}
