//! Cross-checks of the closed-form predicates against independent routes:
//! witness searches, constrained minimization and direct sampling.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admissible::{plane_slack, PlaneParam};
use crate::continuation::{
    build_hyperbola_family, max_principle_check, random_holomorphic, run_rational_suite, AnalyticPatch,
    ContinuationConfig, CurveFamily, MaxPrincipleReport, SuiteReport,
};
use crate::envelopes::{envelope_mu_cone, envelope_shell_complement, g1_bounds, EnvelopeVerdict, TOL_ENV};
use crate::error::{Error, Result};
use crate::minkowski::{hat_dual, ComplexPoint2, RealPoint2, TAU_CLASS};
use crate::regions::{boundary_distance, contains, edge_neighborhood_contains, pflug_growth, sample_region, Region};
use crate::sampling::{linspace, rng, Halton, SampleConfig};
use crate::spectral::{massgap_contradiction, SpectrumHypothesis, THETA_MAX};
use crate::transforms::{check_phi_properties, phi};

pub const SUITES: [&str; 9] = [
    "inversion",
    "mu-cone",
    "band-boundary",
    "shell-complement",
    "cauchy",
    "max-principle",
    "pflug",
    "spacelike-complement",
    "massgap",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub seed: u64,
    /// Sample count; each suite has its own default.
    pub n: Option<usize>,
    /// Grid resolution per axis where a suite uses one.
    pub grid: Option<usize>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { seed: crate::sampling::DEFAULT_SEED, n: None, grid: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub suite: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    pub max_deviation: f64,
    pub metrics: BTreeMap<String, f64>,
}

impl OracleReport {
    fn new(suite: &str, checks: usize, failures: usize, max_deviation: f64, passed: bool) -> Self {
        Self { suite: suite.into(), passed, checks, failures, max_deviation, metrics: BTreeMap::new() }
    }

    fn with(mut self, key: &str, v: f64) -> Self {
        self.metrics.insert(key.into(), v);
        self
    }
}

pub fn run_suite(name: &str, cfg: &OracleConfig) -> Result<OracleReport> {
    match name {
        "inversion" => Ok(inversion(cfg)),
        "mu-cone" => mu_cone(cfg),
        "band-boundary" => band_boundary(cfg),
        "shell-complement" => shell_complement(cfg),
        "cauchy" => cauchy(),
        "max-principle" => max_principle(cfg),
        "pflug" => pflug(cfg),
        "spacelike-complement" => spacelike_complement(cfg),
        "massgap" => massgap(cfg),
        other => {
            Err(Error::PreconditionFailed(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", "))))
        }
    }
}

pub fn inversion(cfg: &OracleConfig) -> OracleReport {
    let r = check_phi_properties(cfg.n.unwrap_or(100_000), cfg.seed);
    let failures = r.tube_violations
        + r.cone_violations
        + r.spacelike_violations
        + r.double_cone_to_cone_violations
        + r.cone_to_double_cone_violations;
    OracleReport::new("inversion", r.samples, failures, r.involution_max, r.passed())
        .with("near_singular", r.near_singular as f64)
        .with("tube_violations", r.tube_violations as f64)
        .with("cone_violations", r.cone_violations as f64)
        .with("spacelike_violations", r.spacelike_violations as f64)
        .with("double_cone_to_cone_violations", r.double_cone_to_cone_violations as f64)
        .with("cone_to_double_cone_violations", r.cone_to_double_cone_violations as f64)
}

/// Half-width of the band around the mu-cone boundary where the two routes may disagree.
pub const MU_CONE_BAND: f64 = 1e-3;
pub const DIRECTIONS: usize = 256;

/// Independent exclusion test for a spacelike imaginary part: look for a
/// plane normal `a = ±(1, s)` with `a·y = 0` (coarse scan over
/// [`DIRECTIONS`] values of `s`, then bisection) and ask the admissibility
/// module whether the plane through `re z` with that normal is admissible.
pub fn plane_witness_excluded(z: ComplexPoint2, mu: f64) -> bool {
    let y = z.im();
    let f = |s: f64| -y.t + s * y.x;
    let ss = linspace(-1.0, 1.0, DIRECTIONS);
    let Some(k) = (0..DIRECTIONS - 1).find(|&k| f(ss[k]).signum() != f(ss[k + 1]).signum() || f(ss[k]) == 0.0) else {
        return false;
    };
    let (mut lo, mut hi) = (ss[k], ss[k + 1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo).signum() == f(mid).signum() && f(mid) != 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let r = Region::mu_cone(mu);
    [RealPoint2::new(-1.0, -s), RealPoint2::new(1.0, s)]
        .into_iter()
        .any(|a| PlaneParam::new(z.re(), a).map(|p| plane_slack(&p, &r) >= 0.0).unwrap_or(false))
}

pub fn mu_cone(cfg: &OracleConfig) -> Result<OracleReport> {
    let n = cfg.n.unwrap_or(1000);
    let mu = 1.0;
    let pts: Vec<ComplexPoint2> = Halton::<4>::new(cfg.seed)
        .take(n)
        .map(|[a, b, c, d]| {
            let x = RealPoint2::new(8.0 * a - 4.0, 8.0 * b - 4.0);
            let y1 = (0.1 + 2.9 * c) * if d < 0.5 { -1.0 } else { 1.0 };
            let frac = (2.0 * d).fract();
            let y0 = y1.abs() * 0.95 * (2.0 * frac - 1.0);
            ComplexPoint2::from_parts(x, RealPoint2::new(y0, y1))
        })
        .collect();
    let rows: Vec<(bool, f64, bool)> = pts
        .par_iter()
        .map(|z| {
            let closed = envelope_mu_cone(*z, mu).map(|v| v.is_excluded()).unwrap_or(false);
            let band = (z.re().dot(&hat_dual(z.im()).expect("spacelike")) - mu).abs();
            (closed == plane_witness_excluded(*z, mu), band, closed)
        })
        .collect();
    let excluded = rows.iter().filter(|r| r.2).count();
    let disagreements: Vec<f64> = rows.iter().filter(|r| !r.0).map(|r| r.1).collect();
    let outside_band = disagreements.iter().filter(|b| **b >= MU_CONE_BAND).count();
    let agreement = 1.0 - disagreements.len() as f64 / n as f64;
    let passed = agreement >= 0.999 && outside_band == 0;
    Ok(OracleReport::new("mu-cone", n, disagreements.len(), disagreements.iter().copied().fold(0.0, f64::max), passed)
        .with("agreement", agreement)
        .with("excluded", excluded as f64)
        .with("disagreements_outside_band", outside_band as f64))
}

/// Extremum of `x₀` over points `x = x′ ∓ k·ŷ` with `x₁` fixed, `x′` on the
/// hyperbola of mass `α ≥ 0`, `k = √(λ² + y²)`, and `(α, λ)` ranging over the
/// admissible box `λ ≥ max{m₂ − α, α − m₁}`. Lower sign and maximum give the
/// lower bound; upper sign and minimum the upper.
pub fn band_extremum(x1: f64, y: RealPoint2, m1: f64, m2: f64, upper: bool, grid: usize) -> f64 {
    let yh = hat_dual(y).expect("spacelike");
    let sign = if upper { 1.0 } else { -1.0 };
    let ysq = y.square();
    // maximize `score`
    let score = |alpha: f64, d: f64| -> f64 {
        let lam = (m2 - alpha).max(alpha - m1) + d;
        let k = (lam * lam + ysq).max(0.0).sqrt();
        let xp1 = x1 - sign * k * yh.x;
        let x0 = (alpha * alpha + xp1 * xp1).sqrt() + sign * k * yh.t;
        if upper {
            -x0
        } else {
            x0
        }
    };
    let (amax, dmax) = (2.0 * (m1 + m2), 2.0 * (m2 - m1) + 4.0);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for a in linspace(0.0, amax, grid) {
        for d in linspace(0.0, dmax, grid) {
            let v = score(a, d);
            if v > best.0 {
                best = (v, a, d);
            }
        }
    }
    let (mut v, mut a, mut d) = best;
    let mut step = amax / grid as f64;
    let dirs = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)];
    while step > 1e-13 {
        let mut moved = false;
        for (da, dd) in dirs {
            let (na, nd) = ((a + da * step).clamp(0.0, amax), (d + dd * step).clamp(0.0, dmax));
            let nv = score(na, nd);
            if nv > v {
                (v, a, d, moved) = (nv, na, nd, true);
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    if upper {
        -v
    } else {
        v
    }
}

pub const BAND_TOL: f64 = 1e-6;

pub fn band_boundary(cfg: &OracleConfig) -> Result<OracleReport> {
    let g = cfg.grid.unwrap_or(50);
    let (m1, m2) = (1.0, 3.0);
    let y0 = 0.25;
    let half = g / 2;
    let mut y1s = linspace(0.3, 1.0, half);
    y1s.extend(linspace(0.3, 1.0, g - half).into_iter().map(|v| -v));
    let cells: Vec<(f64, f64)> =
        linspace(-2.0, 2.0, g).into_iter().flat_map(|x1| y1s.iter().map(move |y1| (x1, *y1))).collect();
    let devs: Vec<f64> = cells
        .par_iter()
        .map(|&(x1, y1)| {
            let y = RealPoint2::new(y0, y1);
            match g1_bounds(x1, y, m1, m2) {
                None => f64::INFINITY,
                Some((lo, hi)) => {
                    let olo = band_extremum(x1, y, m1, m2, false, 50);
                    let ohi = band_extremum(x1, y, m1, m2, true, 50);
                    (lo - olo).abs().max((hi - ohi).abs())
                }
            }
        })
        .collect();
    let max_dev = devs.iter().copied().fold(0.0, f64::max);
    let failures = devs.iter().filter(|d| !(**d <= BAND_TOL)).count();
    Ok(OracleReport::new("band-boundary", cells.len(), failures, max_dev, failures == 0))
}

pub fn shell_complement(cfg: &OracleConfig) -> Result<OracleReport> {
    let m = 1.0;
    let n = cfg.n.unwrap_or(10_000);
    let g = cfg.grid.unwrap_or(200);
    let mut g_rng = rng(cfg.seed);

    // (a) real slice
    let mut real_fail = 0;
    for t in linspace(-3.0, 3.0, g) {
        for x in linspace(-3.0, 3.0, g) {
            let p = RealPoint2::new(t, x);
            let sq = p.square();
            if sq.abs() <= TOL_ENV || (sq - m * m).abs() <= TOL_ENV {
                continue;
            }
            let inside = envelope_shell_complement(p.complexify(), m)?.is_inside();
            if inside != (sq > m * m || sq < 0.0) {
                real_fail += 1;
            }
        }
    }

    // (b) the mass-cone envelope and the complexified spacelike set lie inside
    let spacelike = Region::SpacelikeSet {};
    let mut incl_fail = 0;
    let mut incl_checked = 0;
    for _ in 0..n {
        let x = RealPoint2::new(g_rng.gen_range(-4.0..4.0), g_rng.gen_range(-4.0..4.0));
        let scale = 10f64.powf(g_rng.gen_range(-4.0..0.5));
        let y = RealPoint2::new(g_rng.gen_range(-1.0..1.0), g_rng.gen_range(-1.0..1.0)).scale(scale);
        let z = ComplexPoint2::from_parts(x, y);
        let hyp = envelope_mu_cone(z, m)?.is_inside() || edge_neighborhood_contains(&spacelike, z);
        if hyp {
            incl_checked += 1;
            if envelope_shell_complement(z, m)?.is_excluded() {
                incl_fail += 1;
            }
        }
    }

    // (c) inversion maps the excluded quadric segment onto {w² ≥ 1/m² real}
    let mut inv_fail = 0;
    let mut inv_checked = 0;
    for i in 0..n {
        let z = if i % 2 == 0 {
            let rho: f64 = g_rng.gen_range(0.0..1.2) * m * m;
            let w = num_complex::Complex64::new(g_rng.gen_range(-2.0..2.0), g_rng.gen_range(-1.5..1.5));
            let r = rho.sqrt();
            ComplexPoint2::new(w.cosh() * r, w.sinh() * r)
        } else {
            ComplexPoint2::from_parts(
                RealPoint2::new(g_rng.gen_range(-3.0..3.0), g_rng.gen_range(-3.0..3.0)),
                RealPoint2::new(g_rng.gen_range(-1.0..1.0), g_rng.gen_range(-1.0..1.0)),
            )
        };
        let sq = z.square();
        if sq.norm() <= 1e-6 {
            continue;
        }
        let v = envelope_shell_complement(z, m)?;
        if matches!(v, EnvelopeVerdict::Boundary { .. }) {
            continue;
        }
        let Ok(w) = phi(z) else { continue };
        let ws = w.square();
        // relative tolerance on the image quadric
        let tol = 1e-9 * (1.0 + ws.norm());
        if (ws.re - 1.0 / (m * m)).abs() <= tol {
            continue;
        }
        inv_checked += 1;
        let excluded_image = ws.im.abs() <= tol && ws.re >= 1.0 / (m * m);
        if v.is_inside() == excluded_image {
            inv_fail += 1;
        }
    }
    let failures = real_fail + incl_fail + inv_fail;
    Ok(OracleReport::new("shell-complement", g * g + incl_checked + inv_checked, failures, 0.0, failures == 0)
        .with("real_grid_failures", real_fail as f64)
        .with("inclusion_checked", incl_checked as f64)
        .with("inclusion_failures", incl_fail as f64)
        .with("inversion_checked", inv_checked as f64)
        .with("inversion_failures", inv_fail as f64))
}

/// Family used by the continuation suites.
pub fn canonical_family() -> Result<CurveFamily> {
    build_hyperbola_family(RealPoint2::new(0.0, 1.0), -0.8, RealPoint2::new(1.0, 0.0), 1.0)
}

pub fn canonical_alphas(fam: &CurveFamily) -> Vec<f64> {
    vec![0.0, 0.5 * fam.alpha_star, fam.alpha_star, 2.0 * fam.alpha_star]
}

pub fn cauchy() -> Result<OracleReport> {
    let fam = canonical_family()?;
    let rep: SuiteReport = run_rational_suite(&fam, &canonical_alphas(&fam), &ContinuationConfig::default())?;
    Ok(OracleReport::new("cauchy", rep.functions, usize::from(!rep.passed()), rep.max_error, rep.passed())
        .with("max_error_doubled", rep.max_error_doubled)
        .with("doubling_ratio", rep.doubling_ratio())
        .with("max_estimate", rep.max_estimate))
}

/// 20 patches: four shifts times five sub-windows of the canonical family.
pub fn canonical_patches() -> Result<Vec<AnalyticPatch>> {
    let fam = canonical_family()?;
    let (lo, hi) = fam.window;
    let w = (hi - lo) / 5.0;
    let mut out = Vec::new();
    for alpha in canonical_alphas(&fam) {
        for k in 0..5 {
            let a = lo + w * k as f64;
            out.push(AnalyticPatch::new(fam.clone(), alpha, (a, a + w)));
        }
    }
    Ok(out)
}

pub fn max_principle(cfg: &OracleConfig) -> Result<OracleReport> {
    let patches = canonical_patches()?;
    let nf = cfg.n.unwrap_or(50);
    let grid = cfg.grid.unwrap_or(24);
    let reps: Vec<MaxPrincipleReport> = patches
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, patch)| {
            (0..nf).map(move |j| {
                let f = random_holomorphic(cfg.seed.wrapping_add((i * nf + j) as u64), patch);
                max_principle_check(patch, &|z| f.eval(z), grid)
            })
        })
        .collect();
    let failures = reps.iter().filter(|r| !r.passed()).count();
    let worst = reps.iter().map(|r| r.excess()).fold(f64::NEG_INFINITY, f64::max);
    Ok(OracleReport::new("max-principle", reps.len(), failures, worst, failures == 0)
        .with("patches", patches.len() as f64))
}

pub const PFLUG_SLACK: f64 = 1e-12;

pub fn pflug(cfg: &OracleConfig) -> Result<OracleReport> {
    let n = cfg.n.unwrap_or(10_000);
    let mut g = rng(cfg.seed);
    let regions = [
        Region::mu_cone(1.0),
        Region::double_cone(RealPoint2::new(-1.0, 0.0), RealPoint2::new(1.0, 0.0))?,
        Region::SpacelikeComplementOfDoubleCone { a: RealPoint2::ORIGIN, b: RealPoint2::new(1.0, 0.0) },
        Region::shell(1.0, 3.0)?,
    ];
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for i in 0..n {
        let (dist, norm) = if i % 2 == 0 {
            (10f64.powf(g.gen_range(-8.0..3.0)), 10f64.powf(g.gen_range(-3.0..3.0)))
        } else {
            let r = &regions[i % regions.len()];
            let x = RealPoint2::new(g.gen_range(-5.0..5.0), g.gen_range(-5.0..5.0));
            let y = RealPoint2::new(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0))
                .scale(10f64.powf(g.gen_range(-3.0..0.0)));
            let z = ComplexPoint2::from_parts(x, y);
            (boundary_distance(r, x).hypot(y.norm()), z.norm())
        };
        if !(dist > 0.0) {
            continue;
        }
        let s = pflug_growth(dist, norm)?.inequality_slack();
        worst = worst.min(s);
        if s < -PFLUG_SLACK {
            failures += 1;
        }
    }
    Ok(OracleReport::new("pflug", n, failures, (-worst).max(0.0), failures == 0).with("min_slack", worst))
}

/// Interior points of a double cone: quasi-random samples plus points
/// `1e−12` inside each vertex, where spacelike separation is hardest to keep.
pub fn double_cone_interior(a: RealPoint2, b: RealPoint2, n: usize, seed: u64) -> Vec<RealPoint2> {
    let r = Region::DoubleCone { a, b };
    let mut pts = sample_region(&r, &SampleConfig { seed, nsamples: n, radius: 1e3 });
    let (right, left) = crate::regions::double_cone_corners(a, b);
    let c = (a + b).scale(0.5);
    for v in [a, b, right, left] {
        pts.push(v + (c - v).scale(1e-12));
    }
    pts
}

pub fn spacelike_complement(cfg: &OracleConfig) -> Result<OracleReport> {
    let n = cfg.n.unwrap_or(10_000);
    let (a, b) = (RealPoint2::new(-0.5, 0.2), RealPoint2::new(1.5, 0.6));
    let comp = Region::SpacelikeComplementOfDoubleCone { a, b };
    let inner = double_cone_interior(a, b, 1000, cfg.seed);
    let pts: Vec<RealPoint2> = Halton::<2>::new(cfg.seed ^ 0x5a5a)
        .take(n)
        .map(|[u, v]| RealPoint2::new(8.0 * u - 4.0, 8.0 * v - 4.0))
        .collect();
    let rows: Vec<(bool, f64)> = pts
        .par_iter()
        .map(|p| {
            let oracle = inner.iter().all(|y| (*p - *y).square() < 0.0);
            (oracle == contains(&comp, *p), boundary_distance(&comp, *p))
        })
        .collect();
    let disagree = rows.iter().filter(|r| !r.0).count();
    let outside_band = rows.iter().filter(|r| !r.0 && r.1 > TAU_CLASS).count();
    Ok(OracleReport::new("spacelike-complement", n, outside_band, 0.0, outside_band == 0)
        .with("disagreements", disagree as f64)
        .with("interior_samples", inner.len() as f64))
}

pub const MASSGAP_TOL: f64 = 1e-9;

pub fn massgap(cfg: &OracleConfig) -> Result<OracleReport> {
    let s = RealPoint2::new(1.0, 0.0);
    let h = SpectrumHypothesis::new(1.0, 2.0, s, 0.1)?;
    let w = massgap_contradiction(&h)?;
    let mut failures = 0;
    let dev = match w {
        Some(w) if w.q_square < 0.0 => (w.q_square - h.q_square_closed_form(w.theta)).abs(),
        _ => {
            failures += 1;
            f64::INFINITY
        }
    };
    if dev > MASSGAP_TOL {
        failures += 1;
    }
    if massgap_contradiction(&SpectrumHypothesis::new(1.0, f64::INFINITY, s, 0.1)?)?.is_some() {
        failures += 1;
    }
    let n = cfg.n.unwrap_or(20);
    let mut g = rng(cfg.seed);
    for _ in 0..n {
        let m = g.gen_range(1e-3..=10.0);
        let m1 = g.gen_range(m..=10.0);
        let th = g.gen_range(-2.0..2.0f64);
        let h = SpectrumHypothesis::new(m, m1, RealPoint2::new(th.cosh(), th.sinh()), 0.1)?;
        match massgap_contradiction(&h)? {
            Some(w) if w.q_square < 0.0 && w.theta.abs() <= THETA_MAX => {}
            _ => failures += 1,
        }
    }
    Ok(OracleReport::new("massgap", n + 2, failures, dev, failures == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: usize) -> OracleConfig {
        OracleConfig { seed: 7, n: Some(n), grid: Some(10) }
    }

    #[test]
    fn plane_witness_examples() {
        let z = ComplexPoint2::from_parts(RealPoint2::new(0.5, 0.0), RealPoint2::new(0.0, 1.0));
        assert!(plane_witness_excluded(z, 1.0));
        let z = ComplexPoint2::from_parts(RealPoint2::new(2.0, 0.0), RealPoint2::new(0.0, 1.0));
        assert!(!plane_witness_excluded(z, 1.0));
    }

    #[test]
    fn band_extremum_matches_closed_form() {
        let y = RealPoint2::new(0.2, 0.6);
        let (lo, hi) = g1_bounds(0.4, y, 1.0, 3.0).unwrap();
        assert!((band_extremum(0.4, y, 1.0, 3.0, false, 50) - lo).abs() < 1e-8);
        assert!((band_extremum(0.4, y, 1.0, 3.0, true, 50) - hi).abs() < 1e-8);
    }

    #[test]
    fn small_suites_pass() {
        for name in ["inversion", "mu-cone", "band-boundary", "pflug", "spacelike-complement", "massgap"] {
            let r = run_suite(name, &small(300)).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let r = run_suite("shell-complement", &OracleConfig { seed: 3, n: Some(500), grid: Some(40) }).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(run_suite("nope", &small(1)).is_err());
    }

    #[test]
    fn vertex_samples_are_interior() {
        let (a, b) = (RealPoint2::new(0.0, 0.0), RealPoint2::new(1.0, 0.3));
        for p in double_cone_interior(a, b, 50, 1) {
            let (u, v) = (p - a, b - p);
            assert!(u.t > 0.0 && u.square() > 0.0 && v.t > 0.0 && v.square() > 0.0, "{p}");
        }
    }
}
