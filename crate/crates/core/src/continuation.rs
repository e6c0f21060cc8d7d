//! Analytic continuation along a family of shifted hyperbolas by Cauchy
//! integrals, and the maximum-principle check on analytic disc patches.
//!
//! The family is the right branch `K(t) = q + κ(eᵗ u + e⁻ᵗ v)` with
//! asymptotes along `u = (1, 1)` and `v = (σ, 1)`, shifted by `α(1, 1)/√2`.
//! Its complexification `h(t + iτ) = q + κ(e^{t+iτ} u + e^{−t−iτ} v)` has
//! imaginary part `sin τ · K′(t)`, along the tangent.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::envelopes::mu_cone_margin;
use crate::error::{Error, Result};
use crate::minkowski::{ComplexPoint2, RealPoint2, TAU_CLASS};
use crate::regions::{boundary_distance, contains, edge_neighborhood_contains, Region};
use crate::sampling::{linspace, rng};

const U: RealPoint2 = RealPoint2::new(1.0, 1.0);
const WINDOW_SCAN: usize = 3201;
const WINDOW_SPAN: f64 = 8.0;
const TANGENT_CHECKS: usize = 1001;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub p: RealPoint2,
    /// `dx₀/dx₁` of the asymptote through `p`.
    pub slope: f64,
    pub s: RealPoint2,
    pub mu: f64,
    /// Intersection of the two asymptotes.
    pub center: RealPoint2,
    pub kappa: f64,
    /// Parameter of the point the unshifted curve was fitted through.
    pub t_target: f64,
    /// Padded `t`-range where the unshifted curve leaves the spacelike complement.
    pub window: (f64, f64),
    /// Shifts beyond this keep the whole curve in the spacelike complement.
    pub alpha_star: f64,
}

fn solve_uv(d: RealPoint2, v: RealPoint2) -> (f64, f64) {
    // d = A u + B v with u = (1, 1)
    let det = v.x - v.t;
    let b = (d.x - d.t) / det;
    let a = d.t - b * v.t;
    (a, b)
}

impl CurveFamily {
    fn v(&self) -> RealPoint2 {
        RealPoint2::new(self.slope, 1.0)
    }

    fn shift(alpha: f64) -> RealPoint2 {
        U.scale(alpha * FRAC_1_SQRT_2)
    }

    pub fn complement(&self) -> Region {
        Region::SpacelikeComplementOfDoubleCone { a: RealPoint2::ORIGIN, b: self.s }
    }

    pub fn point(&self, t: f64, alpha: f64) -> RealPoint2 {
        self.center + (U.scale(t.exp()) + self.v().scale((-t).exp())).scale(self.kappa) + Self::shift(alpha)
    }

    pub fn tangent(&self, t: f64) -> RealPoint2 {
        (U.scale(t.exp()) - self.v().scale((-t).exp())).scale(self.kappa)
    }

    /// `h(w, α)` for complex parameter `w`.
    pub fn complex_point(&self, w: Complex64, alpha: f64) -> ComplexPoint2 {
        let (ep, em) = (w.exp() * self.kappa, (-w).exp() * self.kappa);
        let base = self.center + Self::shift(alpha);
        let v = self.v();
        ComplexPoint2::new(base.t + ep * U.t + em * v.t, base.x + ep * U.x + em * v.x)
    }

    /// Margin of the tangent line at `t` against `V_μ⁺`; positive when the
    /// line meets it (always for timelike tangents).
    pub fn tangent_margin(&self, t: f64, alpha: f64) -> f64 {
        mu_cone_margin(ComplexPoint2::from_parts(self.point(t, alpha), self.tangent(t)), self.mu)
    }

    /// Padded `t`-range where `K_α` is outside the spacelike complement, or
    /// `None` when the shifted curve lies inside it entirely.
    pub fn window_at(&self, alpha: f64) -> Option<(f64, f64)> {
        let comp = self.complement();
        let ts = linspace(self.t_target - WINDOW_SPAN, self.t_target + WINDOW_SPAN, WINDOW_SCAN);
        let outside: Vec<f64> = ts.into_iter().filter(|t| !contains(&comp, self.point(*t, alpha))).collect();
        let (lo, hi) = (*outside.first()?, *outside.last()?);
        let pad = 0.25 * (hi - lo) + 0.1;
        Some((lo - pad, hi + pad))
    }
}

/// Builds the family through the centroid of the triangle spanned by `p`,
/// the asymptote centre and the corner of the double cone on the lightlike
/// asymptote.
pub fn build_hyperbola_family(p: RealPoint2, slope: f64, s: RealPoint2, mu: f64) -> Result<CurveFamily> {
    let (q, r) = family_frame(p, slope, s)?;
    build_hyperbola_family_through(p, slope, s, mu, (p + q + r).scale(1.0 / 3.0))
}

fn family_frame(p: RealPoint2, slope: f64, s: RealPoint2) -> Result<(RealPoint2, RealPoint2)> {
    if !(slope.abs() < 1.0) {
        return Err(Error::BadGeometry(format!("asymptote slope must have magnitude < 1, got {slope}")));
    }
    let v = RealPoint2::new(slope, 1.0);
    let k = (p.t - p.x) / (1.0 - slope);
    let q = p + v.scale(k);
    let lam = 0.5 * (s.x - s.t);
    let r = s + RealPoint2::new(lam, -lam);
    Ok((q, r))
}

/// As [`build_hyperbola_family`], fitted through `target`.
pub fn build_hyperbola_family_through(
    p: RealPoint2,
    slope: f64,
    s: RealPoint2,
    mu: f64,
    target: RealPoint2,
) -> Result<CurveFamily> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::PreconditionFailed(format!("mu must be >= 0, got {mu}")));
    }
    if !(s.t > 0.0 && s.square() > TAU_CLASS) {
        return Err(Error::PreconditionFailed(format!("s must be forward timelike, got {s}")));
    }
    let (q, _) = family_frame(p, slope, s)?;
    let v = RealPoint2::new(slope, 1.0);
    let comp = Region::SpacelikeComplementOfDoubleCone { a: RealPoint2::ORIGIN, b: s };
    if !(p.square() < -TAU_CLASS && p.x > 0.0) {
        return Err(Error::BadGeometry(format!("p must be spacelike with p1 > 0, got {p}")));
    }
    if !(contains(&comp, p) || boundary_distance(&comp, p) <= 1e-9) {
        return Err(Error::BadGeometry(format!("p = {p} is not in the closed spacelike complement")));
    }
    let line_margin = mu_cone_margin(ComplexPoint2::from_parts(p, v), mu);
    if !(line_margin > 0.0) {
        return Err(Error::BadGeometry(format!("the line through {p} with slope {slope} misses the mass cone")));
    }
    let (a, b) = solve_uv(target - q, v);
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::BadGeometry(format!("target {target} is not between the asymptotes")));
    }
    let mut fam = CurveFamily {
        p,
        slope,
        s,
        mu,
        center: q,
        kappa: (a * b).sqrt(),
        t_target: 0.5 * (a / b).ln(),
        window: (0.0, 0.0),
        alpha_star: 0.0,
    };
    fam.window =
        fam.window_at(0.0).ok_or_else(|| Error::BadGeometry("curve never leaves the spacelike complement".into()))?;
    for t in linspace(fam.window.0, fam.window.1, TANGENT_CHECKS) {
        let m = fam.tangent_margin(t, 0.0);
        if !(m > 0.0) {
            return Err(Error::BadGeometry(format!("tangent at t = {t:.4} misses the mass cone (margin {m:.3e})")));
        }
    }
    fam.alpha_star = linspace(fam.window.0, fam.window.1, TANGENT_CHECKS)
        .into_iter()
        .map(|t| fam.point(t, 0.0))
        .filter(|x| !contains(&comp, *x))
        .map(|x| boundary_distance(&comp, x))
        .fold(0.0, f64::max);
    Ok(fam)
}

/// Uniformly parameterised ellipse in the parameter plane. Nodes are the
/// `n` distinct points of the closed curve; `weights[k] = ρ′(θₖ)·2π/n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub center: Complex64,
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
}

impl Contour {
    pub fn ellipse(center: Complex64, a: f64, b: f64, n: usize) -> Self {
        let h = TAU / n as f64;
        let (nodes, weights) = (0..n)
            .map(|k| {
                let th = h * k as f64;
                let node = center + Complex64::new(a * th.cos(), b * th.sin());
                (node, Complex64::new(-a * th.sin(), b * th.cos()) * h)
            })
            .unzip();
        Self { center, a, b, nodes, weights }
    }

    pub fn circle(center: Complex64, r: f64, n: usize) -> Self {
        Self::ellipse(center, r, r, n)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn encloses(&self, w: Complex64) -> bool {
        let d = w - self.center;
        (d.re / self.a).powi(2) + (d.im / self.b).powi(2) < 1.0
    }

    /// Largest gap between consecutive nodes.
    pub fn spacing(&self) -> f64 {
        let n = self.nodes.len();
        (0..n).map(|k| (self.nodes[(k + 1) % n] - self.nodes[k]).norm()).fold(0.0, f64::max)
    }

    /// Every other node, with doubled weights.
    pub fn halved(&self) -> Self {
        let nodes = self.nodes.iter().step_by(2).copied().collect();
        let weights = self.weights.iter().step_by(2).map(|w| w * 2.0).collect();
        Self { nodes, weights, ..*self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyValue {
    pub value: Complex64,
    /// `|I_n − I_{n/2}|`, the change from halving the nodes.
    pub error_estimate: f64,
}

fn trapezoid(values: &[Complex64], nodes: &[Complex64], weights: &[Complex64], target: Complex64) -> Complex64 {
    let s: Complex64 = values.iter().zip(nodes).zip(weights).map(|((f, r), w)| f * w / (r - target)).sum();
    s / Complex64::new(0.0, TAU)
}

/// Trapezoidal Cauchy integral `(1/2πi) ∮ f(ρ)/(ρ − target) dρ`.
pub fn cauchy_continue(values: &[Complex64], w: &Contour, target: Complex64) -> Result<CauchyValue> {
    if values.len() != w.len() || w.len() < 4 {
        return Err(Error::PreconditionFailed(format!(
            "need one value per node and at least 4 nodes, got {} values for {} nodes",
            values.len(),
            w.len()
        )));
    }
    if !w.encloses(target) {
        return Err(Error::PreconditionFailed(format!("target {target} is outside the contour")));
    }
    let distance = w.nodes.iter().map(|r| (r - target).norm()).fold(f64::INFINITY, f64::min);
    let spacing = w.spacing();
    if !(distance > spacing) {
        return Err(Error::TargetTooClose { distance, spacing });
    }
    let value = trapezoid(values, &w.nodes, &w.weights, target);
    let error_estimate = if w.len() % 2 == 0 {
        let half = w.halved();
        let vh: Vec<Complex64> = values.iter().step_by(2).copied().collect();
        (value - trapezoid(&vh, &half.nodes, &half.weights, target)).norm()
    } else {
        f64::NAN
    };
    Ok(CauchyValue { value, error_estimate })
}

/// Holomorphic test functions of `(z₀, z₁)` with closed-form values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `Σ c·z₀ⁱ z₁ʲ` over `(i, j, c)`.
    Polynomial { terms: Vec<(u32, u32, Complex64)> },
    /// `1/(a·z − c)`
    Rational { a: RealPoint2, c: Complex64 },
    /// `1/(z² − rho)`
    InverseQuadric { rho: f64 },
}

impl TestFunction {
    pub fn eval(&self, z: ComplexPoint2) -> Complex64 {
        match self {
            TestFunction::Polynomial { terms } => terms.iter().map(|(i, j, c)| c * z.t.powu(*i) * z.x.powu(*j)).sum(),
            TestFunction::Rational { a, c } => 1.0 / (a.complexify().dot(&z) - c),
            TestFunction::InverseQuadric { rho } => 1.0 / (z.square() - rho),
        }
    }

    fn denominator(&self, z: ComplexPoint2) -> Complex64 {
        match self {
            TestFunction::Polynomial { .. } => Complex64::new(1.0, 0.0),
            TestFunction::Rational { a, c } => a.complexify().dot(&z) - c,
            TestFunction::InverseQuadric { rho } => z.square() - rho,
        }
    }

    pub fn random_polynomial<R: Rng>(g: &mut R, max_degree: u32) -> Self {
        let mut terms = Vec::new();
        for i in 0..=max_degree {
            for j in 0..=(max_degree - i) {
                terms.push((i, j, Complex64::new(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0))));
            }
        }
        TestFunction::Polynomial { terms }
    }
}

/// Rational functions whose poles sit a fixed distance off the curve, plus
/// `1/(z² − μ²/2)`, whose polar quadric lies in the excluded set
/// `{0 ≤ z² ≤ μ²}` of the mass-cone problem.
pub fn rational_suite(fam: &CurveFamily) -> Vec<TestFunction> {
    let k = fam.point(fam.t_target, 0.0);
    let mut out = Vec::new();
    for a in
        [RealPoint2::new(1.0, 0.0), RealPoint2::new(0.0, 1.0), RealPoint2::new(1.0, 0.5), RealPoint2::new(0.5, 1.0)]
    {
        let base = a.dot(&k);
        for d in
            [Complex64::new(2.0, 0.0), Complex64::new(-2.0, 0.0), Complex64::new(0.0, 1.5), Complex64::new(1.0, -1.0)]
        {
            out.push(TestFunction::Rational { a, c: base + d });
        }
    }
    if fam.mu > 0.0 {
        out.push(TestFunction::InverseQuadric { rho: 0.5 * fam.mu * fam.mu });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationConfig {
    pub nodes: usize,
    /// Ellipse height as a fraction of its half-width.
    pub aspect: f64,
    /// Real targets per shift, spread over the unpadded window.
    pub targets: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self { nodes: 256, aspect: 0.1, targets: 16 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuedSample {
    pub alpha: f64,
    pub t: f64,
    pub value: Complex64,
    pub error_estimate: f64,
    /// False when the shifted curve is already inside the spacelike complement
    /// and the value is a direct evaluation.
    pub continued: bool,
}

/// Contour around the window of `K_α`, after checking that every node maps
/// into the mass-cone envelope or the thickened spacelike complement.
pub fn family_contour(fam: &CurveFamily, alpha: f64, cfg: &ContinuationConfig) -> Result<Option<Contour>> {
    let Some((lo, hi)) = fam.window_at(alpha) else { return Ok(None) };
    let a = 0.5 * (hi - lo);
    let w = Contour::ellipse(Complex64::new(0.5 * (lo + hi), 0.0), a, cfg.aspect * a, cfg.nodes);
    let comp = fam.complement();
    for node in &w.nodes {
        let z = fam.complex_point(*node, alpha);
        if !(mu_cone_margin(z, fam.mu) > 0.0 || edge_neighborhood_contains(&comp, z)) {
            return Err(Error::BadGeometry(format!("contour node {node} maps outside the known domain")));
        }
    }
    Ok(Some(w))
}

fn check_poles(f: &TestFunction, fam: &CurveFamily, alpha: f64, w: &Contour) -> Result<()> {
    // grid over the ellipse enlarged by half
    for i in 0..=40 {
        for j in 0..=40 {
            let (x, y) = (-1.5 + 3.0 * i as f64 / 40.0, -1.5 + 3.0 * j as f64 / 40.0);
            let rho = w.center + Complex64::new(w.a * x, w.b * y);
            if f.denominator(fam.complex_point(rho, alpha)).norm() < 1e-3 {
                return Err(Error::BadGeometry(format!("test function has a pole near the contour at {rho}")));
            }
        }
    }
    Ok(())
}

/// Continues `f` from the contour to real points of each `K_α`.
pub fn continue_along_family(
    f: &TestFunction,
    fam: &CurveFamily,
    alpha_path: &[f64],
    cfg: &ContinuationConfig,
) -> Result<Vec<ContinuedSample>> {
    let mut out = Vec::new();
    for &alpha in alpha_path {
        match family_contour(fam, alpha, cfg)? {
            None => {
                for t in linspace(fam.window.0, fam.window.1, cfg.targets) {
                    let value = f.eval(fam.point(t, alpha).complexify());
                    out.push(ContinuedSample { alpha, t, value, error_estimate: 0.0, continued: false });
                }
            }
            Some(w) => {
                check_poles(f, fam, alpha, &w)?;
                let values: Vec<Complex64> = w.nodes.iter().map(|r| f.eval(fam.complex_point(*r, alpha))).collect();
                let inner = 0.6 * w.a;
                for t in linspace(w.center.re - inner, w.center.re + inner, cfg.targets) {
                    let c = cauchy_continue(&values, &w, Complex64::new(t, 0.0))?;
                    out.push(ContinuedSample {
                        alpha,
                        t,
                        value: c.value,
                        error_estimate: c.error_estimate,
                        continued: true,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Worst-case deviation of continued values from direct evaluation.
pub fn max_continuation_error(f: &TestFunction, fam: &CurveFamily, samples: &[ContinuedSample]) -> f64 {
    samples.iter().map(|s| (s.value - f.eval(fam.point(s.t, s.alpha).complexify())).norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub functions: usize,
    pub max_error: f64,
    pub max_error_doubled: f64,
    pub max_estimate: f64,
}

impl SuiteReport {
    pub const TOL: f64 = 1e-6;
    pub const MIN_RATIO: f64 = 4.0;

    pub fn doubling_ratio(&self) -> f64 {
        self.max_error / self.max_error_doubled
    }

    pub fn passed(&self) -> bool {
        self.max_error <= Self::TOL && self.doubling_ratio() >= Self::MIN_RATIO
    }
}

/// Runs [`rational_suite`] at `cfg.nodes` and at twice as many nodes.
pub fn run_rational_suite(fam: &CurveFamily, alpha_path: &[f64], cfg: &ContinuationConfig) -> Result<SuiteReport> {
    let doubled = ContinuationConfig { nodes: 2 * cfg.nodes, ..*cfg };
    let suite = rational_suite(fam);
    let mut rep = SuiteReport { functions: suite.len(), max_error: 0.0, max_error_doubled: 0.0, max_estimate: 0.0 };
    for f in &suite {
        let s = continue_along_family(f, fam, alpha_path, cfg)?;
        rep.max_error = rep.max_error.max(max_continuation_error(f, fam, &s));
        rep.max_estimate = s.iter().map(|x| x.error_estimate).fold(rep.max_estimate, f64::max);
        let s2 = continue_along_family(f, fam, alpha_path, &doubled)?;
        rep.max_error_doubled = rep.max_error_doubled.max(max_continuation_error(f, fam, &s2));
    }
    Ok(rep)
}

/// Complexified piece of `K_α` over `λ = ξ + iη`, `ξ ∈ [0, 1]`, `|η| ≤ δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticPatch {
    pub family: CurveFamily,
    pub alpha: f64,
    pub t_range: (f64, f64),
    pub delta: f64,
}

impl AnalyticPatch {
    /// Patch over `t_range` with `δ` a tenth of the smallest curvature radius
    /// of `K_α` there, capped at 0.5.
    pub fn new(family: CurveFamily, alpha: f64, t_range: (f64, f64)) -> Self {
        let radius = linspace(t_range.0, t_range.1, 201)
            .into_iter()
            .map(|t| curvature_radius(&family, t))
            .fold(f64::INFINITY, f64::min);
        Self { family, alpha, t_range, delta: (0.1 * radius).min(0.5) }
    }

    pub fn eval(&self, xi: f64, eta: f64) -> ComplexPoint2 {
        let t = self.t_range.0 + xi * (self.t_range.1 - self.t_range.0);
        self.family.complex_point(Complex64::new(t, eta), self.alpha)
    }
}

/// Euclidean curvature radius of `K` at `t`.
fn curvature_radius(fam: &CurveFamily, t: f64) -> f64 {
    let d1 = fam.tangent(t);
    // K″ = K − q for this parameterisation
    let d2 = fam.point(t, 0.0) - fam.center;
    let speed = d1.t.hypot(d1.x);
    let cross = (d1.t * d2.x - d1.x * d2.t).abs();
    if cross == 0.0 {
        f64::INFINITY
    } else {
        speed.powi(3) / cross
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxPrincipleReport {
    pub interior_sup: f64,
    pub boundary_sup: f64,
}

impl MaxPrincipleReport {
    pub const SLACK: f64 = 1e-9;

    pub fn excess(&self) -> f64 {
        self.interior_sup - self.boundary_sup
    }

    pub fn passed(&self) -> bool {
        self.excess() <= Self::SLACK
    }
}

/// Compares `sup |f|` over an interior `grid × grid` lattice of the patch
/// with `sup |f|` over its boundary, sampled eight times more finely.
pub fn max_principle_check(
    patch: &AnalyticPatch,
    f: &dyn Fn(ComplexPoint2) -> Complex64,
    grid: usize,
) -> MaxPrincipleReport {
    let n = grid.max(3);
    let d = patch.delta;
    let mut interior = 0.0f64;
    for i in 1..n {
        for j in 1..n {
            let (xi, eta) = (i as f64 / n as f64, -d + 2.0 * d * j as f64 / n as f64);
            interior = interior.max(f(patch.eval(xi, eta)).norm());
        }
    }
    let nb = 8 * n;
    let mut boundary = 0.0f64;
    for k in 0..=nb {
        let s = k as f64 / nb as f64;
        for (xi, eta) in [(s, -d), (s, d), (0.0, -d + 2.0 * d * s), (1.0, -d + 2.0 * d * s)] {
            boundary = boundary.max(f(patch.eval(xi, eta)).norm());
        }
    }
    MaxPrincipleReport { interior_sup: interior, boundary_sup: boundary }
}

/// Random holomorphic functions for the maximum-principle suite: polynomials
/// of degree ≤ 5 and reciprocals of affine maps with poles kept at least one
/// unit away from the patch.
pub fn random_holomorphic(seed: u64, patch: &AnalyticPatch) -> TestFunction {
    let mut g = rng(seed);
    if g.gen_bool(0.5) {
        let deg = g.gen_range(1..=5);
        TestFunction::random_polynomial(&mut g, deg)
    } else {
        let th = g.gen_range(0.0..TAU);
        let a = RealPoint2::new(th.cos(), th.sin());
        let mut reach = 0.0f64;
        let mut centre = Complex64::new(0.0, 0.0);
        for i in 0..=8 {
            for j in 0..=8 {
                let v = a.complexify().dot(&patch.eval(i as f64 / 8.0, -patch.delta + patch.delta * j as f64 / 4.0));
                centre += v / 81.0;
                reach = reach.max(v.norm());
            }
        }
        let ang = g.gen_range(0.0..TAU);
        let c = centre + Complex64::from_polar(2.0 * reach + 1.0, ang);
        TestFunction::Rational { a, c }
    }
}
