//! Search for admissible hyperboloids and planes passing through a complex point.
//!
//! A point `z = x + iy` is excluded from the envelope when some admissible
//! `(x′, λ)` satisfies `(z − x′)² = λ²`, i.e. `(x − x′)² − y² = λ²` and
//! `(x − x′)·y = 0`, or some admissible plane `a·(z − x′) = 0` passes
//! through it. The search maximises the admissibility slack over these
//! families; the margin reported is minus the best slack.

use serde::{Deserialize, Serialize};

use super::{EnvelopeVerdict, TOL_SEARCH};
use crate::admissible::{hyperboloid_slack, plane_slack, HyperboloidParam, PlaneParam};
use crate::error::Result;
use crate::minkowski::{classify, hat_dual, CausalClass, ComplexPoint2, RealPoint2};
use crate::regions::Region;

/// Grid sizes and refinement steps for the witness search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Grid points per search axis.
    pub grid: usize,
    /// Golden-section or compass refinement steps.
    pub refine: usize,
    /// Plane normals tried for real points.
    pub directions: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { grid: 64, refine: 40, directions: 256 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum JldWitness {
    Hyperboloid { xprime: RealPoint2, lambda: f64 },
    Plane { xprime: RealPoint2, a: RealPoint2 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// Best admissibility slack found; `≥ 0` means a witness exists.
    pub best_slack: f64,
    pub witness: Option<JldWitness>,
}

impl SearchOutcome {
    fn none() -> Self {
        Self { best_slack: f64::NEG_INFINITY, witness: None }
    }

    fn offer(&mut self, slack: f64, w: JldWitness) {
        if slack > self.best_slack {
            self.best_slack = slack;
            self.witness = Some(w);
        }
    }

    fn merge(&mut self, other: SearchOutcome) {
        if other.best_slack > self.best_slack {
            *self = other;
        }
    }

    pub fn margin(&self) -> f64 {
        -self.best_slack
    }
}

/// Largest coordinate scale among a region's parameters.
fn region_scale(r: &Region) -> f64 {
    let n = |p: &RealPoint2| p.norm();
    match r {
        Region::ForwardCone { apex } | Region::BackwardCone { apex } => n(apex),
        Region::MuCone { mu, apex } => mu + n(apex),
        Region::DoubleCone { a, b } | Region::SpacelikeComplementOfDoubleCone { a, b } => n(a).max(n(b)),
        Region::SpacelikeSet {} => 0.0,
        Region::HyperboloidShell { m2, .. } => *m2,
        Region::Wedge { shift } => n(shift),
        Region::ShellCap { m } => 1.0 / m,
        Region::UnionOf { parts } => parts.iter().map(region_scale).fold(0.0, f64::max),
    }
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, steps: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..steps {
        if f1 > f2 {
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
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Spacelike `y`: `x − x′ = ±s·ŷ`, `λ = √(s² − y²)`, one parameter `s ≥ 0`
/// searched on a log grid; planes have normal `±ŷ` and pass through `x`.
fn spacelike_search(x: RealPoint2, y: RealPoint2, r: &Region, budget: &SearchBudget) -> SearchOutcome {
    let mut out = SearchOutcome::none();
    let yh = match hat_dual(y) {
        Ok(v) => v,
        Err(_) => return out,
    };
    for a in [yh, -yh] {
        let pp = PlaneParam { xprime: x, a };
        out.offer(plane_slack(&pp, r), JldWitness::Plane { xprime: x, a });
    }
    let ysq = y.square();
    let smax = 10.0 * (1.0 + x.norm() + y.norm() + region_scale(r));
    let smin = 1e-9 * smax;
    let n = budget.grid.max(2);
    // log-spaced in s, with s = 0 prepended
    let (llo, lhi) = (smin.ln(), smax.ln());
    let grid: Vec<f64> =
        std::iter::once(0.0).chain((0..n).map(|k| (llo + (lhi - llo) * k as f64 / (n - 1) as f64).exp())).collect();
    for sign in [1.0, -1.0] {
        let slack_at = |s: f64| -> f64 {
            let s = s.max(0.0);
            let h = HyperboloidParam { xprime: x - yh.scale(sign * s), lambda: (s * s - ysq).sqrt() };
            hyperboloid_slack(&h, r)
        };
        let vals: Vec<f64> = grid.iter().map(|s| slack_at(*s)).collect();
        let (k, _) =
            vals.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
        let lo = grid[k.saturating_sub(1)];
        let hi = grid[(k + 1).min(grid.len() - 1)];
        let (s, v) = if vals[k].is_finite() {
            let (s, v) = golden_max(&slack_at, lo, hi, budget.refine);
            if v >= vals[k] {
                (s, v)
            } else {
                (grid[k], vals[k])
            }
        } else {
            (grid[k], vals[k])
        };
        let xprime = x - yh.scale(sign * s);
        out.offer(v, JldWitness::Hyperboloid { xprime, lambda: (s * s - ysq).sqrt() });
    }
    out
}

/// Real `x`: hyperboloids `x′ = x ∓ λ(cosh u, sinh u)` on a `(u, log λ)`
/// grid with compass refinement, plus planes through `x` with normals
/// `±(1, s)`, `s ∈ [−1, 1]`.
fn real_search(x: RealPoint2, r: &Region, budget: &SearchBudget) -> SearchOutcome {
    let mut out = SearchOutcome::none();
    let nd = budget.directions.max(2);
    for k in 0..nd {
        let s = -1.0 + 2.0 * k as f64 / (nd - 1) as f64;
        for a in [RealPoint2::new(-1.0, s), RealPoint2::new(1.0, s)] {
            let pp = PlaneParam { xprime: x, a };
            out.offer(plane_slack(&pp, r), JldWitness::Plane { xprime: x, a });
        }
    }
    let scale = 10.0 * (1.0 + x.norm() + region_scale(r));
    let (llo, lhi) = ((1e-6 * scale).ln(), scale.ln());
    let umax = 8.0;
    let n = budget.grid.max(2);
    for sign in [1.0, -1.0] {
        let slack_at = |u: f64, ll: f64| -> f64 {
            let lam = ll.exp();
            let h = HyperboloidParam { xprime: x - RealPoint2::new(u.cosh(), u.sinh()).scale(sign * lam), lambda: lam };
            hyperboloid_slack(&h, r)
        };
        let mut best = (0.0, llo, f64::NEG_INFINITY);
        for i in 0..n {
            let u = -umax + 2.0 * umax * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let ll = llo + (lhi - llo) * j as f64 / (n - 1) as f64;
                let v = slack_at(u, ll);
                if v > best.2 {
                    best = (u, ll, v);
                }
            }
        }
        if best.2.is_finite() {
            let (mut du, mut dl) = (2.0 * umax / (n - 1) as f64, (lhi - llo) / (n - 1) as f64);
            for _ in 0..budget.refine {
                let mut moved = false;
                for (pu, pl) in [(du, 0.0), (-du, 0.0), (0.0, dl), (0.0, -dl)] {
                    let v = slack_at(best.0 + pu, best.1 + pl);
                    if v > best.2 {
                        best = (best.0 + pu, best.1 + pl, v);
                        moved = true;
                    }
                }
                if !moved {
                    du *= 0.5;
                    dl *= 0.5;
                }
            }
        }
        let lam = best.1.exp();
        let xprime = x - RealPoint2::new(best.0.cosh(), best.0.sinh()).scale(sign * lam);
        out.offer(best.2, JldWitness::Hyperboloid { xprime, lambda: lam });
    }
    out
}

/// Lightlike `y`: planes with normal `±y` through `x`, and hyperboloid
/// witnesses that survive two shrinking spacelike perturbations of `y`.
fn lightlike_search(x: RealPoint2, y: RealPoint2, r: &Region, budget: &SearchBudget) -> SearchOutcome {
    let mut out = SearchOutcome::none();
    for a in [y, -y] {
        let pp = PlaneParam { xprime: x, a };
        out.offer(plane_slack(&pp, r), JldWitness::Plane { xprime: x, a });
    }
    let mut persistent = SearchOutcome { best_slack: f64::INFINITY, witness: None };
    for eps in [1e-4, 1e-6] {
        let ye = RealPoint2::new(y.t, y.x * (1.0 + eps));
        let o = spacelike_search(x, ye, r, budget);
        if o.best_slack < persistent.best_slack {
            persistent = o;
        }
    }
    out.merge(persistent);
    out
}

/// Best witness for `z` against region `r`.
pub fn jld_search(z: ComplexPoint2, r: &Region, budget: &SearchBudget) -> Result<SearchOutcome> {
    r.validate()?;
    let (x, y) = (z.re(), z.im());
    Ok(match classify(y) {
        CausalClass::TimelikeForward | CausalClass::TimelikeBackward => SearchOutcome::none(),
        CausalClass::Zero => real_search(x, r, budget),
        CausalClass::SpacelikePt => spacelike_search(x, y, r, budget),
        CausalClass::LightlikeForward | CausalClass::LightlikeBackward => lightlike_search(x, y, r, budget),
    })
}

/// Search-based envelope verdict, with the `TOL_SEARCH` boundary band.
pub fn jld_excluded(z: ComplexPoint2, r: &Region, budget: &SearchBudget) -> Result<EnvelopeVerdict> {
    let o = jld_search(z, r, budget)?;
    Ok(EnvelopeVerdict::from_margin(o.margin(), TOL_SEARCH))
}
