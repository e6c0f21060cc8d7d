//! The reciprocal-radii map `φ(z) = −z/z²`, the composite map that carries
//! lines onto hyperbolas, and a sampled check of the basic properties of `φ`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{ComplexPoint2, RealPoint2};
use crate::sampling::rng;

/// Guard on `|z²|` and on the composite map's denominator.
pub const TOL_SING: f64 = 1e-12;

pub fn phi(z: ComplexPoint2) -> Result<ComplexPoint2> {
    let sq = z.square();
    if sq.norm() <= TOL_SING {
        return Err(Error::SingularPoint(sq.norm()));
    }
    Ok(z.scale(-sq.inv()))
}

/// `φ` on real points.
pub fn phi_real(x: RealPoint2) -> Result<RealPoint2> {
    let sq = x.square();
    if sq.abs() <= TOL_SING {
        return Err(Error::SingularPoint(sq.abs()));
    }
    Ok(x.scale(-1.0 / sq))
}

fn w_tilde(mu: f64) -> Result<ComplexPoint2> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::PreconditionFailed(format!("mu must be positive, got {mu}")));
    }
    let w = -0.5 / mu;
    Ok(RealPoint2::new(w, w).complexify())
}

/// `z = (w̃x² + x)/(1 + 2x·w̃)` with `w̃ = −(1, 1)/(2μ)`; equal to `φ(φ(x) − w̃)`.
pub fn psi_phi(x: ComplexPoint2, mu: f64) -> Result<ComplexPoint2> {
    let w = w_tilde(mu)?;
    let den = Complex64::new(1.0, 0.0) + 2.0 * x.dot(&w);
    if den.norm() <= TOL_SING {
        return Err(Error::SingularPoint(den.norm()));
    }
    Ok((w.scale(x.square()) + x).scale(den.inv()))
}

/// Inverse of [`psi_phi`]: `x = (z − w̃z²)/(1 − 2z·w̃)`.
pub fn psi_phi_inverse(z: ComplexPoint2, mu: f64) -> Result<ComplexPoint2> {
    let w = w_tilde(mu)?;
    let den = Complex64::new(1.0, 0.0) - 2.0 * z.dot(&w);
    if den.norm() <= TOL_SING {
        return Err(Error::SingularPoint(den.norm()));
    }
    Ok((z - w.scale(z.square())).scale(den.inv()))
}

/// The quadric `(z₀ − c₀)² − (z₁ − c₁)² = lam`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolaParams {
    pub center: RealPoint2,
    pub lam: f64,
}

impl HyperbolaParams {
    pub fn residual(&self, z: ComplexPoint2) -> Complex64 {
        (z - self.center.complexify()).square() - self.lam
    }
}

/// Image under [`psi_phi`] of the line `x₀ = σx₁ + c`.
pub fn line_image(sigma: f64, c: f64, mu: f64) -> Result<HyperbolaParams> {
    if !(sigma.is_finite() && c.is_finite()) {
        return Err(Error::NonFinite("line_image"));
    }
    if ((sigma.abs() - 1.0).abs()) <= TOL_SING {
        return Err(Error::LightlikeSlope(sigma));
    }
    w_tilde(mu)?;
    let k = 1.0 - sigma;
    Ok(HyperbolaParams {
        center: RealPoint2::new((c - mu) / k, (c - sigma * mu) / k),
        lam: mu * mu * (1.0 + sigma) / k,
    })
}

/// Maximum deviations and violation counts from [`check_phi_properties`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhiReport {
    pub samples: usize,
    /// Samples dropped because `|z²| ≤ 1e−6`.
    pub near_singular: usize,
    /// `max ‖φ(φ(z)) − z‖ / (1 + ‖z‖)`.
    pub involution_max: f64,
    pub tube_violations: usize,
    pub cone_violations: usize,
    pub spacelike_violations: usize,
    pub double_cone_to_cone_violations: usize,
    pub cone_to_double_cone_violations: usize,
}

impl PhiReport {
    pub const INVOLUTION_TOL: f64 = 1e-9;

    pub fn passed(&self) -> bool {
        self.involution_max <= Self::INVOLUTION_TOL
            && self.tube_violations == 0
            && self.cone_violations == 0
            && self.spacelike_violations == 0
            && self.double_cone_to_cone_violations == 0
            && self.cone_to_double_cone_violations == 0
    }
}

const NEAR_SINGULAR: f64 = 1e-6;

fn forward(p: RealPoint2) -> bool {
    p.t > 0.0 && p.square() > 0.0
}

/// Runs `nsamples` rounds of the five property checks: involution, tube
/// preservation, `V⁺ → V⁻`, spacelike points stay spacelike, and the
/// double cone `D_{(−1/m,0),0}` against the cone `(m,0) + V⁺` in both directions.
pub fn check_phi_properties(nsamples: usize, seed: u64) -> PhiReport {
    let mut g = rng(seed);
    let mut rep = PhiReport { samples: nsamples, ..Default::default() };
    for _ in 0..nsamples {
        let mut u = || g.gen_range(-5.0..5.0);
        let z = ComplexPoint2::from_parts(RealPoint2::new(u(), u()), RealPoint2::new(u(), u()));
        if z.square().norm() <= NEAR_SINGULAR {
            rep.near_singular += 1;
        } else if let Ok(back) = phi(z).and_then(phi) {
            let dev = (back - z).norm() / (1.0 + z.norm());
            rep.involution_max = rep.involution_max.max(dev);
        }

        // tube point: forward timelike imaginary part, random sign
        let (y0, y1) = (g.gen_range(0.0..5.0), g.gen_range(-1.0..1.0));
        let y = RealPoint2::new(y0, y1 * y0);
        let sign = if g.gen_bool(0.5) { 1.0 } else { -1.0 };
        let z = ComplexPoint2::from_parts(RealPoint2::new(u2(&mut g), u2(&mut g)), y.scale(sign));
        if z.square().norm() > NEAR_SINGULAR && y.square() > 0.0 {
            let w = phi(z).expect("guarded").im();
            if !(w.square() > 0.0 && w.t * sign > 0.0) {
                rep.tube_violations += 1;
            }
        }

        let m = (g.gen_range(0.05..5.0f64)).abs();
        let th = g.gen_range(-4.0..4.0f64);
        let x = RealPoint2::new(m * th.cosh(), m * th.sinh());
        if x.square() > NEAR_SINGULAR {
            let w = phi_real(x).expect("guarded");
            if !(w.t < 0.0 && w.square() > 0.0) {
                rep.cone_violations += 1;
            }
        }
        let x = RealPoint2::new(m * th.sinh(), m * th.cosh() * if sign > 0.0 { 1.0 } else { -1.0 });
        if x.square() < -NEAR_SINGULAR {
            let w = phi_real(x).expect("guarded");
            if !(w.square() < 0.0) {
                rep.spacelike_violations += 1;
            }
        }

        // D_{(−1/m,0),0} in light-cone coordinates, both of which lie in (−1/m, 0)
        let mm = g.gen_range(0.2..5.0f64);
        let (a, b) = (g.gen_range(0.0..1.0f64), g.gen_range(0.0..1.0f64));
        if a > 0.0 && b > 0.0 {
            let x = RealPoint2::from_light_cone(-a / mm, -b / mm);
            if x.square() > NEAR_SINGULAR {
                let w = phi_real(x).expect("guarded");
                if !forward(w - RealPoint2::new(mm, 0.0)) {
                    rep.double_cone_to_cone_violations += 1;
                }
            }
        }
        let (r, th) = (g.gen_range(0.0..10.0f64), g.gen_range(-4.0..4.0f64));
        if r > 0.0 {
            let w = RealPoint2::new(mm + r * th.cosh(), r * th.sinh());
            if w.square() > NEAR_SINGULAR {
                let x = phi_real(w).expect("guarded");
                let lo = RealPoint2::new(-1.0 / mm, 0.0);
                if !(forward(x - lo) && forward(-x)) {
                    rep.cone_to_double_cone_violations += 1;
                }
            }
        }
    }
    rep
}

fn u2<R: Rng>(g: &mut R) -> f64 {
    g.gen_range(-5.0..5.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(t: f64, x: f64) -> RealPoint2 {
        RealPoint2::new(t, x)
    }

    #[test]
    fn phi_examples() {
        let w = phi(p(2.0, 0.0).complexify()).unwrap();
        assert_abs_diff_eq!(w.re().t, -0.5);
        assert_abs_diff_eq!(w.re().x, 0.0);
        assert_eq!(phi_real(p(-0.5, 0.0)).unwrap(), p(2.0, 0.0));
        let z = ComplexPoint2::from_parts(p(1.3, 0.4), p(0.2, -0.1));
        let back = phi(phi(z).unwrap()).unwrap();
        assert!((back - z).norm() < 1e-14);
        let s = phi_real(p(0.0, 1.0)).unwrap();
        assert_eq!(s, p(0.0, 1.0));
        assert!(matches!(phi(p(1.0, 1.0).complexify()), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn psi_phi_examples() {
        let z = psi_phi(p(2.0, 0.0).complexify(), 1.0).unwrap();
        assert_abs_diff_eq!(z.re().t, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.re().x, 2.0, epsilon = 1e-15);
        assert!(z.is_real(0.0));
        let x = ComplexPoint2::from_parts(p(0.3, -1.2), p(0.4, 0.1));
        let back = psi_phi_inverse(psi_phi(x, 2.0).unwrap(), 2.0).unwrap();
        assert!((back - x).norm() < 1e-12);
        // the same map written as φ(φ(x) − w̃)
        let w = w_tilde(2.0).unwrap();
        let alt = phi(phi(x).unwrap() - w).unwrap();
        assert!((alt - psi_phi(x, 2.0).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn line_image_examples() {
        let h = line_image(0.0, 2.0, 1.0).unwrap();
        assert_eq!(h.center, p(1.0, 2.0));
        assert_eq!(h.lam, 1.0);
        assert_abs_diff_eq!(h.center.t, h.center.x - 1.0);
        assert!(line_image(1.5, 0.3, 1.0).unwrap().lam < 0.0);
        assert!(line_image(-0.5, 0.3, 1.0).unwrap().lam > 0.0);
        assert!(matches!(line_image(1.0, 0.0, 1.0), Err(Error::LightlikeSlope(_))));
    }

    #[test]
    fn line_image_matches_mapped_points() {
        for (sigma, c, mu) in [(0.0, 2.0, 1.0), (0.4, -0.7, 2.0), (-2.5, 1.1, 0.5), (3.0, 0.2, 1.5)] {
            let h = line_image(sigma, c, mu).unwrap();
            for s in [-3.0, -1.0, 0.25, 0.8, 2.0, 7.0] {
                let x = p(sigma * s + c, s).complexify();
                if let Ok(z) = psi_phi(x, mu) {
                    assert!(h.residual(z).norm() < 1e-9 * (1.0 + z.norm().powi(2)), "{sigma} {c} {mu} {s}");
                }
            }
        }
    }

    #[test]
    fn property_suite_small() {
        let rep = check_phi_properties(5000, 3);
        assert!(rep.passed(), "{rep:?}");
    }
}
