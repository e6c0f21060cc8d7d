use lightcone::admissible::{hyperboloid_slack, is_admissible_plane, HyperboloidParam, PlaneParam};
use lightcone::envelopes::{envelope_mu_cone, mu_cone_margin};
use lightcone::minkowski::{reduce_rotational, RealPoint4};
use lightcone::spectral::{reflect_shift, SupportSet};
use lightcone::transforms::phi;
use lightcone::{
    classify, contains, edge_neighborhood_contains, hat_dual, pflug_growth, CausalClass, ComplexPoint2, RealPoint2,
    Region,
};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn point() -> impl Strategy<Value = RealPoint2> {
    (coord(), coord()).prop_map(|(t, x)| RealPoint2::new(t, x))
}

fn spacelike() -> impl Strategy<Value = RealPoint2> {
    (0.01..10.0f64, -0.99..0.99f64, any::<bool>())
        .prop_map(|(x, r, neg)| RealPoint2::new(r * x, if neg { -x } else { x }))
}

fn forward() -> impl Strategy<Value = RealPoint2> {
    (0.01..10.0f64, -3.0..3.0f64).prop_map(|(m, th)| RealPoint2::new(m * th.cosh(), m * th.sinh()))
}

fn complex_point() -> impl Strategy<Value = ComplexPoint2> {
    (point(), point()).prop_map(|(a, b)| ComplexPoint2::from_parts(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn hat_dual_is_a_forward_unit_normal(y in spacelike()) {
        let h = hat_dual(y).unwrap();
        prop_assert!((h.square() - 1.0).abs() <= 1e-12 * (1.0 + h.norm().powi(2)));
        prop_assert!(y.dot(&h).abs() <= 1e-12 * y.norm() * (1.0 + h.norm()));
        prop_assert_eq!(classify(h), CausalClass::TimelikeForward);
    }

    #[test]
    fn dot_is_symmetric_and_bilinear(a in point(), b in point(), c in point(), s in -5.0..5.0f64) {
        prop_assert_eq!(a.dot(&b), b.dot(&a));
        let lhs = (a.scale(s) + b).dot(&c);
        let rhs = s * a.dot(&c) + b.dot(&c);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + a.norm() * c.norm() * s.abs() + b.norm() * c.norm()));
    }

    #[test]
    fn rotational_reduction_keeps_the_square(t in coord(), a in coord(), b in coord(), c in coord()) {
        let p = RealPoint4::new(t, a, b, c);
        let q = reduce_rotational(p);
        prop_assert!((p.square() - q.square()).abs() <= 1e-12 * (1.0 + t * t + a * a + b * b + c * c));
    }

    #[test]
    fn real_points_in_edge_neighbourhood_iff_in_region(p in point(), s in 0.1..3.0f64) {
        let regions = [
            Region::mu_cone(1.0),
            Region::double_cone(RealPoint2::new(-s, 0.0), RealPoint2::new(s, 0.5 * s)).unwrap(),
            Region::SpacelikeComplementOfDoubleCone { a: RealPoint2::ORIGIN, b: RealPoint2::new(s, 0.0) },
            Region::shell(0.5, 0.5 + s).unwrap(),
        ];
        for r in &regions {
            prop_assert_eq!(edge_neighborhood_contains(r, p.complexify()), contains(r, p));
        }
    }

    #[test]
    fn growth_inequality(d in 1e-9..1e3f64, n in 0.0..1e3f64) {
        prop_assert!(pflug_growth(d, n).unwrap().inequality_slack() >= -1e-12);
    }

    #[test]
    fn mu_cone_is_forward_invariant(g in forward(), v in forward(), mu in 0.0..3.0f64) {
        let r = Region::mu_cone(mu);
        let g = g.scale(1.0 + mu / g.square().sqrt());
        if contains(&r, g) {
            prop_assert!(contains(&r, g + v));
        }
    }

    #[test]
    fn admissible_hyperboloids_stay_admissible_when_enlarged(xp in forward(), lam in 0.01..5.0f64, extra in 0.0..5.0f64) {
        let r = Region::shell(1.0, 3.0).unwrap();
        let h = HyperboloidParam::new(xp, lam).unwrap();
        if hyperboloid_slack(&h, &r) >= 0.0 {
            let h2 = HyperboloidParam::new(xp, lam + extra).unwrap();
            prop_assert!(hyperboloid_slack(&h2, &r) >= 0.0);
        }
    }

    #[test]
    fn planes_through_the_origin_are_admissible_for_the_mu_cone(a in forward(), mu in 0.0..3.0f64) {
        let p = PlaneParam::new(RealPoint2::ORIGIN, -a).unwrap();
        prop_assert!(is_admissible_plane(&p, &Region::mu_cone(mu)));
    }

    #[test]
    fn inversion_is_an_involution(z in complex_point()) {
        prop_assume!(z.square().norm() > 1e-6);
        let back = phi(phi(z).unwrap()).unwrap();
        prop_assert!((back - z).norm() <= 1e-9 * (1.0 + z.norm()));
    }

    #[test]
    fn enlarging_the_cone_never_excludes(z in complex_point(), mu1 in 0.1..3.0f64, f in 0.0..1.0f64) {
        let mu2 = mu1 * f;
        if envelope_mu_cone(z, mu1).unwrap().is_inside() {
            prop_assert!(!envelope_mu_cone(z, mu2).unwrap().is_excluded());
        }
        prop_assert!(mu_cone_margin(z, mu2) >= mu_cone_margin(z, mu1) - 1e-12);
    }

    #[test]
    fn reflection_is_an_involution(c in point(), m in 0.1..5.0f64, th in -3.0..3.0f64) {
        let s = SupportSet::MassShell { m };
        let twice = reflect_shift(&reflect_shift(&s, c), c);
        let p = RealPoint2::new(m * th.cosh(), m * th.sinh());
        prop_assert!(twice.contains(p, 1e-9 * (1.0 + p.norm().powi(2))));
    }

    #[test]
    fn tube_points_are_inside(x in point(), y in forward(), neg in any::<bool>(), mu in 0.0..3.0f64) {
        let y = if neg { -y } else { y };
        let z = ComplexPoint2::from_parts(x, y);
        prop_assert!(envelope_mu_cone(z, mu).unwrap().is_inside());
    }
}
