//! Property tests for the exact-geometry invariants: cutoff partition of
//! unity, rotation composition laws, parity multiplicativity, and the
//! circle-reflection composition identity at random angles.

use nalgebra::Vector4;
use proptest::prelude::*;
use scherktori::cutoff::cutoff;
use scherktori::sphere::{
    circle_c1, circle_c2, circle_cphi, rotation_about_circle, GreatCircle,
};

proptest! {
    #[test]
    fn cutoff_partition_of_unity(a in -10.0f64..10.0, d in 0.1f64..10.0, t in -20.0f64..20.0) {
        let b = a + d;
        let s = cutoff(a, b, t) + cutoff(b, a, t);
        prop_assert!((s - 1.0).abs() < 1e-12);
        let v = cutoff(a, b, t);
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn cutoff_flat_near_endpoints(a in -5.0f64..5.0, d in 0.5f64..5.0, s in 0.0f64..0.3) {
        let b = a + d;
        prop_assert_eq!(cutoff(a, b, a + s * d), 0.0);
        prop_assert_eq!(cutoff(a, b, b - s * d), 1.0);
    }

    #[test]
    fn rotation_additivity(phi1 in -6.0f64..6.0, phi2 in -6.0f64..6.0, j in 0.0f64..4.0) {
        let c = scherktori::sphere::circle_cprime(3, j);
        let a = rotation_about_circle(&c, phi1);
        let b = rotation_about_circle(&c, phi2);
        let ab = a.compose(&b);
        let direct = rotation_about_circle(&c, phi1 + phi2);
        prop_assert!(ab.approx_eq(&direct, 1e-11));
        prop_assert!(ab.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn reflection_composition_identity(p1 in 0.0f64..3.0, p2 in 0.0f64..3.0,
                                       q1 in 0.0f64..3.0, q2 in 0.0f64..3.0) {
        let pi = std::f64::consts::PI;
        let lhs = rotation_about_circle(&circle_cphi(p1, p2), pi)
            .compose(&rotation_about_circle(&circle_cphi(q1, q2), pi));
        let rhs = rotation_about_circle(&circle_c1(), 2.0 * (p2 - q2))
            .compose(&rotation_about_circle(&circle_c2(), 2.0 * (p1 - q1)));
        prop_assert!(lhs.approx_eq(&rhs, 1e-11));
    }

    #[test]
    fn perp_is_involutive_and_orthogonal(x in -1.0f64..1.0, y in -1.0f64..1.0,
                                         z in -1.0f64..1.0, w in -1.0f64..1.0) {
        let v1 = Vector4::new(1.0 + x.abs(), y, z, w).normalize();
        let mut v2 = Vector4::new(-y, 1.0 + x.abs(), w, -z);
        v2 -= v1 * v1.dot(&v2);
        prop_assume!(v2.norm() > 1e-3);
        let c = GreatCircle::new(v1, v2.normalize()).unwrap();
        let p = c.perp();
        // totally orthogonal planes
        prop_assert!(p.e1.dot(&c.e1).abs() < 1e-12);
        prop_assert!(p.e1.dot(&c.e2).abs() < 1e-12);
        prop_assert!(p.e2.dot(&c.e1).abs() < 1e-12);
        prop_assert!(p.e2.dot(&c.e2).abs() < 1e-12);
        // the perp of the perp is the original plane
        prop_assert!(p.perp().same_circle(&c));
        // every point of one is at quarter-turn distance from the other
        for t in [0.0, 1.1, 3.9] {
            let d = c.distance_to(&p.point(t));
            prop_assert!((d - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        }
    }

    #[test]
    fn second_form_quarter_turn_antisymmetry(r in 0.05f64..0.9, phi in 0.0f64..6.28,
                                             vr in 0.1f64..2.0, vp in 0.0f64..6.28) {
        let w = num_complex::Complex64::from_polar(r, phi);
        let v = num_complex::Complex64::from_polar(vr, vp);
        for k in [2u32, 3] {
            let a = scherktori::weierstrass::second_form_tower(k, w, v).unwrap();
            let b = scherktori::weierstrass::second_form_tower(
                k, w, v * num_complex::Complex64::new(0.0, 1.0)).unwrap();
            prop_assert!((a + b).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }
}
