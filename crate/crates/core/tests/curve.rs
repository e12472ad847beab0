use helicoid_core::curve::*;
use helicoid_core::forms::{integrate_cycle, RationalForm};
use helicoid_core::quad::Tolerance;
use helicoid_core::scalar::cx;
use helicoid_core::{Complex, Curve};
use proptest::prelude::*;

fn lines(points: &[Complex]) -> Vec<PathSegment<f64>> {
    points.windows(2).map(|p| PathSegment::line(p[0], p[1])).collect()
}

fn start(c: &Curve) -> CurvePoint<f64> {
    c.point_near(cx(0.0, 0.0), cx(0.0, 1.0))
}

#[test]
fn sheet_at_origin() {
    let c = Curve::new(0.32).unwrap();
    let p = start(&c);
    assert!((p.w - cx(0.0, 0.565685424949238)).norm() < 1e-12);
    assert!(c.contains(&p));
}

#[test]
fn loop_around_two_branch_points_keeps_the_sheet() {
    let c = Curve::new(0.32).unwrap();
    let p0 = start(&c);
    let ring = [
        cx(0.0, 0.0),
        cx(0.1, 0.0),
        cx(0.1, 1.5),
        cx(-0.3, 1.5),
        cx(-0.3, -1.5),
        cx(0.1, -1.5),
        cx(0.1, 0.0),
        cx(0.0, 0.0),
    ];
    let end = lift_path(&c, &lines(&ring), p0).unwrap();
    assert!((end.w - p0.w).norm() < 1e-10);
}

#[test]
fn lattice_is_nondegenerate_and_additive() {
    let c = Curve::new(0.32).unwrap();
    assert!(c.determinant().abs() > 1e-3);
    let (wa, _) = c.periods();
    let twice = integrate_cycle(&RationalForm::holomorphic(), &c.cycle_a.repeated(2), &Tolerance::default()).unwrap();
    assert!((twice - wa * 2.0).norm() < 1e-10);
    for cyc in [&c.cycle_a, &c.cycle_b] {
        let (s, e) = (cyc.start().unwrap(), cyc.end().unwrap());
        assert!((s.z - e.z).norm() < 1e-10 && (s.w - e.w).norm() < 1e-10);
    }
}

#[test]
fn abelian_map_of_empty_path_is_zero() {
    let c = Curve::new(0.32).unwrap();
    let (u, p) = abelian_map(&c, &[], start(&c)).unwrap();
    assert_eq!(u, cx(0.0, 0.0));
    assert_eq!(p, start(&c));
}

#[test]
fn homotopic_paths_have_equal_abelian_map() {
    let c = Curve::new(0.32).unwrap();
    let target = cx(-0.5, 0.5);
    let (u1, p1) = abelian_map(&c, &lines(&[cx(0.0, 0.0), target]), start(&c)).unwrap();
    let (u2, p2) = abelian_map(&c, &lines(&[cx(0.0, 0.0), cx(-0.5, 0.0), target]), start(&c)).unwrap();
    assert!((u1 - u2).norm() < 1e-10);
    assert!((p1.w - p2.w).norm() < 1e-10);
}

#[test]
fn paths_differing_by_cycle_a_differ_by_its_period() {
    let c = Curve::new(0.32).unwrap();
    let (wa, _) = c.periods();
    let target = cx(-0.5, 0.5);
    let (u1, _) = abelian_map(&c, &lines(&[cx(0.0, 0.0), target]), start(&c)).unwrap();
    let around = [
        cx(0.0, 0.0),
        cx(0.1, 0.0),
        cx(0.1, 1.5),
        cx(-0.3, 1.5),
        cx(-0.3, -1.5),
        cx(0.1, -1.5),
        cx(0.1, 0.0),
        cx(0.0, 0.0),
        target,
    ];
    let (u2, _) = abelian_map(&c, &lines(&around), start(&c)).unwrap();
    let d = u2 - u1;
    assert!((d - wa).norm().min((d + wa).norm()) < 1e-10, "{d} vs {wa}");
}

#[test]
fn invert_abelian_is_lattice_periodic() {
    let c = Curve::new(0.32).unwrap();
    let seed = FlatPoint::base(&c);
    let (e1, e2) = c.rhombic_generators();
    let u0 = e1 * 0.1 + e2 * 0.13;
    let p = invert_abelian(&c, u0, seed).unwrap();
    let same = invert_abelian(&c, u0, FlatPoint { point: p, u: u0 }).unwrap();
    assert_eq!(same, p);
    let (wa, _) = c.periods();
    let q = invert_abelian(&c, u0 + wa, FlatPoint { point: p, u: u0 }).unwrap();
    assert!((q.z - p.z).norm() < 1e-8 && (q.w - p.w).norm() < 1e-8);
}

/// Coefficients of `d` in the lattice basis.
fn lattice_coords(c: &Curve, d: Complex) -> (f64, f64) {
    let (wa, wb) = c.periods();
    let det = c.determinant();
    ((wb.conj() * d).im / -det, (wa.conj() * d).im / det)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn abelian_round_trip(s in -0.45f64..0.45, t in -0.45f64..0.45) {
        let c = Curve::new(0.32).unwrap();
        let (e1, e2) = c.rhombic_generators();
        let u0 = e1 * 0.1 + e2 * 0.13;
        let seed = FlatPoint { point: invert_abelian(&c, u0, FlatPoint::base(&c)).unwrap(), u: u0 };
        let u = e1 * s + e2 * t;
        let p = invert_abelian(&c, u, seed).unwrap();
        prop_assert!(c.contains(&p));
        let seg = PathSegment::line(seed.point.z, p.z);
        let clear = c.finite_branch_points().iter().all(|&b| seg.distance_to(b) > 1e-2);
        prop_assume!(clear && p.z.norm() < 1e3);
        let (du, end) = abelian_map(&c, &[seg], seed.point).unwrap();
        prop_assume!((end.w - p.w).norm() < 1e-6 * (1.0 + p.w.norm()));
        let (m, n) = lattice_coords(&c, du - (u - u0));
        prop_assert!((m - m.round()).abs() < 1e-8 && (n - n.round()).abs() < 1e-8, "{m} {n}");
    }

    #[test]
    fn lifted_points_stay_on_curve(x in -2.0f64..2.0, y in -2.0f64..2.0, lambda in 0.1f64..0.9) {
        let c = Curve::new(lambda).unwrap();
        let seg = PathSegment::line(cx(0.0, 0.0), cx(x, y));
        prop_assume!(c.finite_branch_points().iter().all(|&b| seg.distance_to(b) > 1e-2));
        let p = lift_path(&c, &[seg], start(&c)).unwrap();
        prop_assert!(c.contains(&p));
    }

    #[test]
    fn loop_around_one_branch_point_flips_the_sheet(k in 0usize..3, r in 0.05f64..0.3, phase in 0.0f64..6.28) {
        let c = Curve::new(0.32).unwrap();
        let centre = c.finite_branch_points()[k];
        let p0 = c.point_near(centre + Complex::from_polar(r, phase), cx(1.0, 0.3));
        let end = lift_path(&c, &[PathSegment::circle(centre, r, phase, std::f64::consts::TAU)], p0).unwrap();
        prop_assert!((end.w + p0.w).norm() < 1e-9 * (1.0 + p0.w.norm()));
    }

    #[test]
    fn conjugate_path_is_a_lifted_path(x in -2.0f64..2.0, y in 0.1f64..2.0, lambda in 0.1f64..0.9) {
        let c = Curve::new(lambda).unwrap();
        let seg = PathSegment::line(cx(0.0, 0.0), cx(x, y));
        prop_assume!(c.finite_branch_points().iter().all(|&b| seg.distance_to(b) > 1e-2));
        let p = lift_path(&c, &[seg], start(&c)).unwrap();
        let q = lift_path(&c, &[PathSegment::line(cx(0.0, 0.0), cx(x, -y))], start(&c).conj()).unwrap();
        prop_assert!((q.w - p.w.conj()).norm() < 1e-9 * (1.0 + p.w.norm()));
        prop_assert!(c.contains(&p.conj()));
    }

    #[test]
    fn conjugate_periods_stay_in_the_lattice(lambda in 0.1f64..0.9) {
        let c = Curve::new(lambda).unwrap();
        let (wa, wb) = c.periods();
        for w in [wa.conj(), wb.conj()] {
            let (m, n) = lattice_coords(&c, w);
            prop_assert!((m - m.round()).abs() < 1e-8 && (n - n.round()).abs() < 1e-8);
        }
        let (da, db) = conjugation_defects(&c);
        prop_assert!(da < 1e-8 && db < 1e-8);
    }
}
