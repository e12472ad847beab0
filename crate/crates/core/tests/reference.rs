use std::f64::consts::{FRAC_PI_2, PI};

use helicoid_core::quad::Tolerance;
use helicoid_core::reference::*;
use helicoid_core::scalar::cx;
use helicoid_core::surface::associate;
use proptest::prelude::*;

fn max_diff(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).abs()).fold(0.0, f64::max)
}

#[test]
fn marked_points() {
    assert_eq!(helicoid_closed(cx(0.0f64, 0.0)), [0.0, -0.0, -0.0]);
    assert_eq!(catenoid_closed(cx(0.0f64, 0.0)), [0.0, -0.0, 0.0]);
    let h = helicoid_closed(cx(1.0f64, 0.0));
    assert!((h[1] + 1.1752011936438014).abs() < 1e-15);
    let c = catenoid_closed(cx(0.0f64, PI));
    assert!(max_diff(c, [2.0, 0.0, 0.0]) < 1e-15);
    assert_eq!(helicoid_weierstrass(cx(0.0f64, 0.0)).unwrap(), [0.0; 3]);
}

#[test]
fn one_plus_i_matches_closed_form() {
    let p = cx(1.0f64, 1.0);
    assert!(max_diff(helicoid_weierstrass(p).unwrap(), helicoid_closed(p)) < 1e-9);
}

#[test]
fn grid_oracles() {
    let (mut h, mut c) = (0.0f64, 0.0f64);
    for i in 0..20 {
        for j in 0..20 {
            let p = cx(-2.0 + 4.0 * i as f64 / 19.0, -PI + 2.0 * PI * j as f64 / 19.0);
            h = h.max(max_diff(helicoid_weierstrass(p).unwrap(), helicoid_closed(p)));
            c = c.max(max_diff(catenoid_weierstrass(p).unwrap(), catenoid_closed(p)));
            let x = catenoid_closed(p);
            let shifted = (x[0] - 1.0).powi(2) + x[1].powi(2);
            assert!((shifted - x[2].cosh().powi(2)).abs() < 1e-9 * (1.0 + shifted));
        }
    }
    assert!(h < 1e-9 && c < 1e-9, "{h} {c}");
}

#[test]
fn straight_and_bent_paths_agree() {
    let data = PlaneData::helicoid();
    let tol = Tolerance::default();
    let a = weierstrass_plane(&data, &[cx(2.0, -1.0)], &tol).unwrap();
    let b = weierstrass_plane(&data, &[cx(2.0, 0.0), cx(2.0, -1.0)], &tol).unwrap();
    for k in 0..3 {
        assert!((a[k] - b[k]).norm() < 1e-10);
    }
}

#[test]
fn conjugating_twice_negates() {
    let f = weierstrass_plane(&PlaneData::helicoid(), &[cx(0.7, -1.2)], &Tolerance::default()).unwrap();
    let x = associate(&f, 0.0);
    let y = associate(&f, PI);
    for k in 0..3 {
        assert!((x[k] + y[k]).abs() < 1e-9);
    }
    assert_eq!(ReferenceKind::Catenoid.angle::<f64>(), FRAC_PI_2);
}

#[test]
fn reference_mesh_matches_closed_form() {
    for kind in [ReferenceKind::Helicoid, ReferenceKind::Catenoid] {
        let mesh = reference_mesh::<f64>(kind, 16).unwrap();
        assert_eq!(mesh.vertices.len(), 17 * 17);
        for v in &mesh.vertices {
            assert!(max_diff(v.position, kind.closed(v.flat_coord)) < 1e-9);
        }
    }
}

#[test]
fn single_precision_closed_forms() {
    let a = helicoid_closed(cx(0.5f32, 1.0));
    let b = helicoid_closed(cx(0.5f64, 1.0));
    for k in 0..3 {
        assert!((a[k] as f64 - b[k]).abs() < 1e-6);
    }
}

proptest! {
    #[test]
    fn helicoid_contains_lines(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        // x = 0 is the vertical axis.
        let v = helicoid_closed(cx(0.0, y));
        prop_assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);
        // y = const is a horizontal line through the axis.
        let p = helicoid_closed(cx(x, y));
        prop_assert!((p[2] + y).abs() < 1e-15);
        let cross = p[0] * (-y.cos()) - p[1] * y.sin();
        prop_assert!(cross.abs() < 1e-12 * (1.0 + p[0].abs() + p[1].abs()));
    }

    #[test]
    fn oracles_agree_off_grid(x in -2.0f64..2.0, y in -PI..PI) {
        let p = cx(x, y);
        prop_assert!(max_diff(helicoid_weierstrass(p).unwrap(), helicoid_closed(p)) < 1e-9);
        prop_assert!(max_diff(catenoid_weierstrass(p).unwrap(), catenoid_closed(p)) < 1e-9);
    }
}
