mod common;

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use common::{dist, lattice_walk, norm};
use helicoid_core::scalar::cx;
use helicoid_core::surface::*;
use helicoid_core::verify::{check_symmetry, RigidMotion};
use helicoid_core::{Complex, SurfaceMesh};
use proptest::prelude::*;

fn evaluator() -> SurfaceEvaluator<f64> {
    SurfaceEvaluator::new(&common::solved()).unwrap()
}

fn rel(a: [f64; 3], b: [f64; 3]) -> f64 {
    dist(a, b) / norm(a).max(1.0)
}

/// Flat coordinate of the zero of `g`, on the real axis.
fn vertical_point(ev: &SurfaceEvaluator<f64>) -> f64 {
    let a = ev.params().a;
    let (mut lo, mut hi) = (0.0, 3.0);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        match ev.integrate(&[cx(m, 0.0)]) {
            Ok(s) if s.z.re < a => lo = m,
            _ => hi = m,
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn empty_path_is_the_origin() {
    let ev = evaluator();
    let p = ev.evaluate_point(&[]).unwrap();
    assert_eq!(p.position, [0.0; 3]);
    assert!((p.gauss().norm() - 1.0).abs() < 1e-15);
    assert_eq!(g_at_base(ev.params()), cx(1.0, 0.0));
}

#[test]
fn homotopic_paths_agree() {
    let ev = evaluator();
    let (e1, e2) = ev.curve().rhombic_generators();
    let target = e1 * 0.13 + e2 * 0.21;
    let direct = ev.evaluate_point(&[target]).unwrap();
    let bent = ev.evaluate_point(&[e1 * 0.2, e1 * 0.2 + e2 * 0.1, target]).unwrap();
    assert!(dist(direct.position, bent.position) < 1e-8);
}

#[test]
fn gauss_map_vanishes_simply_at_the_vertical_point() {
    let ev = evaluator();
    let ua = vertical_point(&ev);
    let s = ev.integrate(&[cx(ua - 0.1, 0.0)]).unwrap();
    assert!((s.z.re - ev.params().a).abs() < 0.1);
    let ratio = |h: f64| {
        let s = ev.integrate(&[cx(ua - 0.1, 0.1), cx(ua, h)]).unwrap();
        s.log_g.exp().norm() / h
    };
    let (r1, r2) = (ratio(1e-3), ratio(1e-4));
    assert!(r2 * 1e-4 < 1e-1);
    assert!((r1 - r2).abs() < 1e-2 * r2, "{r1} {r2}");
}

#[test]
fn base_phase_rotates_about_vertical_axis() {
    let p = common::solved();
    let phi = 0.7;
    let ev = SurfaceEvaluator::new(&p).unwrap();
    let turned = SurfaceEvaluator::new(&p).unwrap().with_base_gauss(Complex::from_polar(1.0, phi));
    let rot = RigidMotion::rotation_about_axis(2, phi);
    let (e1, e2) = ev.curve().rhombic_generators();
    for u in [e1 * 0.1 + e2 * 0.3, e1 * -0.2 + e2 * 0.05, e2 * 0.4] {
        let a = ev.evaluate_point(&[u]).unwrap();
        let b = turned.evaluate_point(&[u]).unwrap();
        assert!(rel(rot.apply(a.position), b.position) < 1e-8);
    }
}

#[test]
fn conjugating_twice_negates() {
    let ev = evaluator();
    let (e1, e2) = ev.curve().rhombic_generators();
    let u = e1 * 0.1 + e2 * 0.2;
    let s = ev.integrate(&[u]).unwrap();
    let x = ev.point_from_state(&s, u, 0.0).position;
    let xc = ev.conjugate_evaluate(&[u]).unwrap().position;
    assert_eq!(xc, ev.point_from_state(&s, u, FRAC_PI_2).position);
    let twice = ev.point_from_state(&s, u, PI).position;
    for k in 0..3 {
        assert!((twice[k] + x[k]).abs() < 1e-9 * (1.0 + x[k].abs()));
    }
}

fn index(mesh: &SurfaceMesh) -> HashMap<(usize, usize), usize> {
    mesh.grid.iter().enumerate().map(|(k, g)| (*g, k)).collect()
}

#[test]
fn coarse_mesh_is_well_formed() {
    let mesh = build_mesh(&common::solved(), 8, 50.0).unwrap();
    mesh.validate().unwrap();
    assert!(mesh.vertices.len() <= 64);
    for v in &mesh.vertices {
        assert!((norm(v.normal) - 1.0).abs() < 1e-12);
        assert!(dist(v.normal, normal_from_gauss(v.gauss())) < 1e-6);
    }
}

#[test]
fn refinement_keeps_shared_vertices() {
    let p = common::solved();
    let coarse = build_mesh(&p, 16, 10.0).unwrap();
    let fine = build_mesh(&p, 32, 10.0).unwrap();
    let fi = index(&fine);
    let mut shared = 0;
    for (k, &(i, j)) in coarse.grid.iter().enumerate() {
        if let Some(&q) = fi.get(&(2 * i, 2 * j)) {
            assert!(rel(coarse.vertices[k].position, fine.vertices[q].position) < 1e-7);
            shared += 1;
        }
    }
    assert!(shared > 200);
}

#[test]
fn symmetry_lines_are_straight_and_cross_at_the_centre() {
    let n = 64;
    let mesh = build_mesh(&common::solved(), n, 10.0).unwrap();
    let idx = index(&mesh);
    let centre = mesh.vertices[idx[&(n / 2, n / 2)]].position;
    assert!(norm(centre) < 1e-12);
    let (mut vertical, mut horizontal) = (0, 0);
    for (&(i, j), &k) in &idx {
        let x = mesh.vertices[k].position;
        let scale = norm(x).max(1.0);
        if i == j {
            assert!(x[0].abs() / scale < 1e-5 && x[1].abs() / scale < 1e-5, "{x:?}");
            vertical += 1;
        }
        if i + j == n {
            assert!(x[0].abs() / scale < 1e-5 && x[2].abs() / scale < 1e-5, "{x:?}");
            horizontal += 1;
        }
    }
    assert!(vertical > 10 && horizontal > 10);
}

#[test]
fn half_turns_about_the_lines_preserve_the_mesh() {
    let mesh = build_mesh(&common::solved(), 64, 10.0).unwrap();
    for axis in [1, 2] {
        assert!(check_symmetry(&mesh, &RigidMotion::rotation_about_axis(axis, PI)) < 1e-5);
    }
}

#[test]
fn metric_factor_is_finite_and_positive() {
    let p = common::solved();
    let mesh = build_mesh(&p, 32, 50.0).unwrap();
    for v in &mesh.vertices {
        let g = v.gauss().norm();
        let lambda = 0.5 * (g + 1.0 / g) * (v.z - p.a).norm();
        assert!(lambda.is_finite() && lambda > 0.0);
    }
}

#[test]
fn triangles_that_resolve_the_gauss_map_agree_with_normals() {
    let mesh = build_mesh(&common::solved(), 64, 10.0).unwrap();
    let mut checked = 0;
    for t in &mesh.triangles {
        let vs: Vec<&SurfacePoint<f64>> = t.iter().map(|&k| &mesh.vertices[k]).collect();
        // `log g` jumps and fast phase rotation both disqualify a triangle.
        let spread = (0..3).map(|k| (vs[k].log_gauss - vs[(k + 1) % 3].log_gauss).norm()).fold(0.0, f64::max);
        if spread > 0.5 {
            continue;
        }
        let q: Vec<[f64; 3]> = vs.iter().map(|v| v.position).collect();
        let a = [q[1][0] - q[0][0], q[1][1] - q[0][1], q[1][2] - q[0][2]];
        let b = [q[2][0] - q[0][0], q[2][1] - q[0][1], q[2][2] - q[0][2]];
        let n = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let m: f64 = (0..3).map(|k| n[k] * vs.iter().map(|v| v.normal[k]).sum::<f64>()).sum();
        assert!(m > 0.0);
        checked += 1;
    }
    assert!(checked > 1000, "{checked}");
}

/// Median over interior vertices of the grid-difference conformality defect.
fn grid_conformality(n: usize) -> f64 {
    let p = common::solved();
    let mesh = build_mesh(&p, n, 10.0).unwrap();
    let (e1, e2) = helicoid_core::Curve::new(p.lambda).unwrap().rhombic_generators();
    let angle = (e2 / e1).arg().cos();
    let idx = index(&mesh);
    let mut defects = Vec::new();
    for (&(i, j), _) in &idx {
        let at = |a: isize, b: isize| {
            idx.get(&((i as isize + a) as usize, (j as isize + b) as usize)).map(|&k| mesh.vertices[k].position)
        };
        if i == 0 || j == 0 {
            continue;
        }
        let (Some(a), Some(b), Some(c), Some(d)) = (at(1, 0), at(-1, 0), at(0, 1), at(0, -1)) else {
            continue;
        };
        let t1: Vec<f64> = (0..3).map(|k| a[k] - b[k]).collect();
        let t2: Vec<f64> = (0..3).map(|k| c[k] - d[k]).collect();
        let l1 = t1.iter().map(|x| x * x).sum::<f64>().sqrt();
        let l2 = t2.iter().map(|x| x * x).sum::<f64>().sqrt();
        let cos = t1.iter().zip(&t2).map(|(x, y)| x * y).sum::<f64>() / (l1 * l2);
        defects.push((l1 / l2 - 1.0).abs().max((cos - angle).abs()));
    }
    defects.sort_by(f64::total_cmp);
    defects[defects.len() / 2]
}

#[test]
fn grid_conformality_improves_under_refinement() {
    let (a, b) = (grid_conformality(64), grid_conformality(128));
    assert!(b * 3.0 < a, "{a} {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normals_match_the_gauss_map(s in -0.45f64..0.45, t in -0.45f64..0.45) {
        let ev = evaluator();
        let (e1, e2) = ev.curve().rhombic_generators();
        let u = e1 * s + e2 * t;
        let path = [cx(u.re, 0.0), u];
        let Ok(p) = ev.evaluate_point(&path) else { return Ok(()) };
        prop_assert!((norm(p.normal) - 1.0).abs() < 1e-12);
        prop_assert!(dist(p.normal, normal_from_gauss(p.gauss())) < 1e-6);
    }

    #[test]
    fn flat_coordinate_is_conformal(s in -0.3f64..0.3, t in -0.3f64..0.3) {
        let ev = evaluator();
        let (e1, e2) = ev.curve().rhombic_generators();
        let u = e1 * s + e2 * t;
        let Ok(st) = ev.integrate(&[u]) else { return Ok(()) };
        let h = 1e-6;
        let x = ev.point_from_state(&st, u, 0.0).position;
        let along = |d: Complex| ev.step(st, u, u + d).map(|s| ev.point_from_state(&s, u + d, 0.0).position);
        let (Ok(a), Ok(b)) = (along(cx(h, 0.0)), along(cx(0.0, h))) else { return Ok(()) };
        let ta: Vec<f64> = (0..3).map(|k| a[k] - x[k]).collect();
        let tb: Vec<f64> = (0..3).map(|k| b[k] - x[k]).collect();
        let la = ta.iter().map(|v| v * v).sum::<f64>().sqrt();
        let lb = tb.iter().map(|v| v * v).sum::<f64>().sqrt();
        let cos = ta.iter().zip(&tb).map(|(p, q)| p * q).sum::<f64>() / (la * lb);
        prop_assert!((la / lb - 1.0).abs() < 1e-4 && cos.abs() < 1e-4, "{la} {lb} {cos}");
    }

    #[test]
    fn lattice_translates_give_the_same_point(word in proptest::collection::vec((0usize..4, -0.5f64..0.5, -0.5f64..0.5), 1..6)) {
        let ev = evaluator();
        let (e1, e2) = ev.curve().rhombic_generators();
        let target = e1 * 0.13 + e2 * 0.21;
        let direct = ev.evaluate_point(&[target]).unwrap();
        let walked = ev.evaluate_point(&lattice_walk(e1, e2, &word, target)).unwrap();
        prop_assert!(dist(direct.position, walked.position) < 1e-7);
        prop_assert!(dist(direct.normal, walked.normal) < 1e-9);
    }
}
