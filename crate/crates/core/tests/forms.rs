mod common;

use std::f64::consts::{PI, TAU};

use helicoid_core::curve::{lift_chain, lift_segment, CurvePoint, PathSegment};
use helicoid_core::forms::*;
use helicoid_core::poly::Poly;
use helicoid_core::quad::Tolerance;
use helicoid_core::scalar::cx;
use helicoid_core::{Complex, Curve, Params};
use proptest::prelude::*;

fn dz_over_z() -> RationalForm<f64> {
    RationalForm::new(
        Poly::constant(cx(1.0, 0.0)),
        Poly::from_roots(&[cx(0.0, 0.0)]),
        false,
        cx(1.0, 0.0),
    )
    .unwrap()
}

#[test]
fn dz_over_z_around_origin() {
    let c = Curve::new(0.32).unwrap();
    let p0 = c.point_near(cx(0.15, 0.0), cx(0.0, 1.0));
    let circle = lift_segment(&c, PathSegment::circle(cx(0.0, 0.0), 0.15, 0.0, TAU), p0).unwrap();
    let v = integrate_path(&dz_over_z(), &[circle], &Tolerance::default()).unwrap();
    assert!((v - cx(0.0, TAU)).norm() < 1e-12);
    let r = residue(&c, &dz_over_z(), c.point_near(cx(0.0, 0.0), cx(0.0, 1.0))).unwrap();
    assert!((r - cx(1.0, 0.0)).norm() < 1e-10);
}

#[test]
fn holomorphic_form_on_contractible_loop_vanishes() {
    let c = Curve::new(0.32).unwrap();
    let a = 0.59;
    let f = RationalForm::new(Poly::from_roots(&[cx(a, 0.0)]), Poly::constant(cx(1.0, 0.0)), true, cx(1.0, 0.0))
        .unwrap();
    let centre = cx(2.0, 2.0);
    let p0 = c.point_near(centre + 0.5, cx(1.0, 1.0));
    let lifted = lift_segment(&c, PathSegment::circle(centre, 0.5, 0.0, TAU), p0).unwrap();
    let v = integrate_path(&f, &[lifted], &Tolerance::default()).unwrap();
    assert!(v.norm() < 1e-11);
}

#[test]
fn cycle_integrals_are_self_convergent() {
    let p = common::solved();
    let c = Curve::new(p.lambda).unwrap();
    let tight = Tolerance::new(1e-14, 1e-16);
    for form in [make_dg_over_g(&p).unwrap(), make_dh(&p).unwrap(), RationalForm::holomorphic()] {
        for cyc in [&c.cycle_a, &c.cycle_b] {
            let x = integrate_cycle(&form, cyc, &Tolerance::default()).unwrap();
            let y = integrate_cycle(&form, cyc, &tight).unwrap();
            assert!((x - y).norm() < 1e-10);
        }
    }
}

#[test]
fn dg_over_g_structure_and_zeros() {
    let p = Params::new(0.32, 0.6, -0.3, 0.5).unwrap();
    let c = Curve::new(p.lambda).unwrap();
    let f = make_dg_over_g(&p).unwrap();
    assert_eq!(f.numerator().degree(), 2);
    assert_eq!(f.denominator().degree(), 1);
    assert!(f.over_w());
    for z in [p.alpha, p.beta] {
        let q = c.point_near(cx(z, 0.0), cx(0.0, 1.0));
        assert!(f.eval(&q).norm() < 1e-14);
        assert!(f.eval(&q.flipped()).norm() < 1e-14);
    }
}

#[test]
fn dh_zeros_and_end_pole() {
    let p = Params::new(0.32, 0.6, -0.3, 0.5).unwrap();
    let c = Curve::new(p.lambda).unwrap();
    let dh = make_dh(&p).unwrap();
    let q = c.point_near(cx(p.a, 0.0), cx(1.0, 0.0));
    assert_eq!(dh.eval(&q).norm(), 0.0);
    assert_eq!(dh.eval(&q.flipped()).norm(), 0.0);
    // One root in z, two points over it.
    assert_eq!(dh.numerator().degree() * 2, 2);
    assert_eq!(dh.end_pole_order(), 2);
    for dir in [0.3, 1.1, 2.9] {
        assert!((end_growth_exponent(&c, &dh, dir) - 2.0).abs() < 1e-5);
    }
}

#[test]
fn dg_over_g_has_unit_residues_and_none_at_the_end() {
    let p = common::solved();
    let c = Curve::new(p.lambda).unwrap();
    let f = make_dg_over_g(&p).unwrap();
    let plus = residue(&c, &f, p.pole_plus()).unwrap();
    let minus = residue(&c, &f, p.pole_plus().flipped()).unwrap();
    assert!((plus - cx(1.0, 0.0)).norm() < 1e-10);
    assert!((minus + cx(1.0, 0.0)).norm() < 1e-10);
    assert!((plus + minus).norm() < 1e-9);
    // A large circle traversed twice covers both sheets and encloses every
    // finite pole; what remains is the residue at the end.
    let r = 5.0;
    let p0 = c.point_near(cx(r, 0.0), cx(1.0, 0.0));
    let big = PathSegment::circle(cx(0.0, 0.0), r, 0.0, TAU);
    let path = lift_chain(&c, &[big, big], p0).unwrap();
    assert!((path[1].end().w - p0.w).norm() < 1e-9 * p0.w.norm());
    let v = integrate_path(&f, &path, &Tolerance::default()).unwrap() / cx(0.0, TAU);
    assert!(v.norm() < 1e-9, "{v}");
}

/// Real up to a multiple of `2πi` (loops around the poles of `dg/g`), or imaginary.
fn is_real_or_imaginary(v: Complex) -> bool {
    let turns = v.im / TAU;
    let tol = 1e-9 * (1.0 + v.norm());
    v.re.abs() < tol || (turns - turns.round()).abs() * TAU < tol
}

fn random_poly(c: &[f64]) -> Poly<f64> {
    Poly::new(c.chunks(2).map(|p| cx(p[0], p[1])).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linearity(
        n1 in proptest::collection::vec(-2.0f64..2.0, 6),
        n2 in proptest::collection::vec(-2.0f64..2.0, 6),
        c1 in -2.0f64..2.0,
        c2 in -2.0f64..2.0,
        x in -1.5f64..1.5,
        y in -1.5f64..1.5,
    ) {
        let c = Curve::new(0.32).unwrap();
        let den = Poly::from_roots(&[cx(3.0, 3.0), cx(-4.0, 1.0)]);
        let (p1, p2) = (random_poly(&n1), random_poly(&n2));
        let mixed = Poly::new(
            p1.coeffs().iter().zip(p2.coeffs()).map(|(a, b)| *a * c1 + *b * c2).collect(),
        );
        let form = |n: Poly<f64>| RationalForm::new(n, den.clone(), true, cx(1.0, 0.0));
        let (f1, f2) = (form(p1).unwrap(), form(p2).unwrap());
        let Ok(f12) = form(mixed) else { return Ok(()) };
        let seg = PathSegment::line(cx(0.0, 0.0), cx(x, y));
        prop_assume!(c.finite_branch_points().iter().all(|&b| seg.distance_to(b) > 1e-2));
        let path = lift_chain(&c, &[seg], c.point_near(cx(0.0, 0.0), cx(0.0, 1.0))).unwrap();
        let tol = Tolerance::default();
        let i1 = integrate_path(&f1, &path, &tol).unwrap();
        let i2 = integrate_path(&f2, &path, &tol).unwrap();
        let i12 = integrate_path(&f12, &path, &tol).unwrap();
        prop_assert!((i12 - (i1 * c1 + i2 * c2)).norm() < 1e-11 * (1.0 + i1.norm() + i2.norm()));
    }

    #[test]
    fn reversal_negates(x in -1.5f64..1.5, y in -1.5f64..1.5, a in 0.4f64..2.0) {
        let c = Curve::new(0.32).unwrap();
        let p = Params::new(0.32, a, -0.3, 0.2).unwrap();
        let seg = PathSegment::line(cx(0.0, 0.0), cx(x, y));
        prop_assume!(seg.distance_to(cx(a, 0.0)) > 1e-2);
        prop_assume!(c.finite_branch_points().iter().all(|&b| seg.distance_to(b) > 1e-2));
        let start = c.point_near(cx(0.0, 0.0), cx(0.0, 1.0));
        let fwd = lift_segment(&c, seg, start).unwrap();
        let back = lift_segment(&c, seg.reversed(), fwd.end()).unwrap();
        let tol = Tolerance::default();
        for f in [make_dg_over_g(&p).unwrap(), make_dh(&p).unwrap()] {
            let i = integrate_segment(&f, &fwd, &tol).unwrap();
            let j = integrate_segment(&f, &back, &tol).unwrap();
            prop_assert!((i + j).norm() < 1e-12 * (1.0 + i.norm()));
        }
    }

    #[test]
    fn invariant_cycles_give_real_or_imaginary_periods(
        lambda in 0.1f64..0.9,
        a in 0.0f64..3.0,
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        prop_assume!((a - lambda).abs() > 0.05 && (a - alpha).abs() > 0.05 && (a - beta).abs() > 0.05);
        let p = Params::new(lambda, a, alpha, beta).unwrap();
        let c = Curve::new(lambda).unwrap();
        let f = make_dg_over_g(&p).unwrap();
        let tol = Tolerance::default();
        let Ok(pa) = integrate_cycle(&f, &c.cycle_a, &tol) else { return Ok(()) };
        let Ok(pb) = integrate_cycle(&f, &c.cycle_b, &tol) else { return Ok(()) };
        // A and A + 2B are the cycles fixed (up to sign) by conjugation.
        prop_assert!(is_real_or_imaginary(pa), "{pa}");
        prop_assert!(is_real_or_imaginary(pa + pb * 2.0), "{}", pa + pb * 2.0);
    }
}

#[test]
fn residue_rejects_branch_point_centre() {
    let c = Curve::new(0.32).unwrap();
    let err = residue(&c, &dz_over_z(), CurvePoint::new(cx(0.0, 1.0), cx(0.0, 0.0)));
    assert!(err.is_err());
    let _ = PI;
}
