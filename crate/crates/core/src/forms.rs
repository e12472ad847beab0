//! Meromorphic 1-forms `R(z)·dz/w` (or `R(z)·dz`) on the curve: the Gauss
//! map's logarithmic differential, the height differential and `dz/w`.

use crate::curve::{
    lift_chain, lift_segment, Cycle, CurvePoint, HCurve, LiftedSegment, PathSegment, PATH_CLEARANCE,
};
use crate::error::{Error, Result};
use crate::flow::FormCoefficients;
use crate::poly::Poly;
use crate::quad::{integrate, Tolerance};
use crate::scalar::{cx_to_f64, imag_unit, lit, real, to_f64, Cx, Scalar};

/// Radius of the residue contour before any shrinking.
pub const RESIDUE_RADIUS: f64 = 1e-2;
const RESIDUE_SHRINKS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct RationalForm<T> {
    numerator: Poly<T>,
    denominator: Poly<T>,
    over_w: bool,
    scale: Cx<T>,
}

impl<T: Scalar> RationalForm<T> {
    /// Fails when the denominator vanishes identically or shares a root
    /// (within `1e-10`) with the numerator.
    pub fn new(numerator: Poly<T>, denominator: Poly<T>, over_w: bool, scale: Cx<T>) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidParams("denominator is identically zero".into()));
        }
        let common = lit::<T>(1e-10);
        for p in numerator.roots() {
            for q in denominator.roots() {
                if (p - q).norm() < common {
                    return Err(Error::InvalidParams(format!(
                        "numerator and denominator share the root {:?}",
                        cx_to_f64(p)
                    )));
                }
            }
        }
        Ok(Self {
            numerator,
            denominator,
            over_w,
            scale,
        })
    }

    /// `dz/w`.
    pub fn holomorphic() -> Self {
        let one = Poly::constant(real(T::one()));
        Self {
            numerator: one.clone(),
            denominator: one,
            over_w: true,
            scale: real(T::one()),
        }
    }

    pub fn numerator(&self) -> &Poly<T> {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly<T> {
        &self.denominator
    }

    pub fn over_w(&self) -> bool {
        self.over_w
    }

    pub fn scale(&self) -> Cx<T> {
        self.scale
    }

    /// `scale·N(z)/D(z)`, the coefficient in front of `dz/w` (or `dz`).
    pub fn coefficient(&self, z: Cx<T>) -> Cx<T> {
        self.scale * self.numerator.eval(z) / self.denominator.eval(z)
    }

    /// Value of the form against `dz` at a curve point.
    pub fn eval(&self, p: &CurvePoint<T>) -> Cx<T> {
        let c = self.coefficient(p.z);
        if self.over_w {
            c / p.w
        } else {
            c
        }
    }

    pub fn poles(&self) -> Vec<Cx<T>> {
        self.denominator.roots()
    }

    /// `c·self`.
    pub fn scaled(&self, c: Cx<T>) -> Self {
        Self {
            scale: self.scale * c,
            ..self.clone()
        }
    }

    /// Pole order at the end, from the degrees: `z = τ⁻²` and `dz/w ≈ −2dτ`
    /// turn `z^m·dz/w` into `τ^{−2m}` and `z^m·dz` into `τ^{−2m−3}`.
    pub fn end_pole_order(&self) -> i64 {
        let m = self.numerator.degree() as i64 - self.denominator.degree() as i64;
        if self.over_w {
            2 * m
        } else {
            2 * m + 3
        }
    }

    fn density(&self, seg: &LiftedSegment<T>, t: T) -> Cx<T> {
        if self.over_w {
            let (z, dzw) = seg.dz_over_w(t);
            self.coefficient(z) * dzw
        } else {
            let (z, dz) = seg.dz(t);
            self.coefficient(z) * dz
        }
    }
}

/// Solved (or trial) Weierstrass parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandleParams<T> {
    pub lambda: T,
    pub a: T,
    pub alpha: T,
    pub beta: T,
    pub rho: Cx<T>,
}

impl<T: Scalar> HandleParams<T> {
    /// Assembles the parameters with `ρ = w(a)/((a − α)(a − β))`, where
    /// `w(a)` is the root with non-negative real part (positive for `a > λ`).
    pub fn new(lambda: T, a: T, alpha: T, beta: T) -> Result<Self> {
        let w_a = w_at_a(lambda, a);
        if w_a.norm() < lit(1e-14) {
            return Err(Error::InvalidParams("a coincides with the branch point λ".into()));
        }
        let c0 = (a - alpha) * (a - beta);
        if c0.abs() < lit(1e-14) {
            return Err(Error::InvalidParams("a coincides with α or β".into()));
        }
        let p = Self {
            lambda,
            a,
            alpha,
            beta,
            rho: w_a / c0,
        };
        p.validate()?;
        Ok(p)
    }

    /// The pole of `dg/g` where the residue is `+1`: `(a, +w(a))`.
    pub fn pole_plus(&self) -> CurvePoint<T> {
        CurvePoint::new(real(self.a), w_at_a(self.lambda, self.a))
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.lambda, self.a, self.alpha, self.beta];
        if all.iter().any(|x| !x.is_finite()) || !self.rho.norm().is_finite() {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.a == self.alpha || self.a == self.beta {
            return Err(Error::InvalidParams("a coincides with α or β".into()));
        }
        if self.a == self.lambda {
            return Err(Error::InvalidParams("a coincides with the branch point λ".into()));
        }
        Ok(())
    }

    pub fn coefficients(&self) -> FormCoefficients<T> {
        FormCoefficients {
            a: real(self.a),
            alpha: real(self.alpha),
            beta: real(self.beta),
            rho: self.rho,
        }
    }
}

/// `w` over `z = a` on the sheet with non-negative real part.
pub fn w_at_a<T: Scalar>(lambda: T, a: T) -> Cx<T> {
    let w = crate::curve::curve_poly(real(lambda), real(a)).sqrt();
    if w.re < T::zero() {
        -w
    } else {
        w
    }
}

/// `ρ(z − α)(z − β)/(z − a)·dz/w`.
pub fn make_dg_over_g<T: Scalar>(params: &HandleParams<T>) -> Result<RationalForm<T>> {
    params.validate()?;
    let num = Poly::from_roots(&[real(params.alpha), real(params.beta)]);
    let den = Poly::from_roots(&[real(params.a)]);
    RationalForm::new(num, den, true, params.rho)
}

/// `i(z − a)·dz/w`.
pub fn make_dh<T: Scalar>(params: &HandleParams<T>) -> Result<RationalForm<T>> {
    params.validate()?;
    let num = Poly::from_roots(&[real(params.a)]);
    let den = Poly::constant(real(T::one()));
    RationalForm::new(num, den, true, imag_unit())
}

fn check_pole_clearance<T: Scalar>(form: &RationalForm<T>, seg: &LiftedSegment<T>) -> Result<()> {
    let clearance = lit::<T>(PATH_CLEARANCE);
    for p in form.poles() {
        let d = seg.segment().distance_to(p);
        if d < clearance {
            let (re, im) = cx_to_f64(p);
            return Err(Error::PathTooClose {
                re,
                im,
                clearance: to_f64(d),
            });
        }
    }
    Ok(())
}

/// Integral of `form` over one lifted segment.
pub fn integrate_segment<T: Scalar>(
    form: &RationalForm<T>,
    seg: &LiftedSegment<T>,
    tol: &Tolerance<T>,
) -> Result<Cx<T>> {
    check_pole_clearance(form, seg)?;
    Ok(integrate(|t| form.density(seg, t), T::zero(), T::one(), tol)?.value)
}

/// Integral of `form` along a chain of lifted segments.
pub fn integrate_path<T: Scalar>(
    form: &RationalForm<T>,
    path: &[LiftedSegment<T>],
    tol: &Tolerance<T>,
) -> Result<Cx<T>> {
    let mut total = Cx::new(T::zero(), T::zero());
    for seg in path {
        total = total + integrate_segment(form, seg, tol)?;
    }
    Ok(total)
}

pub fn integrate_cycle<T: Scalar>(form: &RationalForm<T>, cycle: &Cycle<T>, tol: &Tolerance<T>) -> Result<Cx<T>> {
    integrate_path(form, &cycle.segments, tol)
}

/// `(1/2πi)∮` of the form over a small lifted circle around `at`.
///
/// The radius starts at `1e-2` and is halved (up to five times) while another
/// pole or branch point lies within twice the radius.
pub fn residue<T: Scalar>(curve: &HCurve<T>, form: &RationalForm<T>, at: CurvePoint<T>) -> Result<Cx<T>> {
    let mut obstacles: Vec<Cx<T>> = curve.finite_branch_points().to_vec();
    obstacles.extend(form.poles());
    let nearest = obstacles
        .iter()
        .map(|&p| (p - at.z).norm())
        .filter(|&d| d > lit(1e-9))
        .fold(T::infinity(), T::min);
    let mut r: T = lit(RESIDUE_RADIUS);
    let mut shrinks = 0;
    while nearest <= r + r {
        if shrinks == RESIDUE_SHRINKS {
            return Err(Error::BadContour(format!(
                "nearest singular point at distance {:e}",
                to_f64(nearest)
            )));
        }
        r = r * lit(0.5);
        shrinks += 1;
    }
    let start_z = at.z + r;
    let start = curve.point_near(start_z, at.w);
    let circle = PathSegment::circle(at.z, r, T::zero(), T::TAU());
    let lifted = lift_segment(curve, circle, start)?;
    if (lifted.end().w - start.w).norm() > lit::<T>(1e-8) * start.w.norm() {
        return Err(Error::BadContour("contour changes sheet; centre is a branch point".into()));
    }
    // Poles at the centre are expected; skip the clearance check for them.
    let tol = Tolerance::new(lit(1e-13), lit(1e-15));
    let value = integrate(|t| form.density(&lifted, t), T::zero(), T::one(), &tol)?.value;
    Ok(value / (imag_unit::<T>() * T::TAU()))
}

/// Pole order at the end estimated from the growth of the form in the local
/// parameter `τ` with `z = τ⁻²`: returns the fitted exponent `k` such that the
/// form behaves like `τ^{−k}dτ`.
pub fn end_growth_exponent<T: Scalar>(curve: &HCurve<T>, form: &RationalForm<T>, direction: T) -> T {
    let sample = |tau: T| -> T {
        let tcx = Cx::from_polar(tau, direction);
        let z = tcx.powi(-2);
        let dz_dtau = tcx.powi(-3) * lit::<T>(-2.0);
        let w = curve.poly(z).sqrt();
        let value = if form.over_w {
            form.coefficient(z) * dz_dtau / w
        } else {
            form.coefficient(z) * dz_dtau
        };
        value.norm().ln()
    };
    let (t1, t2): (T, T) = (lit(1e-3), lit(1e-4));
    -(sample(t2) - sample(t1)) / (t2.ln() - t1.ln())
}

/// Integrates a form along segments starting at `start`, lifting on the way.
pub fn integrate_from<T: Scalar>(
    curve: &HCurve<T>,
    form: &RationalForm<T>,
    segments: &[PathSegment<T>],
    start: CurvePoint<T>,
    tol: &Tolerance<T>,
) -> Result<Cx<T>> {
    let path = lift_chain(curve, segments, start)?;
    integrate_path(form, &path, tol)
}
