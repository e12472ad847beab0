//! The elliptic curve `w² = (z − λ)(z² + 1)`, sheet continuation along
//! paths, the slit homology basis and the flat coordinate `u = ∫ dz/w`.

use crate::error::{Error, Result};
use crate::flow::{Flow, FlowState};
use crate::quad::{integrate, Tolerance};
use crate::scalar::{cx_to_f64, imag_unit, lit, real, sqrt_near, to_f64, Cx, Scalar};

/// Clearance kept between ordinary path segments and singular points.
pub const PATH_CLEARANCE: f64 = 1e-3;
/// Tolerance on `|w² − P(z)|`, scaled by `1 + |z|³`.
pub const CURVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint<T> {
    pub z: Cx<T>,
    pub w: Cx<T>,
}

impl<T: Scalar> CurvePoint<T> {
    pub fn new(z: Cx<T>, w: Cx<T>) -> Self {
        Self { z, w }
    }

    /// The point over the other sheet.
    pub fn flipped(&self) -> Self {
        Self { z: self.z, w: -self.w }
    }

    /// Complex conjugate point; maps the curve to itself for real `λ`.
    pub fn conj(&self) -> Self {
        Self {
            z: self.z.conj(),
            w: self.w.conj(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchPoint<T> {
    Finite(Cx<T>),
    Infinity,
}

/// A smooth arc in the `z`-plane, parametrised over `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathSegment<T> {
    Line {
        from: Cx<T>,
        to: Cx<T>,
    },
    /// `centre + radius·e^{i(start_angle + sweep·t)}`.
    Circle {
        centre: Cx<T>,
        radius: T,
        start_angle: T,
        sweep: T,
    },
    /// Straight run between two branch points, parametrised as
    /// `z = from + (to − from)·sin²φ` so that `dz/w` stays smooth at both ends.
    /// `w_mid` is the value of `w` at the midpoint and fixes the sheet.
    Slit {
        from: Cx<T>,
        to: Cx<T>,
        w_mid: Cx<T>,
    },
}

impl<T: Scalar> PathSegment<T> {
    pub fn line(from: Cx<T>, to: Cx<T>) -> Self {
        PathSegment::Line { from, to }
    }

    pub fn circle(centre: Cx<T>, radius: T, start_angle: T, sweep: T) -> Self {
        PathSegment::Circle {
            centre,
            radius,
            start_angle,
            sweep,
        }
    }

    fn angle(t: T) -> T {
        t * T::FRAC_PI_2()
    }

    pub fn z(&self, t: T) -> Cx<T> {
        match *self {
            PathSegment::Line { from, to } => from + (to - from) * t,
            PathSegment::Circle {
                centre,
                radius,
                start_angle,
                sweep,
            } => centre + Cx::from_polar(radius, start_angle + sweep * t),
            PathSegment::Slit { from, to, .. } => {
                let s = Self::angle(t).sin();
                from + (to - from) * (s * s)
            }
        }
    }

    pub fn dz_dt(&self, t: T) -> Cx<T> {
        match *self {
            PathSegment::Line { from, to } => to - from,
            PathSegment::Circle {
                radius,
                start_angle,
                sweep,
                ..
            } => imag_unit::<T>() * Cx::from_polar(radius * sweep, start_angle + sweep * t),
            PathSegment::Slit { from, to, .. } => {
                let phi = Self::angle(t);
                (to - from) * ((phi + phi).sin() * T::FRAC_PI_2())
            }
        }
    }

    pub fn start(&self) -> Cx<T> {
        self.z(T::zero())
    }

    pub fn end(&self) -> Cx<T> {
        self.z(T::one())
    }

    pub fn reversed(&self) -> Self {
        match *self {
            PathSegment::Line { from, to } => PathSegment::Line { from: to, to: from },
            PathSegment::Circle {
                centre,
                radius,
                start_angle,
                sweep,
            } => PathSegment::Circle {
                centre,
                radius,
                start_angle: start_angle + sweep,
                sweep: -sweep,
            },
            PathSegment::Slit { from, to, w_mid } => PathSegment::Slit {
                from: to,
                to: from,
                w_mid,
            },
        }
    }

    fn is_degenerate(&self) -> bool {
        match *self {
            PathSegment::Line { from, to } => from == to,
            PathSegment::Circle { radius, sweep, .. } => radius == T::zero() || sweep == T::zero(),
            PathSegment::Slit { from, to, .. } => from == to,
        }
    }

    /// Smallest distance from `p` to the arc.
    pub fn distance_to(&self, p: Cx<T>) -> T {
        match *self {
            PathSegment::Line { from, to } | PathSegment::Slit { from, to, .. } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == T::zero() {
                    return (p - from).norm();
                }
                let s = ((p - from) * d.conj()).re / len2;
                let s = s.max(T::zero()).min(T::one());
                (p - (from + d * s)).norm()
            }
            PathSegment::Circle {
                centre,
                radius,
                start_angle,
                sweep,
            } => {
                let rel = p - centre;
                let ends = (p - self.start()).norm().min((p - self.end()).norm());
                if rel.norm() == T::zero() {
                    return radius;
                }
                // Angular offset of p from the start, measured along the sweep.
                let mut offset = (rel.arg() - start_angle) * sweep.signum();
                let tau = T::TAU();
                offset = offset - (offset / tau).floor() * tau;
                if offset <= sweep.abs() || sweep.abs() >= tau {
                    (rel.norm() - radius).abs().min(ends)
                } else {
                    ends
                }
            }
        }
    }
}

/// Continuation record for one square root along a segment: knots in `t`
/// with the tracked root value at each.
#[derive(Debug, Clone)]
struct SheetTrack<T> {
    knots: Vec<T>,
    roots: Vec<Cx<T>>,
}

impl<T: Scalar> SheetTrack<T> {
    fn build<F: Fn(T) -> Cx<T>>(radicand: F, t0: T, r0: Cx<T>) -> Result<Self> {
        let forward = Self::march(&radicand, t0, r0, T::one())?;
        let backward = Self::march(&radicand, t0, r0, T::zero())?;
        let mut knots: Vec<T> = backward.iter().rev().map(|k| k.0).collect();
        let mut roots: Vec<Cx<T>> = backward.iter().rev().map(|k| k.1).collect();
        knots.pop();
        roots.pop();
        knots.extend(forward.iter().map(|k| k.0));
        roots.extend(forward.iter().map(|k| k.1));
        Ok(Self { knots, roots })
    }

    // Walks from t0 to target, accepting a step only when the radicand turns
    // by less than a quarter turn over each half of it.
    fn march<F: Fn(T) -> Cx<T>>(radicand: &F, t0: T, r0: Cx<T>, target: T) -> Result<Vec<(T, Cx<T>)>> {
        let limit = T::FRAC_PI_4();
        let min_step: T = lit(1e-13);
        let mut out = vec![(t0, r0)];
        let (mut t, mut r) = (t0, r0);
        let mut q = radicand(t);
        let mut dt = (target - t0).abs().min(lit(1.0 / 32.0));
        let dir = if target >= t0 { T::one() } else { -T::one() };
        while (target - t).abs() > T::zero() {
            dt = dt.min((target - t).abs());
            let t_new = if dt >= (target - t).abs() { target } else { t + dir * dt };
            let t_mid = (t + t_new) * lit(0.5);
            let q_mid = radicand(t_mid);
            let q_new = radicand(t_new);
            let turn1 = (q_mid / q).arg().abs();
            let turn2 = (q_new / q_mid).arg().abs();
            let finite = q_mid.norm().is_finite() && q_new.norm().is_finite();
            if finite && q_new.norm() > T::zero() && turn1 < limit && turn2 < limit {
                let r_mid = sqrt_near(q_mid, r);
                r = sqrt_near(q_new, r_mid);
                t = t_new;
                q = q_new;
                out.push((t, r));
                dt = dt + dt;
            } else {
                dt = dt * lit(0.5);
                if dt < min_step {
                    return Err(Error::ContinuationFailed(format!(
                        "step underflow at t = {:.6}",
                        to_f64(t)
                    )));
                }
            }
        }
        Ok(out)
    }

    fn root_at(&self, t: T, radicand: Cx<T>) -> Cx<T> {
        let k = self.knots.partition_point(|&x| x <= t);
        let reference = if k == 0 {
            self.roots[0]
        } else if k >= self.knots.len() {
            self.roots[self.knots.len() - 1]
        } else if t - self.knots[k - 1] <= self.knots[k] - t {
            self.roots[k - 1]
        } else {
            self.roots[k]
        };
        sqrt_near(radicand, reference)
    }
}

/// A segment together with the analytic continuation of `w` along it.
#[derive(Debug, Clone)]
pub struct LiftedSegment<T> {
    segment: PathSegment<T>,
    lambda: Cx<T>,
    start: CurvePoint<T>,
    end: CurvePoint<T>,
    track: SheetTrack<T>,
}

impl<T: Scalar> LiftedSegment<T> {
    pub fn segment(&self) -> &PathSegment<T> {
        &self.segment
    }

    pub fn start(&self) -> CurvePoint<T> {
        self.start
    }

    pub fn end(&self) -> CurvePoint<T> {
        self.end
    }

    /// Number of continuation knots used along the segment.
    pub fn knots(&self) -> usize {
        self.track.knots.len()
    }

    fn slit_data(&self) -> Option<(Cx<T>, Cx<T>, Cx<T>)> {
        match self.segment {
            // Third finite branch point: the roots of P sum to λ.
            PathSegment::Slit { from, to, .. } => Some((from, to, self.lambda - from - to)),
            _ => None,
        }
    }

    pub fn point(&self, t: T) -> CurvePoint<T> {
        let z = self.segment.z(t);
        match self.slit_data() {
            Some((from, to, other)) => {
                let phi = PathSegment::<T>::angle(t);
                let r = self.track.root_at(t, z - other);
                let w = imag_unit::<T>() * (to - from) * (phi.sin() * phi.cos()) * r;
                CurvePoint::new(z, w)
            }
            None => CurvePoint::new(z, self.track.root_at(t, curve_poly(self.lambda, z))),
        }
    }

    /// Returns `z(t)` and the pull-back of `dz/w` per unit `t`.
    ///
    /// On slit segments the `1/w` singularities at both ends cancel against
    /// `dz/dt` analytically, so the density is smooth on the closed interval.
    pub fn dz_over_w(&self, t: T) -> (Cx<T>, Cx<T>) {
        let z = self.segment.z(t);
        match self.slit_data() {
            Some((_, _, other)) => {
                let r = self.track.root_at(t, z - other);
                (z, -imag_unit::<T>() * T::PI() / r)
            }
            None => {
                let w = self.track.root_at(t, curve_poly(self.lambda, z));
                (z, self.segment.dz_dt(t) / w)
            }
        }
    }

    /// `z(t)` and `dz/dt`.
    pub fn dz(&self, t: T) -> (Cx<T>, Cx<T>) {
        (self.segment.z(t), self.segment.dz_dt(t))
    }
}

/// An ordered chain of lifted segments.
#[derive(Debug, Clone)]
pub struct Cycle<T> {
    pub segments: Vec<LiftedSegment<T>>,
    pub closed: bool,
}

impl<T: Scalar> Cycle<T> {
    pub fn start(&self) -> Option<CurvePoint<T>> {
        self.segments.first().map(|s| s.start)
    }

    pub fn end(&self) -> Option<CurvePoint<T>> {
        self.segments.last().map(|s| s.end)
    }

    /// The same cycle traversed `times` in succession.
    pub fn repeated(&self, times: usize) -> Self {
        let mut segments = Vec::with_capacity(self.segments.len() * times);
        for _ in 0..times {
            segments.extend(self.segments.iter().cloned());
        }
        Self {
            segments,
            closed: self.closed,
        }
    }
}

/// `P(z) = (z − λ)(z² + 1)`.
#[inline]
pub fn curve_poly<T: Scalar>(lambda: Cx<T>, z: Cx<T>) -> Cx<T> {
    (z - lambda) * (z * z + T::one())
}

/// `P'(z) = 3z² − 2λz + 1`.
#[inline]
pub fn curve_poly_derivative<T: Scalar>(lambda: Cx<T>, z: Cx<T>) -> Cx<T> {
    z * z * lit::<T>(3.0) - lambda * z * lit::<T>(2.0) + T::one()
}

/// The curve together with its branch points, slit basis and periods of `dz/w`.
#[derive(Debug, Clone)]
pub struct HCurve<T> {
    lambda: Cx<T>,
    pub branch_points: [BranchPoint<T>; 4],
    pub cycle_a: Cycle<T>,
    pub cycle_b: Cycle<T>,
    omega_a: Cx<T>,
    omega_b: Cx<T>,
}

impl<T: Scalar> HCurve<T> {
    /// Curve for real `λ`.
    pub fn new(lambda: T) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidParams("lambda must be finite".into()));
        }
        Self::with_complex_modulus(real(lambda))
    }

    /// Curve for complex `λ`. Only meaningful for diagnostics: the
    /// conjugation symmetries, and with them the rhombic lattice, require real `λ`.
    pub fn with_complex_modulus(lambda: Cx<T>) -> Result<Self> {
        let i = imag_unit::<T>();
        if (lambda - i).norm() < lit(PATH_CLEARANCE) || (lambda + i).norm() < lit(PATH_CLEARANCE) {
            return Err(Error::InvalidParams("branch points coincide".into()));
        }
        let branch_points = [
            BranchPoint::Finite(lambda),
            BranchPoint::Finite(i),
            BranchPoint::Finite(-i),
            BranchPoint::Infinity,
        ];
        let mut curve = Self {
            lambda,
            branch_points,
            cycle_a: Cycle {
                segments: Vec::new(),
                closed: true,
            },
            cycle_b: Cycle {
                segments: Vec::new(),
                closed: true,
            },
            omega_a: Cx::new(T::zero(), T::zero()),
            omega_b: Cx::new(T::zero(), T::zero()),
        };
        let (a, b) = homology_basis(&curve)?;
        let tol = Tolerance::default();
        curve.omega_a = integrate_dz_over_w(&a, &tol)?;
        curve.omega_b = integrate_dz_over_w(&b, &tol)?;
        curve.cycle_a = a;
        curve.cycle_b = b;
        let det = lattice_determinant(curve.omega_a, curve.omega_b);
        if det.abs() < lit(1e-12) {
            return Err(Error::DegenerateBasis { det: to_f64(det) });
        }
        Ok(curve)
    }

    pub fn lambda(&self) -> Cx<T> {
        self.lambda
    }

    pub fn poly(&self, z: Cx<T>) -> Cx<T> {
        curve_poly(self.lambda, z)
    }

    pub fn finite_branch_points(&self) -> [Cx<T>; 3] {
        let i = imag_unit::<T>();
        [self.lambda, i, -i]
    }

    /// Periods `(∮_A dz/w, ∮_B dz/w)`.
    pub fn periods(&self) -> (Cx<T>, Cx<T>) {
        (self.omega_a, self.omega_b)
    }

    /// Rhombus generators `(ω_A + ω_B, ω_B)`; they are exchanged (up to sign)
    /// by complex conjugation when `λ` is real.
    pub fn rhombic_generators(&self) -> (Cx<T>, Cx<T>) {
        (self.omega_a + self.omega_b, self.omega_b)
    }

    /// `Im(conj(ω_A)·ω_B)`, the determinant of the real 2×2 period matrix.
    pub fn determinant(&self) -> T {
        lattice_determinant(self.omega_a, self.omega_b)
    }

    pub fn contains(&self, p: &CurvePoint<T>) -> bool {
        let residual = (p.w * p.w - self.poly(p.z)).norm();
        residual <= lit::<T>(CURVE_TOLERANCE) * (T::one() + p.z.norm().powi(3))
    }

    /// The point over `z` on the sheet closest to `w_hint`.
    pub fn point_near(&self, z: Cx<T>, w_hint: Cx<T>) -> CurvePoint<T> {
        CurvePoint::new(z, sqrt_near(self.poly(z), w_hint))
    }

    /// Base point of the flat coordinate: the branch point `(λ, 0)`.
    pub fn base_point(&self) -> CurvePoint<T> {
        CurvePoint::new(self.lambda, Cx::new(T::zero(), T::zero()))
    }

    fn check_clearance(&self, segment: &PathSegment<T>) -> Result<()> {
        let clearance = lit::<T>(PATH_CLEARANCE);
        if let PathSegment::Slit { from, to, .. } = *segment {
            let ends = self.finite_branch_points();
            let is_branch = |p: Cx<T>| ends.iter().any(|&e| (e - p).norm() < clearance);
            if !is_branch(from) || !is_branch(to) {
                return Err(Error::InvalidParams("slit endpoints must be branch points".into()));
            }
            for e in ends {
                if (e - from).norm() < clearance || (e - to).norm() < clearance {
                    continue;
                }
                let d = segment.distance_to(e);
                if d < clearance {
                    return Err(path_too_close(e, d));
                }
            }
            return Ok(());
        }
        for e in self.finite_branch_points() {
            let d = segment.distance_to(e);
            if d < clearance {
                return Err(path_too_close(e, d));
            }
        }
        Ok(())
    }
}

fn path_too_close<T: Scalar>(p: Cx<T>, d: T) -> Error {
    let (re, im) = cx_to_f64(p);
    Error::PathTooClose {
        re,
        im,
        clearance: to_f64(d),
    }
}

fn lattice_determinant<T: Scalar>(a: Cx<T>, b: Cx<T>) -> T {
    (a.conj() * b).im
}

/// Continues `w` along `segment` from `start`.
///
/// Slit segments ignore `start.w`; their sheet is carried by `w_mid`.
pub fn lift_segment<T: Scalar>(
    curve: &HCurve<T>,
    segment: PathSegment<T>,
    start: CurvePoint<T>,
) -> Result<LiftedSegment<T>> {
    let lambda = curve.lambda;
    if let PathSegment::Slit { from, to, w_mid } = segment {
        curve.check_clearance(&segment)?;
        let other = lambda - from - to;
        let r_mid = w_mid * lit::<T>(2.0) / (imag_unit::<T>() * (to - from));
        let track = SheetTrack::build(|t| segment.z(t) - other, lit(0.5), r_mid)?;
        let mut lifted = LiftedSegment {
            segment,
            lambda,
            start: CurvePoint::new(from, Cx::new(T::zero(), T::zero())),
            end: CurvePoint::new(to, Cx::new(T::zero(), T::zero())),
            track,
        };
        lifted.start = lifted.point(T::zero());
        lifted.end = lifted.point(T::one());
        return Ok(lifted);
    }
    if (segment.start() - start.z).norm() > lit::<T>(1e-12) * (T::one() + start.z.norm()) {
        return Err(Error::InvalidParams("segment does not begin at the start point".into()));
    }
    if !curve.contains(&start) {
        return Err(Error::InvalidParams("start point is not on the curve".into()));
    }
    if segment.is_degenerate() {
        return Ok(LiftedSegment {
            segment,
            lambda,
            start,
            end: start,
            track: SheetTrack {
                knots: vec![T::zero(), T::one()],
                roots: vec![start.w, start.w],
            },
        });
    }
    curve.check_clearance(&segment)?;
    let track = SheetTrack::build(|t| curve_poly(lambda, segment.z(t)), T::zero(), start.w)?;
    let mut lifted = LiftedSegment {
        segment,
        lambda,
        start,
        end: start,
        track,
    };
    lifted.end = lifted.point(T::one());
    Ok(lifted)
}

/// Lifts a chain of segments; each begins where the previous one ended.
pub fn lift_chain<T: Scalar>(
    curve: &HCurve<T>,
    segments: &[PathSegment<T>],
    start: CurvePoint<T>,
) -> Result<Vec<LiftedSegment<T>>> {
    let mut out = Vec::with_capacity(segments.len());
    let mut at = start;
    for &seg in segments {
        let lifted = lift_segment(curve, seg, at)?;
        at = lifted.end;
        out.push(lifted);
    }
    Ok(out)
}

/// Endpoint of the analytic continuation of `start` along `segments`.
pub fn lift_path<T: Scalar>(
    curve: &HCurve<T>,
    segments: &[PathSegment<T>],
    start: CurvePoint<T>,
) -> Result<CurvePoint<T>> {
    Ok(lift_chain(curve, segments, start)?
        .last()
        .map(|s| s.end)
        .unwrap_or(start))
}

fn slit_cycle<T: Scalar>(curve: &HCurve<T>, from: Cx<T>, to: Cx<T>, w_mid: Cx<T>) -> Result<Cycle<T>> {
    let out = lift_segment(curve, PathSegment::Slit { from, to, w_mid }, curve.base_point())?;
    let back = lift_segment(
        curve,
        PathSegment::Slit {
            from: to,
            to: from,
            w_mid: -w_mid,
        },
        out.end,
    )?;
    Ok(Cycle {
        segments: vec![out, back],
        closed: true,
    })
}

/// Slit basis: A runs around `[−i, i]`, B around `[λ, i]`.
///
/// A is pinned to the sheet with `w(0) = i·√λ`; B to the sheet with
/// `w = (i/2)(i − λ)·√((λ + 3i)/2)` at the midpoint of its slit.
pub fn homology_basis<T: Scalar>(curve: &HCurve<T>) -> Result<(Cycle<T>, Cycle<T>)> {
    let i = imag_unit::<T>();
    let lambda = curve.lambda;
    let w_mid_a = i * lambda.sqrt();
    let a = slit_cycle(curve, -i, i, w_mid_a)?;
    let mid = (lambda + i * lit::<T>(3.0)) * lit::<T>(0.5);
    let w_mid_b = i * (i - lambda) * lit::<T>(0.5) * mid.sqrt();
    let b = slit_cycle(curve, lambda, i, w_mid_b)?;
    Ok((a, b))
}

fn integrate_dz_over_w<T: Scalar>(cycle: &Cycle<T>, tol: &Tolerance<T>) -> Result<Cx<T>> {
    let mut total = Cx::new(T::zero(), T::zero());
    for seg in &cycle.segments {
        total = total + integrate(|t| seg.dz_over_w(t).1, T::zero(), T::one(), tol)?.value;
    }
    Ok(total)
}

/// `∫ dz/w` along the lifted path, together with the lifted endpoint.
pub fn abelian_map<T: Scalar>(
    curve: &HCurve<T>,
    segments: &[PathSegment<T>],
    start: CurvePoint<T>,
) -> Result<(Cx<T>, CurvePoint<T>)> {
    let lifted = lift_chain(curve, segments, start)?;
    let tol = Tolerance::default();
    let mut total = Cx::new(T::zero(), T::zero());
    for seg in &lifted {
        total = total + integrate(|t| seg.dz_over_w(t).1, T::zero(), T::one(), &tol)?.value;
    }
    Ok((total, lifted.last().map(|s| s.end).unwrap_or(start)))
}

/// A curve point paired with its flat coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatPoint<T> {
    pub point: CurvePoint<T>,
    pub u: Cx<T>,
}

impl<T: Scalar> FlatPoint<T> {
    /// The base point `(λ, 0)` at `u = 0`.
    pub fn base(curve: &HCurve<T>) -> Self {
        Self {
            point: curve.base_point(),
            u: Cx::new(T::zero(), T::zero()),
        }
    }
}

/// The curve point with flat coordinate `u`, reached by integrating
/// `dz/du = w`, `dw/du = P'(z)/2` along the straight segment from the seed.
///
/// Branch points are regular for this flow; only the end (`z → ∞`) stops it.
pub fn invert_abelian<T: Scalar>(curve: &HCurve<T>, u: Cx<T>, seed: FlatPoint<T>) -> Result<CurvePoint<T>> {
    let flow = Flow::curve_only(curve.lambda);
    let state = FlowState::at(seed.point);
    let end = flow.advance(state, u - seed.u)?;
    Ok(CurvePoint::new(end.z, end.w))
}

/// Conjugation reality of the basis: `(conj ω_A − ω_A, conj ω_B + ω_A + ω_B)`,
/// both zero when `λ` is real.
pub fn conjugation_defects<T: Scalar>(curve: &HCurve<T>) -> (T, T) {
    let (wa, wb) = curve.periods();
    ((wa.conj() - wa).norm(), (wb.conj() + wa + wb).norm())
}
