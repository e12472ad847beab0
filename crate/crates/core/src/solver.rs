//! Period problem: `(α, β)` from the `dg/g` cycle conditions, `a` from the
//! height period over B, then a scalar root in `λ` for the last coordinate
//! period.
//!
//! With `c₁ = 2a − α − β` and `c₀ = (a − α)(a − β)`,
//!
//! ```text
//! ρ(z − α)(z − β)/(z − a) = w(a)·[(z − a)/c₀ + c₁/c₀ + 1/(z − a)]
//! ```
//!
//! so every `dg/g` period is linear in `(1/c₀, c₁/c₀)` with coefficients given
//! by three moments of the cycle. Solving that linear system and reading
//! `α + β` and `αβ` back off `(c₀, c₁)` is exactly the quadratic that pins `α`
//! and `β` down.

use rayon::prelude::*;

use crate::curve::{Cycle, FlatPoint, HCurve};
use crate::error::{Error, Result};
use crate::flow::{Flow, FlowState};
use crate::forms::{integrate_cycle, make_dg_over_g, residue, w_at_a, HandleParams, RationalForm};
use crate::poly::Poly;
use crate::quad::Tolerance;
use crate::scalar::{imag_unit, lit, real, to_f64, Cx, Scalar};

/// Targets `∮_A dg/g = 2πi·n_a`, `∮_B dg/g = 2πi·n_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntegerTargets {
    pub n_a: i32,
    pub n_b: i32,
}

impl IntegerTargets {
    pub const fn new(n_a: i32, n_b: i32) -> Self {
        Self { n_a, n_b }
    }
}

/// The assignment found by [`search_targets`] over the default bracket.
pub const DEFAULT_TARGETS: IntegerTargets = IntegerTargets::new(0, -4);

/// Which homology cycle a coordinate period is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CycleName {
    A,
    B,
}

/// `Re ∮_cycle Φ_component` (component 0, 1, 2 for `x₁, x₂, x₃`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoordCondition {
    pub cycle: CycleName,
    pub component: usize,
}

impl CoordCondition {
    pub const fn new(cycle: CycleName, component: usize) -> Self {
        Self { cycle, component }
    }

    pub fn label(&self) -> String {
        let c = match self.cycle {
            CycleName::A => "A",
            CycleName::B => "B",
        };
        format!("re_period_{}_x{}", c, self.component + 1)
    }
}

/// Assignment of the six real coordinate-period conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub a_equation: CoordCondition,
    pub lambda_residual: CoordCondition,
    /// Conditions forced by the conjugation symmetries.
    pub vanishing: Vec<CoordCondition>,
    /// Conditions equal to a fixed multiple of the λ-residual.
    pub dependent: Vec<(CoordCondition, f64)>,
}

impl Default for Partition {
    fn default() -> Self {
        use CycleName::{A, B};
        Self {
            a_equation: CoordCondition::new(B, 2),
            lambda_residual: CoordCondition::new(A, 1),
            vanishing: vec![
                CoordCondition::new(A, 0),
                CoordCondition::new(B, 0),
                CoordCondition::new(A, 2),
            ],
            dependent: vec![(CoordCondition::new(B, 1), -0.5)],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig<T> {
    pub quad: Tolerance<T>,
    /// Accepted violation of each `dg/g` cycle condition.
    pub period_tol: T,
    /// Target for `|lambda_residual|` at the root.
    pub lambda_tol: T,
    /// Bracket width at which bisection hands over to the secant method.
    pub bisection_width: T,
    pub fd_step: T,
    pub newton_max: usize,
    pub a_offset: T,
    pub a_upper: T,
    pub a_samples: usize,
    pub lambda_samples: usize,
    pub preferred_lambda: T,
    /// Largest acceptable defect of a full solve.
    pub defect_tol: T,
    pub partition: Partition,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            quad: Tolerance::default(),
            period_tol: lit(1e-9),
            lambda_tol: lit(1e-10),
            bisection_width: lit(1e-4),
            fd_step: lit(1e-6),
            newton_max: 50,
            a_offset: lit(0.01),
            a_upper: lit(20.0),
            a_samples: 200,
            lambda_samples: 24,
            preferred_lambda: lit(0.32),
            defect_tol: lit(1e-8),
            partition: Partition::default(),
        }
    }
}

/// Moments `∮dz/w`, `∮z·dz/w` and `∮dz/((z − a)w)` of one cycle.
#[derive(Debug, Clone, Copy)]
struct Moments<T> {
    p0: Cx<T>,
    z1: Cx<T>,
    inv: Cx<T>,
}

fn moments<T: Scalar>(cycle: &Cycle<T>, a: T, tol: &Tolerance<T>) -> Result<Moments<T>> {
    let one = real(T::one());
    let p0 = integrate_cycle(&RationalForm::holomorphic(), cycle, tol)?;
    let zf = RationalForm::new(Poly::new(vec![real(T::zero()), one]), Poly::constant(one), true, one)?;
    let z1 = integrate_cycle(&zf, cycle, tol)?;
    let invf = RationalForm::new(Poly::constant(one), Poly::from_roots(&[real(a)]), true, one)?;
    let inv = integrate_cycle(&invf, cycle, tol)?;
    Ok(Moments { p0, z1, inv })
}

/// `(α, β)` together with the derived `ρ` and the least-squares defect of the
/// four real cycle equations.
#[derive(Debug, Clone, Copy)]
pub struct AlphaBeta<T> {
    pub alpha: T,
    pub beta: T,
    pub rho: Cx<T>,
    pub linear_defect: T,
    pub newton_iterations: usize,
}

fn dgg_periods_from_moments<T: Scalar>(
    lambda: T,
    a: T,
    alpha: T,
    beta: T,
    ma: &Moments<T>,
    mb: &Moments<T>,
) -> [Cx<T>; 2] {
    let w_a = w_at_a(lambda, a);
    let c0 = (a - alpha) * (a - beta);
    let c1 = a + a - alpha - beta;
    let f = |m: &Moments<T>| {
        let p1 = m.z1 - m.p0 * a;
        w_a * (p1 / c0 + m.p0 * (c1 / c0) + m.inv)
    };
    [f(ma), f(mb)]
}

fn target_value<T: Scalar>(n: i32) -> Cx<T> {
    imag_unit::<T>() * (T::TAU() * lit::<T>(n as f64))
}

fn residual_vector<T: Scalar>(p: [Cx<T>; 2], t: IntegerTargets) -> [T; 4] {
    let ra = p[0] - target_value::<T>(t.n_a);
    let rb = p[1] - target_value::<T>(t.n_b);
    [ra.re, ra.im, rb.re, rb.im]
}

/// Solves the `dg/g` cycle conditions for `(α, β)` at fixed `(λ, a)`.
pub fn solve_alpha_beta<T: Scalar>(
    lambda: T,
    a: T,
    targets: IntegerTargets,
    cfg: &SolverConfig<T>,
) -> Result<AlphaBeta<T>> {
    let curve = HCurve::new(lambda)?;
    solve_alpha_beta_on(&curve, a, targets, cfg)
}

fn solve_alpha_beta_on<T: Scalar>(
    curve: &HCurve<T>,
    a: T,
    targets: IntegerTargets,
    cfg: &SolverConfig<T>,
) -> Result<AlphaBeta<T>> {
    let lambda = curve.lambda().re;
    if (a - lambda).abs() < lit(1e-12) {
        return Err(Error::InvalidParams("a coincides with λ".into()));
    }
    let ma = moments(&curve.cycle_a, a, &cfg.quad)?;
    let mb = moments(&curve.cycle_b, a, &cfg.quad)?;
    let w_a = w_at_a(lambda, a);
    // w(a)·[x·P₁ + y·P₀ + P_inv] = 2πi·n, unknowns x = 1/c₀, y = c₁/c₀.
    let mut rows: Vec<([T; 2], T)> = Vec::with_capacity(4);
    for (m, n) in [(&ma, targets.n_a), (&mb, targets.n_b)] {
        let p1 = (m.z1 - m.p0 * a) * w_a;
        let p0 = m.p0 * w_a;
        let rhs = target_value::<T>(n) - m.inv * w_a;
        rows.push(([p1.re, p0.re], rhs.re));
        rows.push(([p1.im, p0.im], rhs.im));
    }
    let (x, y, linear_defect) = least_squares_2(&rows)?;
    if linear_defect > lit(1e-6) {
        return Err(Error::NoRoot {
            reason: format!(
                "dg/g targets ({}, {}) are inconsistent with the curve symmetry (defect {:e})",
                targets.n_a,
                targets.n_b,
                to_f64(linear_defect)
            ),
            table: Vec::new(),
        });
    }
    let c0 = T::one() / x;
    let c1 = y * c0;
    let s = a + a - c1;
    let p = c0 - a * a + a * s;
    let disc = s * s - lit::<T>(4.0) * p;
    if disc < T::zero() {
        let imag = (-disc).sqrt() * lit(0.5);
        if imag > lit(1e-8) {
            return Err(Error::RealityViolation { imag: to_f64(imag) });
        }
    }
    let root = disc.max(T::zero()).sqrt();
    let mut alpha = (s - root) * lit(0.5);
    let mut beta = (s + root) * lit(0.5);

    // Gauss–Newton polish with a finite-difference Jacobian.
    let eval = |al: T, be: T| residual_vector(dgg_periods_from_moments(lambda, a, al, be, &ma, &mb), targets);
    let norm = |r: &[T; 4]| r.iter().map(|x| x.abs()).fold(T::zero(), T::max);
    let mut r = eval(alpha, beta);
    let mut iterations = 0;
    while norm(&r) > cfg.period_tol * lit(1e-3) && iterations < cfg.newton_max {
        iterations += 1;
        let h = cfg.fd_step;
        let ra = eval(alpha + h, beta);
        let rb = eval(alpha, beta + h);
        let rows: Vec<([T; 2], T)> = (0..4)
            .map(|k| ([(ra[k] - r[k]) / h, (rb[k] - r[k]) / h], -r[k]))
            .collect();
        let (da, db, _) = least_squares_2(&rows)?;
        let (na, nb) = (alpha + da, beta + db);
        let rn = eval(na, nb);
        if !(norm(&rn) < norm(&r)) {
            break;
        }
        alpha = na;
        beta = nb;
        r = rn;
        if da.abs().max(db.abs()) < T::epsilon() * lit(16.0) * (T::one() + alpha.abs().max(beta.abs())) {
            break;
        }
    }
    if !(norm(&r) <= cfg.period_tol) {
        return Err(Error::NoRoot {
            reason: format!(
                "dg/g conditions not met after {} Newton steps: residual {:e}",
                iterations,
                to_f64(norm(&r))
            ),
            table: Vec::new(),
        });
    }
    if alpha > beta {
        std::mem::swap(&mut alpha, &mut beta);
    }
    let params = HandleParams::new(lambda, a, alpha, beta)?;
    Ok(AlphaBeta {
        alpha,
        beta,
        rho: params.rho,
        linear_defect,
        newton_iterations: iterations,
    })
}

/// Least squares for two unknowns via the normal equations.
fn least_squares_2<T: Scalar>(rows: &[([T; 2], T)]) -> Result<(T, T, T)> {
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for (m, r) in rows {
        s11 = s11 + m[0] * m[0];
        s12 = s12 + m[0] * m[1];
        s22 = s22 + m[1] * m[1];
        b1 = b1 + m[0] * *r;
        b2 = b2 + m[1] * *r;
    }
    let det = s11 * s22 - s12 * s12;
    if !(det.abs() > T::epsilon() * (s11 * s22).abs()) {
        return Err(Error::NoRoot {
            reason: "singular linear system".into(),
            table: Vec::new(),
        });
    }
    let x = (s22 * b1 - s12 * b2) / det;
    let y = (s11 * b2 - s12 * b1) / det;
    let defect = rows
        .iter()
        .map(|(m, r)| (m[0] * x + m[1] * y - *r).abs())
        .fold(T::zero(), T::max);
    Ok((x, y, defect))
}

/// Value of `Re ∮_B dh` at `a`: the height period over B.
fn height_period_b<T: Scalar>(mb_p0: Cx<T>, mb_z1: Cx<T>, a: T) -> T {
    (imag_unit::<T>() * (mb_z1 - mb_p0 * a)).re
}

/// Output of [`solve_a`].
#[derive(Debug, Clone)]
pub struct ASolution<T> {
    pub a: T,
    pub alpha_beta: AlphaBeta<T>,
    /// The `(a, residual)` scan table.
    pub scan: Vec<(f64, f64)>,
}

/// Finds `a` from the designated a-equation, then `(α, β)` at that `a`.
///
/// The height period over B does not involve `(α, β)`, so the scan and the
/// root refinement run on two cycle moments alone.
pub fn solve_a<T: Scalar>(lambda: T, targets: IntegerTargets, cfg: &SolverConfig<T>) -> Result<ASolution<T>> {
    let curve = HCurve::new(lambda)?;
    solve_a_on(&curve, targets, cfg)
}

fn solve_a_on<T: Scalar>(curve: &HCurve<T>, targets: IntegerTargets, cfg: &SolverConfig<T>) -> Result<ASolution<T>> {
    let lambda = curve.lambda().re;
    if cfg.partition.a_equation != CoordCondition::new(CycleName::B, 2) {
        return Err(Error::InvalidParams(
            "only the height period over B is supported as the a-equation".into(),
        ));
    }
    // Moments independent of a.
    let one = real(T::one());
    let p0 = integrate_cycle(&RationalForm::holomorphic(), &curve.cycle_b, &cfg.quad)?;
    let zf = RationalForm::new(Poly::new(vec![real(T::zero()), one]), Poly::constant(one), true, one)?;
    let z1 = integrate_cycle(&zf, &curve.cycle_b, &cfg.quad)?;
    let f = |a: T| height_period_b(p0, z1, a);

    let lo = lambda + cfg.a_offset;
    let hi = cfg.a_upper;
    let n = cfg.a_samples.max(2);
    let grid: Vec<T> = (0..n)
        .map(|k| lo + (hi - lo) * lit::<T>(k as f64 / (n - 1) as f64))
        .collect();
    let values: Vec<T> = grid.iter().map(|&a| f(a)).collect();
    let scan: Vec<(f64, f64)> = grid.iter().zip(&values).map(|(&a, &v)| (to_f64(a), to_f64(v))).collect();
    let bracket = (0..n - 1).find(|&k| values[k] == T::zero() || values[k].signum() != values[k + 1].signum());
    let Some(k) = bracket else {
        return Err(Error::NoRoot {
            reason: format!("height period over B has no sign change for a in ({}, {})", to_f64(lo), to_f64(hi)),
            table: scan,
        });
    };
    let a = refine_root(f, grid[k], grid[k + 1], cfg.bisection_width, lit(1e-15), 100)?;
    let alpha_beta = solve_alpha_beta_on(curve, a, targets, cfg)?;
    Ok(ASolution { a, alpha_beta, scan })
}

/// Bisection down to `width`, then secant steps safeguarded by the bracket.
fn refine_root<T: Scalar, F: Fn(T) -> T>(f: F, lo: T, hi: T, width: T, ftol: T, max_iter: usize) -> Result<T> {
    let (mut lo, mut hi) = (lo, hi);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRoot {
            reason: "bracket without sign change".into(),
            table: vec![(to_f64(lo), to_f64(flo)), (to_f64(hi), to_f64(fhi))],
        });
    }
    while (hi - lo).abs() > width {
        let mid = (lo + hi) * lit(0.5);
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(Error::NoRoot {
                reason: "residual not finite inside the bracket".into(),
                table: Vec::new(),
            });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    let (mut x0, mut f0, mut x1, mut f1) = (lo, flo, hi, fhi);
    for _ in 0..max_iter {
        if f1.abs() < f0.abs() {
            // keep x1 as the better iterate
        } else {
            std::mem::swap(&mut x0, &mut x1);
            std::mem::swap(&mut f0, &mut f1);
        }
        if f1.abs() <= ftol {
            return Ok(x1);
        }
        let mut x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !(x2 > lo.min(hi) && x2 < lo.max(hi)) || !x2.is_finite() {
            x2 = (lo + hi) * lit(0.5);
        }
        let f2 = f(x2);
        if f2.signum() == flo.signum() {
            lo = x2;
            flo = f2;
        } else {
            hi = x2;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if (x1 - x0).abs() <= T::epsilon() * lit::<T>(4.0) * x1.abs().max(T::one()) {
            return Ok(x1);
        }
    }
    if f1.abs() <= ftol * lit(1e3) {
        Ok(x1)
    } else {
        Err(Error::NoRoot {
            reason: format!("secant iteration stalled at residual {:e}", to_f64(f1)),
            table: Vec::new(),
        })
    }
}

/// Flat-coordinate paths for the two basis cycles.
///
/// With `h = −Im(ω_B)/2`, both start at `q₀ = i·h`, reached from the base
/// point along the imaginary axis. A runs horizontally to `q₀ + ω_A`; B runs
/// down to `−i·h` and then horizontally to `q₀ + ω_B`. Both stay a distance
/// `h` away from every lattice translate of the end.
#[derive(Debug, Clone, Copy)]
pub struct CyclePaths<T> {
    pub q0: Cx<T>,
    pub omega_a: Cx<T>,
    pub omega_b: Cx<T>,
}

impl<T: Scalar> CyclePaths<T> {
    pub fn new(curve: &HCurve<T>) -> Self {
        let (omega_a, omega_b) = curve.periods();
        let h = -omega_b.im * lit(0.5);
        Self {
            q0: Cx::new(T::zero(), h),
            omega_a,
            omega_b,
        }
    }

    pub fn waypoints(&self, cycle: CycleName) -> Vec<Cx<T>> {
        match cycle {
            CycleName::A => vec![self.q0 + self.omega_a],
            CycleName::B => {
                let corner = self.q0.conj();
                vec![corner, self.q0 + self.omega_b]
            }
        }
    }
}

/// Changes of `log g` and of the three coordinate integrals around A and B.
#[derive(Debug, Clone, Copy)]
pub struct FlowPeriods<T> {
    pub log_g: [Cx<T>; 2],
    pub coords: [[Cx<T>; 3]; 2],
}

pub fn flow_periods<T: Scalar>(curve: &HCurve<T>, params: &HandleParams<T>) -> Result<FlowPeriods<T>> {
    let flow = Flow::with_forms(curve.lambda(), params.coefficients());
    let paths = CyclePaths::new(curve);
    let base = FlowState::at(FlatPoint::base(curve).point);
    let start = flow.advance(base, paths.q0)?;
    let mut out = FlowPeriods {
        log_g: [Cx::new(T::zero(), T::zero()); 2],
        coords: [[Cx::new(T::zero(), T::zero()); 3]; 2],
    };
    for (k, name) in [CycleName::A, CycleName::B].into_iter().enumerate() {
        let end = flow.advance_polyline(start, paths.q0, &paths.waypoints(name))?;
        out.log_g[k] = end.log_g - start.log_g;
        for c in 0..3 {
            out.coords[k][c] = end.coords[c] - start.coords[c];
        }
    }
    Ok(out)
}

fn condition_value<T: Scalar>(fp: &FlowPeriods<T>, c: CoordCondition) -> T {
    let k = match c.cycle {
        CycleName::A => 0,
        CycleName::B => 1,
    };
    fp.coords[k][c.component].re
}

/// Everything [`lambda_residual`] computed on the way.
#[derive(Debug, Clone)]
pub struct ResidualEvaluation<T> {
    pub params: HandleParams<T>,
    pub residual: T,
    pub periods: FlowPeriods<T>,
}

pub fn evaluate_lambda<T: Scalar>(
    lambda: T,
    targets: IntegerTargets,
    cfg: &SolverConfig<T>,
) -> Result<ResidualEvaluation<T>> {
    let curve = HCurve::new(lambda)?;
    let sol = solve_a_on(&curve, targets, cfg).map_err(|e| e.at_stage("solve_a"))?;
    let params = HandleParams::new(lambda, sol.a, sol.alpha_beta.alpha, sol.alpha_beta.beta)?;
    let periods = flow_periods(&curve, &params).map_err(|e| e.at_stage("coordinate periods"))?;
    Ok(ResidualEvaluation {
        params,
        residual: condition_value(&periods, cfg.partition.lambda_residual),
        periods,
    })
}

/// The last real period condition as a function of `λ`.
pub fn lambda_residual<T: Scalar>(lambda: T, targets: IntegerTargets, cfg: &SolverConfig<T>) -> Result<T> {
    Ok(evaluate_lambda(lambda, targets, cfg)?.residual)
}

/// All period and residue conditions at a parameter set.
#[derive(Debug, Clone)]
pub struct PeriodReport<T> {
    pub dgg_periods: [Cx<T>; 2],
    pub coord_periods: [[Cx<T>; 3]; 2],
    pub residues: [Cx<T>; 2],
    /// Named absolute violations.
    pub conditions: Vec<(String, T)>,
    pub defect: T,
}

pub fn period_report<T: Scalar>(
    params: &HandleParams<T>,
    targets: IntegerTargets,
    cfg: &SolverConfig<T>,
) -> Result<PeriodReport<T>> {
    let curve = HCurve::new(params.lambda)?;
    let dgg = make_dg_over_g(params)?;
    let pa = integrate_cycle(&dgg, &curve.cycle_a, &cfg.quad)?;
    let pb = integrate_cycle(&dgg, &curve.cycle_b, &cfg.quad)?;
    let fp = flow_periods(&curve, params)?;
    let plus = params.pole_plus();
    let r_plus = residue(&curve, &dgg, plus)?;
    let r_minus = residue(&curve, &dgg, plus.flipped())?;
    let mut conditions = vec![
        ("dgg_period_A".to_string(), (pa - target_value::<T>(targets.n_a)).norm()),
        ("dgg_period_B".to_string(), (pb - target_value::<T>(targets.n_b)).norm()),
        ("residue_plus".to_string(), (r_plus - T::one()).norm()),
        ("residue_minus".to_string(), (r_minus + T::one()).norm()),
    ];
    for (k, name) in [CycleName::A, CycleName::B].into_iter().enumerate() {
        for c in 0..3 {
            conditions.push((CoordCondition::new(name, c).label(), fp.coords[k][c].re.abs()));
        }
    }
    let defect = conditions.iter().map(|c| c.1).fold(T::zero(), T::max);
    Ok(PeriodReport {
        dgg_periods: [pa, pb],
        coord_periods: fp.coords,
        residues: [r_plus, r_minus],
        conditions,
        defect,
    })
}

/// A converged solve.
#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub params: HandleParams<T>,
    pub targets: IntegerTargets,
    pub report: PeriodReport<T>,
    pub residual: T,
    /// `(λ, residual)` samples of the initial scan.
    pub scan: Vec<(f64, f64)>,
}

fn scan_lambda<T: Scalar>(
    targets: IntegerTargets,
    bracket: (T, T),
    cfg: &SolverConfig<T>,
) -> Vec<(T, Option<T>)> {
    let n = cfg.lambda_samples.max(2);
    let (lo, hi) = bracket;
    (0..n)
        .into_par_iter()
        .map(|k| {
            let l = lo + (hi - lo) * lit::<T>(k as f64 / (n - 1) as f64);
            (l, lambda_residual(l, targets, cfg).ok().filter(|r| r.is_finite()))
        })
        .collect()
}

/// Roots of the λ-residual in `bracket`, nearest the preferred `λ` first.
fn lambda_roots<T: Scalar>(
    targets: IntegerTargets,
    bracket: (T, T),
    cfg: &SolverConfig<T>,
) -> (Vec<T>, Vec<(f64, f64)>) {
    let samples = scan_lambda(targets, bracket, cfg);
    let table: Vec<(f64, f64)> = samples
        .iter()
        .map(|(l, r)| (to_f64(*l), r.map(to_f64).unwrap_or(f64::NAN)))
        .collect();
    let mut brackets: Vec<(T, T)> = Vec::new();
    for pair in samples.windows(2) {
        if let ((l0, Some(r0)), (l1, Some(r1))) = (pair[0], pair[1]) {
            if r0 == T::zero() || r0.signum() != r1.signum() {
                brackets.push((l0, l1));
            }
        }
    }
    let pref = cfg.preferred_lambda;
    brackets.sort_by(|x, y| {
        let dx = ((x.0 + x.1) * lit(0.5) - pref).abs();
        let dy = ((y.0 + y.1) * lit(0.5) - pref).abs();
        dx.partial_cmp(&dy).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut roots = Vec::new();
    for (l0, l1) in brackets {
        let f = |l: T| lambda_residual(l, targets, cfg).unwrap_or(T::nan());
        if let Ok(root) = refine_root(f, l0, l1, cfg.bisection_width, cfg.lambda_tol, 60) {
            if f(root).abs() <= cfg.lambda_tol * lit(1e2) {
                roots.push(root);
            }
        }
    }
    (roots, table)
}

/// Solves the whole period problem for fixed integer targets.
pub fn solve_full<T: Scalar>(targets: IntegerTargets, bracket: (T, T), cfg: &SolverConfig<T>) -> Result<Solution<T>> {
    let (lo, hi) = bracket;
    if !(lo < hi) || lo < lit(0.05) || hi > lit(0.95) {
        return Err(Error::InvalidParams(format!(
            "bracket ({}, {}) must satisfy 0.05 <= lo < hi <= 0.95",
            to_f64(lo),
            to_f64(hi)
        )));
    }
    let (roots, table) = lambda_roots(targets, bracket, cfg);
    let mut last_error = None;
    for lambda in roots {
        let eval = match evaluate_lambda(lambda, targets, cfg) {
            Ok(e) => e,
            Err(e) => {
                last_error = Some(e);
                continue;
            }
        };
        let report = period_report(&eval.params, targets, cfg).map_err(|e| e.at_stage("period report"))?;
        if report.defect <= cfg.defect_tol {
            return Ok(Solution {
                params: eval.params,
                targets,
                report,
                residual: eval.residual,
                scan: table,
            });
        }
        last_error = Some(Error::NoRoot {
            reason: format!("root at λ = {} leaves defect {:e}", to_f64(lambda), to_f64(report.defect)),
            table: Vec::new(),
        });
    }
    Err(last_error.unwrap_or(Error::NoRoot {
        reason: format!(
            "λ-residual has no sign change in ({}, {}) for targets ({}, {})",
            to_f64(lo),
            to_f64(hi),
            targets.n_a,
            targets.n_b
        ),
        table,
    })
    .at_stage("solve_full"))
}

/// Outcome of one integer assignment in [`search_targets`].
#[derive(Debug, Clone)]
pub struct TargetCandidate<T> {
    pub targets: IntegerTargets,
    pub roots: Vec<T>,
    pub failure: Option<String>,
}

/// Tries every `(n_a, n_b)` with `|n| ≤ max_abs` and lists the λ-roots each admits in `bracket`.
pub fn search_targets<T: Scalar>(bracket: (T, T), max_abs: i32, cfg: &SolverConfig<T>) -> Vec<TargetCandidate<T>> {
    let pairs: Vec<IntegerTargets> = (-max_abs..=max_abs)
        .flat_map(|na| (-max_abs..=max_abs).map(move |nb| IntegerTargets::new(na, nb)))
        .collect();
    pairs
        .par_iter()
        .map(|&t| {
            // A quick feasibility probe avoids scanning assignments the symmetry rules out.
            let mid = (bracket.0 + bracket.1) * lit(0.5);
            match solve_alpha_beta(mid, mid + lit(0.3), t, cfg) {
                Err(e @ Error::NoRoot { .. }) => TargetCandidate {
                    targets: t,
                    roots: Vec::new(),
                    failure: Some(e.to_string()),
                },
                _ => {
                    let (roots, _) = lambda_roots(t, bracket, cfg);
                    TargetCandidate {
                        targets: t,
                        roots,
                        failure: None,
                    }
                }
            }
        })
        .collect()
}

/// The candidate whose root lies nearest the preferred `λ`.
pub fn choose_targets<T: Scalar>(candidates: &[TargetCandidate<T>], preferred: T) -> Option<(IntegerTargets, T)> {
    candidates
        .iter()
        .flat_map(|c| c.roots.iter().map(move |&r| (c.targets, r)))
        .min_by(|x, y| {
            (x.1 - preferred)
                .abs()
                .partial_cmp(&(y.1 - preferred).abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
}

/// Classification of one coordinate-period condition by [`partition_scan`].
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionKind {
    Vanishing,
    /// Varies continuously with `a` and changes sign in the scan.
    SignChangingInA,
    /// Fixed multiple of another condition.
    MultipleOf(CoordCondition, f64),
    Other,
}

/// Evaluates the six real coordinate-period conditions at a few `a` values
/// (with `(α, β)` solved at each) and classifies them.
pub fn partition_scan<T: Scalar>(
    lambda: T,
    targets: IntegerTargets,
    a_values: &[T],
    cfg: &SolverConfig<T>,
) -> Result<Vec<(CoordCondition, ConditionKind)>> {
    let curve = HCurve::new(lambda)?;
    let mut samples: Vec<FlowPeriods<T>> = Vec::new();
    for &a in a_values {
        let ab = solve_alpha_beta_on(&curve, a, targets, cfg)?;
        let p = HandleParams::new(lambda, a, ab.alpha, ab.beta)?;
        samples.push(flow_periods(&curve, &p)?);
    }
    let all: Vec<CoordCondition> = [CycleName::A, CycleName::B]
        .into_iter()
        .flat_map(|c| (0..3).map(move |k| CoordCondition::new(c, k)))
        .collect();
    let values = |c: CoordCondition| -> Vec<f64> { samples.iter().map(|s| to_f64(condition_value(s, c))).collect() };
    let mut out = Vec::new();
    for &c in &all {
        let v = values(c);
        let kind = if v.iter().all(|x| x.abs() < 1e-9) {
            ConditionKind::Vanishing
        } else if let Some((other, ratio)) = all.iter().filter(|&&o| o != c).find_map(|&o| {
            let ov = values(o);
            if ov.iter().all(|x| x.abs() < 1e-9) {
                return None;
            }
            let k = ov.iter().zip(&v).max_by(|p, q| p.0.abs().total_cmp(&q.0.abs()))?;
            let ratio = k.1 / k.0;
            let fits = ov.iter().zip(&v).all(|(x, y)| (y - ratio * x).abs() < 1e-9 * (1.0 + y.abs()));
            (fits && ratio.abs() < 1.0).then_some((o, ratio))
        }) {
            ConditionKind::MultipleOf(other, ratio)
        } else if v.windows(2).any(|p| p[0].signum() != p[1].signum()) {
            ConditionKind::SignChangingInA
        } else {
            ConditionKind::Other
        };
        out.push((c, kind));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_exact_system() {
        let rows = [([1.0f64, 0.0], 2.0), ([0.0, 1.0], -1.0), ([1.0, 1.0], 1.0)];
        let (x, y, d) = least_squares_2(&rows).unwrap();
        assert!((x - 2.0).abs() < 1e-15 && (y + 1.0).abs() < 1e-15 && d < 1e-15);
    }

    #[test]
    fn refine_root_on_cubic() {
        let r = refine_root(|x: f64| x * x * x - 2.0, 0.0, 3.0, 1e-4, 1e-14, 100).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn nonzero_a_target_is_inconsistent() {
        let cfg = SolverConfig::default();
        let err = solve_alpha_beta(0.32, 0.6, IntegerTargets::new(1, -4), &cfg).unwrap_err();
        assert!(err.is_no_root());
    }
}
