//! Taylor-series integration in the flat coordinate `u`.
//!
//! In `u` the curve is traced by `z' = w`, `w' = P'(z)/2`, which is polynomial,
//! so branch points are ordinary points of the flow. Along with `(z, w)` the
//! engine can carry `L = log g` and the three Weierstrass coordinate
//! integrals, with
//!
//! ```text
//! L'  = ρ(z − α)(z − β)/(z − a)
//! F₁' = ½(e^{−L} − e^{L})·i(z − a)
//! F₂' = (i/2)(e^{−L} + e^{L})·i(z − a)
//! F₃' = i(z − a)
//! ```
//!
//! Coefficients come from the usual recurrences (Cauchy products, series
//! division, and `k·E_k = Σ j·L_j·E_{k−j}` for the exponentials). The step is
//! a fixed fraction of the convergence radius estimated from the tail.

use crate::curve::{curve_poly, CurvePoint};
use crate::error::{Error, Result};
use crate::scalar::{count, cx_to_f64, imag_unit, lit, sqrt_near, to_f64, Cx, Scalar};

/// Coefficients of the logarithmic Gauss-map derivative and the height form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormCoefficients<T> {
    pub a: Cx<T>,
    pub alpha: Cx<T>,
    pub beta: Cx<T>,
    pub rho: Cx<T>,
}

/// Point of the flow: curve point, `log g`, and the complex coordinate integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState<T> {
    pub z: Cx<T>,
    pub w: Cx<T>,
    pub log_g: Cx<T>,
    pub coords: [Cx<T>; 3],
}

impl<T: Scalar> FlowState<T> {
    pub fn at(point: CurvePoint<T>) -> Self {
        let zero = Cx::new(T::zero(), T::zero());
        Self {
            z: point.z,
            w: point.w,
            log_g: zero,
            coords: [zero; 3],
        }
    }

    pub fn point(&self) -> CurvePoint<T> {
        CurvePoint::new(self.z, self.w)
    }
}

#[derive(Debug, Clone)]
pub struct Flow<T> {
    lambda: Cx<T>,
    forms: Option<FormCoefficients<T>>,
    order: usize,
    safety: T,
    max_steps: usize,
}

struct Series<T> {
    z: Vec<Cx<T>>,
    w: Vec<Cx<T>>,
    log_g: Vec<Cx<T>>,
    exp_pos: Vec<Cx<T>>,
    exp_neg: Vec<Cx<T>>,
    coords: [Vec<Cx<T>>; 3],
}

fn horner<T: Scalar>(c: &[Cx<T>], h: Cx<T>) -> Cx<T> {
    c.iter().rev().fold(Cx::new(T::zero(), T::zero()), |acc, &x| acc * h + x)
}

fn tail_radius<T: Scalar>(c: &[Cx<T>], scale: T) -> T {
    let n = c.len() - 1;
    let mut r = T::infinity();
    for k in [n - 1, n] {
        let m = c[k].norm();
        if m > T::zero() {
            r = r.min((scale / m).powf(T::one() / count::<T>(k)));
        }
    }
    r
}

impl<T: Scalar> Flow<T> {
    const DEFAULT_ORDER: usize = 30;

    fn build(lambda: Cx<T>, forms: Option<FormCoefficients<T>>) -> Self {
        Self {
            lambda,
            forms,
            order: Self::DEFAULT_ORDER,
            safety: lit(0.9),
            max_steps: 20_000,
        }
    }

    /// Flow of `(z, w)` alone.
    pub fn curve_only(lambda: Cx<T>) -> Self {
        Self::build(lambda, None)
    }

    /// Flow carrying `log g` and the coordinate integrals as well.
    pub fn with_forms(lambda: Cx<T>, forms: FormCoefficients<T>) -> Self {
        Self::build(lambda, Some(forms))
    }

    pub fn order(mut self, order: usize) -> Self {
        self.order = order.max(8);
        self
    }

    fn series(&self, s: &FlowState<T>) -> Series<T> {
        let n = self.order;
        let zero = Cx::new(T::zero(), T::zero());
        let i = imag_unit::<T>();
        let lambda = self.lambda;
        let mut z = vec![zero; n + 1];
        let mut w = vec![zero; n + 1];
        let mut sq = vec![zero; n + 1];
        z[0] = s.z;
        w[0] = s.w;
        for k in 0..n {
            sq[k] = (0..=k).fold(zero, |acc, j| acc + z[j] * z[k - j]);
            let kp = count::<T>(k + 1);
            z[k + 1] = w[k] / kp;
            let mut dp = sq[k] * lit::<T>(3.0) - lambda * z[k] * lit::<T>(2.0);
            if k == 0 {
                dp = dp + T::one();
            }
            w[k + 1] = dp * lit::<T>(0.5) / kp;
        }
        let mut out = Series {
            z,
            w,
            log_g: Vec::new(),
            exp_pos: Vec::new(),
            exp_neg: Vec::new(),
            coords: [Vec::new(), Vec::new(), Vec::new()],
        };
        let Some(f) = self.forms else {
            return out;
        };
        sq[n] = (0..=n).fold(zero, |acc, j| acc + out.z[j] * out.z[n - j]);
        let z = &out.z;
        // numerator ρ(z² − (α+β)z + αβ), denominator z − a
        let sum = f.alpha + f.beta;
        let prod = f.alpha * f.beta;
        let mut num = vec![zero; n + 1];
        for k in 0..=n {
            num[k] = sq[k] - sum * z[k];
            if k == 0 {
                num[k] = num[k] + prod;
            }
            num[k] = num[k] * f.rho;
        }
        let d0 = z[0] - f.a;
        let mut ratio = vec![zero; n + 1];
        for k in 0..=n {
            let mut acc = num[k];
            for j in 1..=k {
                acc = acc - z[j] * ratio[k - j];
            }
            ratio[k] = acc / d0;
        }
        let mut log_g = vec![zero; n + 1];
        log_g[0] = s.log_g;
        for k in 0..n {
            log_g[k + 1] = ratio[k] / count::<T>(k + 1);
        }
        let mut ep = vec![zero; n + 1];
        let mut en = vec![zero; n + 1];
        let (e0p, e0n) = split_exp(s.log_g);
        ep[0] = e0p;
        en[0] = e0n;
        for k in 1..=n {
            let mut accp = zero;
            let mut accn = zero;
            for j in 1..=k {
                let jl = log_g[j] * count::<T>(j);
                accp = accp + jl * ep[k - j];
                accn = accn + jl * en[k - j];
            }
            let kk = count::<T>(k);
            ep[k] = accp / kk;
            en[k] = -accn / kk;
        }
        // height density H = i(z − a)
        let h: Vec<Cx<T>> = (0..=n)
            .map(|k| if k == 0 { i * (z[0] - f.a) } else { i * z[k] })
            .collect();
        let mut c1 = vec![zero; n + 1];
        let mut c2 = vec![zero; n + 1];
        let mut c3 = vec![zero; n + 1];
        c1[0] = s.coords[0];
        c2[0] = s.coords[1];
        c3[0] = s.coords[2];
        let half: T = lit(0.5);
        for k in 0..n {
            let mut diff = zero;
            let mut plus = zero;
            for j in 0..=k {
                diff = diff + (en[j] - ep[j]) * h[k - j];
                plus = plus + (en[j] + ep[j]) * h[k - j];
            }
            let kp = count::<T>(k + 1);
            c1[k + 1] = diff * half / kp;
            c2[k + 1] = i * plus * half / kp;
            c3[k + 1] = h[k] / kp;
        }
        out.log_g = log_g;
        out.exp_pos = ep;
        out.exp_neg = en;
        out.coords = [c1, c2, c3];
        out
    }

    fn radius(&self, s: &Series<T>) -> T {
        let one = T::one();
        let mut r = tail_radius(&s.z, s.z[0].norm().max(one)).min(tail_radius(&s.w, s.w[0].norm().max(one)));
        if self.forms.is_some() {
            r = r
                .min(tail_radius(&s.exp_pos, s.exp_pos[0].norm()))
                .min(tail_radius(&s.exp_neg, s.exp_neg[0].norm()))
                .min(tail_radius(&s.log_g, s.log_g[1].norm().max(one)));
        }
        r
    }

    /// Advances the state by `du` along the straight segment in `u`.
    pub fn advance(&self, start: FlowState<T>, du: Cx<T>) -> Result<FlowState<T>> {
        let total = du.norm();
        if total == T::zero() {
            return Ok(start);
        }
        let dir = du / total;
        let eps = T::epsilon();
        let fraction = self.safety * eps.powf(T::one() / count::<T>(self.order));
        let mut s = start;
        let mut done = T::zero();
        for _ in 0..self.max_steps {
            let left = total - done;
            if left <= T::zero() {
                return Ok(s);
            }
            let series = self.series(&s);
            let r = self.radius(&series);
            let mut step = (r * fraction).min(left);
            let floor = eps * lit::<T>(16.0) * (T::one() + total);
            if !(step > floor) {
                let (re, im) = cx_to_f64(s.z);
                return Err(Error::RerouteFailed(format!(
                    "step underflow near z = ({re:.6e}, {im:.6e}) after {:.6} of {:.6}",
                    to_f64(done),
                    to_f64(total)
                )));
            }
            if left - step < floor {
                step = left;
            }
            let h = dir * step;
            let mut next = FlowState {
                z: horner(&series.z, h),
                w: horner(&series.w, h),
                log_g: s.log_g,
                coords: s.coords,
            };
            if self.forms.is_some() {
                next.log_g = horner(&series.log_g, h);
                for c in 0..3 {
                    next.coords[c] = horner(&series.coords[c], h);
                }
            }
            // Pull w back onto the curve away from branch points.
            let p = curve_poly(self.lambda, next.z);
            if p.norm() > lit::<T>(1e-8) * (T::one() + next.z.norm().powi(3)) {
                next.w = sqrt_near(p, next.w);
            }
            if !next.z.norm().is_finite() || !next.w.norm().is_finite() {
                return Err(Error::RerouteFailed("flow left the finite curve".into()));
            }
            s = next;
            done = if step == left { total } else { done + step };
        }
        Err(Error::RerouteFailed(format!(
            "step budget of {} exhausted",
            self.max_steps
        )))
    }

    /// Advances through the successive waypoints `u₁, u₂, …` starting at `u0`.
    pub fn advance_polyline(&self, start: FlowState<T>, u0: Cx<T>, waypoints: &[Cx<T>]) -> Result<FlowState<T>> {
        let mut s = start;
        let mut at = u0;
        for &u in waypoints {
            s = self.advance(s, u - at)?;
            at = u;
        }
        Ok(s)
    }
}

/// `(e^{L}, e^{−L})`.
pub fn split_exp<T: Scalar>(l: Cx<T>) -> (Cx<T>, Cx<T>) {
    (l.exp(), (-l).exp())
}
