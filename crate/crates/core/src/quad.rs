//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands
//! of one real variable.
//!
//! The interval with the largest embedded error estimate is halved until the
//! summed estimate meets the tolerance. The subdivision order only depends on
//! the integrand values, so repeated calls are bit-for-bit reproducible.

use crate::error::{Error, Result};
use crate::scalar::{cx_to_f64, lit, to_f64, Cx, Scalar};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance<T> {
    pub rel: T,
    pub abs: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Tolerance<T> {
    pub fn new(rel: T, abs: T) -> Self {
        Self {
            rel,
            abs,
            max_intervals: 4000,
        }
    }
}

impl<T: Scalar> Default for Tolerance<T> {
    /// Relative `1e-12` with a matching absolute floor.
    fn default() -> Self {
        let rel = lit::<T>(1e-12).max(T::epsilon() * lit(64.0));
        Self::new(rel, rel * lit(0.1))
    }
}

/// Integral estimate together with its error bound.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub value: Cx<T>,
    pub error: T,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Panel<T> {
    lo: T,
    hi: T,
    value: Cx<T>,
    error: T,
    magnitude: T,
}

fn kronrod_panel<T: Scalar, F: Fn(T) -> Cx<T>>(f: &F, lo: T, hi: T) -> Panel<T> {
    let half = (hi - lo) * lit(0.5);
    let mid = (hi + lo) * lit(0.5);
    let centre = f(mid);
    let mut kronrod = centre * lit::<T>(WGK[7]);
    let mut gauss = centre * lit::<T>(WG[3]);
    let mut magnitude = centre.norm() * lit::<T>(WGK[7]);
    for j in 0..7 {
        let dx = half * lit::<T>(XGK[j]);
        let left = f(mid - dx);
        let right = f(mid + dx);
        let pair = left + right;
        kronrod = kronrod + pair * lit::<T>(WGK[j]);
        magnitude = magnitude + (left.norm() + right.norm()) * lit::<T>(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * lit::<T>(WG[j / 2]);
        }
    }
    let scale = half.abs();
    Panel {
        lo,
        hi,
        value: kronrod * half,
        error: (kronrod - gauss).norm() * scale,
        magnitude: magnitude * scale,
    }
}

/// Integrates `f` over `[lo, hi]` (either orientation).
///
/// Fails with [`Error::QuadratureFailure`] carrying the best estimate when the
/// tolerance is not met within `tol.max_intervals` panels.
pub fn integrate<T, F>(f: F, lo: T, hi: T, tol: &Tolerance<T>) -> Result<Quadrature<T>>
where
    T: Scalar,
    F: Fn(T) -> Cx<T>,
{
    if lo == hi {
        return Ok(Quadrature {
            value: Cx::new(T::zero(), T::zero()),
            error: T::zero(),
            evaluations: 0,
        });
    }
    let mut panels = vec![kronrod_panel(&f, lo, hi)];
    let roundoff = T::epsilon() * lit(50.0);
    loop {
        let total: Cx<T> = panels.iter().fold(Cx::new(T::zero(), T::zero()), |acc, p| acc + p.value);
        let error: T = panels.iter().map(|p| p.error).sum();
        let magnitude: T = panels.iter().map(|p| p.magnitude).sum();
        let target = tol.abs.max(tol.rel * total.norm());
        if !error.is_finite() || !total.re.is_finite() || !total.im.is_finite() {
            let (best_re, best_im) = cx_to_f64(total);
            return Err(Error::QuadratureFailure {
                best_re,
                best_im,
                bound: f64::INFINITY,
            });
        }
        if error <= target || error <= roundoff * magnitude {
            return Ok(Quadrature {
                value: total,
                error,
                evaluations: 15 * (2 * panels.len() - 1),
            });
        }
        // Largest error first; ties resolved by position for reproducibility.
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (i, p)| {
                if p.error > best.1 {
                    (i, p.error)
                } else {
                    best
                }
            });
        let panel = panels[worst];
        let mid = (panel.lo + panel.hi) * lit(0.5);
        let exhausted = panels.len() >= tol.max_intervals
            || (mid - panel.lo).abs() <= T::epsilon() * panel.lo.abs().max(panel.hi.abs()) * lit(4.0);
        if exhausted {
            let (best_re, best_im) = cx_to_f64(total);
            return Err(Error::QuadratureFailure {
                best_re,
                best_im,
                bound: to_f64(error),
            });
        }
        panels[worst] = kronrod_panel(&f, panel.lo, mid);
        panels.push(kronrod_panel(&f, mid, panel.hi));
    }
}
