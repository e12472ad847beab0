//! Dense complex polynomials in `z`, coefficients stored lowest degree first.

use crate::scalar::{count, lit, Cx, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(coeffs: Vec<Cx<T>>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self::new(vec![c])
    }

    /// Monic product `(z - r_0)(z - r_1)...`.
    pub fn from_roots(roots: &[Cx<T>]) -> Self {
        roots.iter().fold(Self::constant(Cx::new(T::one(), T::zero())), |acc, &r| {
            acc.mul(&Self::new(vec![-r, Cx::new(T::one(), T::zero())]))
        })
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.norm_sqr() == T::zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Cx::new(T::zero(), T::zero()));
        }
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].norm_sqr() == T::zero()
    }

    pub fn leading(&self) -> Cx<T> {
        *self.coeffs.last().expect("non-empty")
    }

    pub fn eval(&self, z: Cx<T>) -> Cx<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Cx::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(Cx::new(T::zero(), T::zero()));
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * count::<T>(k))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Cx::new(T::zero(), T::zero()); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// All complex roots by Aberth–Ehrlich iteration.
    pub fn roots(&self) -> Vec<Cx<T>> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let monic: Vec<Cx<T>> = self.coeffs.iter().map(|&c| c / lead).collect();
        let monic = Self { coeffs: monic };
        if n == 1 {
            return vec![-monic.coeffs[0]];
        }
        let deriv = monic.derivative();
        // Cauchy bound for the initial circle.
        let radius = monic.coeffs[..n]
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), T::max)
            + T::one();
        let mut roots: Vec<Cx<T>> = (0..n)
            .map(|k| {
                let theta = T::TAU() * count::<T>(k) / count::<T>(n) + lit(0.4);
                Cx::from_polar(radius * lit(0.5), theta)
            })
            .collect();
        for _ in 0..500 {
            let mut moved = T::zero();
            for k in 0..n {
                let zk = roots[k];
                let p = monic.eval(zk);
                if p.norm() == T::zero() {
                    continue;
                }
                let ratio = p / deriv.eval(zk);
                let repulsion = roots
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .fold(Cx::new(T::zero(), T::zero()), |acc, (_, &zj)| acc + (zk - zj).inv());
                let step = ratio / (Cx::new(T::one(), T::zero()) - ratio * repulsion);
                roots[k] = zk - step;
                moved = moved.max(step.norm() / zk.norm().max(T::one()));
            }
            if moved < T::epsilon() * lit(4.0) {
                break;
            }
        }
        roots
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn roots_of_curve_polynomial() {
        let lambda = 0.32;
        let p = Poly::from_roots(&[cx(lambda, 0.0), cx(0.0, 1.0), cx(0.0, -1.0)]);
        let mut r = p.roots();
        r.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((r[0] - cx(0.0, -1.0)).norm() < 1e-13);
        assert!((r[1] - cx(lambda, 0.0)).norm() < 1e-13);
        assert!((r[2] - cx(0.0, 1.0)).norm() < 1e-13);
    }

    #[test]
    fn derivative_and_eval() {
        let p = Poly::new(vec![cx(1.0, 0.0), cx(0.0, 2.0), cx(3.0, 0.0)]);
        let z = cx(0.7, -0.2);
        let d = p.derivative().eval(z);
        assert!((d - (cx(0.0, 2.0) + z * 6.0)).norm() < 1e-15);
        assert_eq!(p.degree(), 2);
    }
}
