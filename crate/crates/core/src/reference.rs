//! Closed-form helicoid and catenoid, their Weierstrass data on the plane,
//! and reference meshes used as oracles and controls.

use crate::error::Result;
use crate::quad::{integrate, Tolerance};
use crate::scalar::{count, cx, imag_unit, lit, Cx, Scalar};
use crate::surface::{associate, normal_from_log_gauss, SurfaceMesh, SurfacePoint};

/// `(sinh x·sin y, −sinh x·cos y, −y)` at `x + iy`.
pub fn helicoid_closed<T: Scalar>(p: Cx<T>) -> [T; 3] {
    let (s, c) = p.im.sin_cos();
    [p.re.sinh() * s, -p.re.sinh() * c, -p.im]
}

/// `(1 − cosh x·cos y, −cosh x·sin y, x)`: the conjugate of the helicoid,
/// shifted so the origin maps to the origin.
pub fn catenoid_closed<T: Scalar>(p: Cx<T>) -> [T; 3] {
    let (s, c) = p.im.sin_cos();
    [T::one() - p.re.cosh() * c, -p.re.cosh() * s, p.re]
}

/// Weierstrass data on the plane: `g = e^{log_g(z)}`, `dh = h(z)·dz`.
#[derive(Clone, Copy)]
pub struct PlaneData<T> {
    pub log_g: fn(Cx<T>) -> Cx<T>,
    pub dh: fn(Cx<T>) -> Cx<T>,
}

impl<T: Scalar> PlaneData<T> {
    /// `g = e^z`, `dh = i·dz`.
    pub fn helicoid() -> Self {
        Self {
            log_g: |z| z,
            dh: |_| imag_unit(),
        }
    }

    /// The three complex integrands at `z`.
    pub fn integrands(&self, z: Cx<T>) -> [Cx<T>; 3] {
        let l = (self.log_g)(z);
        let (g, gi) = (l.exp(), (-l).exp());
        let h = (self.dh)(z);
        let half: T = lit(0.5);
        [(gi - g) * h * half, imag_unit::<T>() * (gi + g) * h * half, h]
    }
}

/// `∫ (½(g⁻¹ − g), (i/2)(g⁻¹ + g), 1)·dh` along the polyline `0 → path[0] → …`.
pub fn weierstrass_plane<T: Scalar>(data: &PlaneData<T>, path: &[Cx<T>], tol: &Tolerance<T>) -> Result<[Cx<T>; 3]> {
    let zero = Cx::new(T::zero(), T::zero());
    let mut total = [zero; 3];
    let mut from = zero;
    for &to in path {
        let d = to - from;
        for (k, acc) in total.iter_mut().enumerate() {
            let q = integrate(|t: T| data.integrands(from + d * t)[k] * d, T::zero(), T::one(), tol)?;
            *acc = *acc + q.value;
        }
        from = to;
    }
    Ok(total)
}

/// Real part of the helicoid integral along the straight path from 0.
pub fn helicoid_weierstrass<T: Scalar>(p: Cx<T>) -> Result<[T; 3]> {
    let f = weierstrass_plane(&PlaneData::helicoid(), &[p], &Tolerance::default())?;
    Ok(associate(&f, T::zero()))
}

/// Imaginary part of the same integral: the catenoid.
pub fn catenoid_weierstrass<T: Scalar>(p: Cx<T>) -> Result<[T; 3]> {
    let f = weierstrass_plane(&PlaneData::helicoid(), &[p], &Tolerance::default())?;
    Ok(associate(&f, T::FRAC_PI_2()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Helicoid,
    Catenoid,
}

impl ReferenceKind {
    pub fn name(&self) -> &'static str {
        match self {
            ReferenceKind::Helicoid => "helicoid",
            ReferenceKind::Catenoid => "catenoid",
        }
    }

    pub fn closed<T: Scalar>(&self, p: Cx<T>) -> [T; 3] {
        match self {
            ReferenceKind::Helicoid => helicoid_closed(p),
            ReferenceKind::Catenoid => catenoid_closed(p),
        }
    }

    /// Associate angle of this surface within the helicoid family.
    pub fn angle<T: Scalar>(&self) -> T {
        match self {
            ReferenceKind::Helicoid => T::zero(),
            ReferenceKind::Catenoid => T::FRAC_PI_2(),
        }
    }

    pub fn weierstrass<T: Scalar>(&self, p: Cx<T>) -> Result<[T; 3]> {
        let f = weierstrass_plane(&PlaneData::helicoid(), &[p], &Tolerance::default())?;
        Ok(associate(&f, self.angle()))
    }
}

/// Parameter domain of the reference meshes: `[−2, 2] × [−π, π]`.
pub const REFERENCE_X: f64 = 2.0;

/// Grid point `(i, j)` of an `(n+1) × (n+1)` grid over the reference domain.
pub fn reference_param<T: Scalar>(i: usize, j: usize, n: usize) -> Cx<T> {
    let x = lit::<T>(REFERENCE_X);
    let s = count::<T>(i) / count::<T>(n);
    let t = count::<T>(j) / count::<T>(n);
    cx(-x + x * lit(2.0) * s, -T::PI() + T::PI() * lit(2.0) * t)
}

/// Helicoid or catenoid meshed over the reference domain, positions from
/// numerical integration of the Weierstrass data.
pub fn reference_mesh<T: Scalar>(kind: ReferenceKind, resolution: usize) -> Result<SurfaceMesh<T>> {
    use rayon::prelude::*;
    let n = resolution.max(2);
    let points: Result<Vec<Option<SurfacePoint<T>>>> = (0..(n + 1) * (n + 1))
        .into_par_iter()
        .map(|k| {
            let p = reference_param::<T>(k % (n + 1), k / (n + 1), n);
            Ok(Some(SurfacePoint {
                position: kind.weierstrass(p)?,
                normal: normal_from_log_gauss(p),
                flat_coord: p,
                log_gauss: p,
                z: p,
            }))
        })
        .collect();
    Ok(SurfaceMesh::from_grid(points?, n + 1, n + 1, false, true))
}

fn log_gauss_from_normal<T: Scalar>(n: [T; 3]) -> Cx<T> {
    // Inverse stereographic projection; the north pole maps to g = ∞.
    cx(n[0], n[1]).unscale(T::one() - n[2]).ln()
}

/// Flat `n × n` grid of unit spacing in the plane `x₃ = 0`.
pub fn plane_mesh<T: Scalar>(n: usize) -> SurfaceMesh<T> {
    let n = n.max(2);
    let up = [T::zero(), T::zero(), T::one()];
    let points = (0..n * n)
        .map(|k| {
            let (i, j) = (count::<T>(k % n), count::<T>(k / n));
            Some(SurfacePoint {
                position: [i, j, T::zero()],
                normal: up,
                flat_coord: cx(i, j),
                log_gauss: log_gauss_from_normal(up),
                z: cx(i, j),
            })
        })
        .collect();
    SurfaceMesh::from_grid(points, n, n, false, true)
}

/// Latitude–longitude sphere of the given radius, closed, outward normals.
pub fn sphere_mesh<T: Scalar>(rings: usize, radius: T) -> SurfaceMesh<T> {
    let rings = rings.max(3);
    let sectors = 2 * rings;
    let mut vertices = Vec::new();
    let point = |n: [T; 3], theta: T, phi: T| SurfacePoint {
        position: [n[0] * radius, n[1] * radius, n[2] * radius],
        normal: n,
        flat_coord: cx(theta, phi),
        log_gauss: log_gauss_from_normal(n),
        z: cx(theta, phi),
    };
    vertices.push(point([T::zero(), T::zero(), T::one()], T::zero(), T::zero()));
    for r in 1..rings {
        let theta = T::PI() * count::<T>(r) / count::<T>(rings);
        for s in 0..sectors {
            let phi = T::TAU() * count::<T>(s) / count::<T>(sectors);
            let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            vertices.push(point(n, theta, phi));
        }
    }
    vertices.push(point([T::zero(), T::zero(), -T::one()], T::PI(), T::zero()));
    let south = vertices.len() - 1;
    let ring = |r: usize, s: usize| 1 + (r - 1) * sectors + s % sectors;
    let mut triangles = Vec::new();
    for s in 0..sectors {
        triangles.push([0, ring(1, s), ring(1, s + 1)]);
        triangles.push([south, ring(rings - 1, s + 1), ring(rings - 1, s)]);
    }
    for r in 1..rings - 1 {
        for s in 0..sectors {
            let (a, b, c, d) = (ring(r, s), ring(r, s + 1), ring(r + 1, s + 1), ring(r + 1, s));
            triangles.push([a, d, c]);
            triangles.push([a, c, b]);
        }
    }
    let count = vertices.len();
    SurfaceMesh {
        grid: (0..count).map(|k| (k, 0)).collect(),
        tags: vec![crate::surface::VertexTag::Interior; count],
        vertices,
        triangles,
        resolution: rings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_at_marked_points() {
        let h = helicoid_closed(cx(0.0f64, std::f64::consts::FRAC_PI_2));
        assert!(h[0].abs() < 1e-15 && h[1].abs() < 1e-15 && (h[2] + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let h = helicoid_closed(cx(1.0f64, 0.0));
        assert_eq!(h, [0.0, -(1.0f64).sinh(), -0.0]);
        let c = catenoid_closed(cx(0.0f64, std::f64::consts::PI));
        assert!((c[0] - 2.0).abs() < 1e-15 && c[1].abs() < 1e-15 && c[2] == 0.0);
    }

    #[test]
    fn sphere_normals_point_outward() {
        let m = sphere_mesh::<f64>(6, 1.0);
        for t in &m.triangles {
            let p: Vec<[f64; 3]> = t.iter().map(|&k| m.vertices[k].position).collect();
            let a = [p[1][0] - p[0][0], p[1][1] - p[0][1], p[1][2] - p[0][2]];
            let b = [p[2][0] - p[0][0], p[2][1] - p[0][1], p[2][2] - p[0][2]];
            let n = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
            let c = [p[0][0] + p[1][0] + p[2][0], p[0][1] + p[1][1] + p[2][1], p[0][2] + p[1][2] + p[2][2]];
            assert!(n[0] * c[0] + n[1] * c[1] + n[2] * c[2] > 0.0);
        }
    }
}
