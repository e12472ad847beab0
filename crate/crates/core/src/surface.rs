//! Weierstrass evaluation on the solved torus and meshing in the flat coordinate.
//!
//! Points are addressed by polylines in `u` starting at the base point
//! `(λ, 0)`, where `u = 0`, `g = 1` and `X = 0`. A polyline in `u` lifts to
//! the curve without ambiguity, so no sheet bookkeeping is needed here.

use rayon::prelude::*;

use crate::curve::{FlatPoint, HCurve};
use crate::error::{Error, Result};
use crate::flow::{Flow, FlowState};
use crate::forms::HandleParams;
use crate::scalar::{count, lit, Cx, Scalar};

/// A surface point with its Gauss map and flat coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint<T> {
    pub position: [T; 3],
    pub normal: [T; 3],
    pub flat_coord: Cx<T>,
    /// `log g`; the Gauss map itself may overflow near the end.
    pub log_gauss: Cx<T>,
    /// `z` on the curve (`0` for plane data).
    pub z: Cx<T>,
}

impl<T: Scalar> SurfacePoint<T> {
    /// `g = e^{log g}`; infinite at the poles of `g`.
    pub fn gauss(&self) -> Cx<T> {
        self.log_gauss.exp()
    }
}

/// Stereographic image `(2Re g, 2Im g, |g|² − 1)/(|g|² + 1)` of `g = e^L`,
/// evaluated through `1/g` when `|g| > 1`.
pub fn normal_from_log_gauss<T: Scalar>(l: Cx<T>) -> [T; 3] {
    let two: T = lit(2.0);
    if l.re <= T::zero() {
        let g = l.exp();
        let m = g.norm_sqr();
        let d = m + T::one();
        [two * g.re / d, two * g.im / d, (m - T::one()) / d]
    } else {
        let h = (-l).exp();
        let m = h.norm_sqr();
        let d = m + T::one();
        [two * h.re / d, -two * h.im / d, (T::one() - m) / d]
    }
}

/// Normal from a finite or infinite `g`.
pub fn normal_from_gauss<T: Scalar>(g: Cx<T>) -> [T; 3] {
    if !g.norm().is_finite() {
        return [T::zero(), T::zero(), T::one()];
    }
    if g.norm() == T::zero() {
        return [T::zero(), T::zero(), -T::one()];
    }
    normal_from_log_gauss(g.ln())
}

/// Real part of `e^{−iθ}·F`: the associate surface at angle `θ`.
pub fn associate<T: Scalar>(coords: &[Cx<T>; 3], theta: T) -> [T; 3] {
    let phase = Cx::from_polar(T::one(), -theta);
    [(coords[0] * phase).re, (coords[1] * phase).re, (coords[2] * phase).re]
}

/// Integration constant of `g` at the base point. The base point lies on
/// both symmetry lines, where `g` must be real and unimodular.
pub fn g_at_base<T: Scalar>(_params: &HandleParams<T>) -> Cx<T> {
    Cx::new(T::one(), T::zero())
}

/// Evaluates `X = Re ∫ Φ` on the solved torus.
#[derive(Debug, Clone)]
pub struct SurfaceEvaluator<T> {
    curve: HCurve<T>,
    params: HandleParams<T>,
    flow: Flow<T>,
    log_g_base: Cx<T>,
}

impl<T: Scalar> SurfaceEvaluator<T> {
    pub fn new(params: &HandleParams<T>) -> Result<Self> {
        params.validate()?;
        let curve = HCurve::new(params.lambda)?;
        Ok(Self {
            flow: Flow::with_forms(curve.lambda(), params.coefficients()),
            curve,
            params: *params,
            log_g_base: g_at_base(params).ln(),
        })
    }

    /// Overrides the Gauss-map constant at the base point.
    pub fn with_base_gauss(mut self, g: Cx<T>) -> Self {
        self.log_g_base = g.ln();
        self
    }

    pub fn curve(&self) -> &HCurve<T> {
        &self.curve
    }

    pub fn params(&self) -> &HandleParams<T> {
        &self.params
    }

    pub fn base_state(&self) -> FlowState<T> {
        let mut s = FlowState::at(FlatPoint::base(&self.curve).point);
        s.log_g = self.log_g_base;
        s
    }

    /// Integrates `log g` and the coordinate forms along the polyline
    /// `0 → path[0] → path[1] → …` in the flat coordinate.
    pub fn integrate(&self, path: &[Cx<T>]) -> Result<FlowState<T>> {
        self.flow.advance_polyline(self.base_state(), Cx::new(T::zero(), T::zero()), path)
    }

    /// Continues an already integrated state from `u0` to `u1`.
    pub fn step(&self, state: FlowState<T>, u0: Cx<T>, u1: Cx<T>) -> Result<FlowState<T>> {
        self.flow.advance(state, u1 - u0)
    }

    pub fn point_from_state(&self, state: &FlowState<T>, u: Cx<T>, theta: T) -> SurfacePoint<T> {
        SurfacePoint {
            position: associate(&state.coords, theta),
            normal: normal_from_log_gauss(state.log_g),
            flat_coord: u,
            log_gauss: state.log_g,
            z: state.z,
        }
    }

    /// Surface point at the end of the path.
    pub fn evaluate_point(&self, path: &[Cx<T>]) -> Result<SurfacePoint<T>> {
        let s = self.integrate(path)?;
        Ok(self.point_from_state(&s, path.last().copied().unwrap_or_default(), T::zero()))
    }

    /// Same integration, imaginary part of the coordinate integrals.
    ///
    /// Only the real parts have closed periods, so these values depend on the
    /// homotopy class of the path.
    pub fn conjugate_evaluate(&self, path: &[Cx<T>]) -> Result<SurfacePoint<T>> {
        let s = self.integrate(path)?;
        Ok(self.point_from_state(&s, path.last().copied().unwrap_or_default(), T::FRAC_PI_2()))
    }
}

pub fn evaluate_point<T: Scalar>(params: &HandleParams<T>, path: &[Cx<T>]) -> Result<SurfacePoint<T>> {
    SurfaceEvaluator::new(params)?.evaluate_point(path)
}

pub fn conjugate_evaluate<T: Scalar>(params: &HandleParams<T>, path: &[Cx<T>]) -> Result<SurfacePoint<T>> {
    SurfaceEvaluator::new(params)?.conjugate_evaluate(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexTag {
    Interior,
    /// Adjacent to a vertex dropped by the end truncation.
    Boundary,
}

/// Indexed triangle mesh.
#[derive(Debug, Clone)]
pub struct SurfaceMesh<T> {
    pub vertices: Vec<SurfacePoint<T>>,
    pub triangles: Vec<[usize; 3]>,
    pub tags: Vec<VertexTag>,
    /// Grid index `(i, j)` of each vertex when built on a grid.
    pub grid: Vec<(usize, usize)>,
    pub resolution: usize,
}

impl<T: Scalar> SurfaceMesh<T> {
    pub fn positions(&self) -> Vec<[T; 3]> {
        self.vertices.iter().map(|v| v.position).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.tags.len() != n {
            return Err(Error::Mesh("tag count does not match vertex count".into()));
        }
        for t in &self.triangles {
            if t.iter().any(|&k| k >= n) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Mesh(format!("bad triangle {:?}", t)));
            }
        }
        Ok(())
    }

    /// Builds a mesh from per-grid-vertex values on an `nx × ny` grid. Cells
    /// wrap around in each direction flagged periodic; missing vertices drop
    /// their triangles and tag their neighbours as boundary.
    pub fn from_grid(
        points: Vec<Option<SurfacePoint<T>>>,
        nx: usize,
        ny: usize,
        periodic: bool,
        counter_clockwise: bool,
    ) -> Self {
        let mut index = vec![usize::MAX; nx * ny];
        let mut vertices = Vec::new();
        let mut grid = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if let Some(p) = points[j * nx + i] {
                    index[j * nx + i] = vertices.len();
                    vertices.push(p);
                    grid.push((i, j));
                }
            }
        }
        let mut tags = vec![VertexTag::Interior; vertices.len()];
        let mut triangles = Vec::new();
        let (ci, cj) = if periodic { (nx, ny) } else { (nx - 1, ny - 1) };
        let id = |i: usize, j: usize| index[(j % ny) * nx + (i % nx)];
        for j in 0..cj {
            for i in 0..ci {
                let v00 = id(i, j);
                let v10 = id(i + 1, j);
                let v11 = id(i + 1, j + 1);
                let v01 = id(i, j + 1);
                let quad = [v00, v10, v11, v01];
                for (a, b, c) in [(v00, v10, v11), (v00, v11, v01)] {
                    if a == usize::MAX || b == usize::MAX || c == usize::MAX {
                        continue;
                    }
                    if counter_clockwise {
                        triangles.push([a, b, c]);
                    } else {
                        triangles.push([a, c, b]);
                    }
                }
                if quad.contains(&usize::MAX) {
                    for &v in &quad {
                        if v != usize::MAX {
                            tags[v] = VertexTag::Boundary;
                        }
                    }
                }
            }
        }
        if !periodic {
            for (k, &(i, j)) in grid.iter().enumerate() {
                if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
                    tags[k] = VertexTag::Boundary;
                }
            }
        }
        Self {
            vertices,
            triangles,
            tags,
            grid,
            resolution: nx,
        }
    }
}

/// Flat-coordinate grid over one fundamental rhombus.
///
/// With rhombic generators `e₁ = ω_A + ω_B`, `e₂ = ω_B`, vertex `(i, j)` sits at
/// `u = (−½ + i/N)·e₁ + (−½ + j/N)·e₂`. The base point is the centre and the
/// end is at the corners. The diagonal `i = j` is the imaginary `u`-axis and
/// `i + j = N` the real one.
#[derive(Debug, Clone, Copy)]
pub struct FlatGrid<T> {
    pub e1: Cx<T>,
    pub e2: Cx<T>,
    pub n: usize,
}

impl<T: Scalar> FlatGrid<T> {
    pub fn new(curve: &HCurve<T>, n: usize) -> Self {
        let (e1, e2) = curve.rhombic_generators();
        Self { e1, e2, n }
    }

    pub fn u(&self, i: usize, j: usize) -> Cx<T> {
        let n = count::<T>(self.n);
        let half: T = lit(0.5);
        self.e1 * (count::<T>(i) / n - half) + self.e2 * (count::<T>(j) / n - half)
    }

    pub fn counter_clockwise(&self) -> bool {
        (self.e1.conj() * self.e2).im > T::zero()
    }
}

/// Meshes the solved surface over one fundamental rhombus, dropping
/// vertices with `|z| > end_cutoff`.
///
/// Vertex values come from a spanning tree of grid edges: the centre row is
/// integrated outward from the base point, then every column outward from
/// that row, each vertex from its grid neighbour.
pub fn build_mesh<T: Scalar>(params: &HandleParams<T>, resolution: usize, end_cutoff: T) -> Result<SurfaceMesh<T>> {
    if resolution < 8 {
        return Err(Error::InvalidParams("resolution must be at least 8".into()));
    }
    if !(end_cutoff > T::zero()) {
        return Err(Error::InvalidParams("end cutoff must be positive".into()));
    }
    let eval = SurfaceEvaluator::new(params)?;
    let grid = FlatGrid::new(eval.curve(), resolution);
    let n = resolution;
    let c = n / 2;
    let centre = eval.integrate(&[grid.u(c, c)]).ok();

    let walk = |from: Option<FlowState<T>>, steps: &mut dyn Iterator<Item = (usize, usize, usize, usize)>| {
        let mut out = Vec::new();
        let mut state = from;
        for (i0, j0, i1, j1) in steps {
            state = state.and_then(|s| eval.step(s, grid.u(i0, j0), grid.u(i1, j1)).ok());
            out.push(((i1, j1), state));
        }
        out
    };

    let mut row: Vec<Option<FlowState<T>>> = vec![None; n];
    row[c] = centre;
    for (idx, s) in walk(centre, &mut (c + 1..n).map(|i| (i - 1, c, i, c))) {
        row[idx.0] = s;
    }
    for (idx, s) in walk(centre, &mut (0..c).rev().map(|i| (i + 1, c, i, c))) {
        row[idx.0] = s;
    }

    let columns: Vec<Vec<Option<FlowState<T>>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut col = vec![None; n];
            col[c] = row[i];
            for (idx, s) in walk(row[i], &mut (c + 1..n).map(|j| (i, j - 1, i, j))) {
                col[idx.1] = s;
            }
            for (idx, s) in walk(row[i], &mut (0..c).rev().map(|j| (i, j + 1, i, j))) {
                col[idx.1] = s;
            }
            col
        })
        .collect();

    let mut points = vec![None; n * n];
    for (i, col) in columns.iter().enumerate() {
        for (j, s) in col.iter().enumerate() {
            if let Some(s) = s {
                if s.z.norm() <= end_cutoff {
                    points[j * n + i] = Some(eval.point_from_state(s, grid.u(i, j), T::zero()));
                }
            }
        }
    }
    let mesh = SurfaceMesh::from_grid(points, n, n, true, grid.counter_clockwise());
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn normal_is_unit_and_stable() {
        for l in [cx(0.0f64, 0.0), cx(3.0, 1.0), cx(-2.0, 0.5), cx(800.0, 0.3), cx(-800.0, 2.0)] {
            let n = normal_from_log_gauss(l);
            let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            assert!((len - 1.0f64).abs() < 1e-14, "{l:?}");
        }
        let direct = normal_from_gauss(cx(0.3f64, -1.7));
        let g = cx(0.3f64, -1.7);
        let m = g.norm_sqr();
        let expect = [2.0 * g.re / (m + 1.0), 2.0 * g.im / (m + 1.0), (m - 1.0) / (m + 1.0)];
        for k in 0..3 {
            assert!((direct[k] - expect[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn associate_at_right_angle_takes_imaginary_part() {
        let f = [cx(1.0f64, 2.0), cx(-3.0, 0.5), cx(0.0, -1.0)];
        let p = associate(&f, std::f64::consts::FRAC_PI_2);
        assert!((p[0] - 2.0).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15 && (p[2] + 1.0).abs() < 1e-15);
    }
}
