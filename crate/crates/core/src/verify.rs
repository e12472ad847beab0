//! Numerical checks on generated meshes.
//!
//! All quantities are computed in `f64` whatever the mesh scalar.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::curve::HCurve;
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Scalar};
use crate::surface::SurfaceMesh;

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

/// Triangle area below which a triangle is reported as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-14;

/// Positions, normals and connectivity in `f64`.
#[derive(Debug, Clone)]
pub struct MeshView {
    pub positions: Vec<V3>,
    pub normals: Vec<V3>,
    pub triangles: Vec<[usize; 3]>,
}

impl MeshView {
    pub fn from_mesh<T: Scalar>(mesh: &SurfaceMesh<T>) -> Self {
        let f = |v: [T; 3]| [to_f64(v[0]), to_f64(v[1]), to_f64(v[2])];
        Self {
            positions: mesh.vertices.iter().map(|v| f(v.position)).collect(),
            normals: mesh.vertices.iter().map(|v| f(v.normal)).collect(),
            triangles: mesh.triangles.clone(),
        }
    }

    /// Vertices whose incident edges are each shared by exactly two triangles.
    pub fn interior(&self) -> Vec<bool> {
        let mut edges: HashMap<(usize, usize), u32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut inner = vec![true; self.positions.len()];
        let mut touched = vec![false; self.positions.len()];
        for (&(a, b), &n) in &edges {
            touched[a] = true;
            touched[b] = true;
            if n != 2 {
                inner[a] = false;
                inner[b] = false;
            }
        }
        inner.iter().zip(&touched).map(|(&i, &t)| i && t).collect()
    }
}

/// Per-vertex discrete mean curvature `κ₁ + κ₂` (`None` off the interior).
#[derive(Debug, Clone)]
pub struct MeanCurvature {
    pub values: Vec<Option<f64>>,
    pub degenerate_triangles: usize,
}

impl MeanCurvature {
    pub fn interior_values(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }

    pub fn max(&self) -> f64 {
        self.interior_values().into_iter().fold(0.0, f64::max)
    }

    pub fn median(&self) -> f64 {
        let mut v = self.interior_values();
        if v.is_empty() {
            return 0.0;
        }
        v.sort_by(|a, b| a.total_cmp(b));
        v[v.len() / 2]
    }
}

/// Cotangent-Laplacian mean curvature with mixed Voronoi areas.
///
/// Returns `|Σ (cot α + cot β)(xᵢ − xⱼ)| / (2A)`, which is `2/r` on a sphere of
/// radius `r`. Vertices touching a degenerate triangle are skipped.
pub fn mean_curvature_of(view: &MeshView) -> MeanCurvature {
    let n = view.positions.len();
    let mut lap = vec![[0.0; 3]; n];
    let mut area = vec![0.0; n];
    let mut bad = vec![false; n];
    let mut degenerate = 0;
    for t in &view.triangles {
        let p = [view.positions[t[0]], view.positions[t[1]], view.positions[t[2]]];
        let twice = norm(cross(sub(p[1], p[0]), sub(p[2], p[0])));
        if !(twice * 0.5 >= DEGENERATE_AREA) || !twice.is_finite() {
            degenerate += 1;
            for &v in t {
                bad[v] = true;
            }
            continue;
        }
        let tri_area = 0.5 * twice;
        let mut cot = [0.0; 3];
        for k in 0..3 {
            let a = sub(p[(k + 1) % 3], p[k]);
            let b = sub(p[(k + 2) % 3], p[k]);
            cot[k] = dot(a, b) / twice;
        }
        let obtuse = (0..3).find(|&k| cot[k] < 0.0);
        for k in 0..3 {
            let (i, j, l) = (k, (k + 1) % 3, (k + 2) % 3);
            // Edge i-j is opposite l; edge i-l is opposite j.
            let eij = sub(p[i], p[j]);
            let eil = sub(p[i], p[l]);
            for c in 0..3 {
                lap[t[i]][c] += 0.5 * (cot[l] * eij[c] + cot[j] * eil[c]);
            }
            area[t[i]] += match obtuse {
                None => 0.125 * (dot(eij, eij) * cot[l] + dot(eil, eil) * cot[j]),
                Some(o) if o == i => 0.5 * tri_area,
                Some(_) => 0.25 * tri_area,
            };
        }
    }
    let inner = view.interior();
    let values = (0..n)
        .map(|v| {
            if !inner[v] || bad[v] || !(area[v] > 0.0) {
                return None;
            }
            let h = norm(lap[v]) / area[v];
            h.is_finite().then_some(h)
        })
        .collect();
    MeanCurvature {
        values,
        degenerate_triangles: degenerate,
    }
}

pub fn discrete_mean_curvature<T: Scalar>(mesh: &SurfaceMesh<T>) -> MeanCurvature {
    mean_curvature_of(&MeshView::from_mesh(mesh))
}

/// Angle in degrees between the area-weighted fan normal and the stored
/// vertex normal, per interior vertex.
pub fn normal_deviation_of(view: &MeshView) -> Vec<Option<f64>> {
    let n = view.positions.len();
    let mut fan = vec![[0.0; 3]; n];
    for t in &view.triangles {
        let p = [view.positions[t[0]], view.positions[t[1]], view.positions[t[2]]];
        let c = cross(sub(p[1], p[0]), sub(p[2], p[0]));
        for &v in t {
            for k in 0..3 {
                fan[v][k] += c[k];
            }
        }
    }
    let inner = view.interior();
    (0..n)
        .map(|v| {
            let f = fan[v];
            let len = norm(f);
            if !inner[v] || !(len > 0.0) || !len.is_finite() {
                return None;
            }
            let m = view.normals[v];
            let c = (dot(f, m) / (len * norm(m))).clamp(-1.0, 1.0);
            Some(c.acos().to_degrees())
        })
        .collect()
}

pub fn normal_deviation<T: Scalar>(mesh: &SurfaceMesh<T>) -> Vec<Option<f64>> {
    normal_deviation_of(&MeshView::from_mesh(mesh))
}

pub fn max_defined(values: &[Option<f64>]) -> f64 {
    values.iter().flatten().copied().fold(0.0, f64::max)
}

/// `x ↦ Rx + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub rotation: [[f64; 3]; 3],
    pub translation: V3,
}

impl RigidMotion {
    pub fn identity() -> Self {
        Self::rotation_about_axis(2, 0.0)
    }

    /// Rotation by `angle` about coordinate axis `axis` (0, 1 or 2).
    pub fn rotation_about_axis(axis: usize, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        // Snap the half and quarter turns so the controls are exact.
        let snap = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
        let (s, c) = (snap(s), snap(c));
        let (p, q) = ((axis + 1) % 3, (axis + 2) % 3);
        let mut r = [[0.0; 3]; 3];
        r[axis][axis] = 1.0;
        r[p][p] = c;
        r[q][q] = c;
        r[p][q] = -s;
        r[q][p] = s;
        Self {
            rotation: r,
            translation: [0.0; 3],
        }
    }

    pub fn apply(&self, x: V3) -> V3 {
        let r = &self.rotation;
        [
            dot(r[0], x) + self.translation[0],
            dot(r[1], x) + self.translation[1],
            dot(r[2], x) + self.translation[2],
        ]
    }
}

/// Subsample size for symmetry checks.
pub const SYMMETRY_SAMPLES: usize = 1000;

/// Largest distance from the image of a sampled vertex to the nearest
/// vertex, relative to `max(1, |x|)`.
///
/// Coordinates near the end grow exponentially, so the deviation is scaled
/// by the size of the point it is measured at.
pub fn symmetry_deviation_of(positions: &[V3], motion: &RigidMotion) -> f64 {
    if positions.is_empty() {
        return 0.0;
    }
    let stride = (positions.len() / SYMMETRY_SAMPLES).max(1);
    positions
        .par_iter()
        .step_by(stride)
        .map(|&x| {
            let y = motion.apply(x);
            let best = positions
                .iter()
                .map(|&p| {
                    let d = sub(p, y);
                    dot(d, d)
                })
                .fold(f64::INFINITY, f64::min);
            best.sqrt() / norm(x).max(1.0)
        })
        .reduce(|| 0.0, f64::max)
}

pub fn check_symmetry<T: Scalar>(mesh: &SurfaceMesh<T>, motion: &RigidMotion) -> f64 {
    symmetry_deviation_of(&MeshView::from_mesh(mesh).positions, motion)
}

/// `||e₁| − |e₂|| / |e₁|` for the rhombus generators of the period lattice.
pub fn check_rhombic<T: Scalar>(curve: &HCurve<T>) -> f64 {
    let (e1, e2) = curve.rhombic_generators();
    let (a, b) = (to_f64(e1.norm()), to_f64(e2.norm()));
    (a - b).abs() / a
}

/// Reduces an angle to `(−π/2, π/2]`.
pub fn wrap_half_turn(x: f64) -> f64 {
    let r = x - PI * (x / PI).round();
    if r <= -FRAC_PI_2 {
        r + PI
    } else {
        r
    }
}

/// Helicoid with vertical axis through `(c₁, c₂)` whose rulings at height
/// `x₃` point at angle `κ·x₃ + φ` (mod π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicoidFit {
    pub centre: [f64; 2],
    pub kappa: f64,
    pub phase: f64,
    /// RMS angular residual over `π/2`; uniformly spread angles give about 0.58.
    pub residual: f64,
    pub count: usize,
}

fn angular_residuals(points: &[V3], centre: [f64; 2], kappa: f64, phase: f64) -> Vec<f64> {
    points
        .iter()
        .map(|p| wrap_half_turn((p[1] - centre[1]).atan2(p[0] - centre[0]) - kappa * p[2] - phase))
        .collect()
}

fn rms(r: &[f64]) -> f64 {
    (r.iter().map(|x| x * x).sum::<f64>() / r.len() as f64).sqrt()
}

/// Best phase for fixed axis and pitch: circular mean of the doubled angles.
fn best_phase(points: &[V3], centre: [f64; 2], kappa: f64) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for p in points {
        let t = 2.0 * ((p[1] - centre[1]).atan2(p[0] - centre[0]) - kappa * p[2]);
        s += t.sin();
        c += t.cos();
    }
    0.5 * s.atan2(c)
}

/// Points closer to the axis than this fraction of the median radius are
/// left out of the fit.
pub const AXIS_EXCLUSION: f64 = 1e-6;

/// Largest axis offset, as a fraction of the median radius.
pub const MAX_AXIS_OFFSET: f64 = 0.25;

/// Points used by the initial pitch scan.
pub const SCAN_SAMPLES: usize = 2000;

/// Pitch range scanned to initialise the fit.
pub const KAPPA_SCAN: (f64, f64, usize) = (-40.0, 40.0, 8001);

/// Least-squares helicoid fit by Levenberg–Marquardt on the wrapped angular
/// residual, started from a pitch scan with the axis on `x₃`.
pub fn fit_helicoid(points: &[V3]) -> Result<HelicoidFit> {
    if points.len() < 6 {
        return Err(Error::Mesh(format!("helicoid fit needs at least 6 points, got {}", points.len())));
    }
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p[2]), h.max(p[2])));
    if !(hi - lo > 1e-9) {
        return Err(Error::Mesh("helicoid fit: no vertical extent, pitch undetermined".into()));
    }
    let scale = {
        let mut r: Vec<f64> = points.iter().map(|p| p[0].hypot(p[1])).collect();
        r.sort_by(|a, b| a.total_cmp(b));
        r[r.len() / 2].max(1e-300)
    };
    // Points on the axis carry no angle.
    let kept: Vec<V3> = points
        .iter()
        .copied()
        .filter(|p| p[0].hypot(p[1]) > AXIS_EXCLUSION * scale)
        .collect();
    if kept.len() < 6 {
        return Err(Error::Mesh("helicoid fit: points collapse onto the axis".into()));
    }
    let points = &kept[..];
    let (k0, k1, nk) = KAPPA_SCAN;
    let origin = [0.0, 0.0];
    let sample: Vec<V3> = points.iter().step_by((points.len() / SCAN_SAMPLES).max(1)).copied().collect();
    let (mut kappa, mut best): (f64, f64) = (0.0, f64::INFINITY);
    for s in 0..nk {
        let k = k0 + (k1 - k0) * s as f64 / (nk - 1) as f64;
        let r = rms(&angular_residuals(&sample, origin, k, best_phase(&sample, origin, k)));
        // Regularly spaced heights alias pitches; prefer the smallest.
        if r < best - 1e-12 || (r <= best + 1e-12 && k.abs() < kappa.abs()) {
            best = best.min(r);
            kappa = k;
        }
    }

    // Parameters (c₁/s, c₂/s, κ, φ) with s the median radius.
    let mut x = [0.0, 0.0, kappa, best_phase(points, origin, kappa)];
    let residual = |x: &[f64; 4]| angular_residuals(points, [x[0] * scale, x[1] * scale], x[2], x[3]);
    let mut r = residual(&x);
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut mu = 1e-3;
    for _ in 0..100 {
        let mut jac = vec![[0.0; 4]; r.len()];
        for k in 0..4 {
            let h = 1e-7 * (1.0 + x[k].abs());
            let mut xp = x;
            xp[k] += h;
            let rp = residual(&xp);
            for (i, row) in jac.iter_mut().enumerate() {
                row[k] = wrap_half_turn(rp[i] - r[i]) / h;
            }
        }
        let mut a = [[0.0; 4]; 4];
        let mut g = [0.0; 4];
        for (row, ri) in jac.iter().zip(&r) {
            for p in 0..4 {
                g[p] += row[p] * ri;
                for q in 0..4 {
                    a[p][q] += row[p] * row[q];
                }
            }
        }
        let mut improved = false;
        for _ in 0..20 {
            let mut m = a;
            for p in 0..4 {
                m[p][p] += mu * (1.0 + a[p][p]);
            }
            let Some(step) = solve4(m, g.map(|v| -v)) else {
                mu *= 10.0;
                continue;
            };
            let xn = [x[0] + step[0], x[1] + step[1], x[2] + step[2], x[3] + step[3]];
            if xn[0].hypot(xn[1]) > MAX_AXIS_OFFSET {
                mu *= 10.0;
                continue;
            }
            let rn = residual(&xn);
            let cn: f64 = rn.iter().map(|v| v * v).sum();
            if cn < cost {
                let gain = cost - cn;
                x = xn;
                r = rn;
                cost = cn;
                mu = (mu * 0.3).max(1e-12);
                improved = gain > 1e-15 * cost.max(1e-300);
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Ok(HelicoidFit {
        centre: [x[0] * scale, x[1] * scale],
        kappa: x[2],
        phase: wrap_half_turn(x[3]),
        residual: rms(&r) / FRAC_PI_2,
        count: points.len(),
    })
}

fn solve4(mut m: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for c in 0..4 {
        let p = (c..4).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        b.swap(c, p);
        for r in c + 1..4 {
            let f = m[r][c] / m[c][c];
            for k in c..4 {
                m[r][k] -= f * m[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 4];
    for c in (0..4).rev() {
        let s: f64 = (c + 1..4).map(|k| m[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / m[c][c];
    }
    Some(x)
}

/// One row of the end-asymptotics table: fit over `R/2 < |z| ≤ R`.
#[derive(Debug, Clone)]
pub struct EndTrendRow {
    pub cutoff: f64,
    pub fit: std::result::Result<HelicoidFit, String>,
}

impl EndTrendRow {
    pub fn residual(&self) -> Option<f64> {
        self.fit.as_ref().ok().map(|f| f.residual)
    }
}

#[derive(Debug, Clone, Default)]
pub struct EndTrend {
    pub rows: Vec<EndTrendRow>,
}

/// Pitch magnitudes below this count as a degenerate fit.
pub const MIN_PITCH: f64 = 1e-6;

impl EndTrend {
    /// Residuals strictly decrease with the cutoff and every fit has a pitch.
    pub fn monotone_decreasing(&self) -> bool {
        let mut rows: Vec<&EndTrendRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.cutoff.total_cmp(&b.cutoff));
        let fits: Option<Vec<HelicoidFit>> = rows.iter().map(|r| r.fit.as_ref().ok().copied()).collect();
        match fits {
            Some(f) if f.len() >= 2 => {
                f.iter().all(|x| x.kappa.abs() > MIN_PITCH) && f.windows(2).all(|w| w[1].residual < w[0].residual)
            }
            _ => false,
        }
    }
}

/// Vertices of the outermost annulus `R/2 < |z| ≤ R`.
pub fn outer_annulus<T: Scalar>(mesh: &SurfaceMesh<T>, cutoff: f64) -> Vec<V3> {
    mesh.vertices
        .iter()
        .filter(|v| {
            let r = to_f64(v.z.norm());
            r > 0.5 * cutoff && r <= cutoff
        })
        .map(|v| [to_f64(v.position[0]), to_f64(v.position[1]), to_f64(v.position[2])])
        .collect()
}

/// Fits a helicoid to the outermost annulus of each mesh.
pub fn check_helicoidal_end<T: Scalar>(meshes: &[(f64, &SurfaceMesh<T>)]) -> EndTrend {
    let rows = meshes
        .par_iter()
        .map(|&(cutoff, mesh)| EndTrendRow {
            cutoff,
            fit: fit_helicoid(&outer_annulus(mesh, cutoff)).map_err(|e| e.to_string()),
        })
        .collect();
    EndTrend { rows }
}

/// Pass/fail thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub mean_curvature: f64,
    pub convergence_factor: f64,
    pub normal_degrees: f64,
    pub symmetry: f64,
    pub rhombic: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            mean_curvature: 1e-2,
            convergence_factor: 3.0,
            normal_degrees: 2.0,
            symmetry: 1e-4,
            rhombic: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `true` when the value must stay below the threshold, `false` when above.
    pub below: bool,
    pub passed: bool,
}

impl CheckResult {
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            below: true,
            passed: value < threshold,
        }
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            below: false,
            passed: value >= threshold,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub mean_curvature_max: Option<f64>,
    pub mean_curvature_median: Option<f64>,
    pub mean_curvature_values: Vec<Option<f64>>,
    pub degenerate_triangles: usize,
    pub normal_deviation_max: Option<f64>,
    /// Max interior mean curvature per resolution, when a refinement series ran.
    pub convergence: Vec<(usize, f64)>,
    pub symmetry_deviations: Vec<(String, f64)>,
    pub rhombic_deviation: Option<f64>,
    pub asymptote_trend: Option<EndTrend>,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Measures mean curvature and normals of one mesh and records the
    /// single-mesh checks.
    pub fn for_mesh<T: Scalar>(mesh: &SurfaceMesh<T>, thresholds: &Thresholds) -> Self {
        let view = MeshView::from_mesh(mesh);
        let mc = mean_curvature_of(&view);
        let normals = normal_deviation_of(&view);
        let mut report = Self {
            mean_curvature_max: Some(mc.max()),
            mean_curvature_median: Some(mc.median()),
            degenerate_triangles: mc.degenerate_triangles,
            normal_deviation_max: Some(max_defined(&normals)),
            ..Self::default()
        };
        report.checks.push(CheckResult::below("mean_curvature_max", mc.max(), thresholds.mean_curvature));
        report
            .checks
            .push(CheckResult::below("normal_deviation_deg", max_defined(&normals), thresholds.normal_degrees));
        report.mean_curvature_values = mc.values;
        report
    }

    /// Machine-readable `key = value` lines followed by a per-check summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "n/a".into());
        let _ = writeln!(s, "mean_curvature_max = {}", opt(self.mean_curvature_max));
        let _ = writeln!(s, "mean_curvature_median = {}", opt(self.mean_curvature_median));
        let _ = writeln!(s, "degenerate_triangles = {}", self.degenerate_triangles);
        let _ = writeln!(s, "normal_deviation_max_deg = {}", opt(self.normal_deviation_max));
        for (n, h) in &self.convergence {
            let _ = writeln!(s, "convergence_max_h_{n} = {h:.6e}");
        }
        for (name, d) in &self.symmetry_deviations {
            let _ = writeln!(s, "symmetry_{name} = {d:.6e}");
        }
        let _ = writeln!(s, "rhombic_deviation = {}", opt(self.rhombic_deviation));
        if let Some(trend) = &self.asymptote_trend {
            for row in &trend.rows {
                match &row.fit {
                    Ok(f) => {
                        let _ = writeln!(
                            s,
                            "end_fit_{} = residual {:.6e} kappa {:.6e} phase {:.6e} points {}",
                            row.cutoff, f.residual, f.kappa, f.phase, f.count
                        );
                    }
                    Err(e) => {
                        let _ = writeln!(s, "end_fit_{} = failed: {}", row.cutoff, e);
                    }
                }
            }
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "check {} = {} (value {:.6e} {} threshold {:.6e})",
                c.name,
                if c.passed { "pass" } else { "fail" },
                c.value,
                if c.below { "<" } else { ">=" },
                c.threshold
            );
        }
        let _ = writeln!(s, "overall = {}", if self.passed() { "pass" } else { "fail" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_stays_in_half_open_interval() {
        for k in -20..20 {
            let x = k as f64 * 0.7 + 0.01;
            let w = wrap_half_turn(x);
            assert!(w > -FRAC_PI_2 && w <= FRAC_PI_2);
            let turns = (x - w) / PI;
            assert!((turns - turns.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_turn_is_exact() {
        let m = RigidMotion::rotation_about_axis(2, FRAC_PI_2);
        assert_eq!(m.apply([1.0, 0.0, 3.0]), [0.0, 1.0, 3.0]);
        let h = RigidMotion::rotation_about_axis(1, PI);
        assert_eq!(h.apply([1.0, 2.0, 3.0]), [-1.0, 2.0, -3.0]);
    }

    #[test]
    fn exact_helix_fits_with_zero_residual() {
        let mut pts = Vec::new();
        for i in 0..40 {
            let t = i as f64 * 0.1 + 0.03 * (i as f64 * 1.7).sin();
            let r = 5.0 + i as f64;
            let ang = 1.3 * t + 0.4;
            pts.push([2.0 + r * ang.cos(), -1.0 + r * ang.sin(), t]);
            pts.push([2.0 - r * ang.cos(), -1.0 - r * ang.sin(), t]);
        }
        let fit = fit_helicoid(&pts).unwrap();
        assert!(fit.residual < 1e-8, "{fit:?}");
        assert!((fit.kappa - 1.3).abs() < 1e-6);
        assert!((fit.centre[0] - 2.0).abs() < 1e-5 && (fit.centre[1] + 1.0).abs() < 1e-5);
    }

    #[test]
    fn solve4_matches_known_system() {
        let m = [[4.0, 1.0, 0.0, 0.0], [1.0, 3.0, 1.0, 0.0], [0.0, 1.0, 2.0, 1.0], [0.0, 0.0, 1.0, 5.0]];
        let x = [1.0, -2.0, 0.5, 3.0];
        let b = [0, 1, 2, 3].map(|i| dot([m[i][0], m[i][1], m[i][2]], [x[0], x[1], x[2]]) + m[i][3] * x[3]);
        let s = solve4(m, b).unwrap();
        for k in 0..4 {
            assert!((s[k] - x[k]).abs() < 1e-12);
        }
    }
}
