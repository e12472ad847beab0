//! OBJ and binary PLY export and import.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use helicoid_core::surface::{normal_from_log_gauss, VertexTag};
use helicoid_core::{Complex, SurfaceMesh, SurfacePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Obj,
    Ply,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "obj" => Some(Format::Obj),
            "ply" => Some(Format::Ply),
            _ => None,
        }
    }
}

/// Writes `bytes` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    {
        let mut f = fs::File::create(tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// OBJ text: header comments, then `v`, `vn`, `vt` (flat coordinate) and
/// 1-based `f` lines, coordinates with 17 significant digits.
pub fn obj_text(mesh: &SurfaceMesh, header: &[String], scale: f64) -> String {
    let mut s = String::new();
    for h in header {
        s.push_str(&format!("# {h}\n"));
    }
    s.push_str(&format!("# vertices = {}\n# triangles = {}\n", mesh.vertices.len(), mesh.triangles.len()));
    for v in &mesh.vertices {
        let p = v.position;
        s.push_str(&format!("v {:.16e} {:.16e} {:.16e}\n", p[0] * scale, p[1] * scale, p[2] * scale));
    }
    for v in &mesh.vertices {
        let n = v.normal;
        s.push_str(&format!("vn {:.16e} {:.16e} {:.16e}\n", n[0], n[1], n[2]));
    }
    for v in &mesh.vertices {
        s.push_str(&format!("vt {:.16e} {:.16e}\n", v.flat_coord.re, v.flat_coord.im));
    }
    for t in &mesh.triangles {
        s.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    s
}

/// Binary little-endian PLY with `float x y z nx ny nz u v` per vertex.
///
/// Fails when a value does not fit a finite `f32`, which happens for
/// positions far out on the end.
pub fn ply_bytes(mesh: &SurfaceMesh, header: &[String], scale: f64) -> Result<Vec<u8>> {
    let mut head = String::from("ply\nformat binary_little_endian 1.0\n");
    for h in header {
        head.push_str(&format!("comment {h}\n"));
    }
    head.push_str(&format!("element vertex {}\n", mesh.vertices.len()));
    for p in ["x", "y", "z", "nx", "ny", "nz", "u", "v"] {
        head.push_str(&format!("property float {p}\n"));
    }
    head.push_str(&format!("element face {}\n", mesh.triangles.len()));
    head.push_str("property list uchar int vertex_indices\nend_header\n");
    let mut out = head.into_bytes();
    for (k, v) in mesh.vertices.iter().enumerate() {
        let p = v.position;
        let values = [
            p[0] * scale,
            p[1] * scale,
            p[2] * scale,
            v.normal[0],
            v.normal[1],
            v.normal[2],
            v.flat_coord.re,
            v.flat_coord.im,
        ];
        for x in values {
            let f = x as f32;
            if !f.is_finite() {
                bail!("vertex {k}: value {x:e} does not fit a 32-bit float; lower --end-cutoff or use OBJ");
            }
            out.extend_from_slice(&f.to_le_bytes());
        }
    }
    for t in &mesh.triangles {
        out.push(3);
        for &i in t {
            let i = i32::try_from(i).map_err(|_| anyhow!("vertex index {i} exceeds the PLY int range"))?;
            out.extend_from_slice(&i.to_le_bytes());
        }
    }
    Ok(out)
}

fn point(position: [f64; 3], normal: [f64; 3], flat: Complex) -> SurfacePoint {
    let g = Complex::new(normal[0], normal[1]).unscale(1.0 - normal[2]);
    let log_gauss = g.ln();
    let normal = if normal.iter().all(|x| *x == 0.0) {
        normal_from_log_gauss(log_gauss)
    } else {
        normal
    };
    SurfacePoint {
        position,
        normal,
        flat_coord: flat,
        log_gauss,
        z: Complex::new(0.0, 0.0),
    }
}

fn assemble(vertices: Vec<SurfacePoint>, triangles: Vec<[usize; 3]>) -> Result<SurfaceMesh> {
    let n = vertices.len();
    let mesh = SurfaceMesh {
        grid: (0..n).map(|k| (k, 0)).collect(),
        tags: vec![VertexTag::Interior; n],
        vertices,
        triangles,
        resolution: 0,
    };
    mesh.validate().map_err(|e| anyhow!("{e}"))?;
    Ok(mesh)
}

/// Reads `v`, `vn`, `vt` and triangular `f` records; other lines are ignored.
pub fn parse_obj(text: &str) -> Result<SurfaceMesh> {
    let mut pos = Vec::new();
    let mut nor = Vec::new();
    let mut tex = Vec::new();
    let mut tris = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let tag = it.next();
        let nums = |it: std::str::SplitWhitespace| -> Result<Vec<f64>> {
            it.map(|t| t.parse::<f64>().map_err(|_| anyhow!("line {}: bad number `{t}`", n + 1)))
                .collect()
        };
        match tag {
            Some("v") => {
                let v = nums(it)?;
                if v.len() < 3 {
                    bail!("line {}: vertex needs three coordinates", n + 1);
                }
                pos.push([v[0], v[1], v[2]]);
            }
            Some("vn") => {
                let v = nums(it)?;
                if v.len() < 3 {
                    bail!("line {}: normal needs three components", n + 1);
                }
                nor.push([v[0], v[1], v[2]]);
            }
            Some("vt") => {
                let v = nums(it)?;
                tex.push(Complex::new(v.first().copied().unwrap_or(0.0), v.get(1).copied().unwrap_or(0.0)));
            }
            Some("f") => {
                let idx: Result<Vec<usize>> = it
                    .map(|t| {
                        let first = t.split('/').next().unwrap_or("");
                        let i: i64 = first.parse().map_err(|_| anyhow!("line {}: bad index `{t}`", n + 1))?;
                        if i < 1 {
                            bail!("line {}: only positive indices are supported", n + 1);
                        }
                        Ok(i as usize - 1)
                    })
                    .collect();
                let idx = idx?;
                if idx.len() < 3 {
                    bail!("line {}: face needs three vertices", n + 1);
                }
                for k in 1..idx.len() - 1 {
                    tris.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    let vertices = pos
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            point(
                p,
                nor.get(k).copied().unwrap_or([0.0; 3]),
                tex.get(k).copied().unwrap_or_default(),
            )
        })
        .collect();
    assemble(vertices, tris)
}

/// Reads the binary PLY layout written by [`ply_bytes`].
pub fn parse_ply(bytes: &[u8]) -> Result<SurfaceMesh> {
    const END: &[u8] = b"end_header\n";
    let end = bytes
        .windows(END.len())
        .position(|w| w == END)
        .ok_or_else(|| anyhow!("PLY header not terminated"))?
        + END.len();
    let header = std::str::from_utf8(&bytes[..end]).context("PLY header is not UTF-8")?;
    let mut lines = header.lines();
    if lines.next() != Some("ply") {
        bail!("not a PLY file");
    }
    let mut nv = None;
    let mut nf = None;
    let mut props = Vec::new();
    let mut in_vertex = false;
    for l in lines {
        let w: Vec<&str> = l.split_whitespace().collect();
        match w.as_slice() {
            ["format", f, _] if *f != "binary_little_endian" => bail!("unsupported PLY format {f}"),
            ["element", "vertex", n] => {
                nv = Some(n.parse::<usize>()?);
                in_vertex = true;
            }
            ["element", "face", n] => {
                nf = Some(n.parse::<usize>()?);
                in_vertex = false;
            }
            ["property", "float", name] if in_vertex => props.push(name.to_string()),
            ["property", t, ..] if in_vertex => bail!("unsupported vertex property type {t}"),
            _ => {}
        }
    }
    let (nv, nf) = (nv.ok_or_else(|| anyhow!("no vertex element"))?, nf.unwrap_or(0));
    let at = |name: &str| props.iter().position(|p| p == name);
    let (ix, iy, iz) = (
        at("x").ok_or_else(|| anyhow!("no x"))?,
        at("y").ok_or_else(|| anyhow!("no y"))?,
        at("z").ok_or_else(|| anyhow!("no z"))?,
    );
    let stride = props.len() * 4;
    let mut body = &bytes[end..];
    if body.len() < nv * stride {
        bail!("PLY vertex data truncated");
    }
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let f = |k: usize| f32::from_le_bytes(body[4 * k..4 * k + 4].try_into().unwrap()) as f64;
        let g = |name: &str| at(name).map(f).unwrap_or(0.0);
        vertices.push(point(
            [f(ix), f(iy), f(iz)],
            [g("nx"), g("ny"), g("nz")],
            Complex::new(g("u"), g("v")),
        ));
        body = &body[stride..];
    }
    let mut tris = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (&count, rest) = body.split_first().ok_or_else(|| anyhow!("PLY face data truncated"))?;
        let count = count as usize;
        if rest.len() < 4 * count {
            bail!("PLY face data truncated");
        }
        let idx: Vec<usize> = (0..count)
            .map(|k| i32::from_le_bytes(rest[4 * k..4 * k + 4].try_into().unwrap()) as usize)
            .collect();
        for k in 1..count.saturating_sub(1) {
            tris.push([idx[0], idx[k], idx[k + 1]]);
        }
        body = &rest[4 * count..];
    }
    assemble(vertices, tris)
}

pub fn read_mesh(path: &Path) -> Result<SurfaceMesh> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let format = if bytes.starts_with(b"ply\n") { Format::Ply } else { Format::Obj };
    match format {
        Format::Ply => parse_ply(&bytes),
        Format::Obj => parse_obj(std::str::from_utf8(&bytes).context("OBJ file is not UTF-8")?),
    }
    .with_context(|| format!("parsing {}", path.display()))
}
