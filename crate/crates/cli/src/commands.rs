//! The `solve`, `mesh` and `verify` subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use helicoid_core::reference::{reference_mesh, ReferenceKind};
use helicoid_core::solver::{choose_targets, search_targets, solve_full, IntegerTargets};
use helicoid_core::surface::build_mesh;
use helicoid_core::verify::{
    check_helicoidal_end, check_rhombic, check_symmetry, discrete_mean_curvature, CheckResult, RigidMotion,
    Thresholds, VerificationReport,
};
use helicoid_core::{Curve, SolverConfig, SurfaceMesh};

use crate::meshio::{obj_text, ply_bytes, read_mesh, write_atomic, Format};
use crate::record::{SolutionRecord, VERSION};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Internal = 1,
    Failed = 2,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.2, 0.45])]
    pub bracket: Vec<f64>,
    /// Integer period targets; searched when omitted.
    #[arg(long, num_args = 2, value_names = ["NA", "NB"], allow_hyphen_values = true)]
    pub targets: Option<Vec<i32>>,
    #[arg(long, short, default_value = "solution.txt")]
    pub out: PathBuf,
    /// Largest |n| tried when searching targets.
    #[arg(long, default_value_t = 4)]
    pub search_max: i32,
    #[arg(long)]
    pub tol_quad_rel: Option<f64>,
    #[arg(long)]
    pub tol_quad_abs: Option<f64>,
    #[arg(long)]
    pub tol_period: Option<f64>,
    #[arg(long)]
    pub tol_lambda: Option<f64>,
    #[arg(long)]
    pub tol_defect: Option<f64>,
}

impl SolveArgs {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(v) = self.tol_quad_rel {
            cfg.quad.rel = v;
        }
        if let Some(v) = self.tol_quad_abs {
            cfg.quad.abs = v;
        }
        if let Some(v) = self.tol_period {
            cfg.period_tol = v;
        }
        if let Some(v) = self.tol_lambda {
            cfg.lambda_tol = v;
        }
        if let Some(v) = self.tol_defect {
            cfg.defect_tol = v;
        }
        cfg
    }
}

pub fn solve(args: &SolveArgs) -> Result<Status> {
    let cfg = args.config();
    let bracket = (args.bracket[0], args.bracket[1]);
    let targets = match &args.targets {
        Some(t) => IntegerTargets::new(t[0], t[1]),
        None => {
            let cands = search_targets(bracket, args.search_max, &cfg);
            match choose_targets(&cands, cfg.preferred_lambda) {
                Some((t, _)) => t,
                None => {
                    eprintln!(
                        "error: no integer targets with |n| <= {} admit a root in ({}, {})",
                        args.search_max, bracket.0, bracket.1
                    );
                    return Ok(Status::Failed);
                }
            }
        }
    };
    let sol = match solve_full(targets, bracket, &cfg) {
        Ok(s) => s,
        Err(e) if e.is_no_root() => {
            eprintln!("error: {e}");
            return Ok(Status::Failed);
        }
        Err(e) => return Err(e.into()),
    };
    let stamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let record = SolutionRecord::from_solution(&sol, bracket, &cfg, stamp);
    write_atomic(&args.out, record.to_text().as_bytes())?;
    eprintln!(
        "lambda = {:.16} targets = ({}, {}) defect = {:.3e}",
        record.params.lambda, targets.n_a, targets.n_b, record.defect
    );
    Ok(if record.defect < 1e-8 { Status::Success } else { Status::Internal })
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Obj,
    Ply,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ReferenceArg {
    Helicoid,
    Catenoid,
}

impl From<ReferenceArg> for ReferenceKind {
    fn from(r: ReferenceArg) -> Self {
        match r {
            ReferenceArg::Helicoid => ReferenceKind::Helicoid,
            ReferenceArg::Catenoid => ReferenceKind::Catenoid,
        }
    }
}

#[derive(Args, Debug)]
pub struct MeshArgs {
    /// Solution record from `solve`.
    #[arg(long, required_unless_present = "reference")]
    pub solution: Option<PathBuf>,
    /// Emit a closed-form reference surface instead of a solved one.
    #[arg(long, value_enum, conflicts_with = "solution")]
    pub reference: Option<ReferenceArg>,
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    #[arg(long, default_value_t = 50.0)]
    pub end_cutoff: f64,
    /// Defaults to the extension of `--out`, then OBJ.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Multiplies exported positions; normals and flat coordinates are unchanged.
    #[arg(long, default_value_t = 1.0)]
    pub display_scale: f64,
    #[arg(long, short)]
    pub out: PathBuf,
}

pub fn read_record(path: &Path) -> Result<SolutionRecord> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SolutionRecord::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn mesh(args: &MeshArgs) -> Result<Status> {
    let mut header = vec![format!("helicoid {VERSION}")];
    let mesh = if let Some(kind) = args.reference {
        let kind = ReferenceKind::from(kind);
        header.push(format!("reference = {}", kind.name()));
        header.push(format!("resolution = {}", args.resolution));
        reference_mesh::<f64>(kind, args.resolution)?
    } else {
        let path = args.solution.as_ref().ok_or_else(|| anyhow!("--solution is required"))?;
        let rec = read_record(path)?;
        header.push(format!("solution = {}", path.display()));
        for line in rec.to_text().lines() {
            header.push(line.to_string());
        }
        header.push(format!("resolution = {}", args.resolution));
        header.push(format!("end_cutoff = {:.16e}", args.end_cutoff));
        build_mesh(&rec.params, args.resolution, args.end_cutoff)?
    };
    header.push(format!("display_scale = {:.16e}", args.display_scale));
    let format = match args.format {
        Some(FormatArg::Obj) => Format::Obj,
        Some(FormatArg::Ply) => Format::Ply,
        None => Format::from_path(&args.out).unwrap_or(Format::Obj),
    };
    let bytes = match format {
        Format::Obj => obj_text(&mesh, &header, args.display_scale).into_bytes(),
        Format::Ply => ply_bytes(&mesh, &header, args.display_scale)?,
    };
    write_atomic(&args.out, &bytes)?;
    eprintln!("{} vertices, {} triangles", mesh.vertices.len(), mesh.triangles.len());
    Ok(Status::Success)
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub mesh: PathBuf,
    /// Enables the symmetry, rhombic, convergence and end checks.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    #[arg(long, short)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub tol_mean_curvature: Option<f64>,
    #[arg(long)]
    pub tol_convergence_factor: Option<f64>,
    #[arg(long)]
    pub tol_normal_degrees: Option<f64>,
    #[arg(long)]
    pub tol_symmetry: Option<f64>,
    #[arg(long)]
    pub tol_rhombic: Option<f64>,
    /// Resolutions of the refinement series run with `--solution`.
    #[arg(long, num_args = 1.., default_values_t = [32, 64, 128])]
    pub series: Vec<usize>,
    /// Truncation radii of the end-trend meshes.
    #[arg(long, num_args = 1.., default_values_t = [10.0, 25.0, 50.0])]
    pub end_cutoffs: Vec<f64>,
    #[arg(long, default_value_t = 128)]
    pub end_resolution: usize,
    /// Cutoff of the refinement series meshes.
    #[arg(long, default_value_t = 50.0)]
    pub series_cutoff: f64,
}

impl VerifyArgs {
    fn thresholds(&self) -> Thresholds {
        let d = Thresholds::default();
        Thresholds {
            mean_curvature: self.tol_mean_curvature.unwrap_or(d.mean_curvature),
            convergence_factor: self.tol_convergence_factor.unwrap_or(d.convergence_factor),
            normal_degrees: self.tol_normal_degrees.unwrap_or(d.normal_degrees),
            symmetry: self.tol_symmetry.unwrap_or(d.symmetry),
            rhombic: self.tol_rhombic.unwrap_or(d.rhombic),
        }
    }
}

/// Refinement checks: the max must drop by `factor` at each doubling.
pub fn convergence_checks(series: &[(usize, f64)], factor: f64) -> Vec<CheckResult> {
    series
        .windows(2)
        .map(|w| {
            let ratio = w[0].1 / w[1].1;
            CheckResult::above(format!("convergence_{}_{}", w[0].0, w[1].0), ratio, factor)
        })
        .collect()
}

pub fn verify(args: &VerifyArgs) -> Result<Status> {
    let thr = args.thresholds();
    let mesh = read_mesh(&args.mesh)?;
    let mut report = VerificationReport::for_mesh(&mesh, &thr);
    if let Some(path) = &args.solution {
        let rec = read_record(path)?;
        solution_checks(&mut report, &mesh, &rec, args, &thr)?;
    }
    let mut text = String::new();
    let _ = writeln!(text, "tool = helicoid");
    let _ = writeln!(text, "version = {VERSION}");
    let _ = writeln!(text, "mesh = {}", args.mesh.display());
    if let Some(p) = &args.solution {
        let _ = writeln!(text, "solution = {}", p.display());
    }
    let _ = writeln!(text, "vertices = {}", mesh.vertices.len());
    let _ = writeln!(text, "triangles = {}", mesh.triangles.len());
    let _ = writeln!(text, "threshold.mean_curvature = {:e}", thr.mean_curvature);
    let _ = writeln!(text, "threshold.convergence_factor = {:e}", thr.convergence_factor);
    let _ = writeln!(text, "threshold.normal_degrees = {:e}", thr.normal_degrees);
    let _ = writeln!(text, "threshold.symmetry = {:e}", thr.symmetry);
    let _ = writeln!(text, "threshold.rhombic = {:e}", thr.rhombic);
    text.push_str(&report.to_text());
    match &args.report {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(if report.passed() { Status::Success } else { Status::Failed })
}

fn solution_checks(
    report: &mut VerificationReport,
    mesh: &SurfaceMesh,
    rec: &SolutionRecord,
    args: &VerifyArgs,
    thr: &Thresholds,
) -> Result<()> {
    if mesh.vertices.is_empty() {
        bail!("mesh has no vertices");
    }
    for (name, axis) in [("x2_half_turn", 1), ("x3_half_turn", 2)] {
        let d = check_symmetry(mesh, &RigidMotion::rotation_about_axis(axis, std::f64::consts::PI));
        report.symmetry_deviations.push((name.into(), d));
        report.checks.push(CheckResult::below(format!("symmetry_{name}"), d, thr.symmetry));
    }
    let control = check_symmetry(mesh, &RigidMotion::rotation_about_axis(2, std::f64::consts::FRAC_PI_2));
    report.symmetry_deviations.push(("x3_quarter_turn".into(), control));
    report.checks.push(CheckResult::above("symmetry_control_x3_quarter_turn", control, thr.symmetry));

    let curve = Curve::new(rec.params.lambda)?;
    let r = check_rhombic(&curve);
    report.rhombic_deviation = Some(r);
    report.checks.push(CheckResult::below("rhombic", r, thr.rhombic));

    let mut series = Vec::new();
    for &n in &args.series {
        let m = build_mesh(&rec.params, n, args.series_cutoff)?;
        series.push((n, discrete_mean_curvature(&m).max()));
    }
    report.checks.extend(convergence_checks(&series, thr.convergence_factor));
    report.convergence = series;

    let meshes: Vec<(f64, SurfaceMesh)> = args
        .end_cutoffs
        .iter()
        .map(|&c| build_mesh(&rec.params, args.end_resolution, c).map(|m| (c, m)))
        .collect::<helicoid_core::Result<_>>()?;
    let refs: Vec<(f64, &SurfaceMesh)> = meshes.iter().map(|(c, m)| (*c, m)).collect();
    let trend = check_helicoidal_end(&refs);
    report.checks.push(CheckResult::above(
        "end_trend_monotone",
        if trend.monotone_decreasing() { 1.0 } else { 0.0 },
        1.0,
    ));
    report.asymptote_trend = Some(trend);
    Ok(())
}
