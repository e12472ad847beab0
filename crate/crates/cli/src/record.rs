//! Flat `key = value` solution record.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use helicoid_core::solver::IntegerTargets;
use helicoid_core::{Complex, Params, Solution, SolverConfig};

pub const TOOL: &str = "helicoid";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to regenerate a surface from a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub version: String,
    pub timestamp: String,
    pub params: Params,
    pub targets: IntegerTargets,
    pub bracket: (f64, f64),
    pub tolerances: Vec<(String, f64)>,
    pub residual: f64,
    pub defect: f64,
    pub defects: Vec<(String, f64)>,
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

impl SolutionRecord {
    pub fn from_solution(sol: &Solution, bracket: (f64, f64), cfg: &SolverConfig, timestamp: String) -> Self {
        Self {
            version: VERSION.to_string(),
            timestamp,
            params: sol.params,
            targets: sol.targets,
            bracket,
            tolerances: tolerances(cfg),
            residual: sol.residual,
            defect: sol.report.defect,
            defects: sol.report.conditions.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("tool", TOOL.into());
        kv("version", self.version.clone());
        kv("timestamp", self.timestamp.clone());
        kv("lambda", float(self.params.lambda));
        kv("a", float(self.params.a));
        kv("alpha", float(self.params.alpha));
        kv("beta", float(self.params.beta));
        kv("rho_re", float(self.params.rho.re));
        kv("rho_im", float(self.params.rho.im));
        kv("n_a", self.targets.n_a.to_string());
        kv("n_b", self.targets.n_b.to_string());
        kv("bracket_lo", float(self.bracket.0));
        kv("bracket_hi", float(self.bracket.1));
        for (k, v) in &self.tolerances {
            kv(&format!("tol.{k}"), float(*v));
        }
        kv("residual", float(self.residual));
        kv("defect", float(self.defect));
        for (k, v) in &self.defects {
            kv(&format!("defect.{k}"), float(*v));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut tolerances = Vec::new();
        let mut defects = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            let (k, v) = (k.trim(), v.trim());
            if let Some(name) = k.strip_prefix("tol.") {
                tolerances.push((name.to_string(), parse_f64(k, v)?));
            } else if let Some(name) = k.strip_prefix("defect.") {
                defects.push((name.to_string(), parse_f64(k, v)?));
            } else {
                map.insert(k.to_string(), v.to_string());
            }
        }
        let get = |k: &str| map.get(k).ok_or_else(|| anyhow!("missing key `{k}`"));
        let num = |k: &str| get(k).and_then(|v| parse_f64(k, v));
        let int = |k: &str| get(k).and_then(|v| v.parse::<i32>().with_context(|| format!("bad integer for `{k}`")));
        if get("tool")? != TOOL {
            bail!("not a {TOOL} solution record");
        }
        let params = Params {
            lambda: num("lambda")?,
            a: num("a")?,
            alpha: num("alpha")?,
            beta: num("beta")?,
            rho: Complex::new(num("rho_re")?, num("rho_im")?),
        };
        params.validate().context("record parameters")?;
        Ok(Self {
            version: get("version")?.clone(),
            timestamp: get("timestamp")?.clone(),
            params,
            targets: IntegerTargets::new(int("n_a")?, int("n_b")?),
            bracket: (num("bracket_lo")?, num("bracket_hi")?),
            tolerances,
            residual: num("residual")?,
            defect: num("defect")?,
            defects,
        })
    }

    /// Text with the timestamp line removed, for determinism comparisons.
    pub fn without_timestamp(text: &str) -> String {
        text.lines()
            .filter(|l| !l.starts_with("timestamp"))
            .map(|l| format!("{l}\n"))
            .collect()
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().with_context(|| format!("bad number for `{key}`: {v}"))
}

pub fn tolerances(cfg: &SolverConfig) -> Vec<(String, f64)> {
    vec![
        ("quad_rel".into(), cfg.quad.rel),
        ("quad_abs".into(), cfg.quad.abs),
        ("period".into(), cfg.period_tol),
        ("lambda".into(), cfg.lambda_tol),
        ("defect".into(), cfg.defect_tol),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SolutionRecord {
        SolutionRecord {
            version: VERSION.into(),
            timestamp: "2026-01-01T00:00:00Z".into(),
            params: Params::new(0.3089316807570078, 0.5906442408046434, -0.3094960242448266, 0.5054807796206457)
                .unwrap(),
            targets: IntegerTargets::new(0, -4),
            bracket: (0.2, 0.45),
            tolerances: tolerances(&SolverConfig::default()),
            residual: -1.25e-15,
            defect: 4.9e-14,
            defects: vec![("residue_plus".into(), 1.0 / 3.0)],
        }
    }

    #[test]
    fn text_round_trip_is_lossless() {
        let r = sample();
        let back = SolutionRecord::parse(&r.to_text()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_text(), r.to_text());
    }

    #[test]
    fn missing_key_is_reported() {
        let text = sample().to_text().replace("alpha =", "alpha_x =");
        let err = SolutionRecord::parse(&text).unwrap_err();
        assert!(err.to_string().contains("alpha"));
    }
}
