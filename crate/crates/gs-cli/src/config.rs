//! Run configuration: strict JSON with unknown keys rejected and the
//! offending field path reported.

use anyhow::{anyhow, bail, Context};
use gs_core::analytic::BoundaryFamily;
use gs_core::grid::GridGeometry;
use gs_core::linsolve::LinSolveConfig;
use gs_core::solver::SolverConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Certify,
    Solve,
    Path,
    Sweep,
    Verify,
    Export,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Mode::Certify => "certify",
            Mode::Solve => "solve",
            Mode::Path => "path",
            Mode::Sweep => "sweep",
            Mode::Verify => "verify",
            Mode::Export => "export",
        };
        f.write_str(s)
    }
}

/// Boundary data: a named analytic family or a field file whose level-0
/// slice is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    File { file: PathBuf },
    Family(BoundaryFamily),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub u0: BoundarySpec,
    pub u1: BoundarySpec,
}

/// Source term: constant, analytic (manufactured), or a field file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    Constant { value: f64 },
    Manufactured(gs_core::analytic::Manufactured),
    File { path: PathBuf },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOverrides {
    pub newton_tol: Option<f64>,
    pub max_newton: Option<usize>,
    pub armijo_ratio: Option<f64>,
    pub armijo_slope: Option<f64>,
    pub margin_floor: Option<f64>,
    pub path_steps: Option<usize>,
    pub s_schedule: Option<Vec<f64>>,
    pub linear_rel_tol: Option<f64>,
    pub linear_restart: Option<usize>,
    pub linear_max_iters: Option<usize>,
}

impl SolverOverrides {
    pub fn build(&self) -> SolverConfig {
        let base = SolverConfig::default();
        let linear = LinSolveConfig {
            rel_tol: self.linear_rel_tol.unwrap_or(base.linear.rel_tol),
            restart: self.linear_restart.unwrap_or(base.linear.restart),
            max_iters: self.linear_max_iters.unwrap_or(base.linear.max_iters),
            ..base.linear
        };
        SolverConfig {
            newton_tol: self.newton_tol.unwrap_or(base.newton_tol),
            max_newton: self.max_newton.unwrap_or(base.max_newton),
            armijo_ratio: self.armijo_ratio.unwrap_or(base.armijo_ratio),
            armijo_slope: self.armijo_slope.unwrap_or(base.armijo_slope),
            margin_floor: self.margin_floor.unwrap_or(base.margin_floor),
            path_steps: self.path_steps.unwrap_or(base.path_steps),
            s_schedule: self
                .s_schedule
                .clone()
                .unwrap_or_else(|| base.s_schedule.clone()),
            linear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "N")]
    pub points_per_axis: usize,
    #[serde(rename = "Nt")]
    pub interior_levels: usize,
    #[serde(rename = "L", default = "default_box_len")]
    pub box_len: f64,
    #[serde(default = "default_lambda0")]
    pub lambda0: f64,
}

fn default_box_len() -> f64 {
    2.0 * std::f64::consts::PI
}

fn default_lambda0() -> f64 {
    0.5
}

impl GeometryConfig {
    pub fn build(&self) -> anyhow::Result<GridGeometry> {
        GridGeometry::new(
            self.n,
            self.k,
            self.points_per_axis,
            self.interior_levels,
            self.box_len,
            self.lambda0,
        )
        .map_err(|e| anyhow!("geometry: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// certify: dimension of the block algebra
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceConfig>,
    #[serde(default)]
    pub solver: SolverOverrides,
    /// verify: resolutions for the refinement study
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolutions: Option<Vec<usize>>,
    /// export: input field file
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<PathBuf>,
    /// export: time levels to slice (default: all)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice_levels: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

pub fn parse_config(text: &str) -> anyhow::Result<RunConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| anyhow!("config field `{}`: {}", e.path(), e.inner()))?;
    validate(&cfg)?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    parse_config(&text)
}

fn validate(cfg: &RunConfig) -> anyhow::Result<()> {
    match cfg.mode {
        Mode::Certify => {
            let n = cfg.n.ok_or_else(|| anyhow!("certify requires `n`"))?;
            let k = cfg.k.ok_or_else(|| anyhow!("certify requires `k`"))?;
            if cfg.samples.is_none() {
                bail!("certify requires `samples`");
            }
            check_nk(n, k)?;
        }
        Mode::Solve | Mode::Path | Mode::Sweep | Mode::Verify => {
            let g = cfg
                .geometry
                .as_ref()
                .ok_or_else(|| anyhow!("{} requires `geometry`", cfg.mode))?;
            check_nk(g.n, g.k)?;
            if g.points_per_axis == 0 || g.interior_levels == 0 {
                bail!("geometry resolutions must be positive");
            }
            if cfg.boundary.is_none() {
                bail!("{} requires `boundary`", cfg.mode);
            }
            if matches!(cfg.mode, Mode::Solve | Mode::Path | Mode::Verify) && cfg.source.is_none()
            {
                bail!("{} requires `source`", cfg.mode);
            }
        }
        Mode::Export => {
            if cfg.field.is_none() {
                bail!("export requires `field`");
            }
        }
    }
    Ok(())
}

fn check_nk(n: usize, k: usize) -> anyhow::Result<()> {
    if k < 1 {
        bail!("k must be at least 1");
    }
    if 2 * k > n {
        bail!("2k <= n violated (n = {n}, k = {k})");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_certify_config() {
        let cfg =
            parse_config(r#"{"mode":"certify","n":4,"k":2,"samples":1000,"seed":7}"#).unwrap();
        assert_eq!(cfg.mode, Mode::Certify);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn cone_constraint_enforced() {
        let err = parse_config(r#"{"mode":"certify","n":3,"k":2,"samples":10}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("2k <= n violated"), "{err}");
    }

    #[test]
    fn unknown_key_named() {
        let err = parse_config(r#"{"mode":"certify","n":4,"k":2,"samples":10,"bogus":1}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn solve_config_with_cosine_family() {
        let cfg = parse_config(
            r#"{
              "mode": "solve",
              "geometry": {"n": 2, "k": 1, "N": 16, "Nt": 15},
              "boundary": {
                "u0": {"family": "cosine", "amplitude": 0.05, "wave": [1, 0]},
                "u1": {"family": "cosine", "amplitude": -0.05, "wave": [0, 1]}
              },
              "source": {"kind": "constant", "value": 1.0}
            }"#,
        )
        .unwrap();
        let geom = cfg.geometry.unwrap().build().unwrap();
        assert_eq!(geom.points_per_axis, 16);
        assert!((geom.lambda0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn missing_required_fields() {
        assert!(parse_config(r#"{"mode":"solve"}"#).is_err());
        assert!(parse_config(r#"{"mode":"export"}"#).is_err());
    }
}
