//! Mode drivers: each writes its reports and artifacts into the output
//! directory and returns a process exit code. Volatile data (timestamps,
//! wall times) goes to a separate metadata file so that identical
//! config + seed reproduce byte-identical reports.

use crate::config::{BoundaryConfig, BoundarySpec, Mode, RunConfig, SourceConfig};
use anyhow::{anyhow, bail, Context};
use gs_core::campaign::certify_run;
use gs_core::estimates::{bound_report, refinement_csv, refinement_study, verify_e_cone};
use gs_core::grid::{GridGeometry, SpaceTimeField};
use gs_core::io::{read_field, write_field, write_slice_csv};
use gs_core::problem::{ProblemSpec, SourceSpec};
use gs_core::solver::{
    continuity_solve, degenerate_sweep, newton_solve, subsolution_constant,
};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NONCONVERGED: i32 = 2;
pub const EXIT_CERT_FAIL: i32 = 3;

pub struct RunOptions {
    pub out_dir: PathBuf,
    pub verbose: bool,
    pub threads: usize,
}

fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn resolve_boundary(
    spec: &BoundarySpec,
    geom: &GridGeometry,
    name: &str,
) -> anyhow::Result<Vec<f64>> {
    match spec {
        BoundarySpec::Family(fam) => Ok(fam.sample(geom)),
        BoundarySpec::File { file } => {
            let field = read_field(file)
                .map_err(|e| anyhow!("boundary {name} file {}: {e}", file.display()))?;
            if field.geom.n != geom.n || field.geom.points_per_axis != geom.points_per_axis {
                bail!(
                    "boundary {name} file grid ({}, N={}) does not match run geometry ({}, N={})",
                    field.geom.n,
                    field.geom.points_per_axis,
                    geom.n,
                    geom.points_per_axis
                );
            }
            Ok(field.level_slice(0).to_vec())
        }
    }
}

fn resolve_source(spec: &SourceConfig, geom: GridGeometry) -> anyhow::Result<SpaceTimeField> {
    match spec {
        SourceConfig::Constant { value } => Ok(SpaceTimeField::constant(geom, *value)),
        SourceConfig::Manufactured(m) => m
            .source_field(geom)
            .map_err(|e| anyhow!("manufactured source: {e}")),
        SourceConfig::File { path } => {
            let f = read_field(path).map_err(|e| anyhow!("source file: {e}"))?;
            if f.geom != geom {
                bail!("source field geometry does not match the run geometry");
            }
            Ok(f)
        }
    }
}

fn boundaries(
    cfg_boundary: &BoundaryConfig,
    source: &SourceConfig,
    geom: &GridGeometry,
) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
    // the manufactured source fixes its own boundary data
    if let SourceConfig::Manufactured(m) = source {
        return Ok((m.boundary0(geom), m.boundary1(geom)));
    }
    Ok((
        resolve_boundary(&cfg_boundary.u0, geom, "u0")?,
        resolve_boundary(&cfg_boundary.u1, geom, "u1")?,
    ))
}

pub fn run(cfg: &RunConfig, opts: &RunOptions) -> anyhow::Result<i32> {
    let started = Instant::now();
    std::fs::create_dir_all(&opts.out_dir)
        .with_context(|| format!("creating {}", opts.out_dir.display()))?;

    // resolved config (defaults filled) goes next to the outputs
    #[derive(Serialize)]
    struct Resolved<'a> {
        config: &'a RunConfig,
        solver_resolved: gs_core::solver::SolverConfig,
    }
    write_json(
        &opts.out_dir.join("resolved_config.json"),
        &Resolved {
            config: cfg,
            solver_resolved: cfg.solver.build(),
        },
    )?;

    let mut progress_sink = |msg: String| eprintln!("[gs] {msg}");
    let progress: Option<&mut (dyn FnMut(String) + '_)> = if opts.verbose {
        Some(&mut progress_sink)
    } else {
        None
    };

    let code = match cfg.mode {
        Mode::Certify => {
            let n = cfg.n.unwrap();
            let k = cfg.k.unwrap();
            let samples = cfg.samples.unwrap();
            let report = certify_run(n, k, samples, cfg.seed);
            write_json(&opts.out_dir.join("cert_report.json"), &report)?;
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_CERT_FAIL
            }
        }
        Mode::Solve => {
            let geom = cfg.geometry.as_ref().unwrap().build()?;
            let source = cfg.source.as_ref().unwrap();
            let f = resolve_source(source, geom)?;
            let (u0, u1) = boundaries(cfg.boundary.as_ref().unwrap(), source, &geom)?;
            let f_max = (1..=geom.interior_levels)
                .flat_map(|l| f.level_slice(l).to_vec())
                .fold(0.0_f64, f64::max);
            let (a, w) = subsolution_constant(geom, &u0, &u1, f_max)?;
            let solver_cfg = cfg.solver.build();
            let (state, report) = newton_solve(&w, &f, &solver_cfg, progress)?;
            #[derive(Serialize)]
            struct SolveOut<'a> {
                subsolution_a: f64,
                report: &'a gs_core::solver::SolveReport,
            }
            write_json(
                &opts.out_dir.join("solve_report.json"),
                &SolveOut {
                    subsolution_a: a,
                    report: &report,
                },
            )?;
            write_field(&opts.out_dir.join("u.gsfield"), &state.u)?;
            if report.converged {
                EXIT_OK
            } else {
                EXIT_NONCONVERGED
            }
        }
        Mode::Path => {
            let geom = cfg.geometry.as_ref().unwrap().build()?;
            let source = cfg.source.as_ref().unwrap();
            let f = resolve_source(source, geom)?;
            let (u0, u1) = boundaries(cfg.boundary.as_ref().unwrap(), source, &geom)?;
            let solver_cfg = cfg.solver.build();
            let (state, path) =
                continuity_solve(&u0, &u1, &f, &solver_cfg, progress)?;
            write_json(&opts.out_dir.join("path_report.json"), &path)?;
            write_field(&opts.out_dir.join("u.gsfield"), &state.u)?;
            if path.converged {
                EXIT_OK
            } else {
                EXIT_NONCONVERGED
            }
        }
        Mode::Sweep => {
            let geom = cfg.geometry.as_ref().unwrap().build()?;
            let boundary = cfg.boundary.as_ref().unwrap();
            let u0 = resolve_boundary(&boundary.u0, &geom, "u0")?;
            let u1 = resolve_boundary(&boundary.u1, &geom, "u1")?;
            let solver_cfg = cfg.solver.build();
            let (state, sweep) =
                degenerate_sweep(&u0, &u1, geom, &solver_cfg, progress)?;
            write_json(&opts.out_dir.join("sweep_report.json"), &sweep)?;
            write_field(&opts.out_dir.join("u.gsfield"), &state.u)?;
            if sweep.converged {
                EXIT_OK
            } else {
                EXIT_NONCONVERGED
            }
        }
        Mode::Verify => {
            let geom = cfg.geometry.as_ref().unwrap().build()?;
            let source = cfg.source.as_ref().unwrap();
            let f = resolve_source(source, geom)?;
            let (u0, u1) = boundaries(cfg.boundary.as_ref().unwrap(), source, &geom)?;
            let solver_cfg = cfg.solver.build();
            let (state, path) =
                continuity_solve(&u0, &u1, &f, &solver_cfg, progress)?;
            if !path.converged {
                write_json(&opts.out_dir.join("path_report.json"), &path)?;
                return Ok(EXIT_NONCONVERGED);
            }
            let report = bound_report(&state, path.subsolution_a);
            let e_scan = verify_e_cone(&state)?;
            #[derive(Serialize)]
            struct VerifyOut {
                subsolution_a: f64,
                bounds: gs_core::estimates::BoundReport,
                e_cone: gs_core::estimates::EConeScan,
                passed: bool,
            }
            let tol = -1e-9;
            let passed = report.c0_low_slack >= tol
                && report.c0_high_slack >= tol
                && report.ut_low_slack >= tol
                && report.ut_high_slack >= tol
                && report.min_utt >= tol
                && e_scan.min_margin >= tol;
            write_json(
                &opts.out_dir.join("bound_report.json"),
                &VerifyOut {
                    subsolution_a: path.subsolution_a,
                    bounds: report,
                    e_cone: e_scan,
                    passed,
                },
            )?;
            if let Some(resolutions) = &cfg.resolutions {
                let problem = verify_problem(cfg)?;
                let rows = refinement_study(&problem, resolutions, &solver_cfg)?;
                std::fs::write(opts.out_dir.join("refinement.csv"), refinement_csv(&rows))?;
            }
            if passed {
                EXIT_OK
            } else {
                EXIT_CERT_FAIL
            }
        }
        Mode::Export => {
            let field = read_field(cfg.field.as_ref().unwrap())
                .map_err(|e| anyhow!("export field: {e}"))?;
            let levels: Vec<usize> = match &cfg.slice_levels {
                Some(ls) => ls.clone(),
                None => (0..field.geom.levels()).collect(),
            };
            for level in levels {
                let path = opts.out_dir.join(format!("slice_{level:04}.csv"));
                let mut buf = Vec::new();
                write_slice_csv(&mut buf, &field, level)
                    .map_err(|e| anyhow!("slice {level}: {e}"))?;
                std::fs::write(&path, buf)?;
            }
            EXIT_OK
        }
    };

    // volatile run data lives apart from the deterministic reports
    #[derive(Serialize)]
    struct RunMetadata {
        wall_time_s: f64,
        threads: usize,
        exit_code: i32,
    }
    write_json(
        &opts.out_dir.join("run_metadata.json"),
        &RunMetadata {
            wall_time_s: started.elapsed().as_secs_f64(),
            threads: opts.threads,
            exit_code: code,
        },
    )?;
    Ok(code)
}

/// The refinement study re-solves at several resolutions, so it needs a
/// resolution-independent problem: analytic boundaries and a constant or
/// manufactured source.
fn verify_problem(cfg: &RunConfig) -> anyhow::Result<ProblemSpec> {
    let g = cfg.geometry.as_ref().unwrap();
    let boundary = cfg.boundary.as_ref().unwrap();
    let source = match cfg.source.as_ref().unwrap() {
        SourceConfig::Constant { value } => SourceSpec::Constant { value: *value },
        SourceConfig::Manufactured(m) => SourceSpec::Manufactured(m.clone()),
        SourceConfig::File { .. } => {
            bail!("refinement study needs an analytic source, not a file")
        }
    };
    let family = |spec: &BoundarySpec, name: &str| match spec {
        BoundarySpec::Family(f) => Ok(f.clone()),
        BoundarySpec::File { .. } => Err(anyhow!(
            "refinement study needs analytic boundary data for {name}"
        )),
    };
    Ok(ProblemSpec {
        n: g.n,
        k: g.k,
        box_len: g.box_len,
        lambda0: g.lambda0,
        u0: family(&boundary.u0, "u0")?,
        u1: family(&boundary.u1, "u1")?,
        source,
    })
}
