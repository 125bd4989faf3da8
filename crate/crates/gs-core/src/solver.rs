//! Damped-Newton solver for F_k(u) = f on the space-time grid, the
//! continuity path from the explicit subsolution U_{-a}, the degenerate
//! sweep f = s -> 0, the strictness lift w = (1-eps)u + eps t^2, and the
//! uniqueness probe.
//!
//! Solver invariant: every accepted iterate keeps the admissibility scan
//! margins at or above `margin_floor`; the line search backtracks until
//! both that and the Armijo decrease hold.

use crate::error::{GsError, Result};
use crate::grid::{
    admissibility_scan, boundary_cone_margin, c11_suprema, comparison_field, point_state,
    AdmissibilityScan, C11Suprema, GridGeometry, InteriorField, SpaceTimeField,
};
use crate::linsolve::{gmres, LinSolveConfig};
use crate::operator::linearize;
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct SolverConfig {
    /// relative residual target: sup|F_k(u) - f| <= newton_tol * sup f
    pub newton_tol: f64,
    pub max_newton: usize,
    /// backtracking ratio of the line search
    pub armijo_ratio: f64,
    /// Armijo slope fraction
    pub armijo_slope: f64,
    /// minimum admissibility margin retained by the line search
    pub margin_floor: f64,
    /// continuity increments (adaptive halving on failure)
    pub path_steps: usize,
    /// geometric schedule for the degenerate sweep
    pub s_schedule: Vec<f64>,
    pub linear: LinSolveConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tol: 1e-10,
            max_newton: 50,
            armijo_ratio: 0.5,
            armijo_slope: 1e-4,
            margin_floor: 1e-12,
            path_steps: 10,
            s_schedule: (0..=16).map(|j| 0.5_f64.powi(j)).collect(),
            linear: LinSolveConfig::default(),
        }
    }
}

/// Converged (or last accepted) solver state.
#[derive(Debug, Clone)]
pub struct SolveState {
    pub u: SpaceTimeField,
    pub f: SpaceTimeField,
    pub residual_norm: f64,
    pub step: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub final_margins: AdmissibilityScan,
    /// line-search shrink count per iteration (conditioning symptom)
    pub line_search_shrinks: Vec<usize>,
    pub diagnosis: Option<String>,
    #[serde(skip)]
    pub wall_time: f64,
}

// The progress sink is Option<&mut (dyn FnMut(String) + '_)> with the
// trait-object lifetime independent of the reference, so the option can
// be reborrowed down the call chain; the CLI routes its verbosity
// switch here.
fn emit(progress: &mut Option<&mut (dyn FnMut(String) + '_)>, msg: impl FnOnce() -> String) {
    if let Some(p) = progress.as_mut() {
        p(msg());
    }
}

/// One pass computing the admissibility margins, the residual, and the
/// largest |sigma_k(A_u)| (which scales the rounding floor of the
/// residual evaluation).
fn scan_and_residual(
    u: &SpaceTimeField,
    f: &SpaceTimeField,
) -> Result<(AdmissibilityScan, InteriorField, f64)> {
    let g = &u.geom;
    let spatial = g.spatial_points();
    let mut scan = AdmissibilityScan {
        min_cone_margin: f64::INFINITY,
        min_utt: f64::INFINITY,
        min_fk: f64::INFINITY,
        worst_point: (1, 0),
    };
    let mut res = InteriorField::zeros(*g);
    let mut sigma_max = 0.0_f64;
    for level in 1..=g.interior_levels {
        for sp in 0..spatial {
            let st = point_state(u, level, sp)?;
            let local = st.admissible.margin.min(st.utt).min(st.fk);
            if local < scan.min_cone_margin.min(scan.min_utt).min(scan.min_fk) {
                scan.worst_point = (level, sp);
            }
            scan.min_cone_margin = scan.min_cone_margin.min(st.admissible.margin);
            scan.min_utt = scan.min_utt.min(st.utt);
            scan.min_fk = scan.min_fk.min(st.fk);
            sigma_max = sigma_max.max(st.sigma_k_a.abs());
            res.values[(level - 1) * spatial + sp] = st.fk - f.get(level, sp);
        }
    }
    Ok((scan, res, sigma_max))
}

/// Rounding floor of the discrete residual evaluation: the second
/// differences cancel O(sup|u|) values against spacings ht^2 and hx^2,
/// so sup-residuals below this level are indistinguishable from noise.
fn evaluation_floor(u: &SpaceTimeField, sigma_max: f64) -> f64 {
    let g = &u.geom;
    let ht = g.ht();
    let hx = g.hx();
    1024.0
        * f64::EPSILON
        * u.sup_norm()
        * sigma_max.max(1.0)
        * (1.0 / (ht * ht) + g.n as f64 / (hx * hx))
}

fn sup_interior(f: &SpaceTimeField) -> f64 {
    let g = &f.geom;
    let mut m = 0.0_f64;
    for level in 1..=g.interior_levels {
        for v in f.level_slice(level) {
            m = m.max(v.abs());
        }
    }
    m
}

fn min_interior(f: &SpaceTimeField) -> f64 {
    let g = &f.geom;
    let mut m = f64::INFINITY;
    for level in 1..=g.interior_levels {
        for v in f.level_slice(level) {
            m = m.min(*v);
        }
    }
    m
}

/// Damped Newton iteration from an admissible start; boundary slices of
/// u_init are held fixed. Iteration-cap and line-search failures come
/// back as non-converged reports, not errors.
pub fn newton_solve(
    u_init: &SpaceTimeField,
    f: &SpaceTimeField,
    cfg: &SolverConfig,
    mut progress: Option<&mut (dyn FnMut(String) + '_)>,
) -> Result<(SolveState, SolveReport)> {
    let start = Instant::now();
    let g = u_init.geom;
    if f.geom != g {
        return Err(GsError::domain("newton_solve: u and f geometries differ"));
    }
    if min_interior(f) <= 0.0 {
        return Err(GsError::domain("newton_solve requires f > 0 pointwise"));
    }
    let f_sup = sup_interior(f).max(f64::MIN_POSITIVE);
    let target = cfg.newton_tol * f_sup;

    let mut u = u_init.clone();
    let (scan0, res0, mut sigma_max) = scan_and_residual(&u, f)?;
    if scan0.min_cone_margin <= 0.0 || scan0.min_utt <= 0.0 || scan0.min_fk <= 0.0 {
        return Err(GsError::InadmissiblePoint {
            level: scan0.worst_point.0,
            spatial: scan0.worst_point.1,
            what: format!(
                "newton_solve needs an admissible start with F_k > 0 (margins: cone {}, utt {}, fk {})",
                scan0.min_cone_margin, scan0.min_utt, scan0.min_fk
            ),
        });
    }

    let mut scan = scan0;
    let mut res = res0;
    let mut rn = res.sup_norm();
    let mut history = vec![rn];
    let mut shrinks_log = Vec::new();
    let mut stalled = false;

    for iter in 0..cfg.max_newton {
        // When the target undercuts the rounding floor of the residual
        // evaluation (tiny constant sources on the degenerate sweep), a
        // stalled iteration at the floor is as converged as the floating
        // point allows; the diagnosis records it.
        let floor = evaluation_floor(&u, sigma_max);
        if rn <= target || (stalled && rn <= floor) {
            let at_floor = rn > target;
            return Ok((
                SolveState {
                    u,
                    f: f.clone(),
                    residual_norm: rn,
                    step: iter,
                },
                SolveReport {
                    converged: true,
                    iterations: iter,
                    residual_history: history,
                    final_margins: scan,
                    line_search_shrinks: shrinks_log,
                    diagnosis: at_floor.then(|| {
                        format!(
                            "stopped at the floating-point evaluation floor {floor:.3e} (target {target:.3e})"
                        )
                    }),
                    wall_time: start.elapsed().as_secs_f64(),
                },
            ));
        }
        let op = linearize(&u, f)?;
        let rows = op.rows();
        let mut rhs = vec![0.0; rows];
        for (slot, r) in rhs.iter_mut().zip(&res.values) {
            *slot = -r;
        }
        let mut delta = vec![0.0; rows];
        let lin = gmres(&op, &rhs, &mut delta, &cfg.linear);
        emit(&mut progress, || {
            format!(
                "newton iter {iter}: residual {rn:.3e}, gmres {} iters (rel {:.1e})",
                lin.iterations, lin.final_rel_residual
            )
        });

        let mut alpha = 1.0;
        let mut shrinks = 0usize;
        let accepted = loop {
            let mut trial = u.clone();
            trial.add_interior(&delta, alpha);
            let (tscan, tres, tsigma) = scan_and_residual(&trial, f)?;
            let margins_ok = tscan.min_cone_margin >= cfg.margin_floor
                && tscan.min_utt >= cfg.margin_floor
                && tscan.min_fk >= cfg.margin_floor;
            let trn = tres.sup_norm();
            if margins_ok && trn <= (1.0 - cfg.armijo_slope * alpha) * rn {
                break Some((trial, tscan, tres, trn, tsigma));
            }
            alpha *= cfg.armijo_ratio;
            shrinks += 1;
            if alpha < 1e-14 {
                break None;
            }
        };
        shrinks_log.push(shrinks);
        match accepted {
            Some((trial, tscan, tres, trn, tsigma)) => {
                stalled = trn > 0.99 * rn;
                u = trial;
                scan = tscan;
                res = tres;
                rn = trn;
                sigma_max = tsigma;
                history.push(rn);
            }
            None => {
                if rn <= evaluation_floor(&u, sigma_max) {
                    let floor = evaluation_floor(&u, sigma_max);
                    return Ok((
                        SolveState {
                            u,
                            f: f.clone(),
                            residual_norm: rn,
                            step: iter,
                        },
                        SolveReport {
                            converged: true,
                            iterations: iter,
                            residual_history: history,
                            final_margins: scan,
                            line_search_shrinks: shrinks_log,
                            diagnosis: Some(format!(
                                "line search exhausted at the floating-point evaluation floor {floor:.3e} (target {target:.3e})"
                            )),
                            wall_time: start.elapsed().as_secs_f64(),
                        },
                    ));
                }
                let diagnosis = format!(
                    "line search collapsed at iteration {iter}; worst point (level {}, spatial {}) margins: cone {:.3e}, utt {:.3e}, fk {:.3e}",
                    scan.worst_point.0,
                    scan.worst_point.1,
                    scan.min_cone_margin,
                    scan.min_utt,
                    scan.min_fk
                );
                return Ok((
                    SolveState {
                        u,
                        f: f.clone(),
                        residual_norm: rn,
                        step: iter,
                    },
                    SolveReport {
                        converged: false,
                        iterations: iter,
                        residual_history: history,
                        final_margins: scan,
                        line_search_shrinks: shrinks_log,
                        diagnosis: Some(diagnosis),
                        wall_time: start.elapsed().as_secs_f64(),
                    },
                ));
            }
        }
    }
    let converged = rn <= target;
    Ok((
        SolveState {
            u,
            f: f.clone(),
            residual_norm: rn,
            step: cfg.max_newton,
        },
        SolveReport {
            converged,
            iterations: cfg.max_newton,
            residual_history: history,
            final_margins: scan,
            line_search_shrinks: shrinks_log,
            diagnosis: if converged {
                None
            } else {
                Some("iteration cap reached".to_string())
            },
            wall_time: start.elapsed().as_secs_f64(),
        },
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct PathReport {
    pub converged: bool,
    pub subsolution_a: f64,
    /// (s, newton iterations, final residual) per accepted path step
    pub steps: Vec<(f64, usize, f64)>,
    pub diagnosis: Option<String>,
}

/// Finds a so that the comparison field w = U_{-a} is admissible with
/// F_k(w) strictly above the target pointwise, doubling from 1.
pub fn subsolution_constant(
    geom: GridGeometry,
    u0: &[f64],
    u1: &[f64],
    f_max: f64,
) -> Result<(f64, SpaceTimeField)> {
    let mut a = 1.0;
    loop {
        let w = comparison_field(geom, -a, u0, u1);
        let scan = admissibility_scan(&w)?;
        if scan.min_cone_margin > 0.0 && scan.min_utt > 0.0 && scan.min_fk > f_max {
            return Ok((a, w));
        }
        a *= 2.0;
        if a > 1e6 {
            return Err(GsError::domain(
                "subsolution search failed: no a <= 1e6 makes F_k(U_{-a}) exceed the target",
            ));
        }
    }
}

/// Continuity method from the explicit subsolution: follows
/// f_s = (1-s) f_0 + s f_target with adaptive step halving.
pub fn continuity_solve(
    u0: &[f64],
    u1: &[f64],
    f_target: &SpaceTimeField,
    cfg: &SolverConfig,
    mut progress: Option<&mut (dyn FnMut(String) + '_)>,
) -> Result<(SolveState, PathReport)> {
    let g = f_target.geom;
    if min_interior(f_target) <= 0.0 {
        return Err(GsError::domain("continuity_solve requires f_target > 0"));
    }
    // boundary data must be admissible
    let probe = comparison_field(g, 0.0, u0, u1);
    for (level, name) in [(0usize, "u0"), (g.levels() - 1, "u1")] {
        let margin = boundary_cone_margin(&probe, level);
        if margin <= 0.0 {
            return Err(GsError::domain(format!(
                "boundary slice {name} is not admissible (cone margin {margin})"
            )));
        }
    }
    let f_max = sup_interior(f_target);
    let (a, w) = subsolution_constant(g, u0, u1, f_max)?;
    emit(&mut progress, || format!("subsolution constant a = {a}"));

    // f0 = F_k(w) on the grid (interior levels; boundary rows unused)
    let mut f0 = SpaceTimeField::zeros(g);
    for level in 1..=g.interior_levels {
        for sp in 0..g.spatial_points() {
            let st = point_state(&w, level, sp)?;
            f0.set(level, sp, st.fk);
        }
    }
    // keep the blend positive on the unused boundary rows too
    for sp in 0..g.spatial_points() {
        f0.set(0, sp, f0.get(1, sp));
        let last = g.levels() - 1;
        f0.set(last, sp, f0.get(last - 1, sp));
    }
    follow_path(w, &f0, f_target, a, cfg, progress)
}

/// Follows f_s = (1-s) f_0 + s f_target from the prepared start `w`
/// with adaptive step halving. A constant path (f_target == f_0)
/// collapses to a single refinement call.
pub fn follow_path(
    w: SpaceTimeField,
    f0: &SpaceTimeField,
    f_target: &SpaceTimeField,
    a: f64,
    cfg: &SolverConfig,
    mut progress: Option<&mut (dyn FnMut(String) + '_)>,
) -> Result<(SolveState, PathReport)> {
    let g = w.geom;
    if f0.sup_diff(f_target) == 0.0 {
        let (state, report) = newton_solve(&w, f_target, cfg, progress.as_deref_mut())?;
        let converged = report.converged;
        return Ok((
            state,
            PathReport {
                converged,
                subsolution_a: a,
                steps: vec![(1.0, report.iterations, *report.residual_history.last().unwrap())],
                diagnosis: report.diagnosis,
            },
        ));
    }

    let blend = |s: f64| -> SpaceTimeField {
        SpaceTimeField::from_fn(g, |level, sp| {
            (1.0 - s) * f0.get(level, sp) + s * f_target.get(level, sp)
        })
    };

    let mut u = w;
    let mut s = 0.0;
    let ds0 = 1.0 / cfg.path_steps.max(1) as f64;
    let mut ds = ds0;
    let mut steps = Vec::new();
    let mut last_state = None;
    while s < 1.0 {
        let s_try = (s + ds).min(1.0);
        let fs = blend(s_try);
        let (state, report) = newton_solve(&u, &fs, cfg, progress.as_deref_mut())?;
        if report.converged {
            emit(&mut progress, || {
                format!(
                    "path step s = {s_try}: {} newton iterations, residual {:.3e}",
                    report.iterations, state.residual_norm
                )
            });
            steps.push((s_try, report.iterations, state.residual_norm));
            u = state.u.clone();
            s = s_try;
            last_state = Some(state);
            ds = (ds * 2.0).min(ds0);
        } else {
            ds *= 0.5;
            if ds < 1e-6 {
                let state = last_state.unwrap_or(SolveState {
                    u,
                    f: fs,
                    residual_norm: f64::INFINITY,
                    step: 0,
                });
                return Ok((
                    state,
                    PathReport {
                        converged: false,
                        subsolution_a: a,
                        steps,
                        diagnosis: Some(format!(
                            "path step underflow at s = {s} (ds = {ds}); last diagnosis: {:?}",
                            report.diagnosis
                        )),
                    },
                ));
            }
        }
    }
    let state = last_state.expect("path made at least one step");
    Ok((
        state,
        PathReport {
            converged: true,
            subsolution_a: a,
            steps,
            diagnosis: None,
        },
    ))
}

/// Per-stage record of the degenerate sweep.
#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub s: f64,
    pub iterations: usize,
    pub residual_norm: f64,
    pub margins: AdmissibilityScan,
    /// min over the grid of u^s - u^{s_prev}; the comparison principle
    /// makes this nonnegative up to solver tolerance
    pub monotonicity_min: f64,
    /// sup |u^s - u^{s_prev}|
    pub cauchy_sup: f64,
    /// min over the grid of u - U_{-a}
    pub c0_low_slack: f64,
    /// min over the grid of U_0 - u
    pub c0_high_slack: f64,
    pub line_search_shrinks: usize,
    pub suprema: C11Suprema,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub converged: bool,
    pub subsolution_a: f64,
    pub stages: Vec<StageReport>,
    /// set when some stage broke u^s >= u^{s_prev} by more than
    /// 10 * newton_tol (a discretization artifact worth inspecting)
    pub monotonicity_flagged: bool,
    pub diagnosis: Option<String>,
}

/// Solves F_k(u^s) = s down the configured schedule, warm-starting each
/// stage, and returns the terminal state as the approximate geodesic.
pub fn degenerate_sweep(
    u0: &[f64],
    u1: &[f64],
    geom: GridGeometry,
    cfg: &SolverConfig,
    mut progress: Option<&mut (dyn FnMut(String) + '_)>,
) -> Result<(SolveState, SweepReport)> {
    if cfg.s_schedule.is_empty() {
        return Err(GsError::domain("degenerate_sweep: empty s schedule"));
    }
    for pair in cfg.s_schedule.windows(2) {
        if !(pair[1] > 0.0 && pair[1] < pair[0]) {
            return Err(GsError::domain(
                "degenerate_sweep: schedule must be positive and strictly decreasing",
            ));
        }
    }
    let s0 = cfg.s_schedule[0];
    let f_first = SpaceTimeField::constant(geom, s0);
    let (mut state, path) = continuity_solve(u0, u1, &f_first, cfg, progress.as_deref_mut())?;
    let a = path.subsolution_a;
    if !path.converged {
        return Ok((
            state,
            SweepReport {
                converged: false,
                subsolution_a: a,
                stages: vec![],
                monotonicity_flagged: false,
                diagnosis: path.diagnosis,
            },
        ));
    }
    let u_lower = comparison_field(geom, -a, u0, u1);
    let u_upper = comparison_field(geom, 0.0, u0, u1);

    let mut stages = Vec::new();
    let first_scan = admissibility_scan(&state.u)?;
    stages.push(StageReport {
        s: s0,
        iterations: state.step,
        residual_norm: state.residual_norm,
        margins: first_scan,
        monotonicity_min: 0.0,
        cauchy_sup: 0.0,
        c0_low_slack: state.u.min_gap(&u_lower),
        c0_high_slack: u_upper.min_gap(&state.u),
        line_search_shrinks: 0,
        suprema: c11_suprema(&state.u),
    });

    for &s in &cfg.s_schedule[1..] {
        let fs = SpaceTimeField::constant(geom, s);
        let prev_u = state.u.clone();
        let (next, report) = newton_solve(&state.u, &fs, cfg, progress.as_deref_mut())?;
        if !report.converged {
            let monotonicity_flagged = stages
                .iter()
                .any(|st| st.monotonicity_min < -10.0 * cfg.newton_tol);
            return Ok((
                state,
                SweepReport {
                    converged: false,
                    subsolution_a: a,
                    stages,
                    monotonicity_flagged,
                    diagnosis: Some(format!(
                        "stage s = {s} failed: {:?}",
                        report.diagnosis
                    )),
                },
            ));
        }
        emit(&mut progress, || {
            format!(
                "sweep stage s = {s:e}: {} iterations, residual {:.3e}, shrinks {:?}",
                report.iterations, next.residual_norm, report.line_search_shrinks
            )
        });
        stages.push(StageReport {
            s,
            iterations: report.iterations,
            residual_norm: next.residual_norm,
            margins: report.final_margins,
            monotonicity_min: next.u.min_gap(&prev_u),
            cauchy_sup: next.u.sup_diff(&prev_u),
            c0_low_slack: next.u.min_gap(&u_lower),
            c0_high_slack: u_upper.min_gap(&next.u),
            line_search_shrinks: report.line_search_shrinks.iter().sum(),
            suprema: c11_suprema(&next.u),
        });
        state = next;
    }
    let monotonicity_flagged = stages
        .iter()
        .any(|st| st.monotonicity_min < -10.0 * cfg.newton_tol);
    Ok((
        state,
        SweepReport {
            converged: true,
            subsolution_a: a,
            stages,
            monotonicity_flagged,
            diagnosis: None,
        },
    ))
}

/// Strictness lift of an admissible (possibly degenerate) field.
#[derive(Debug, Clone)]
pub struct ShrinkOutcome {
    pub w: SpaceTimeField,
    pub min_cone_margin: f64,
    pub min_fk: f64,
    /// pointwise min of F^{1/(k+1)}(w-data) - (1-eps) F^{1/(k+1)}(u-data)
    pub concavity_slack_min: f64,
}

/// w = (1-eps) u + eps t^2; requires 2k <= n (the construction rides on
/// diag(-1,1,...,1) membership in the closed cone, which fails otherwise).
pub fn shrink_to_strict(u: &SpaceTimeField, eps: f64, k: usize) -> Result<ShrinkOutcome> {
    let g = u.geom;
    if 2 * k > g.n {
        return Err(GsError::domain(format!(
            "shrink_to_strict requires 2k <= n, got n={}, k={k}",
            g.n
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(GsError::domain("shrink_to_strict requires 0 < eps < 1"));
    }
    let geom_k = GridGeometry { k, ..g };
    let w_raw = SpaceTimeField::from_fn(geom_k, |level, sp| {
        let t = g.time_of(level);
        (1.0 - eps) * u.get(level, sp) + eps * t * t
    });
    let u_k = SpaceTimeField::from_values(geom_k, u.values().to_vec())?;
    let spatial = g.spatial_points();
    let mut min_cone = f64::INFINITY;
    let mut min_fk = f64::INFINITY;
    let mut min_slack = f64::INFINITY;
    let pow = 1.0 / (k as f64 + 1.0);
    for level in 1..=g.interior_levels {
        for sp in 0..spatial {
            let st = point_state(&w_raw, level, sp)?;
            min_cone = min_cone.min(st.admissible.margin);
            min_fk = min_fk.min(st.fk);
            let st_u = point_state(&u_k, level, sp)?;
            let f_u = st_u.fk.max(0.0);
            if st.fk > 0.0 {
                min_slack = min_slack.min(st.fk.powf(pow) - (1.0 - eps) * f_u.powf(pow));
            }
        }
    }
    Ok(ShrinkOutcome {
        w: w_raw,
        min_cone_margin: min_cone,
        min_fk,
        concavity_slack_min: min_slack,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct UniquenessReport {
    pub sup_gap: f64,
}

/// Sup-gap of two solutions sharing geometry, boundary data, and source.
pub fn uniqueness_probe(a: &SolveState, b: &SolveState) -> Result<UniquenessReport> {
    if a.u.geom != b.u.geom {
        return Err(GsError::domain("uniqueness_probe: geometries differ"));
    }
    let g = a.u.geom;
    let last = g.levels() - 1;
    for level in [0, last] {
        if a.u.level_slice(level) != b.u.level_slice(level) {
            return Err(GsError::domain(
                "uniqueness_probe: boundary data differs",
            ));
        }
    }
    if a.f.sup_diff(&b.f) != 0.0 {
        return Err(GsError::domain("uniqueness_probe: source fields differ"));
    }
    Ok(UniquenessReport {
        sup_gap: a.u.sup_diff(&b.u),
    })
}

/// Closed-form homogeneous anchor: with u0 = u1 = 0 and f = c the exact
/// solution is u = U_{-a*} with 2 a* lambda0^k C(n,k) = c.
pub fn homogeneous_exact(geom: GridGeometry, c: f64) -> SpaceTimeField {
    let sigma = geom.lambda0.powi(geom.k as i32) * crate::symk::binomial(geom.n, geom.k);
    let a_star = c / (2.0 * sigma);
    let spatial = geom.spatial_points();
    comparison_field(geom, -a_star, &vec![0.0; spatial], &vec![0.0; spatial])
}
