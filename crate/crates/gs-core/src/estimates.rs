//! Empirical verification of the a priori bounds on solved states: the
//! C^0 sandwich against the comparison fields, the u_t bracket, the E_u
//! cone membership, measured C^{1,1} suprema, and their stability under
//! grid refinement.

use crate::error::Result;
use crate::grid::{c11_suprema, comparison_field, point_state, ut_at, SpaceTimeField};
use crate::problem::ProblemSpec;
use crate::solver::{SolveState, SolverConfig};
use crate::symk::newton_chain;
use serde::Serialize;

/// Measured bound data for one solved state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundReport {
    /// min over the grid of u - U_{-a}
    pub c0_low_slack: f64,
    /// min over the grid of U_0 - u
    pub c0_high_slack: f64,
    /// min of u_t - (-a + u1 - u0)
    pub ut_low_slack: f64,
    /// min of (a + u1 - u0) - u_t
    pub ut_high_slack: f64,
    pub sup_grad: f64,
    pub sup_utt: f64,
    /// Frobenius norm of the spatial Hessian
    pub sup_hess: f64,
    pub sup_grad_ut: f64,
    /// min over interior points of the discrete u_tt
    pub min_utt: f64,
}

fn boundary_slices(u: &SpaceTimeField) -> (Vec<f64>, Vec<f64>) {
    let g = &u.geom;
    (
        u.level_slice(0).to_vec(),
        u.level_slice(g.levels() - 1).to_vec(),
    )
}

/// C^0 sandwich slacks (U_{-a} <= u <= U_0) with the solver's own a.
pub fn verify_c0(state: &SolveState, a: f64) -> (f64, f64) {
    let g = state.u.geom;
    let (u0, u1) = boundary_slices(&state.u);
    let lower = comparison_field(g, -a, &u0, &u1);
    let upper = comparison_field(g, 0.0, &u0, &u1);
    (state.u.min_gap(&lower), upper.min_gap(&state.u))
}

/// u_t bracket slacks (-a + u1 - u0 <= u_t <= a + u1 - u0), with
/// one-sided discrete u_t at the time boundaries.
pub fn verify_ut(state: &SolveState, a: f64) -> (f64, f64) {
    let g = state.u.geom;
    let (u0, u1) = boundary_slices(&state.u);
    let mut low = f64::INFINITY;
    let mut high = f64::INFINITY;
    for level in 0..g.levels() {
        for sp in 0..g.spatial_points() {
            let ut = ut_at(&state.u, level, sp);
            let gap = u1[sp] - u0[sp];
            low = low.min(ut - (-a + gap));
            high = high.min(a + gap - ut);
        }
    }
    (low, high)
}

/// Worst E_u cone margin over the interior, plus the i = 1 chain slack
/// utt sigma_1(A_u) - |grad u_t|^2.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EConeScan {
    pub min_margin: f64,
    pub min_i1_slack: f64,
}

pub fn verify_e_cone(state: &SolveState) -> Result<EConeScan> {
    let g = state.u.geom;
    let mut min_margin = f64::INFINITY;
    let mut min_i1 = f64::INFINITY;
    for level in 1..=g.interior_levels {
        for sp in 0..g.spatial_points() {
            let st = point_state(&state.u, level, sp)?;
            let chain_e = newton_chain(&st.e, g.k)?;
            let margin = chain_e.sigmas[1..=g.k]
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            min_margin = min_margin.min(margin);
            let sigma1_a = st.a.trace();
            let gut_sq: f64 = st.grad_ut.iter().map(|v| v * v).sum();
            min_i1 = min_i1.min(st.utt * sigma1_a - gut_sq);
        }
    }
    Ok(EConeScan {
        min_margin,
        min_i1_slack: min_i1,
    })
}

/// Full measured report for one state.
pub fn bound_report(state: &SolveState, a: f64) -> BoundReport {
    let (c0_low, c0_high) = verify_c0(state, a);
    let (ut_low, ut_high) = verify_ut(state, a);
    let sup = c11_suprema(&state.u);
    BoundReport {
        c0_low_slack: c0_low,
        c0_high_slack: c0_high,
        ut_low_slack: ut_low,
        ut_high_slack: ut_high,
        sup_grad: sup.sup_grad,
        sup_utt: sup.sup_utt,
        sup_hess: sup.sup_hess,
        sup_grad_ut: sup.sup_grad_ut,
        min_utt: sup.min_utt,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementRow {
    pub resolution: usize,
    pub subsolution_a: f64,
    pub report: BoundReport,
}

/// Solves the same problem at several resolutions and reports the
/// measured suprema trend.
pub fn refinement_study(
    problem: &ProblemSpec,
    resolutions: &[usize],
    cfg: &SolverConfig,
) -> Result<Vec<RefinementRow>> {
    if resolutions.len() < 2 {
        return Err(crate::error::GsError::domain(
            "refinement_study needs at least two resolutions",
        ));
    }
    let mut rows = Vec::new();
    for &npts in resolutions {
        let (state, path) = problem.solve_at(npts, cfg)?;
        if !path.converged {
            return Err(crate::error::GsError::NonConverged(format!(
                "refinement solve at N = {npts} failed: {:?}",
                path.diagnosis
            )));
        }
        rows.push(RefinementRow {
            resolution: npts,
            subsolution_a: path.subsolution_a,
            report: bound_report(&state, path.subsolution_a),
        });
    }
    Ok(rows)
}

/// One CSV row per resolution.
pub fn refinement_csv(rows: &[RefinementRow]) -> String {
    let mut out = String::from(
        "resolution,subsolution_a,c0_low_slack,c0_high_slack,ut_low_slack,ut_high_slack,sup_grad,sup_utt,sup_hess,sup_grad_ut,min_utt\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            r.resolution,
            r.subsolution_a,
            r.report.c0_low_slack,
            r.report.c0_high_slack,
            r.report.ut_low_slack,
            r.report.ut_high_slack,
            r.report.sup_grad,
            r.report.sup_utt,
            r.report.sup_hess,
            r.report.sup_grad_ut,
            r.report.min_utt,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::BoundaryFamily;
    use crate::grid::GridGeometry;
    use crate::problem::SourceSpec;
    use crate::solver::{continuity_solve, homogeneous_exact};
    use std::f64::consts::PI;

    fn solve_generic() -> (SolveState, f64) {
        let g = GridGeometry::new(2, 1, 8, 7, 2.0 * PI, 0.5).unwrap();
        let u0 = BoundaryFamily::Cosine {
            amplitude: 0.05,
            wave: vec![1, 0],
        }
        .sample(&g);
        let u1 = BoundaryFamily::Cosine {
            amplitude: -0.05,
            wave: vec![0, 1],
        }
        .sample(&g);
        let f = SpaceTimeField::constant(g, 1.0);
        let cfg = SolverConfig::default();
        let (state, path) = continuity_solve(&u0, &u1, &f, &cfg, None).unwrap();
        assert!(path.converged);
        (state, path.subsolution_a)
    }

    #[test]
    fn homogeneous_slacks_are_exact() {
        // u = U_{-a*}: U_0 - u = a* t (1-t) >= 0, and u - U_{-a} has a
        // closed form for any a >= a*
        let g = GridGeometry::new(2, 1, 8, 7, 2.0 * PI, 0.5).unwrap();
        let exact = homogeneous_exact(g, 1.0);
        let state = SolveState {
            u: exact,
            f: SpaceTimeField::constant(g, 1.0),
            residual_norm: 0.0,
            step: 0,
        };
        let a_star = 0.5;
        let (low, high) = verify_c0(&state, 1.0);
        // low slack: min (a - a*) t(1-t) = 0 at the boundaries
        assert!(low.abs() < 1e-14);
        assert!(high.abs() < 1e-14);
        // u_t = a*(2t - 1): slacks a - a* at the t-boundaries
        let (ul, uh) = verify_ut(&state, 1.0);
        assert!((ul - (1.0 - a_star)).abs() < 1e-12, "{ul}");
        assert!((uh - (1.0 - a_star)).abs() < 1e-12, "{uh}");
    }

    #[test]
    fn generic_solve_slacks_nonnegative() {
        let (state, a) = solve_generic();
        let (low, high) = verify_c0(&state, a);
        assert!(low >= -1e-9, "c0 low slack {low}");
        assert!(high >= -1e-9, "c0 high slack {high}");
        let (ul, uh) = verify_ut(&state, a);
        assert!(ul >= -1e-9, "ut low slack {ul}");
        assert!(uh >= -1e-9, "ut high slack {uh}");
        let e = verify_e_cone(&state).unwrap();
        assert!(e.min_margin > 0.0);
        assert!(e.min_i1_slack > 0.0);
        let rep = bound_report(&state, a);
        assert!(rep.min_utt > 0.0);
        assert!(rep.sup_grad.is_finite() && rep.sup_hess.is_finite());
    }

    #[test]
    fn gauge_shift_leaves_slacks_unchanged() {
        let (state, a) = solve_generic();
        let g = state.u.geom;
        let (c1, c2) = (1.7, -0.4);
        let shifted = SpaceTimeField::from_fn(g, |level, sp| {
            state.u.get(level, sp) - c1 * g.time_of(level) - c2
        });
        let state2 = SolveState {
            u: shifted,
            f: state.f.clone(),
            residual_norm: state.residual_norm,
            step: state.step,
        };
        let (l1, h1) = verify_c0(&state, a);
        let (l2, h2) = verify_c0(&state2, a);
        assert!((l1 - l2).abs() < 1e-12 && (h1 - h2).abs() < 1e-12);
        let (ul1, uh1) = verify_ut(&state, a);
        let (ul2, uh2) = verify_ut(&state2, a);
        assert!((ul1 - ul2).abs() < 1e-12 && (uh1 - uh2).abs() < 1e-12);
    }

    #[test]
    fn refinement_rows_and_csv() {
        let problem = ProblemSpec {
            n: 2,
            k: 1,
            box_len: 2.0 * PI,
            lambda0: 0.5,
            u0: BoundaryFamily::Constant { value: 0.0 },
            u1: BoundaryFamily::Constant { value: 0.0 },
            source: SourceSpec::Constant { value: 1.0 },
        };
        let cfg = SolverConfig::default();
        let rows = refinement_study(&problem, &[8, 16], &cfg).unwrap();
        assert_eq!(rows.len(), 2);
        // homogeneous case: suprema resolution-independent exactly
        let r0 = &rows[0].report;
        let r1 = &rows[1].report;
        assert!((r0.sup_utt - r1.sup_utt).abs() < 1e-9);
        assert!((r0.sup_grad - r1.sup_grad).abs() < 1e-9);
        let csv = refinement_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("resolution,"));
        assert!(refinement_study(&problem, &[8], &cfg).is_err());
    }
}
