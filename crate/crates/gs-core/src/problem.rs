//! A resolution-independent problem description: boundary families plus a
//! source term, instantiable on any grid size. Used by the
//! refinement study and the CLI drivers.

use crate::analytic::{BoundaryFamily, Manufactured};
use crate::error::Result;
use crate::grid::{GridGeometry, SpaceTimeField};
use crate::solver::{continuity_solve, PathReport, SolveState, SolverConfig};
use serde::{Deserialize, Serialize};

/// Source term: a constant, or the continuum operator value of the
/// manufactured solution (which then also fixes the boundary data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Constant { value: f64 },
    Manufactured(Manufactured),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub n: usize,
    pub k: usize,
    pub box_len: f64,
    pub lambda0: f64,
    pub u0: BoundaryFamily,
    pub u1: BoundaryFamily,
    pub source: SourceSpec,
}

impl ProblemSpec {
    pub fn geometry(&self, points_per_axis: usize, interior_levels: usize) -> Result<GridGeometry> {
        GridGeometry::new(
            self.n,
            self.k,
            points_per_axis,
            interior_levels,
            self.box_len,
            self.lambda0,
        )
    }

    /// Boundary slices and source field on a concrete grid.
    pub fn instantiate(
        &self,
        geom: GridGeometry,
    ) -> Result<(Vec<f64>, Vec<f64>, SpaceTimeField)> {
        match &self.source {
            SourceSpec::Constant { value } => Ok((
                self.u0.sample(&geom),
                self.u1.sample(&geom),
                SpaceTimeField::constant(geom, *value),
            )),
            SourceSpec::Manufactured(m) => Ok((
                m.boundary0(&geom),
                m.boundary1(&geom),
                m.source_field(geom)?,
            )),
        }
    }

    /// Continuity solve at resolution N with Nt = N - 1 interior levels
    /// (so the time spacing refines with the spatial spacing).
    pub fn solve_at(
        &self,
        points_per_axis: usize,
        cfg: &SolverConfig,
    ) -> Result<(SolveState, PathReport)> {
        let geom = self.geometry(points_per_axis, points_per_axis - 1)?;
        let (u0, u1, f) = self.instantiate(geom)?;
        continuity_solve(&u0, &u1, &f, cfg, None)
    }
}
