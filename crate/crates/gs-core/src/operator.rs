//! Discrete linearization of F_k at an admissible state: a compact-stencil
//! operator with one coefficient row per interior grid point.
//!
//! Coefficients follow the variation through E_u exactly:
//!   L(v) = (1-k) utt^{-k} sigma_k(E) v_tt
//!        + utt^{1-k} < T_{k-1}(E), v_tt A + utt L_A(v) - grad_ut boxtimes grad_vt >
//! with L_A(v) = hess(v) + grad(u) boxtimes grad(v) - <grad u, grad v> g.
//! Every derivative of v uses the same central stencils as the residual,
//! so the assembled operator is the exact Jacobian of the discrete
//! residual map (the directional finite-difference check converges at
//! order two in epsilon with no spatial-term floor).

use crate::error::{GsError, Result};
use crate::grid::{derivs_at, schouten_from_parts, GridGeometry, SpaceTimeField};
use crate::symk::{newton_chain, SymMatrix};

const DIRICHLET: u32 = u32::MAX;

/// One stencil slot: time offset and up to two spatial axis offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilOffset {
    pub dt: i8,
    /// (axis, delta) pairs; axis = u8::MAX marks an unused slot.
    pub ax: [(u8, i8); 2],
}

impl StencilOffset {
    fn center() -> Self {
        StencilOffset {
            dt: 0,
            ax: [(u8::MAX, 0), (u8::MAX, 0)],
        }
    }
    fn t(dt: i8) -> Self {
        StencilOffset {
            dt,
            ax: [(u8::MAX, 0), (u8::MAX, 0)],
        }
    }
    fn x(axis: usize, d: i8) -> Self {
        StencilOffset {
            dt: 0,
            ax: [(axis as u8, d), (u8::MAX, 0)],
        }
    }
    fn tx(dt: i8, axis: usize, d: i8) -> Self {
        StencilOffset {
            dt,
            ax: [(axis as u8, d), (u8::MAX, 0)],
        }
    }
    fn xx(a: usize, da: i8, b: usize, db: i8) -> Self {
        StencilOffset {
            dt: 0,
            ax: [(a as u8, da), (b as u8, db)],
        }
    }
}

/// The stencil pattern for spatial dimension n, center first.
pub fn stencil_pattern(n: usize) -> Vec<StencilOffset> {
    let mut p = vec![StencilOffset::center()];
    p.push(StencilOffset::t(1));
    p.push(StencilOffset::t(-1));
    for i in 0..n {
        p.push(StencilOffset::x(i, 1));
        p.push(StencilOffset::x(i, -1));
    }
    for i in 0..n {
        for l in (i + 1)..n {
            for (da, db) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
                p.push(StencilOffset::xx(i, da, l, db));
            }
        }
    }
    for i in 0..n {
        for (dt, dx) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
            p.push(StencilOffset::tx(dt, i, dx));
        }
    }
    p
}

/// Sparse stencil operator over the interior unknowns; Dirichlet data at
/// the time boundaries is eliminated (marked neighbors are skipped, so
/// the operator acts on corrections that vanish there).
#[derive(Debug, Clone)]
pub struct LinearOperator {
    pub geom: GridGeometry,
    pub pattern: Vec<StencilOffset>,
    neighbors: Vec<u32>,
    coeffs: Vec<f64>,
}

impl LinearOperator {
    pub fn rows(&self) -> usize {
        self.geom.interior_levels * self.geom.spatial_points()
    }

    pub fn stencil_len(&self) -> usize {
        self.pattern.len()
    }

    /// out = L v (v on interior unknowns).
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let m = self.pattern.len();
        for (row, slot) in out.iter_mut().enumerate() {
            let base = row * m;
            let mut acc = 0.0;
            for e in 0..m {
                let nb = self.neighbors[base + e];
                if nb != DIRICHLET {
                    acc += self.coeffs[base + e] * v[nb as usize];
                }
            }
            *slot = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let m = self.pattern.len();
        (0..self.rows()).map(|row| self.coeffs[row * m]).collect()
    }

    /// Gauss-Seidel sweep in place: x <- x + D^{-1}(b - Lx) row by row,
    /// forward or backward; used as the SSOR preconditioner.
    pub fn gauss_seidel_sweep(&self, b: &[f64], x: &mut [f64], backward: bool) {
        let m = self.pattern.len();
        let rows = self.rows();
        let order: Box<dyn Iterator<Item = usize>> = if backward {
            Box::new((0..rows).rev())
        } else {
            Box::new(0..rows)
        };
        for row in order {
            let base = row * m;
            let mut acc = b[row];
            for e in 1..m {
                let nb = self.neighbors[base + e];
                if nb != DIRICHLET {
                    acc -= self.coeffs[base + e] * x[nb as usize];
                }
            }
            x[row] = acc / self.coeffs[base];
        }
    }

    pub fn row_coeffs(&self, row: usize) -> &[f64] {
        let m = self.pattern.len();
        &self.coeffs[row * m..(row + 1) * m]
    }
}

/// Per-point pieces of the linearization, shared by the assembly and the
/// ellipticity scan.
struct PointCoeffs {
    c_tt: f64,
    c_xx: SymMatrix,
    c_mix: Vec<f64>,
    c_x: Vec<f64>,
}

fn point_coeffs(
    u: &SpaceTimeField,
    f: &SpaceTimeField,
    level: usize,
    sp: usize,
) -> Result<PointCoeffs> {
    let g = &u.geom;
    let k = g.k;
    let d = derivs_at(u, level, sp);
    let a = schouten_from_parts(g, &d.grad, &d.hess);
    let chain_a = newton_chain(&a, k)?;
    let cone_margin = chain_a.sigmas[1..=k]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if cone_margin <= 0.0 || d.utt <= 0.0 {
        return Err(GsError::InadmissiblePoint {
            level,
            spatial: sp,
            what: format!(
                "linearize needs A_u in Gamma_k^+ and utt > 0 (margin {cone_margin}, utt {})",
                d.utt
            ),
        });
    }
    let fk = d.utt * chain_a.sigmas[k] - chain_a.transforms[k - 1].quad_form(&d.grad_ut);
    if fk <= 0.0 {
        return Err(GsError::InadmissiblePoint {
            level,
            spatial: sp,
            what: format!("linearize needs F_k(u) > 0, got {fk} (target f {})", f.get(level, sp)),
        });
    }
    let e = a
        .scale(d.utt)
        .add_scaled(&SymMatrix::outer(&d.grad_ut), -1.0);
    let chain_e = newton_chain(&e, k)?;
    let t = &chain_e.transforms[k - 1];
    let pow1 = d.utt.powi(1 - k as i32);
    let pow2 = d.utt.powi(2 - k as i32);
    let c_tt = (1.0 - k as f64) * d.utt.powi(-(k as i32)) * chain_e.sigmas[k] + pow1 * t.inner(&a);
    let c_xx = t.scale(pow2);
    let t_gut = t.apply(&d.grad_ut);
    let c_mix: Vec<f64> = t_gut.iter().map(|v| -2.0 * pow1 * v).collect();
    let t_gu = t.apply(&d.grad);
    let tr_t = t.trace();
    let c_x: Vec<f64> = (0..g.n)
        .map(|i| pow2 * (2.0 * t_gu[i] - tr_t * d.grad[i]))
        .collect();
    Ok(PointCoeffs {
        c_tt,
        c_xx,
        c_mix,
        c_x,
    })
}

/// Assembles the discrete linearized operator at state u. Every interior
/// point must be admissible with F_k(u) > 0; the first offending point is
/// named in the error.
pub fn linearize(u: &SpaceTimeField, f: &SpaceTimeField) -> Result<LinearOperator> {
    let g = u.geom;
    if f.geom != g {
        return Err(GsError::domain("linearize: u and f geometries differ"));
    }
    let pattern = stencil_pattern(g.n);
    let m = pattern.len();
    let spatial = g.spatial_points();
    let rows = g.interior_levels * spatial;
    let mut neighbors = vec![DIRICHLET; rows * m];
    let mut coeffs = vec![0.0; rows * m];
    let ht = g.ht();
    let hx = g.hx();
    let ht2 = ht * ht;
    let hx2 = hx * hx;

    for level in 1..=g.interior_levels {
        for sp in 0..spatial {
            let row = (level - 1) * spatial + sp;
            let base = row * m;
            let pc = point_coeffs(u, f, level, sp)?;

            for (e, off) in pattern.iter().enumerate() {
                // neighbor index (interior unknown or Dirichlet marker)
                let lvl = level as i64 + off.dt as i64;
                let mut nsp = sp;
                for &(axis, d) in &off.ax {
                    if axis != u8::MAX {
                        nsp = g.shift(nsp, axis as usize, d as i64);
                    }
                }
                if lvl >= 1 && lvl <= g.interior_levels as i64 {
                    neighbors[base + e] = ((lvl as usize - 1) * spatial + nsp) as u32;
                }

                // coefficient
                let mut c = 0.0;
                match (off.dt, off.ax[0].0 == u8::MAX, off.ax[1].0 == u8::MAX) {
                    (0, true, true) => {
                        // center: v_tt and all pure second differences
                        c += pc.c_tt * (-2.0 / ht2);
                        for i in 0..g.n {
                            c += pc.c_xx.get(i, i) * (-2.0 / hx2);
                        }
                    }
                    (dt, true, true) if dt != 0 => {
                        c += pc.c_tt / ht2;
                    }
                    (0, false, true) => {
                        let (axis, d) = (off.ax[0].0 as usize, off.ax[0].1 as f64);
                        c += pc.c_xx.get(axis, axis) / hx2;
                        c += pc.c_x[axis] * d / (2.0 * hx);
                    }
                    (0, false, false) => {
                        let (a1, d1) = (off.ax[0].0 as usize, off.ax[0].1 as f64);
                        let (a2, d2) = (off.ax[1].0 as usize, off.ax[1].1 as f64);
                        // <C, hess v> carries both (i,l) and (l,i)
                        c += 2.0 * pc.c_xx.get(a1, a2) * d1 * d2 / (4.0 * hx2);
                    }
                    (dt, false, true) => {
                        let (axis, d) = (off.ax[0].0 as usize, off.ax[0].1 as f64);
                        c += pc.c_mix[axis] * (dt as f64) * d / (4.0 * ht * hx);
                    }
                    _ => unreachable!("stencil pattern covers all offset shapes"),
                }
                coeffs[base + e] = c;
            }
        }
    }
    Ok(LinearOperator {
        geom: g,
        pattern,
        neighbors,
        coeffs,
    })
}

/// Minimum eigenvalue of the second-order symbol over all interior
/// points: the (n+1) x (n+1) matrix [[c_tt, c_mix/2], [c_mix/2, C_xx]]
/// contracted against (xi, X). Strict ellipticity means the result is
/// positive.
pub fn ellipticity_scan(u: &SpaceTimeField, f: &SpaceTimeField) -> Result<f64> {
    let g = &u.geom;
    let spatial = g.spatial_points();
    let mut min_eig = f64::INFINITY;
    for level in 1..=g.interior_levels {
        for sp in 0..spatial {
            let pc = point_coeffs(u, f, level, sp)?;
            let mut sym = SymMatrix::zeros(g.n + 1);
            sym.set(0, 0, pc.c_tt);
            for i in 0..g.n {
                sym.set(0, i + 1, 0.5 * pc.c_mix[i]);
                for j in i..g.n {
                    sym.set(i + 1, j + 1, pc.c_xx.get(i, j));
                }
            }
            let lo = sym.eigenvalues().values()[0];
            min_eig = min_eig.min(lo);
        }
    }
    Ok(min_eig)
}

/// v_tt coefficient of the linearization at one point; the variation
/// through E collapses to sigma_k(A_u) exactly, which doubles as an
/// assembly self-check.
pub fn vtt_coefficient(u: &SpaceTimeField, f: &SpaceTimeField, level: usize, sp: usize) -> Result<f64> {
    Ok(point_coeffs(u, f, level, sp)?.c_tt)
}
