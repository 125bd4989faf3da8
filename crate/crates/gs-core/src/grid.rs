//! Space-time grid [0,1] x (periodic box)^n with the conformal Schouten
//! field A_u, the tensor E_u, the nonlinear residual F_k(u) - f, the
//! quadratic form Q_u, and admissibility scans.
//!
//! The background is the space-form surrogate: a flat periodic box whose
//! synthetic Schouten tensor is lambda0 * I, so every pointwise algebraic
//! structure of the operator survives while periodic central differences
//! stay exact. All derivatives are second-order central; u_tt at interior
//! level j uses levels j-1, j, j+1, and the mixed grad(u_t) uses the
//! four-point cross stencil.

use crate::error::{GsError, Result};
use crate::symk::{newton_chain, ConeLabel, SymMatrix};
use serde::{Deserialize, Serialize};

/// Discretization of [0,1] x (periodic box)^n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    /// spatial dimension
    pub n: usize,
    /// operator order, 2k <= n
    pub k: usize,
    /// points per spatial axis
    #[serde(rename = "N")]
    pub points_per_axis: usize,
    /// interior time levels (two boundary levels are added)
    #[serde(rename = "Nt")]
    pub interior_levels: usize,
    /// box length
    #[serde(rename = "L")]
    pub box_len: f64,
    /// background Schouten eigenvalue
    pub lambda0: f64,
}

impl GridGeometry {
    pub fn new(
        n: usize,
        k: usize,
        points_per_axis: usize,
        interior_levels: usize,
        box_len: f64,
        lambda0: f64,
    ) -> Result<Self> {
        if k < 1 || 2 * k > n {
            return Err(GsError::domain(format!(
                "geometry requires 1 <= k and 2k <= n, got n={n}, k={k}"
            )));
        }
        if points_per_axis < 4 {
            return Err(GsError::domain("geometry requires N >= 4"));
        }
        if interior_levels < 3 {
            return Err(GsError::domain("geometry requires Nt >= 3"));
        }
        if !(box_len > 0.0) {
            return Err(GsError::domain("geometry requires L > 0"));
        }
        if !(lambda0 > 0.0) {
            return Err(GsError::domain("geometry requires lambda0 > 0"));
        }
        Ok(GridGeometry {
            n,
            k,
            points_per_axis,
            interior_levels,
            box_len,
            lambda0,
        })
    }

    pub fn hx(&self) -> f64 {
        self.box_len / self.points_per_axis as f64
    }

    pub fn ht(&self) -> f64 {
        1.0 / (self.interior_levels as f64 + 1.0)
    }

    pub fn spatial_points(&self) -> usize {
        self.points_per_axis.pow(self.n as u32)
    }

    /// Total time levels including the two boundary slices.
    pub fn levels(&self) -> usize {
        self.interior_levels + 2
    }

    pub fn total_points(&self) -> usize {
        self.levels() * self.spatial_points()
    }

    pub fn time_of(&self, level: usize) -> f64 {
        level as f64 * self.ht()
    }

    fn stride(&self, axis: usize) -> usize {
        self.points_per_axis.pow((self.n - 1 - axis) as u32)
    }

    /// Periodic neighbor along one axis.
    pub fn shift(&self, sp: usize, axis: usize, delta: i64) -> usize {
        let n_ax = self.points_per_axis as i64;
        let stride = self.stride(axis);
        let coord = (sp / stride) % self.points_per_axis;
        let wrapped = ((coord as i64 + delta).rem_euclid(n_ax)) as usize;
        sp - coord * stride + wrapped * stride
    }

    /// Spatial coordinates (in box units) of a flat spatial index.
    pub fn coords_of(&self, sp: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n);
        for axis in 0..self.n {
            let c = (sp / self.stride(axis)) % self.points_per_axis;
            out.push(c as f64 * self.hx());
        }
        out
    }

    /// Shift a flat index by an integer number of grid cells per axis.
    pub fn translate(&self, sp: usize, offset: &[i64]) -> usize {
        let mut out = sp;
        for (axis, &d) in offset.iter().enumerate() {
            out = self.shift(out, axis, d);
        }
        out
    }
}

/// Scalar field on the full grid (boundary levels included); spatial
/// indexing is periodic in every axis, storage is row-major with the
/// time level outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub geom: GridGeometry,
    values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn zeros(geom: GridGeometry) -> Self {
        SpaceTimeField {
            geom,
            values: vec![0.0; geom.total_points()],
        }
    }

    pub fn constant(geom: GridGeometry, c: f64) -> Self {
        SpaceTimeField {
            geom,
            values: vec![c; geom.total_points()],
        }
    }

    pub fn from_values(geom: GridGeometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geom.total_points() {
            return Err(GsError::domain("field value count does not match geometry"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GsError::domain("field contains non-finite values"));
        }
        Ok(SpaceTimeField { geom, values })
    }

    pub fn from_fn(geom: GridGeometry, f: impl Fn(usize, usize) -> f64) -> Self {
        let spatial = geom.spatial_points();
        let mut values = Vec::with_capacity(geom.total_points());
        for level in 0..geom.levels() {
            for sp in 0..spatial {
                values.push(f(level, sp));
            }
        }
        SpaceTimeField { geom, values }
    }

    #[inline]
    pub fn idx(&self, level: usize, sp: usize) -> usize {
        level * self.geom.spatial_points() + sp
    }

    #[inline]
    pub fn get(&self, level: usize, sp: usize) -> f64 {
        self.values[self.idx(level, sp)]
    }

    #[inline]
    pub fn set(&mut self, level: usize, sp: usize, v: f64) {
        let i = self.idx(level, sp);
        self.values[i] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn level_slice(&self, level: usize) -> &[f64] {
        let spatial = self.geom.spatial_points();
        &self.values[level * spatial..(level + 1) * spatial]
    }

    /// Adds alpha * v on the interior levels only (boundary data fixed).
    pub fn add_interior(&mut self, v: &[f64], alpha: f64) {
        let spatial = self.geom.spatial_points();
        debug_assert_eq!(v.len(), self.geom.interior_levels * spatial);
        for (i, dv) in v.iter().enumerate() {
            self.values[spatial + i] += alpha * dv;
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn sup_diff(&self, other: &SpaceTimeField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Pointwise minimum of self - other over the whole grid.
    pub fn min_gap(&self, other: &SpaceTimeField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(f64::INFINITY, |m, (a, b)| m.min(a - b))
    }
}

/// Values on the interior levels only, in solver ordering.
#[derive(Debug, Clone)]
pub struct InteriorField {
    pub geom: GridGeometry,
    pub values: Vec<f64>,
}

impl InteriorField {
    pub fn zeros(geom: GridGeometry) -> Self {
        InteriorField {
            geom,
            values: vec![0.0; geom.interior_levels * geom.spatial_points()],
        }
    }

    #[inline]
    pub fn get(&self, level: usize, sp: usize) -> f64 {
        debug_assert!(level >= 1);
        self.values[(level - 1) * self.geom.spatial_points() + sp]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// All discrete derivatives of u at an interior grid point.
#[derive(Debug, Clone)]
pub struct PointDerivs {
    pub value: f64,
    pub ut: f64,
    pub utt: f64,
    pub grad: Vec<f64>,
    pub grad_ut: Vec<f64>,
    pub hess: SymMatrix,
}

/// Spatial-only derivatives (valid on boundary levels too).
pub fn spatial_derivs(u: &SpaceTimeField, level: usize, sp: usize) -> (Vec<f64>, SymMatrix) {
    let g = &u.geom;
    let n = g.n;
    let hx = g.hx();
    let mut grad = vec![0.0; n];
    let mut hess = SymMatrix::zeros(n);
    let center = u.get(level, sp);
    for i in 0..n {
        let p = u.get(level, g.shift(sp, i, 1));
        let m = u.get(level, g.shift(sp, i, -1));
        grad[i] = (p - m) / (2.0 * hx);
        hess.set(i, i, (p - 2.0 * center + m) / (hx * hx));
    }
    for i in 0..n {
        for l in (i + 1)..n {
            let pp = u.get(level, g.translate(sp, &offset2(n, i, 1, l, 1)));
            let pm = u.get(level, g.translate(sp, &offset2(n, i, 1, l, -1)));
            let mp = u.get(level, g.translate(sp, &offset2(n, i, -1, l, 1)));
            let mm = u.get(level, g.translate(sp, &offset2(n, i, -1, l, -1)));
            hess.set(i, l, (pp - pm - mp + mm) / (4.0 * hx * hx));
        }
    }
    (grad, hess)
}

fn offset2(n: usize, i: usize, di: i64, l: usize, dl: i64) -> Vec<i64> {
    let mut v = vec![0i64; n];
    v[i] = di;
    v[l] = dl;
    v
}

/// Full derivative set at an interior level (1..=Nt).
pub fn derivs_at(u: &SpaceTimeField, level: usize, sp: usize) -> PointDerivs {
    let g = &u.geom;
    debug_assert!(level >= 1 && level <= g.interior_levels);
    let ht = g.ht();
    let hx = g.hx();
    let (grad, hess) = spatial_derivs(u, level, sp);
    let up = u.get(level + 1, sp);
    let um = u.get(level - 1, sp);
    let center = u.get(level, sp);
    let mut grad_ut = vec![0.0; g.n];
    for i in 0..g.n {
        let a = u.get(level + 1, g.shift(sp, i, 1));
        let b = u.get(level + 1, g.shift(sp, i, -1));
        let c = u.get(level - 1, g.shift(sp, i, 1));
        let d = u.get(level - 1, g.shift(sp, i, -1));
        grad_ut[i] = (a - b - c + d) / (4.0 * ht * hx);
    }
    PointDerivs {
        value: center,
        ut: (up - um) / (2.0 * ht),
        utt: (up - 2.0 * center + um) / (ht * ht),
        grad,
        grad_ut,
        hess,
    }
}

/// Discrete u_t with second-order one-sided stencils at the t-boundaries.
pub fn ut_at(u: &SpaceTimeField, level: usize, sp: usize) -> f64 {
    let g = &u.geom;
    let ht = g.ht();
    let last = g.levels() - 1;
    if level == 0 {
        (-3.0 * u.get(0, sp) + 4.0 * u.get(1, sp) - u.get(2, sp)) / (2.0 * ht)
    } else if level == last {
        (3.0 * u.get(last, sp) - 4.0 * u.get(last - 1, sp) + u.get(last - 2, sp)) / (2.0 * ht)
    } else {
        (u.get(level + 1, sp) - u.get(level - 1, sp)) / (2.0 * ht)
    }
}

/// Conformal Schouten tensor of the surrogate background:
/// A_u = lambda0 I + hess(u) + grad(u) (x) grad(u) - |grad(u)|^2 / 2 I.
pub fn schouten_from_parts(geom: &GridGeometry, grad: &[f64], hess: &SymMatrix) -> SymMatrix {
    let n = geom.n;
    let grad_sq: f64 = grad.iter().map(|v| v * v).sum();
    let mut a = hess.clone();
    for i in 0..n {
        a.add_to(i, i, geom.lambda0 - 0.5 * grad_sq);
        for j in i..n {
            a.add_to(i, j, grad[i] * grad[j]);
        }
    }
    a
}

/// A_u at any grid point (boundary levels use the boundary slice).
pub fn schouten_at(u: &SpaceTimeField, level: usize, sp: usize) -> SymMatrix {
    let (grad, hess) = spatial_derivs(u, level, sp);
    schouten_from_parts(&u.geom, &grad, &hess)
}

/// Pointwise operator value, cone label, and the tensor E_u.
#[derive(Debug, Clone)]
pub struct PointState {
    pub utt: f64,
    pub grad_ut: Vec<f64>,
    pub a: SymMatrix,
    pub e: SymMatrix,
    pub admissible: ConeLabel,
    /// F_k = utt sigma_k(A) - <T_{k-1}(A), grad_ut (x) grad_ut>
    pub fk: f64,
    pub sigma_k_a: f64,
}

pub fn point_state(u: &SpaceTimeField, level: usize, sp: usize) -> Result<PointState> {
    let g = &u.geom;
    if level < 1 || level > g.interior_levels {
        return Err(GsError::domain("point_state requires an interior level"));
    }
    let d = derivs_at(u, level, sp);
    let a = schouten_from_parts(g, &d.grad, &d.hess);
    let chain = newton_chain(&a, g.k)?;
    let margin = chain.sigmas[1..=g.k]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let fk = d.utt * chain.sigmas[g.k] - chain.transforms[g.k - 1].quad_form(&d.grad_ut);
    let e = a
        .scale(d.utt)
        .add_scaled(&SymMatrix::outer(&d.grad_ut), -1.0);
    Ok(PointState {
        utt: d.utt,
        grad_ut: d.grad_ut,
        a,
        e,
        admissible: ConeLabel {
            k: g.k,
            inside: margin > 0.0,
            margin,
        },
        fk,
        sigma_k_a: chain.sigmas[g.k],
    })
}

/// F_k value at one interior point.
pub fn fk_at(u: &SpaceTimeField, level: usize, sp: usize) -> Result<f64> {
    Ok(point_state(u, level, sp)?.fk)
}

/// Nonlinear residual F_k(u) - f on the interior levels.
pub fn residual(u: &SpaceTimeField, f: &SpaceTimeField) -> Result<InteriorField> {
    let g = &u.geom;
    if f.geom != *g {
        return Err(GsError::domain("residual: u and f geometries differ"));
    }
    let spatial = g.spatial_points();
    let mut out = InteriorField::zeros(*g);
    for level in 1..=g.interior_levels {
        for sp in 0..spatial {
            let st = point_state(u, level, sp)?;
            out.values[(level - 1) * spatial + sp] = st.fk - f.get(level, sp);
        }
    }
    Ok(out)
}

/// Quadratic form Q_u(Dphi, Dpsi) at one interior point; the space-time
/// gradients are passed as (phi_t, grad phi).
pub fn q_form(
    u: &SpaceTimeField,
    level: usize,
    sp: usize,
    dphi: (f64, &[f64]),
    dpsi: (f64, &[f64]),
) -> Result<f64> {
    let g = &u.geom;
    let st = point_state(u, level, sp)?;
    if !st.admissible.inside || st.utt <= 0.0 {
        return Err(GsError::InadmissiblePoint {
            level,
            spatial: sp,
            what: format!(
                "q_form needs an admissible point with utt > 0 (margin {}, utt {})",
                st.admissible.margin, st.utt
            ),
        });
    }
    let chain = newton_chain(&st.e, g.k)?;
    let t = &chain.transforms[g.k - 1];
    let (phit, gphi) = dphi;
    let (psit, gpsi) = dpsi;
    let n = g.n;
    // utt grad(phi) boxtimes grad(psi) - phi_t grad(ut) boxtimes grad(psi)
    //   - psi_t grad(ut) boxtimes grad(phi) + 2 utt^{-1} phi_t psi_t gut (x) gut
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let sym = |a: &[f64], b: &[f64]| a[i] * b[j] + a[j] * b[i];
            let mut v = st.utt * sym(gphi, gpsi);
            v -= phit * sym(&st.grad_ut, gpsi);
            v -= psit * sym(&st.grad_ut, gphi);
            v += 2.0 / st.utt * phit * psit * st.grad_ut[i] * st.grad_ut[j];
            m.set(i, j, v);
        }
    }
    Ok(st.utt.powi(1 - g.k as i32) * t.inner(&m))
}

/// Comparison field U_a = a t (1-t) + (1-t) u0 + t u1.
pub fn comparison_field(geom: GridGeometry, a: f64, u0: &[f64], u1: &[f64]) -> SpaceTimeField {
    let spatial = geom.spatial_points();
    assert_eq!(u0.len(), spatial);
    assert_eq!(u1.len(), spatial);
    SpaceTimeField::from_fn(geom, |level, sp| {
        let t = geom.time_of(level);
        a * t * (1.0 - t) + (1.0 - t) * u0[sp] + t * u1[sp]
    })
}

/// Worst admissibility data over the interior points.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AdmissibilityScan {
    pub min_cone_margin: f64,
    pub min_utt: f64,
    pub min_fk: f64,
    pub worst_point: (usize, usize),
}

pub fn admissibility_scan(u: &SpaceTimeField) -> Result<AdmissibilityScan> {
    let g = &u.geom;
    let spatial = g.spatial_points();
    let mut scan = AdmissibilityScan {
        min_cone_margin: f64::INFINITY,
        min_utt: f64::INFINITY,
        min_fk: f64::INFINITY,
        worst_point: (1, 0),
    };
    for level in 1..=g.interior_levels {
        for sp in 0..spatial {
            let st = point_state(u, level, sp)?;
            let local = st.admissible.margin.min(st.utt).min(st.fk);
            let current = scan.min_cone_margin.min(scan.min_utt).min(scan.min_fk);
            if local < current {
                scan.worst_point = (level, sp);
            }
            scan.min_cone_margin = scan.min_cone_margin.min(st.admissible.margin);
            scan.min_utt = scan.min_utt.min(st.utt);
            scan.min_fk = scan.min_fk.min(st.fk);
        }
    }
    Ok(scan)
}

/// Measured C^{1,1} suprema of a field: |grad u|, u_tt, |hess u|
/// (Frobenius), |grad u_t|, plus the minimum of u_tt.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct C11Suprema {
    pub sup_grad: f64,
    pub sup_utt: f64,
    pub sup_hess: f64,
    pub sup_grad_ut: f64,
    pub min_utt: f64,
}

pub fn c11_suprema(u: &SpaceTimeField) -> C11Suprema {
    let g = &u.geom;
    let mut out = C11Suprema {
        sup_grad: 0.0,
        sup_utt: 0.0,
        sup_hess: 0.0,
        sup_grad_ut: 0.0,
        min_utt: f64::INFINITY,
    };
    for level in 0..g.levels() {
        for sp in 0..g.spatial_points() {
            let (grad, hess) = spatial_derivs(u, level, sp);
            let gn: f64 = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut hn = 0.0;
            for i in 0..g.n {
                for j in 0..g.n {
                    hn += hess.get(i, j) * hess.get(i, j);
                }
            }
            out.sup_grad = out.sup_grad.max(gn);
            out.sup_hess = out.sup_hess.max(hn.sqrt());
        }
    }
    for level in 1..=g.interior_levels {
        for sp in 0..g.spatial_points() {
            let d = derivs_at(u, level, sp);
            out.sup_utt = out.sup_utt.max(d.utt);
            out.min_utt = out.min_utt.min(d.utt);
            let gn: f64 = d.grad_ut.iter().map(|v| v * v).sum::<f64>().sqrt();
            out.sup_grad_ut = out.sup_grad_ut.max(gn);
        }
    }
    out
}

/// Checks that a boundary slice is admissible (A_u in Gamma_k^+) at the
/// given level (0 or Nt+1).
pub fn boundary_cone_margin(u: &SpaceTimeField, level: usize) -> f64 {
    let g = &u.geom;
    let mut margin = f64::INFINITY;
    for sp in 0..g.spatial_points() {
        let a = schouten_at(u, level, sp);
        let sigs = crate::symk::sigma_chain_matrix(&a, g.k).unwrap();
        let m = sigs[1..=g.k].iter().copied().fold(f64::INFINITY, f64::min);
        margin = margin.min(m);
    }
    margin
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symk::rel_close;
    use std::f64::consts::PI;

    fn small_geom() -> GridGeometry {
        GridGeometry::new(2, 1, 16, 7, 2.0 * PI, 0.5).unwrap()
    }

    #[test]
    fn geometry_validation() {
        assert!(GridGeometry::new(3, 2, 16, 7, 1.0, 0.5).is_err()); // 2k > n
        assert!(GridGeometry::new(2, 1, 3, 7, 1.0, 0.5).is_err());
        assert!(GridGeometry::new(2, 1, 16, 2, 1.0, 0.5).is_err());
        assert!(GridGeometry::new(2, 1, 16, 7, 1.0, -0.5).is_err());
        assert!(GridGeometry::new(4, 2, 8, 7, 1.0, 0.5).is_ok());
    }

    #[test]
    fn periodic_shift_wraps() {
        let g = small_geom();
        let sp = 0usize;
        assert_eq!(g.shift(sp, 0, -1), 15 * 16);
        assert_eq!(g.shift(sp, 1, -1), 15);
        assert_eq!(g.shift(g.shift(sp, 0, 1), 0, -1), sp);
    }

    #[test]
    fn schouten_constant_field() {
        let g = small_geom();
        let u = SpaceTimeField::constant(g, 3.7);
        for level in [0, 3, g.levels() - 1] {
            let a = schouten_at(&u, level, 5);
            for i in 0..g.n {
                for j in 0..g.n {
                    let want = if i == j { g.lambda0 } else { 0.0 };
                    assert!((a.get(i, j) - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn schouten_single_mode_analytic() {
        // u = eps cos(2 pi x1 / L): A_u = lambda0 I
        //   + diag(-eps w^2 cos(w x1), 0) + gradient terms of order eps^2.
        let g = small_geom();
        let w = 2.0 * PI / g.box_len;
        let eps = 1e-3;
        let u = SpaceTimeField::from_fn(g, |_, sp| {
            let x = g.coords_of(sp);
            eps * (w * x[0]).cos()
        });
        let hx = g.hx();
        for sp in [0usize, 37, 100] {
            let x = g.coords_of(sp);
            let a = schouten_at(&u, 2, sp);
            let ux = -eps * w * (w * x[0]).sin();
            let uxx = -eps * w * w * (w * x[0]).cos();
            let tol = 2.0 * (hx * hx * eps + eps * eps);
            assert!((a.get(0, 0) - (g.lambda0 + uxx + ux * ux - 0.5 * ux * ux)).abs() < tol);
            assert!((a.get(1, 1) - (g.lambda0 - 0.5 * ux * ux)).abs() < tol);
            assert!(a.get(0, 1).abs() < tol);
        }
    }

    #[test]
    fn schouten_refinement_order() {
        // discrete A_u converges to the analytic Schouten at observed
        // order >= 1.9 under grid refinement
        let err_at = |npts: usize| -> f64 {
            let g = GridGeometry::new(2, 1, npts, 5, 2.0 * PI, 0.5).unwrap();
            let u = SpaceTimeField::from_fn(g, |_, sp| {
                let x = g.coords_of(sp);
                0.3 * (x[0]).sin() * (2.0 * x[1]).cos()
            });
            let mut worst = 0.0_f64;
            for sp in 0..g.spatial_points() {
                let x = g.coords_of(sp);
                let (s, c) = (x[0].sin(), x[0].cos());
                let (s2, c2) = ((2.0 * x[1]).sin(), (2.0 * x[1]).cos());
                let grad = [0.3 * c * c2, -0.6 * s * s2];
                let hess = [
                    [-0.3 * s * c2, -0.6 * c * s2],
                    [-0.6 * c * s2, -1.2 * s * c2],
                ];
                let gsq = grad[0] * grad[0] + grad[1] * grad[1];
                let a = schouten_at(&u, 2, sp);
                for i in 0..2 {
                    for j in 0..2 {
                        let want = hess[i][j]
                            + grad[i] * grad[j]
                            + if i == j { g.lambda0 - 0.5 * gsq } else { 0.0 };
                        worst = worst.max((a.get(i, j) - want).abs());
                    }
                }
            }
            worst
        };
        let e16 = err_at(16);
        let e32 = err_at(32);
        let order = (e16 / e32).log2();
        assert!(order >= 1.9, "observed order {order} ({e16} -> {e32})");
    }

    #[test]
    fn residual_homogeneous_case() {
        // spatially constant U_a with u0 = u1 = 0: residual = -2a lam0^k C(n,k) - f
        let g = small_geom();
        let spatial = g.spatial_points();
        let a = -0.8; // utt = -2a = 1.6 > 0
        let u = comparison_field(g, a, &vec![0.0; spatial], &vec![0.0; spatial]);
        let f = SpaceTimeField::constant(g, 1.0);
        let res = residual(&u, &f).unwrap();
        let want = -2.0 * a * g.lambda0 * 2.0 - 1.0; // n=2, k=1: sigma_1(lam0 I) = 2 lam0
        for v in &res.values {
            assert!(rel_close(*v, want, 1e-12), "{v} vs {want}");
        }
    }

    #[test]
    fn residual_manufactured_is_zero() {
        // f := F_k(u*) computed on-grid makes the residual vanish identically
        let g = small_geom();
        let u = SpaceTimeField::from_fn(g, |level, sp| {
            let t = g.time_of(level);
            let x = g.coords_of(sp);
            0.5 * t * t + 0.01 * (PI * t).sin() * x[0].cos()
        });
        let mut f = SpaceTimeField::zeros(g);
        for level in 1..=g.interior_levels {
            for sp in 0..g.spatial_points() {
                let v = fk_at(&u, level, sp).unwrap();
                f.set(level, sp, v);
            }
        }
        let res = residual(&u, &f).unwrap();
        assert!(res.sup_norm() < 1e-14);
    }

    #[test]
    fn comparison_field_cases() {
        let g = small_geom();
        let spatial = g.spatial_points();
        let u0: Vec<f64> = (0..spatial).map(|sp| g.coords_of(sp)[0].cos() * 0.1).collect();
        let u1: Vec<f64> = (0..spatial).map(|sp| g.coords_of(sp)[1].sin() * 0.2).collect();
        // a = 0: linear interpolation, boundary slices exact
        let u = comparison_field(g, 0.0, &u0, &u1);
        assert_eq!(u.level_slice(0), &u0[..]);
        assert_eq!(u.level_slice(g.levels() - 1), &u1[..]);
        // (U_a)_tt = -2a exactly in the discrete second difference
        let ua = comparison_field(g, -1.0, &u0, &u1);
        for level in 1..=g.interior_levels {
            let d = derivs_at(&ua, level, 3);
            assert!(rel_close(d.utt, 2.0, 1e-10), "utt = {}", d.utt);
        }
        // sign check at the midpoint: U_{-1}(1/2) = -1/4 for zero boundary
        let um = comparison_field(g, -1.0, &vec![0.0; spatial], &vec![0.0; spatial]);
        let mid = (g.levels() - 1) / 2;
        assert!((um.get(mid, 0) - (-0.25)).abs() < 0.01);
    }

    #[test]
    fn admissibility_scan_cases() {
        let g = small_geom();
        let spatial = g.spatial_points();
        let zero = vec![0.0; spatial];
        // u == 0: A_u = lam0 I in the cone, utt = 0, F_k = 0 (cone boundary)
        let u = SpaceTimeField::zeros(g);
        let scan = admissibility_scan(&u).unwrap();
        assert!(rel_close(scan.min_cone_margin, g.lambda0 * 2.0, 1e-12)); // sigma_1 = 2 lam0
        assert_eq!(scan.min_utt, 0.0);
        assert_eq!(scan.min_fk, 0.0);
        // U_a with a < 0 (so utt = -2a > 0): all margins positive
        let ua = comparison_field(g, -0.7, &zero, &zero);
        let scan = admissibility_scan(&ua).unwrap();
        assert!(scan.min_cone_margin > 0.0);
        assert!(rel_close(scan.min_utt, 1.4, 1e-10));
        assert!(scan.min_fk > 0.0);
    }

    #[test]
    fn translation_equivariance() {
        let g = small_geom();
        let u = SpaceTimeField::from_fn(g, |level, sp| {
            let t = g.time_of(level);
            let x = g.coords_of(sp);
            0.4 * t * t + 0.02 * (x[0] + 0.5 * x[1]).sin() * (PI * t).sin()
        });
        let f = SpaceTimeField::constant(g, 0.3);
        let res = residual(&u, &f).unwrap();
        let shift = [3i64, 5i64];
        let shifted = SpaceTimeField::from_fn(g, |level, sp| u.get(level, g.translate(sp, &shift)));
        let res_shifted = residual(&shifted, &f).unwrap();
        let spatial = g.spatial_points();
        for level in 1..=g.interior_levels {
            for sp in 0..spatial {
                let a = res_shifted.values[(level - 1) * spatial + sp];
                let b = res.values[(level - 1) * spatial + g.translate(sp, &shift)];
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn gauge_invariance() {
        // u -> u - c1 t - c2 leaves the residual unchanged
        let g = small_geom();
        let u = SpaceTimeField::from_fn(g, |level, sp| {
            let t = g.time_of(level);
            let x = g.coords_of(sp);
            0.4 * t * t + 0.02 * x[0].cos() * (PI * t).sin()
        });
        let f = SpaceTimeField::constant(g, 0.3);
        let gauged = SpaceTimeField::from_fn(g, |level, sp| {
            let t = g.time_of(level);
            u.get(level, sp) - 1.3 * t - 0.7
        });
        let ra = residual(&u, &f).unwrap();
        let rb = residual(&gauged, &f).unwrap();
        for (a, b) in ra.values.iter().zip(&rb.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn schouten_linearization_consistency() {
        // L_A(v) = hess v + grad u boxtimes grad v - <grad u, grad v> g
        // equals the symmetric difference of A_{u +/- eps v}; A is
        // quadratic in grad u, so the agreement is exact up to roundoff.
        let g = small_geom();
        let u = SpaceTimeField::from_fn(g, |level, sp| {
            let t = g.time_of(level);
            let x = g.coords_of(sp);
            0.4 * t * t + 0.05 * x[0].cos() * (PI * t).sin()
        });
        let v = SpaceTimeField::from_fn(g, |level, sp| {
            let t = g.time_of(level);
            let x = g.coords_of(sp);
            0.3 * (x[1] + 0.2).sin() * (1.0 + t)
        });
        let eps = 0.05;
        let up = SpaceTimeField::from_fn(g, |l, s| u.get(l, s) + eps * v.get(l, s));
        let um = SpaceTimeField::from_fn(g, |l, s| u.get(l, s) - eps * v.get(l, s));
        for &(level, sp) in &[(1usize, 3usize), (3, 77), (5, 200)] {
            let (gu, _) = spatial_derivs(&u, level, sp);
            let (gv, hv) = spatial_derivs(&v, level, sp);
            let dot: f64 = gu.iter().zip(&gv).map(|(a, b)| a * b).sum();
            let mut want = hv.clone();
            for i in 0..g.n {
                want.add_to(i, i, -dot);
                for j in i..g.n {
                    want.add_to(i, j, gu[i] * gv[j] + gu[j] * gv[i]);
                }
            }
            let ap = schouten_at(&up, level, sp);
            let am = schouten_at(&um, level, sp);
            for i in 0..g.n {
                for j in 0..g.n {
                    let fd = (ap.get(i, j) - am.get(i, j)) / (2.0 * eps);
                    assert!(
                        (fd - want.get(i, j)).abs() < 1e-12,
                        "({level},{sp}) entry ({i},{j}): {fd} vs {}",
                        want.get(i, j)
                    );
                }
            }
        }
    }

    #[test]
    fn q_form_zero_and_symmetric_routes() {
        let g = small_geom();
        let spatial = g.spatial_points();
        let zero = vec![0.0; spatial];
        let u = comparison_field(g, -0.7, &zero, &zero);
        // grad(phi) = 0 and grad_ut = 0: Q vanishes
        let q = q_form(&u, 2, 5, (1.3, &[0.0, 0.0]), (1.3, &[0.0, 0.0])).unwrap();
        assert_eq!(q, 0.0);
        // Q(Dphi, Dphi) against the Y (x) Y route on a generic field
        let ug = SpaceTimeField::from_fn(g, |level, sp| {
            let t = g.time_of(level);
            let x = g.coords_of(sp);
            0.5 * t * t + 0.02 * x[0].cos() * (PI * t).sin() + 0.01 * x[1].sin() * t
        });
        let dphi_t = 0.8;
        let dphi_x = [0.3, -0.5];
        for sp in [0usize, 11, 200] {
            let level = 3;
            let q = q_form(&ug, level, sp, (dphi_t, &dphi_x), (dphi_t, &dphi_x)).unwrap();
            let st = point_state(&ug, level, sp).unwrap();
            let chain = newton_chain(&st.e, g.k).unwrap();
            let t_e = &chain.transforms[g.k - 1];
            let root = st.utt.sqrt();
            let y: Vec<f64> = (0..g.n)
                .map(|i| root * dphi_x[i] - dphi_t * st.grad_ut[i] / root)
                .collect();
            let want = 2.0 * st.utt.powi(1 - g.k as i32) * t_e.quad_form(&y);
            assert!(
                (q - want).abs() <= 1e-11 * 1.0_f64.max(q.abs()).max(want.abs()),
                "{q} vs {want}"
            );
        }
    }

    #[test]
    fn lem1_chain_on_grid() {
        // sigma_{i-1}(E) >= f_i sigma_i(A)^{-1} sigma_{i-1}(A) utt^{i-2}
        // with f_i = utt^{1-i} sigma_i(E), at every interior point of an
        // admissible state with F_k > 0; exercised at n=4, k=2.
        let g = GridGeometry::new(4, 2, 6, 5, 2.0 * PI, 0.5).unwrap();
        let u = SpaceTimeField::from_fn(g, |level, sp| {
            let t = g.time_of(level);
            let x = g.coords_of(sp);
            0.5 * t * t + 0.03 * x[0].cos() * (PI * t).sin() + 0.02 * x[2].sin() * t * (1.0 - t)
        });
        let scan = admissibility_scan(&u).unwrap();
        assert!(scan.min_cone_margin > 0.0 && scan.min_utt > 0.0 && scan.min_fk > 0.0);
        for level in 1..=g.interior_levels {
            for sp in (0..g.spatial_points()).step_by(7) {
                let st = point_state(&u, level, sp).unwrap();
                let chain_e = newton_chain(&st.e, g.k).unwrap();
                let chain_a = newton_chain(&st.a, g.k).unwrap();
                for i in 2..=g.k {
                    let f_i = st.utt.powi(1 - i as i32) * chain_e.sigmas[i];
                    let lhs = chain_e.sigmas[i - 1];
                    let rhs = f_i / chain_a.sigmas[i]
                        * chain_a.sigmas[i - 1]
                        * st.utt.powi(i as i32 - 2);
                    assert!(lhs >= rhs - 1e-12 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
                }
            }
        }
    }
}
