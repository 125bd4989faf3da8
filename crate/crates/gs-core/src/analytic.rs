//! Analytic boundary-data families and the manufactured solution used by
//! convergence studies. The manufactured field has closed-form space-time
//! derivatives, so the continuum operator value F_k(u*) is computed
//! exactly at grid points (no discretization enters the source term).

use crate::error::Result;
use crate::grid::{GridGeometry, SpaceTimeField};
use crate::symk::{newton_chain, SymMatrix};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One cosine mode: amplitude * cos(2 pi (wave . x) / L).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub amplitude: f64,
    pub wave: Vec<i32>,
}

impl Mode {
    fn phase(&self, coords: &[f64], box_len: f64) -> f64 {
        let dot: f64 = self
            .wave
            .iter()
            .zip(coords)
            .map(|(w, x)| *w as f64 * x)
            .sum();
        2.0 * PI * dot / box_len
    }

    fn wavevec(&self, box_len: f64) -> Vec<f64> {
        self.wave
            .iter()
            .map(|w| 2.0 * PI * *w as f64 / box_len)
            .collect()
    }
}

/// Boundary-data families: constant, a single cosine mode, or a sum of
/// two modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryFamily {
    Constant { value: f64 },
    Cosine { amplitude: f64, wave: Vec<i32> },
    TwoModes { first: Mode, second: Mode },
}

impl BoundaryFamily {
    pub fn modes(&self) -> Vec<Mode> {
        match self {
            BoundaryFamily::Constant { .. } => vec![],
            BoundaryFamily::Cosine { amplitude, wave } => vec![Mode {
                amplitude: *amplitude,
                wave: wave.clone(),
            }],
            BoundaryFamily::TwoModes { first, second } => vec![first.clone(), second.clone()],
        }
    }

    pub fn offset(&self) -> f64 {
        match self {
            BoundaryFamily::Constant { value } => *value,
            _ => 0.0,
        }
    }

    pub fn eval(&self, coords: &[f64], box_len: f64) -> f64 {
        self.offset()
            + self
                .modes()
                .iter()
                .map(|m| m.amplitude * m.phase(coords, box_len).cos())
                .sum::<f64>()
    }

    /// Samples the family on one spatial slice.
    pub fn sample(&self, geom: &GridGeometry) -> Vec<f64> {
        (0..geom.spatial_points())
            .map(|sp| self.eval(&geom.coords_of(sp), geom.box_len))
            .collect()
    }
}

/// Manufactured space-time solution
/// u*(t, x) = a t^2 + eps sin(pi t) sum_m cos(2 pi (w_m . x) / L)
/// with all derivatives in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manufactured {
    pub a: f64,
    pub eps: f64,
    pub waves: Vec<Vec<i32>>,
}

impl Manufactured {
    fn modes(&self) -> Vec<Mode> {
        self.waves
            .iter()
            .map(|w| Mode {
                amplitude: 1.0,
                wave: w.clone(),
            })
            .collect()
    }

    pub fn value(&self, t: f64, coords: &[f64], box_len: f64) -> f64 {
        let c: f64 = self
            .modes()
            .iter()
            .map(|m| m.phase(coords, box_len).cos())
            .sum();
        self.a * t * t + self.eps * (PI * t).sin() * c
    }

    /// Closed-form derivative bundle at one space-time point.
    pub fn derivs(&self, n: usize, t: f64, coords: &[f64], box_len: f64) -> ManufacturedDerivs {
        let st = (PI * t).sin();
        let ct = (PI * t).cos();
        let mut c_sum = 0.0;
        let mut grad_c = vec![0.0; n];
        let mut hess_c = SymMatrix::zeros(n);
        for m in self.modes() {
            let theta = m.phase(coords, box_len);
            let wv = m.wavevec(box_len);
            c_sum += theta.cos();
            for i in 0..n {
                grad_c[i] -= theta.sin() * wv[i];
                for j in i..n {
                    hess_c.add_to(i, j, -theta.cos() * wv[i] * wv[j]);
                }
            }
        }
        ManufacturedDerivs {
            value: self.a * t * t + self.eps * st * c_sum,
            ut: 2.0 * self.a * t + self.eps * PI * ct * c_sum,
            utt: 2.0 * self.a - self.eps * PI * PI * st * c_sum,
            grad: grad_c.iter().map(|g| self.eps * st * g).collect(),
            grad_ut: grad_c.iter().map(|g| self.eps * PI * ct * g).collect(),
            hess: hess_c.scale(self.eps * st),
        }
    }

    /// Continuum F_k(u*) at one point, from the analytic derivatives.
    pub fn fk(&self, geom: &GridGeometry, t: f64, coords: &[f64]) -> Result<f64> {
        let d = self.derivs(geom.n, t, coords, geom.box_len);
        let a = crate::grid::schouten_from_parts(geom, &d.grad, &d.hess);
        let chain = newton_chain(&a, geom.k)?;
        Ok(d.utt * chain.sigmas[geom.k] - chain.transforms[geom.k - 1].quad_form(&d.grad_ut))
    }

    /// u* sampled on the grid.
    pub fn field(&self, geom: GridGeometry) -> SpaceTimeField {
        SpaceTimeField::from_fn(geom, |level, sp| {
            self.value(geom.time_of(level), &geom.coords_of(sp), geom.box_len)
        })
    }

    /// Continuum F_k(u*) sampled on the grid (boundary levels included).
    pub fn source_field(&self, geom: GridGeometry) -> Result<SpaceTimeField> {
        let spatial = geom.spatial_points();
        let mut values = Vec::with_capacity(geom.total_points());
        for level in 0..geom.levels() {
            let t = geom.time_of(level);
            for sp in 0..spatial {
                values.push(self.fk(&geom, t, &geom.coords_of(sp))?);
            }
        }
        SpaceTimeField::from_values(geom, values)
    }

    pub fn boundary0(&self, geom: &GridGeometry) -> Vec<f64> {
        (0..geom.spatial_points())
            .map(|sp| self.value(0.0, &geom.coords_of(sp), geom.box_len))
            .collect()
    }

    pub fn boundary1(&self, geom: &GridGeometry) -> Vec<f64> {
        (0..geom.spatial_points())
            .map(|sp| self.value(1.0, &geom.coords_of(sp), geom.box_len))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ManufacturedDerivs {
    pub value: f64,
    pub ut: f64,
    pub utt: f64,
    pub grad: Vec<f64>,
    pub grad_ut: Vec<f64>,
    pub hess: SymMatrix,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{derivs_at, spatial_derivs};

    #[test]
    fn boundary_families_sample() {
        let g = GridGeometry::new(2, 1, 8, 3, 2.0 * PI, 0.5).unwrap();
        let c = BoundaryFamily::Constant { value: 0.3 };
        assert!(c.sample(&g).iter().all(|v| *v == 0.3));
        let cos = BoundaryFamily::Cosine {
            amplitude: 0.05,
            wave: vec![1, 0],
        };
        let s = cos.sample(&g);
        assert!((s[0] - 0.05).abs() < 1e-15);
        // periodicity: one full wavelength across the box
        assert!((s[0] - cos.eval(&[2.0 * PI, 0.0], g.box_len)).abs() < 1e-12);
    }

    #[test]
    fn manufactured_derivatives_match_discrete() {
        let g = GridGeometry::new(2, 1, 64, 63, 2.0 * PI, 0.5).unwrap();
        let m = Manufactured {
            a: 0.5,
            eps: 0.02,
            waves: vec![vec![1, 0], vec![0, 1]],
        };
        let u = m.field(g);
        let level = 20;
        let sp = 1234;
        let t = g.time_of(level);
        let x = g.coords_of(sp);
        let want = m.derivs(2, t, &x, g.box_len);
        let got = derivs_at(&u, level, sp);
        let h2 = g.hx() * g.hx() + g.ht() * g.ht();
        assert!((got.utt - want.utt).abs() < 5.0 * h2);
        assert!((got.ut - want.ut).abs() < 5.0 * h2);
        for i in 0..2 {
            assert!((got.grad[i] - want.grad[i]).abs() < 5.0 * h2);
            assert!((got.grad_ut[i] - want.grad_ut[i]).abs() < 5.0 * h2);
        }
        let (_, hess) = spatial_derivs(&u, level, sp);
        for i in 0..2 {
            for j in 0..2 {
                assert!((hess.get(i, j) - want.hess.get(i, j)).abs() < 5.0 * h2);
            }
        }
    }

    #[test]
    fn manufactured_source_is_admissible_scale() {
        let g = GridGeometry::new(2, 1, 16, 15, 2.0 * PI, 0.5).unwrap();
        let m = Manufactured {
            a: 0.5,
            eps: 0.02,
            waves: vec![vec![1, 0], vec![0, 1]],
        };
        let f = m.source_field(g).unwrap();
        // f = F_k(u*) must be strictly positive for the solve to make sense
        for level in 1..=g.interior_levels {
            for sp in 0..g.spatial_points() {
                assert!(f.get(level, sp) > 0.0);
            }
        }
    }
}
