//! Restarted GMRES with symmetric Gauss-Seidel preconditioning for the
//! non-symmetric stencil operator (the mixed t-x terms rule out CG).

use crate::operator::LinearOperator;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinSolveConfig {
    pub rel_tol: f64,
    pub restart: usize,
    pub max_iters: usize,
    /// symmetric Gauss-Seidel applications per preconditioner call
    pub ssor_sweeps: usize,
}

impl Default for LinSolveConfig {
    fn default() -> Self {
        LinSolveConfig {
            rel_tol: 1e-12,
            restart: 30,
            max_iters: 4000,
            ssor_sweeps: 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LinSolveInfo {
    pub iterations: usize,
    pub final_rel_residual: f64,
    pub converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn precondition(op: &LinearOperator, r: &[f64], z: &mut [f64], sweeps: usize) {
    z.iter_mut().for_each(|v| *v = 0.0);
    for _ in 0..sweeps {
        op.gauss_seidel_sweep(r, z, false);
        op.gauss_seidel_sweep(r, z, true);
    }
}

/// Right-preconditioned GMRES(m): solves op * x = b in place, starting
/// from the passed x.
pub fn gmres(op: &LinearOperator, b: &[f64], x: &mut [f64], cfg: &LinSolveConfig) -> LinSolveInfo {
    let n = b.len();
    let b_norm = norm(b).max(f64::MIN_POSITIVE);
    let m = cfg.restart.max(2);
    let mut iterations = 0;

    let mut r = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut z = vec![0.0; n];

    loop {
        // r = b - A x
        op.apply(x, &mut scratch);
        for i in 0..n {
            r[i] = b[i] - scratch[i];
        }
        let beta = norm(&r);
        let mut rel = beta / b_norm;
        if rel <= cfg.rel_tol || iterations >= cfg.max_iters {
            return LinSolveInfo {
                iterations,
                final_rel_residual: rel,
                converged: rel <= cfg.rel_tol,
            };
        }

        // Arnoldi with Givens least squares
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut h = vec![vec![0.0_f64; m]; m + 1];
        let mut cs = vec![0.0_f64; m];
        let mut sn = vec![0.0_f64; m];
        let mut g = vec![0.0_f64; m + 1];
        g[0] = beta;
        let mut inner_cols = 0;

        for j in 0..m {
            iterations += 1;
            inner_cols = j + 1;
            precondition(op, &basis[j], &mut z, cfg.ssor_sweeps);
            op.apply(&z, &mut scratch);
            let mut w = scratch.clone();
            for (i, q) in basis.iter().enumerate() {
                let hij: f64 = w.iter().zip(q.iter()).map(|(a, b)| a * b).sum();
                h[i][j] = hij;
                for (wi, qi) in w.iter_mut().zip(q.iter()) {
                    *wi -= hij * qi;
                }
            }
            let hj1 = norm(&w);
            h[j + 1][j] = hj1;
            if hj1 > 0.0 {
                basis.push(w.iter().map(|v| v / hj1).collect());
            } else {
                basis.push(vec![0.0; n]);
            }
            // apply stored rotations to column j
            for i in 0..j {
                let hi = h[i][j];
                let hi1 = h[i + 1][j];
                h[i][j] = cs[i] * hi + sn[i] * hi1;
                h[i + 1][j] = -sn[i] * hi + cs[i] * hi1;
            }
            // new rotation
            let denom = (h[j][j] * h[j][j] + h[j + 1][j] * h[j + 1][j]).sqrt();
            if denom > 0.0 {
                cs[j] = h[j][j] / denom;
                sn[j] = h[j + 1][j] / denom;
            } else {
                cs[j] = 1.0;
                sn[j] = 0.0;
            }
            h[j][j] = cs[j] * h[j][j] + sn[j] * h[j + 1][j];
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            rel = g[j + 1].abs() / b_norm;
            if rel <= cfg.rel_tol || iterations >= cfg.max_iters || hj1 == 0.0 {
                break;
            }
        }

        // back substitution
        let cols = inner_cols;
        let mut y = vec![0.0_f64; cols];
        for i in (0..cols).rev() {
            let mut acc = g[i];
            for l in i + 1..cols {
                acc -= h[i][l] * y[l];
            }
            y[i] = if h[i][i] != 0.0 { acc / h[i][i] } else { 0.0 };
        }
        // x += M^{-1} (V y)
        scratch.iter_mut().for_each(|v| *v = 0.0);
        for (j, yj) in y.iter().enumerate() {
            for (si, bi) in scratch.iter_mut().zip(basis[j].iter()) {
                *si += yj * bi;
            }
        }
        precondition(op, &scratch, &mut z, cfg.ssor_sweeps);
        for (xi, zi) in x.iter_mut().zip(z.iter()) {
            *xi += zi;
        }
    }
}
