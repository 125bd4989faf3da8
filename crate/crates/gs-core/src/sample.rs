//! Seeded random draws used by the certification campaigns and tests.
//!
//! Every draw is keyed by (seed, stream index) so campaigns can run in
//! parallel while staying bit-deterministic: sample i always sees the
//! same generator state no matter the thread schedule.

use crate::hyperbolic::BlockMatrix;
use crate::symk::{cone_test, EigenList, SymMatrix};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for stream `index` of a campaign keyed by `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Random orthogonal matrix from the QR factorization of a Gaussian
/// draw, with the sign convention fixed by R's diagonal.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; two uniforms per call keeps the stream layout simple.
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Symmetric matrix with entries uniform in [-scale, scale].
pub fn random_sym(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SymMatrix {
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set(i, j, rng.random_range(-scale..scale));
        }
    }
    m
}

/// Eigenvalue list shifted along the diagonal direction until the
/// Gamma_k^+ margin exceeds `margin`.
pub fn random_cone_eigs(rng: &mut ChaCha8Rng, n: usize, k: usize, margin: f64) -> EigenList {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    loop {
        let lam = EigenList::new(v.clone()).unwrap();
        if cone_test(&lam, k).unwrap().margin > margin {
            return lam;
        }
        for x in v.iter_mut() {
            *x += 0.25;
        }
    }
}

/// Conjugated cone sample r = Q diag(lambda) QT with margin control.
pub fn random_cone_sym(rng: &mut ChaCha8Rng, n: usize, k: usize, margin: f64) -> SymMatrix {
    let lam = random_cone_eigs(rng, n, k, margin);
    let q = random_orthogonal(rng, n);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(lam.values()));
    let m = &q * d * q.transpose();
    SymMatrix::from_dense(&m).unwrap()
}

/// Raw random block matrix with entries in [-1, 1].
pub fn random_block(rng: &mut ChaCha8Rng, n: usize) -> BlockMatrix {
    let r = random_sym(rng, n, 1.0);
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let r00 = rng.random_range(-1.0..1.0);
    BlockMatrix { r00, x, r }
}

/// Sample from the cone S = { r in Gamma_k^+, F_k(R) > 0 }: the cone part
/// is drawn with margin > 0.1, then r00 is raised until F_k clears
/// 0.01 * sigma_k(r), keeping draws away from the boundary where
/// floating-point verdicts lose meaning.
pub fn random_s_point(rng: &mut ChaCha8Rng, n: usize, k: usize) -> BlockMatrix {
    let r = random_cone_sym(rng, n, k, 0.1);
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let chain = crate::symk::newton_chain(&r, k).unwrap();
    let sigma_k_r = chain.sigmas[k];
    let pairing = chain.transforms[k - 1].quad_form(&x);
    let floor = (pairing + 0.01 * sigma_k_r.abs().max(1.0)) / sigma_k_r;
    let r00 = floor + rng.random_range(0.0..2.0);
    BlockMatrix { r00, x, r }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::eval_fk;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: Vec<f64> = {
            let mut r = rng_for(7, 3);
            (0..4).map(|_| r.random_range(0.0..1.0)).collect()
        };
        let b: Vec<f64> = {
            let mut r = rng_for(7, 3);
            (0..4).map(|_| r.random_range(0.0..1.0)).collect()
        };
        let c: Vec<f64> = {
            let mut r = rng_for(7, 4);
            (0..4).map(|_| r.random_range(0.0..1.0)).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut r = rng_for(1, 0);
        let q = random_orthogonal(&mut r, 5);
        let qtq = q.transpose() * &q;
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((qtq[(i, j)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn s_points_are_in_s() {
        for i in 0..200 {
            let mut r = rng_for(42, i);
            let n = 2 + (i as usize % 5);
            let k = 1 + (i as usize % n);
            let b = random_s_point(&mut r, n, k);
            assert!(crate::symk::cone_test_matrix(&b.r, k).unwrap().inside);
            assert!(eval_fk(&b, k).unwrap() > 0.0);
        }
    }
}
