//! Property tests for the algebraic invariants: the sigma_k convolution
//! against subset enumeration, the partial-sum identities, rank-one
//! deflation, interlacing of the q family, and the grid gauge symmetry.

use gs_core::grid::{residual, GridGeometry, SpaceTimeField};
use gs_core::hyperbolic::{check_interlacing, q_poly, shifted_sigma_poly, ROOT_TOL};
use gs_core::poly::real_roots;
use gs_core::symk::{
    elementary_all, newton_chain, rank_one_identity, sigma_k_partial, EigenList, SymMatrix,
};
use proptest::prelude::*;

fn sigma_bruteforce(values: &[f64], k: usize) -> f64 {
    fn rec(values: &[f64], k: usize, start: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let mut acc = 0.0;
        for i in start..=values.len().saturating_sub(k) {
            acc += values[i] * rec(values, k - 1, i + 1);
        }
        acc
    }
    rec(values, k, 0)
}

fn eigenlist() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 1..=8)
}

fn sym_from(n: usize, entries: &[f64]) -> SymMatrix {
    let mut m = SymMatrix::zeros(n);
    let mut it = entries.iter();
    for i in 0..n {
        for j in i..n {
            m.set(i, j, *it.next().unwrap());
        }
    }
    m
}

proptest! {
    #[test]
    fn convolution_matches_subset_enumeration(vals in eigenlist()) {
        let lam = EigenList::new(vals.clone()).unwrap();
        let e = elementary_all(&lam);
        for k in 0..=vals.len() {
            let want = sigma_bruteforce(&vals, k);
            let scale = 1.0_f64.max(want.abs()).max(e[k].abs());
            prop_assert!((e[k] - want).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn partial_sums_recover_sigma(vals in eigenlist(), k_raw in 0usize..8) {
        let n = vals.len();
        let k = k_raw % n;
        let lam = EigenList::new(vals.clone()).unwrap();
        let e = elementary_all(&lam);
        let sum: f64 = (0..n).map(|i| sigma_k_partial(&lam, k, i).unwrap()).sum();
        let scale = 1.0_f64.max(e[k].abs()) * n as f64;
        prop_assert!((sum - (n - k) as f64 * e[k]).abs() <= 1e-12 * scale);
        let sum2: f64 = (0..n).map(|i| vals[i] * sigma_k_partial(&lam, k, i).unwrap()).sum();
        let scale2 = 1.0_f64.max(e[k + 1].abs()) * n as f64 * 3.0;
        prop_assert!((sum2 - (k + 1) as f64 * e[k + 1]).abs() <= 1e-12 * scale2);
    }

    #[test]
    fn rank_one_deflation_identity(
        n in 2usize..=6,
        entries in prop::collection::vec(-1.0..1.0f64, 21),
        xs in prop::collection::vec(-1.0..1.0f64, 6),
        k_raw in 1usize..=6,
    ) {
        let a = sym_from(n, &entries);
        let x = &xs[..n];
        let k = 1 + (k_raw - 1) % n;
        let id = rank_one_identity(&a, x, k).unwrap();
        let scale = 1.0_f64.max(id.sigma_lhs.abs()).max(id.sigma_rhs.abs()) * 100.0;
        prop_assert!((id.sigma_lhs - id.sigma_rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn trace_identity_for_any_symmetric(
        n in 2usize..=6,
        entries in prop::collection::vec(-1.0..1.0f64, 21),
        k_raw in 1usize..=6,
    ) {
        let e = sym_from(n, &entries);
        let k = 1 + (k_raw - 1) % n;
        let chain = newton_chain(&e, k).unwrap();
        let lhs = chain.transforms[k - 1].inner(&e) - (k as f64 - 1.0) * chain.sigmas[k];
        let scale = 1.0_f64.max(chain.sigmas[k].abs()) * 100.0;
        prop_assert!((lhs - chain.sigmas[k]).abs() <= 1e-12 * scale);
    }

    #[test]
    fn q_family_interlaces_sigma(
        n in 2usize..=6,
        entries in prop::collection::vec(-1.0..1.0f64, 21),
        k_raw in 2usize..=6,
        i_raw in 0usize..6,
    ) {
        let r = sym_from(n, &entries);
        let k = 2 + (k_raw - 2) % (n.max(2) - 1);
        if k > n { return Ok(()); }
        let i = i_raw % n;
        let sigma_roots = real_roots(&shifted_sigma_poly(&r, k).unwrap(), ROOT_TOL).unwrap();
        let q_roots = real_roots(&q_poly(&r, i, k).unwrap(), ROOT_TOL).unwrap();
        prop_assert_eq!(sigma_roots.roots.len(), k);
        prop_assert_eq!(q_roots.roots.len(), k - 1);
        prop_assert!(check_interlacing(&q_roots, &sigma_roots, 1e-7).unwrap());
    }

    #[test]
    fn residual_is_gauge_invariant(c1 in -2.0..2.0f64, c2 in -2.0..2.0f64, amp in -0.05..0.05f64) {
        let g = GridGeometry::new(2, 1, 8, 5, 2.0 * std::f64::consts::PI, 0.5).unwrap();
        let u = SpaceTimeField::from_fn(g, |level, sp| {
            let t = g.time_of(level);
            let x = g.coords_of(sp);
            0.4 * t * t + amp * x[0].cos() * (std::f64::consts::PI * t).sin()
        });
        let f = SpaceTimeField::constant(g, 0.3);
        let gauged = SpaceTimeField::from_fn(g, |level, sp| {
            u.get(level, sp) - c1 * g.time_of(level) - c2
        });
        let ra = residual(&u, &f).unwrap();
        let rb = residual(&gauged, &f).unwrap();
        for (a, b) in ra.values.iter().zip(&rb.values) {
            prop_assert!((a - b).abs() < 1e-11);
        }
    }
}
