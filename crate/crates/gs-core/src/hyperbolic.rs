//! Hyperbolic-polynomial certificates for the block operator
//! F_k(R) = r00 sigma_k(r) - <T_{k-1}(r), x (x) x>.
//!
//! Builds p_{k+1}(t) = F_k(R + tI), the shifted polynomial sigma_k(r + tI),
//! and the q_{i,k} family; certifies real-rootedness, interlacing, and root
//! localization via companion-matrix eigenvalues; probes concavity of
//! F_k^{1/(k+1)} along segments of the cone S = { r in Gamma_k^+, F_k > 0 };
//! and evaluates the quadratic-form and matrix inequalities used by the
//! interior estimates.

use crate::error::{GsError, Result};
use crate::poly::{real_roots, RealPoly, RootList};
use crate::symk::{
    binomial, cone_test_matrix, elementary_all, newton_chain, rotate_into_basis, EigenList,
    SymMatrix,
};
use serde::Serialize;

/// Default realization threshold for companion-matrix roots.
pub const ROOT_TOL: f64 = 1e-8;

/// Symmetric (n+1) x (n+1) block matrix R = [[r00, x], [xT, r]].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    pub r00: f64,
    pub x: Vec<f64>,
    pub r: SymMatrix,
}

impl BlockMatrix {
    pub fn new(r00: f64, x: Vec<f64>, r: SymMatrix) -> Result<Self> {
        if x.len() != r.dim() {
            return Err(GsError::domain("block matrix: x and r dimensions differ"));
        }
        Ok(BlockMatrix { r00, x, r })
    }

    pub fn dim(&self) -> usize {
        self.r.dim()
    }

    pub fn identity(n: usize) -> Self {
        BlockMatrix {
            r00: 1.0,
            x: vec![0.0; n],
            r: SymMatrix::identity(n),
        }
    }

    /// Full (n+1) x (n+1) symmetric assembly.
    pub fn assemble(&self) -> SymMatrix {
        let n = self.dim();
        let mut m = SymMatrix::zeros(n + 1);
        m.set(0, 0, self.r00);
        for i in 0..n {
            m.set(0, i + 1, self.x[i]);
            for j in i..n {
                m.set(i + 1, j + 1, self.r.get(i, j));
            }
        }
        m
    }

    pub fn scale(&self, c: f64) -> Self {
        BlockMatrix {
            r00: c * self.r00,
            x: self.x.iter().map(|v| c * v).collect(),
            r: self.r.scale(c),
        }
    }

    /// tau * self + (1 - tau) * other
    pub fn lerp(&self, other: &BlockMatrix, tau: f64) -> Self {
        BlockMatrix {
            r00: tau * self.r00 + (1.0 - tau) * other.r00,
            x: self
                .x
                .iter()
                .zip(&other.x)
                .map(|(a, b)| tau * a + (1.0 - tau) * b)
                .collect(),
            r: self.r.scale(tau).add_scaled(&other.r, 1.0 - tau),
        }
    }

    /// R + tI on the full block (shifts r00 and the diagonal of r).
    pub fn shift(&self, t: f64) -> Self {
        let n = self.dim();
        let mut r = self.r.clone();
        for i in 0..n {
            r.add_to(i, i, t);
        }
        BlockMatrix {
            r00: self.r00 + t,
            x: self.x.clone(),
            r,
        }
    }
}

/// F_k(R) = r00 sigma_k(r) - xT T_{k-1}(r) x.
pub fn eval_fk(block: &BlockMatrix, k: usize) -> Result<f64> {
    let n = block.dim();
    if k < 1 || k > n {
        return Err(GsError::domain(format!(
            "eval_fk needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let chain = newton_chain(&block.r, k)?;
    Ok(block.r00 * chain.sigmas[k] - chain.transforms[k - 1].quad_form(&block.x))
}

/// Coefficients of t -> sigma_k(r + tI): degree k with leading C(n, k).
/// Uses sigma_k(r + tI) = sum_j C(n-j, k-j) sigma_j(r) t^{k-j}.
pub fn shifted_sigma_poly(r: &SymMatrix, k: usize) -> Result<RealPoly> {
    let n = r.dim();
    if k < 1 || k > n {
        return Err(GsError::domain(format!(
            "shifted_sigma_poly needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let sigs = crate::symk::sigma_chain_matrix(r, k)?;
    Ok(shifted_sigma_from_elementary(&sigs, n, k))
}

fn shifted_sigma_from_elementary(sigs: &[f64], n: usize, k: usize) -> RealPoly {
    let mut coeffs = vec![0.0; k + 1];
    for j in 0..=k {
        coeffs[k - j] = binomial(n - j, k - j) * sigs[j];
    }
    RealPoly::new(coeffs)
}

/// pi_n(t) = prod_i (t + r_i) from the eigenvalues of r.
pub fn pi_poly(eigs: &EigenList) -> RealPoly {
    RealPoly::from_roots(&eigs.values().iter().map(|v| -v).collect::<Vec<_>>())
}

/// Second construction route: sigma_k(r + tI) = pi_n^{(n-k)} / (n-k)!.
pub fn shifted_sigma_poly_via_pi(r: &SymMatrix, k: usize) -> Result<RealPoly> {
    let n = r.dim();
    if k < 1 || k > n {
        return Err(GsError::domain("shifted_sigma_poly_via_pi: bad k"));
    }
    let pi = pi_poly(&r.eigenvalues());
    Ok(pi.nth_derivative(n - k).scale(1.0 / factorial(n - k)))
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product::<f64>().max(1.0)
}

/// q_{i,k}(t) = sum_{0<=j<=k-1} (-1)^j sigma_{k-1-j}(r + tI) (t + r_i)^j
/// built from the eigenvalue list directly (r diagonalized internally).
fn q_poly_from_eigs(eigs: &EigenList, i: usize, k: usize) -> RealPoly {
    let n = eigs.dim();
    let e = elementary_all(eigs);
    let mut shifted: Vec<RealPoly> = Vec::with_capacity(k);
    for m in 0..k {
        shifted.push(if m == 0 {
            RealPoly::constant(1.0)
        } else {
            shifted_sigma_from_elementary(&e, n, m)
        });
    }
    let base = RealPoly::new(vec![eigs.values()[i], 1.0]); // t + r_i
    let mut power = RealPoly::constant(1.0);
    let mut acc = RealPoly::zero();
    for j in 0..k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc.add(&shifted[k - 1 - j].mul(&power).scale(sign));
        power = power.mul(&base);
    }
    acc
}

/// q_{i,k} by the alternating-sum definition; `i` indexes the ascending
/// eigenvalues of r.
pub fn q_poly(r: &SymMatrix, i: usize, k: usize) -> Result<RealPoly> {
    let n = r.dim();
    if i >= n {
        return Err(GsError::domain("q_poly: eigenvalue index out of range"));
    }
    if k < 1 || k > n {
        return Err(GsError::domain("q_poly needs 1 <= k <= n"));
    }
    Ok(q_poly_from_eigs(&r.eigenvalues(), i, k))
}

/// Second route: q_{i,k} = pi_{i,n}^{(n-k)} / (n-k)!.
pub fn q_poly_via_pi(r: &SymMatrix, i: usize, k: usize) -> Result<RealPoly> {
    let n = r.dim();
    if i >= n || k < 1 || k > n {
        return Err(GsError::domain("q_poly_via_pi: bad index"));
    }
    let eigs = r.eigenvalues();
    let reduced: Vec<f64> = eigs
        .values()
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, v)| -v)
        .collect();
    let pi_i = RealPoly::from_roots(&reduced);
    Ok(pi_i.nth_derivative(n - k).scale(1.0 / factorial(n - k)))
}

/// p_{k+1}, the q family (in the ascending eigenbasis), and the
/// eigenvalues of r; shared by `p_poly` and `certify_theorem`.
struct PolyAssembly {
    p: RealPoly,
    sigma: RealPoly,
    q_leads: Vec<f64>,
    eigs: EigenList,
}

fn assemble_p(block: &BlockMatrix, k: usize) -> Result<PolyAssembly> {
    let n = block.dim();
    if k < 1 || k > n {
        return Err(GsError::domain(format!(
            "p_poly needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let (eigs, basis) = block.r.eigen();
    let xr = rotate_into_basis(&basis, &block.x);
    let e = elementary_all(&eigs);
    let sigma = shifted_sigma_from_elementary(&e, n, k);
    let mut p = sigma.mul(&RealPoly::new(vec![block.r00, 1.0]));
    let mut q_leads = Vec::with_capacity(n);
    for i in 0..n {
        let q = q_poly_from_eigs(&eigs, i, k);
        q_leads.push(q.leading());
        p = p.add(&q.scale(-xr[i] * xr[i]));
    }
    Ok(PolyAssembly {
        p,
        sigma,
        q_leads,
        eigs,
    })
}

/// p_{k+1}(t) = F_k(R + tI) as an explicit polynomial of degree k+1.
pub fn p_poly(block: &BlockMatrix, k: usize) -> Result<RealPoly> {
    Ok(assemble_p(block, k)?.p)
}

/// Minimal weave slack for "g interlaces f". Roots ascending; degrees may
/// differ by at most one (with deg f = deg g + 1 in the offset case).
pub fn interlacing_slack(g: &RootList, f: &RootList) -> Result<f64> {
    let v = &g.roots;
    let u = &f.roots;
    let mut slack = f64::INFINITY;
    if u.len() == v.len() {
        // v_1 <= u_1 <= v_2 <= u_2 <= ... <= v_m <= u_m
        for i in 0..u.len() {
            slack = slack.min(u[i] - v[i]);
            if i + 1 < v.len() {
                slack = slack.min(v[i + 1] - u[i]);
            }
        }
    } else if u.len() == v.len() + 1 {
        // u_1 <= v_1 <= u_2 <= ... <= v_m <= u_{m+1}
        for i in 0..v.len() {
            slack = slack.min(v[i] - u[i]);
            slack = slack.min(u[i + 1] - v[i]);
        }
    } else {
        return Err(GsError::domain(format!(
            "interlacing: degree gap must be <= 1, got {} vs {}",
            u.len(),
            v.len()
        )));
    }
    Ok(slack)
}

/// Weak interlacing test with slack tolerance scaled by the root magnitude.
pub fn check_interlacing(g: &RootList, f: &RootList, tol: f64) -> Result<bool> {
    let slack = interlacing_slack(g, f)?;
    let scale = f
        .roots
        .iter()
        .chain(g.roots.iter())
        .fold(1.0_f64, |m, r| m.max(r.abs()));
    Ok(slack >= -tol * scale)
}

/// Per-draw verdicts for the real-rootedness/interlacing/localization
/// theorem, with the numeric slacks that produced them.
#[derive(Debug, Clone, Serialize)]
pub struct CertOutcome {
    pub real_rooted: bool,
    pub interlaced: bool,
    /// Interior roots alpha_i, 2 <= i <= k-1 (the printed index range).
    pub localized_literal: bool,
    /// Wider reading 2 <= i <= k.
    pub localized_wide: bool,
    pub max_imag_rel: f64,
    pub interlace_slack: f64,
    pub loc_slack_literal: f64,
    pub loc_slack_wide: f64,
    pub lead_p: f64,
    pub min_lead_q: f64,
}

/// Certify one draw of Theorem-style structure: p_{k+1} real rooted with
/// k+1 roots, separated by the k roots of sigma_k(r + tI), interior roots
/// inside the eigenvalue hull [min(-r_j), max(-r_j)].
pub fn certify_theorem(block: &BlockMatrix, k: usize) -> Result<CertOutcome> {
    let asm = assemble_p(block, k)?;
    let roots_p = real_roots(&asm.p, ROOT_TOL)?;
    let roots_sigma = real_roots(&asm.sigma, ROOT_TOL)?;
    let scale = roots_p
        .roots
        .iter()
        .fold(1.0_f64, |m, r| m.max(r.abs()));
    let real_rooted = roots_p.roots.len() == k + 1;
    let max_imag_rel = roots_p.max_imag / (1.0 + scale);

    let (interlaced, interlace_slack) = if real_rooted && roots_sigma.roots.len() == k {
        let slack = interlacing_slack(&roots_sigma, &roots_p)?;
        (slack >= -ROOT_TOL * scale, slack)
    } else {
        (false, f64::NEG_INFINITY)
    };

    let lo = -asm.eigs.values().last().copied().unwrap();
    let hi = -asm.eigs.values().first().copied().unwrap();
    let localization = |from: usize, to: usize| -> f64 {
        // 1-based indices into the ascending roots of p
        let mut slack = f64::INFINITY;
        for i in from..=to {
            if i >= 1 && i <= roots_p.roots.len() {
                let a = roots_p.roots[i - 1];
                slack = slack.min(a - lo).min(hi - a);
            }
        }
        slack
    };
    let loc_slack_literal = if k >= 3 {
        localization(2, k - 1)
    } else {
        f64::INFINITY
    };
    let loc_slack_wide = if k >= 2 {
        localization(2, k)
    } else {
        f64::INFINITY
    };

    let min_lead_q = asm
        .q_leads
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(CertOutcome {
        real_rooted,
        interlaced,
        localized_literal: !real_rooted || loc_slack_literal >= -ROOT_TOL * scale,
        localized_wide: !real_rooted || loc_slack_wide >= -ROOT_TOL * scale,
        max_imag_rel,
        interlace_slack,
        loc_slack_literal,
        loc_slack_wide,
        lead_p: asm.p.leading(),
        min_lead_q,
    })
}

/// Membership in S = { r in Gamma_k^+, F_k(R) > 0 } with raw margins.
pub fn s_membership(block: &BlockMatrix, k: usize) -> Result<(bool, f64, f64)> {
    let label = cone_test_matrix(&block.r, k)?;
    let fk = eval_fk(block, k)?;
    Ok((label.inside && fk > 0.0, label.margin, fk))
}

/// Segment probe of the concavity of F_k^{1/(k+1)} on S.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConcavityProbe {
    /// min over tau of F^{1/(k+1)}(blend) - blended endpoint values
    pub slack_min: f64,
    /// whether every sampled blend stayed in S
    pub segment_in_s: bool,
    pub min_cone_margin: f64,
    pub min_fk: f64,
}

/// Samples tau on a uniform grid (plus the midpoint) along the segment
/// from Rb (tau = 0) to Ra (tau = 1). Endpoints outside S are a domain
/// error; interior departures are reported, not raised.
pub fn concavity_probe(
    ra: &BlockMatrix,
    rb: &BlockMatrix,
    k: usize,
    samples: usize,
) -> Result<ConcavityProbe> {
    if ra.dim() != rb.dim() {
        return Err(GsError::domain("concavity_probe: dimension mismatch"));
    }
    let (in_a, _, fa) = s_membership(ra, k)?;
    let (in_b, _, fb) = s_membership(rb, k)?;
    if !in_a || !in_b {
        return Err(GsError::domain(
            "concavity_probe: both endpoints must lie in S",
        ));
    }
    let pow = 1.0 / (k as f64 + 1.0);
    let ga = fa.powf(pow);
    let gb = fb.powf(pow);
    let m = samples.max(3);
    let mut taus: Vec<f64> = (0..m).map(|j| j as f64 / (m - 1) as f64).collect();
    taus.push(0.5);
    let mut probe = ConcavityProbe {
        slack_min: f64::INFINITY,
        segment_in_s: true,
        min_cone_margin: f64::INFINITY,
        min_fk: f64::INFINITY,
    };
    for tau in taus {
        let blend = ra.lerp(rb, tau);
        let (inside, margin, fk) = s_membership(&blend, k)?;
        probe.min_cone_margin = probe.min_cone_margin.min(margin);
        probe.min_fk = probe.min_fk.min(fk);
        if !inside {
            probe.segment_in_s = false;
            probe.slack_min = f64::NEG_INFINITY;
            continue;
        }
        let slack = fk.powf(pow) - (tau * ga + (1.0 - tau) * gb);
        probe.slack_min = probe.slack_min.min(slack);
    }
    Ok(probe)
}

/// LHS - RHS of the quadratic-form inequality
/// `<T_{k-1}(E), |grad|^2/2 g - grad (x) grad> >=
/// (n-2k)(n-k+1)/(2n) sigma_{k-1}(E) |grad|^2`,
/// valid for n >= 2k and E in Gamma_k^+.
pub fn lem2_slack(e: &SymMatrix, phi_grad: &[f64], k: usize) -> Result<f64> {
    let n = e.dim();
    if phi_grad.len() != n {
        return Err(GsError::domain("lem2_slack: dimension mismatch"));
    }
    if n < 2 * k {
        return Err(GsError::domain(format!(
            "lem2_slack requires n >= 2k, got n={n}, k={k}"
        )));
    }
    if !cone_test_matrix(e, k)?.inside {
        return Err(GsError::domain("lem2_slack: E must lie in Gamma_k^+"));
    }
    let (eigs, basis) = e.eigen();
    let g = rotate_into_basis(&basis, phi_grad);
    let grad_sq: f64 = g.iter().map(|v| v * v).sum();
    let mut lhs = 0.0;
    for i in 0..n {
        let partial = crate::symk::sigma_k_partial(&eigs, k - 1, i)?;
        lhs += partial * (grad_sq / 2.0 - g[i] * g[i]);
    }
    let sig_km1 = crate::symk::sigma_k(&eigs, k - 1)?;
    let nf = n as f64;
    let kf = k as f64;
    let rhs = (nf - 2.0 * kf) * (nf - kf + 1.0) / (2.0 * nf) * sig_km1 * grad_sq;
    Ok(lhs - rhs)
}

/// Minimum eigenvalue of T_{k-1}(A) Ric(A) - (n-1) sigma_k(A) I at the
/// critical size n = 2k, with Ric(A) = (n-2)A + sigma_1(A) g. All three
/// matrices commute, so the value is computed in A's eigenbasis.
pub fn andrews_matrix_slack(a: &SymMatrix, k: usize) -> Result<f64> {
    let n = a.dim();
    if n != 2 * k {
        return Err(GsError::domain(format!(
            "andrews_matrix_slack requires n = 2k, got n={n}, k={k}"
        )));
    }
    if !cone_test_matrix(a, k)?.inside {
        return Err(GsError::domain(
            "andrews_matrix_slack: A must lie in Gamma_k^+",
        ));
    }
    let eigs = a.eigenvalues();
    let e = elementary_all(&eigs);
    let sigma1 = e[1];
    let sigma_k_val = e[k];
    let nf = n as f64;
    let mut min_slack = f64::INFINITY;
    for i in 0..n {
        let partial = crate::symk::sigma_k_partial(&eigs, k - 1, i)?;
        let ric_i = (nf - 2.0) * eigs.values()[i] + sigma1;
        min_slack = min_slack.min(partial * ric_i - (nf - 1.0) * sigma_k_val);
    }
    Ok(min_slack)
}
