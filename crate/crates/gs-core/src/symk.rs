//! Elementary symmetric function algebra: sigma_k, partial sigma_k, Newton
//! transforms, Garding cone tests, and the symmetric-function inequality
//! suite.
//!
//! All sigma values from eigenvalue lists are computed by the coefficient
//! convolution over the products (t + lambda_i), which is O(n^2) and avoids
//! the catastrophic cancellation of naive subset sums. Matrix-side values
//! (sigma_j(S), T_j(S)) come from the Faddeev-LeVerrier style recurrence
//! T_j = sigma_j I - S T_{j-1}, sigma_j = tr(S T_{j-1}) / j, which never
//! needs an eigendecomposition.

use crate::error::{GsError, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Default relative tolerance for identity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative closeness against max(1, |lhs|, |rhs|).
pub fn rel_close(lhs: f64, rhs: f64, tol: f64) -> bool {
    (lhs - rhs).abs() <= tol * 1.0_f64.max(lhs.abs()).max(rhs.abs())
}

/// Binomial coefficient C(n, k) as f64 (exact for the small n used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc.round()
}

/// Ordered list of n real eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenList {
    values: Vec<f64>,
}

impl EigenList {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(GsError::domain("eigenvalue list must have n >= 1 entries"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GsError::domain("eigenvalue list contains a non-finite entry"));
        }
        Ok(EigenList { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Symmetric n x n matrix; packed upper-triangle storage makes the
/// symmetry invariant structural rather than checked.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    // Row-major upper triangle: entry (i, j) with i <= j at
    // i*dim - i*(i-1)/2 + (j - i).
    upper: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            upper: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    /// Rank-one matrix x (x)T.
    pub fn outer(x: &[f64]) -> Self {
        let mut m = Self::zeros(x.len());
        for i in 0..x.len() {
            for j in i..x.len() {
                m.set(i, j, x[i] * x[j]);
            }
        }
        m
    }

    /// Builds from a dense matrix, averaging the two triangles.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GsError::domain("matrix is not square"));
        }
        let dim = m.nrows();
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                out.set(i, j, 0.5 * (m[(i, j)] + m[(j, i)]));
            }
        }
        Ok(out)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.dim - i * (i + 1) / 2 + j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.idx(i, j);
        self.upper[idx] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.idx(i, j);
        self.upper[idx] += v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let v = self.get(i, j);
                acc += v * v;
            }
        }
        acc.sqrt()
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            upper: self.upper.iter().map(|v| c * v).collect(),
        }
    }

    /// self + c * other
    pub fn add_scaled(&self, other: &SymMatrix, c: f64) -> SymMatrix {
        assert_eq!(self.dim, other.dim);
        SymMatrix {
            dim: self.dim,
            upper: self
                .upper
                .iter()
                .zip(&other.upper)
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Quadratic form xT S x.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let y = self.apply(x);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    /// Frobenius pairing <S, T> = tr(S T).
    pub fn inner(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.get(i, j) * other.get(i, j);
            }
        }
        acc
    }

    /// Product of two symmetric matrices that commute (for example
    /// polynomials in the same matrix); only the upper triangle of the
    /// symmetric result is formed.
    pub fn mul_commuting(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += self.get(i, l) * other.get(l, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Eigenvalues via a symmetric eigensolver, ascending.
    pub fn eigenvalues(&self) -> EigenList {
        let eig = self.to_dense().symmetric_eigenvalues();
        let mut v: Vec<f64> = eig.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        EigenList { values: v }
    }

    /// Full eigendecomposition (values ascending with matching columns).
    pub fn eigen(&self) -> (EigenList, DMatrix<f64>) {
        let eig = nalgebra::SymmetricEigen::new(self.to_dense());
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut basis = DMatrix::zeros(self.dim, self.dim);
        for (col, &i) in order.iter().enumerate() {
            basis.set_column(col, &eig.eigenvectors.column(i));
        }
        (EigenList { values }, basis)
    }
}

/// Cone membership verdict for Gamma_k^+.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeLabel {
    pub k: usize,
    pub inside: bool,
    /// min over 1 <= j <= k of sigma_j; a raw signed distance proxy.
    pub margin: f64,
}

/// Coefficients sigma_0..sigma_n by convolution over (t + lambda_i).
pub fn elementary_all(lam: &EigenList) -> Vec<f64> {
    let n = lam.dim();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (i, &v) in lam.values().iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e
}

/// sigma_k of an eigenvalue list; sigma_0 == 1 by convention.
pub fn sigma_k(lam: &EigenList, k: usize) -> Result<f64> {
    if k > lam.dim() {
        return Err(GsError::domain(format!(
            "sigma_k needs 0 <= k <= n, got k={k}, n={}",
            lam.dim()
        )));
    }
    Ok(elementary_all(lam)[k])
}

/// sigma_k(lambda | i): the symmetric function with lambda_i removed.
/// `i` is a zero-based index; requires k <= n-1.
pub fn sigma_k_partial(lam: &EigenList, k: usize, i: usize) -> Result<f64> {
    let n = lam.dim();
    if i >= n {
        return Err(GsError::domain(format!(
            "partial index out of range: i={i}, n={n}"
        )));
    }
    if k > n - 1 {
        return Err(GsError::domain(format!(
            "sigma_k_partial needs 0 <= k <= n-1, got k={k}, n={n}"
        )));
    }
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    let mut filled = 0;
    for (j, &v) in lam.values().iter().enumerate() {
        if j == i {
            continue;
        }
        filled += 1;
        for m in (1..=filled).rev() {
            e[m] += v * e[m - 1];
        }
    }
    Ok(e[k])
}

/// The Newton transform chain T_0..T_k of a symmetric matrix together
/// with sigma_0..sigma_k, from the trace recurrence.
#[derive(Debug, Clone)]
pub struct NewtonChain {
    pub sigmas: Vec<f64>,
    pub transforms: Vec<SymMatrix>,
}

pub fn newton_chain(s: &SymMatrix, k: usize) -> Result<NewtonChain> {
    let n = s.dim();
    if k > n {
        return Err(GsError::domain(format!(
            "newton_chain needs k <= n, got k={k}, n={n}"
        )));
    }
    let mut sigmas = Vec::with_capacity(k + 1);
    let mut transforms = Vec::with_capacity(k + 1);
    sigmas.push(1.0);
    transforms.push(SymMatrix::identity(n));
    for m in 1..=k {
        let st = s.mul_commuting(&transforms[m - 1]);
        let sigma_m = st.trace() / m as f64;
        let t_m = SymMatrix::identity(n)
            .scale(sigma_m)
            .add_scaled(&st, -1.0);
        sigmas.push(sigma_m);
        transforms.push(t_m);
    }
    Ok(NewtonChain { sigmas, transforms })
}

/// k-th Newton transform T_k(S), 0 <= k <= n-1.
pub fn newton_transform(s: &SymMatrix, k: usize) -> Result<SymMatrix> {
    if s.dim() == 0 || k > s.dim() - 1 {
        return Err(GsError::domain(format!(
            "newton_transform needs 0 <= k <= n-1, got k={k}, n={}",
            s.dim()
        )));
    }
    Ok(newton_chain(s, k)?.transforms.swap_remove(k))
}

/// sigma_j(S) for j = 0..=k without eigendecomposition.
pub fn sigma_chain_matrix(s: &SymMatrix, k: usize) -> Result<Vec<f64>> {
    Ok(newton_chain(s, k)?.sigmas)
}

/// Gamma_k^+ test on an eigenvalue list.
pub fn cone_test(lam: &EigenList, k: usize) -> Result<ConeLabel> {
    let n = lam.dim();
    if k < 1 || k > n {
        return Err(GsError::domain(format!(
            "cone_test needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let e = elementary_all(lam);
    let margin = e[1..=k].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConeLabel {
        k,
        inside: margin > 0.0,
        margin,
    })
}

/// Gamma_k^+ test on a symmetric matrix via the trace recurrence.
pub fn cone_test_matrix(s: &SymMatrix, k: usize) -> Result<ConeLabel> {
    if k < 1 || k > s.dim() {
        return Err(GsError::domain(format!(
            "cone_test needs 1 <= k <= n, got k={k}, n={}",
            s.dim()
        )));
    }
    let sigs = sigma_chain_matrix(s, k)?;
    let margin = sigs[1..=k].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConeLabel {
        k,
        inside: margin > 0.0,
        margin,
    })
}

/// Signed slacks (nonnegative means the inequality holds) for the
/// Newton, MacLaurin, and generalized Newton-MacLaurin inequalities.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InequalityReport {
    /// k(n-k) sigma_k^2 - (n-k+1)(k+1) sigma_{k-1} sigma_{k+1}
    pub newton_slack: f64,
    /// (sigma_l/C(n,l))^{1/l} - (sigma_k/C(n,k))^{1/k}
    pub maclaurin_slack: f64,
    /// [(sigma_r/C_r)/(sigma_s/C_s)]^{1/(r-s)} - [(sigma_k/C_k)/(sigma_l/C_l)]^{1/(k-l)}
    pub generalized_slack: f64,
}

pub fn inequality_suite(
    lam: &EigenList,
    k: usize,
    l: usize,
    r: usize,
    s: usize,
) -> Result<InequalityReport> {
    let n = lam.dim();
    if k < 1 || k > n - 1 {
        return Err(GsError::domain(format!(
            "Newton inequality needs 1 <= k <= n-1, got k={k}, n={n}"
        )));
    }
    if l < 1 || k < l {
        return Err(GsError::domain(format!(
            "MacLaurin needs k >= l >= 1, got k={k}, l={l}"
        )));
    }
    if !(k > l && r > s && k >= r && l >= s) {
        return Err(GsError::domain(format!(
            "generalized Newton-MacLaurin needs k > l >= 0, r > s >= 0, k >= r, l >= s; got k={k} l={l} r={r} s={s}"
        )));
    }
    let label = cone_test(lam, k)?;
    if !label.inside {
        return Err(GsError::domain(
            "inequality_suite: lambda must lie in Gamma_k^+".to_string(),
        ));
    }
    let e = elementary_all(lam);
    let nf = n as f64;
    let kf = k as f64;
    let newton_slack =
        kf * (nf - kf) * e[k] * e[k] - (nf - kf + 1.0) * (kf + 1.0) * e[k - 1] * e[k + 1];
    let norm = |j: usize| e[j] / binomial(n, j);
    let maclaurin_slack = norm(l).powf(1.0 / l as f64) - norm(k).powf(1.0 / k as f64);
    let lhs = (norm(k) / norm(l)).powf(1.0 / (k - l) as f64);
    let rhs = (norm(r) / norm(s)).powf(1.0 / (r - s) as f64);
    let generalized_slack = rhs - lhs;
    Ok(InequalityReport {
        newton_slack,
        maclaurin_slack,
        generalized_slack,
    })
}

/// Both sides of the rank-one update identities
/// sigma_k(A - X (x) X) = sigma_k(A) - <T_{k-1}(A), X (x) X> and
/// <T_k(A - X (x) X), X (x) X> = <T_k(A), X (x) X>.
#[derive(Debug, Clone, Copy)]
pub struct RankOneIdentity {
    pub sigma_lhs: f64,
    pub sigma_rhs: f64,
    pub pairing_lhs: f64,
    pub pairing_rhs: f64,
}

pub fn rank_one_identity(a: &SymMatrix, x: &[f64], k: usize) -> Result<RankOneIdentity> {
    let n = a.dim();
    if x.len() != n {
        return Err(GsError::domain("rank_one_identity: dimension mismatch"));
    }
    if k < 1 || k > n {
        return Err(GsError::domain(format!(
            "rank_one_identity needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let deflated = a.add_scaled(&SymMatrix::outer(x), -1.0);
    let chain_a = newton_chain(a, k)?;
    let chain_d = newton_chain(&deflated, k)?;
    let sigma_lhs = chain_d.sigmas[k];
    let sigma_rhs = chain_a.sigmas[k] - chain_a.transforms[k - 1].quad_form(x);
    let pairing_lhs = chain_d.transforms[k].quad_form(x);
    let pairing_rhs = chain_a.transforms[k].quad_form(x);
    Ok(RankOneIdentity {
        sigma_lhs,
        sigma_rhs,
        pairing_lhs,
        pairing_rhs,
    })
}

/// Cone lift E = utt * A - p (x) p of Prop-style data.
#[derive(Debug, Clone)]
pub struct ConeLift {
    pub label: ConeLabel,
    /// sigma_i(E) for i = 0..=k.
    pub chain: Vec<f64>,
    pub e: SymMatrix,
}

pub fn e_cone_lift(a: &SymMatrix, utt: f64, p: &[f64], k: usize) -> Result<ConeLift> {
    let n = a.dim();
    if p.len() != n {
        return Err(GsError::domain("e_cone_lift: dimension mismatch"));
    }
    if !cone_test_matrix(a, k)?.inside {
        return Err(GsError::domain("e_cone_lift: A must lie in Gamma_k^+"));
    }
    if utt <= 0.0 {
        return Err(GsError::domain("e_cone_lift: utt must be positive"));
    }
    let e = a.scale(utt).add_scaled(&SymMatrix::outer(p), -1.0);
    let chain = sigma_chain_matrix(&e, k)?;
    let margin = chain[1..=k].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConeLift {
        label: ConeLabel {
            k,
            inside: margin > 0.0,
            margin,
        },
        chain,
        e,
    })
}

/// Orthonormal-basis expression of a vector: returns QT x.
pub fn rotate_into_basis(basis: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let xv = DVector::from_column_slice(x);
    let y = basis.transpose() * xv;
    y.iter().copied().collect()
}
