//! Univariate real polynomials and companion-matrix root extraction.

use crate::error::{GsError, Result};
use nalgebra::DMatrix;

/// Real polynomial by ascending coefficient list. Construction trims
/// leading coefficients below 1e-14 * max|coeff|.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPoly {
    coeffs: Vec<f64>,
}

impl RealPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let cut = 1e-14 * scale;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= cut) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        RealPoly { coeffs }
    }

    pub fn zero() -> Self {
        RealPoly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        RealPoly::new(vec![c])
    }

    /// Monic product over the given roots: prod (t - root).
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut coeffs = vec![1.0];
        for &root in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= root * c;
            }
            coeffs = next;
        }
        RealPoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> RealPoly {
        if self.coeffs.len() <= 1 {
            return RealPoly::zero();
        }
        RealPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| (i + 1) as f64 * c)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, m: usize) -> RealPoly {
        let mut p = self.clone();
        for _ in 0..m {
            p = p.derivative();
        }
        p
    }

    pub fn scale(&self, c: f64) -> RealPoly {
        RealPoly::new(self.coeffs.iter().map(|x| c * x).collect())
    }

    pub fn add(&self, other: &RealPoly) -> RealPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; len];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.coeff(i) + other.coeff(i);
        }
        RealPoly::new(out)
    }

    pub fn mul(&self, other: &RealPoly) -> RealPoly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPoly::new(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }
}

/// Sorted real roots plus the largest imaginary magnitude seen during
/// realization.
#[derive(Debug, Clone, PartialEq)]
pub struct RootList {
    pub roots: Vec<f64>,
    pub max_imag: f64,
}

/// Parlett-Reinsch balancing (radix 2), in place.
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0_f64;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c > 0.0 && r > 0.0 {
                let mut f = 1.0;
                let s = c + r;
                let mut c2 = c;
                let mut r2 = r;
                while c2 < r2 / radix {
                    c2 *= radix;
                    r2 /= radix;
                    f *= radix;
                }
                while c2 >= r2 * radix {
                    c2 /= radix;
                    r2 *= radix;
                    f /= radix;
                }
                if (c2 + r2) < 0.95 * s && f != 1.0 {
                    converged = false;
                    for j in 0..n {
                        m[(i, j)] /= f;
                    }
                    for j in 0..n {
                        m[(j, i)] *= f;
                    }
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// All complex roots via the balanced companion matrix, realized with the
/// threshold |Im z| <= tol * (1 + |z|). Degree 0 is a domain error.
pub fn real_roots(p: &RealPoly, tol: f64) -> Result<RootList> {
    let d = p.degree();
    if d < 1 {
        return Err(GsError::domain("real_roots requires degree >= 1"));
    }
    let lead = p.leading();
    if lead == 0.0 {
        return Err(GsError::domain("real_roots: zero leading coefficient"));
    }
    let mut companion = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        companion[(i, d - 1)] = -p.coeff(i) / lead;
    }
    balance(&mut companion);
    let eig = companion.complex_eigenvalues();
    let mut roots = Vec::with_capacity(d);
    let mut max_imag = 0.0_f64;
    for z in eig.iter() {
        max_imag = max_imag.max(z.im.abs());
        if z.im.abs() <= tol * (1.0 + z.norm()) {
            roots.push(z.re);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(RootList { roots, max_imag })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let p = RealPoly::new(vec![1.0, -2.0, 3.0]); // 1 - 2t + 3t^2
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(2.0), 9.0);
        let dp = p.derivative();
        assert_eq!(dp.coeffs(), &[-2.0, 6.0]);
    }

    #[test]
    fn trims_leading_noise() {
        let p = RealPoly::new(vec![1.0, 1.0, 1e-17]);
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn from_roots_expands() {
        let p = RealPoly::from_roots(&[1.0, -2.0]);
        // (t - 1)(t + 2) = t^2 + t - 2
        assert_eq!(p.coeffs(), &[-2.0, 1.0, 1.0]);
    }

    #[test]
    fn root_cases() {
        let p = RealPoly::new(vec![-1.0, 0.0, 1.0]); // t^2 - 1
        let r = real_roots(&p, 1e-8).unwrap();
        assert_eq!(r.roots.len(), 2);
        assert!((r.roots[0] + 1.0).abs() < 1e-12);
        assert!((r.roots[1] - 1.0).abs() < 1e-12);
        assert!(r.max_imag < 1e-12);

        let q = RealPoly::new(vec![1.0, 0.0, 1.0]); // t^2 + 1
        let r = real_roots(&q, 1e-8).unwrap();
        assert!(r.roots.is_empty());
        assert!((r.max_imag - 1.0).abs() < 1e-12);

        assert!(real_roots(&RealPoly::constant(3.0), 1e-8).is_err());
    }

    #[test]
    fn wide_scale_roots() {
        // roots spread over several orders of magnitude still resolve
        let roots = [-1000.0, -1.0, 0.001, 5.0];
        let p = RealPoly::from_roots(&roots);
        let r = real_roots(&p, 1e-8).unwrap();
        assert_eq!(r.roots.len(), 4);
        for (got, want) in r.roots.iter().zip(roots.iter()) {
            assert!((got - want).abs() <= 1e-8 * (1.0 + want.abs()), "{got} vs {want}");
        }
    }
}
