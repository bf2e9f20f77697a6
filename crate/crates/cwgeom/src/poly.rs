//! Small polynomial toolbox: real univariate polynomials in ascending order,
//! and hermitian coefficient matrices for bivariate polynomials in
//! `(xi, conj(xi))`.

use crate::{C, Error, Result};

/// Evaluate `sum c[k] x^k` by Horner's rule.
pub fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

/// Derivative coefficients of a univariate polynomial.
pub fn derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter().enumerate().skip(1).map(|(k, &ck)| k as f64 * ck).collect()
}

/// Product of two univariate polynomials.
pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Sum of two univariate polynomials.
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or(0.0) + b.get(k).copied().unwrap_or(0.0))
        .collect()
}

/// Scale a univariate polynomial.
pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|&x| x * s).collect()
}

/// Difference of two univariate polynomials.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    add(a, &scale(b, -1.0))
}

/// Coefficients of `(1 + x)^m`.
pub fn binomial_row(m: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 0..m {
        let mut next = vec![0.0; row.len() + 1];
        for (k, &c) in row.iter().enumerate() {
            next[k] += c;
            next[k + 1] += c;
        }
        row = next;
    }
    row
}

/// Largest coefficient magnitude, used to scale tolerances.
pub fn max_abs(c: &[f64]) -> f64 {
    c.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
}

/// All real roots of `p` in `[0, inf)`, refined by bisection.
///
/// The half-line is scanned through the substitution `u = s/(1-s)`, so the
/// grid covers arbitrarily large roots. Roots are deduplicated to `tol`.
pub fn roots_nonneg(p: &[f64], tol: f64) -> Vec<f64> {
    let scale = max_abs(p).max(1.0);
    let f = |u: f64| eval(p, u);
    let mut roots = Vec::new();
    if f(0.0).abs() <= 1e-13 * scale {
        roots.push(0.0);
    }
    let n = 16384;
    let map = |s: f64| s / (1.0 - s);
    let mut prev_s = 0.5 / n as f64;
    let mut prev_v = f(map(prev_s));
    for i in 1..n {
        let s = (i as f64 + 0.5) / n as f64;
        let v = f(map(s));
        if prev_v == 0.0 {
            roots.push(map(prev_s));
        } else if prev_v * v < 0.0 {
            let (mut lo, mut hi) = (map(prev_s), map(s));
            let (mut flo, _) = (prev_v, v);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 || (hi - lo) < 1e-15 * (1.0 + mid.abs()) {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_s = s;
        prev_v = v;
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= tol * (1.0 + b.abs()));
    roots
}

/// Hermitian coefficient matrix of a real polynomial
/// `P(xi, conj(xi)) = sum_{k,l} m[k][l] xi^k conj(xi)^l`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefMatrix {
    rows: Vec<Vec<C>>,
}

impl CoefMatrix {
    /// Wrap a square matrix of coefficients, checking shape only.
    pub fn new(rows: Vec<Vec<C>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient matrix".into()));
        }
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "coefficient matrix must be square, got {} rows of lengths {:?}",
                n,
                rows.iter().map(|r| r.len()).collect::<Vec<_>>()
            )));
        }
        Ok(Self { rows })
    }

    /// Side length of the matrix (`degree + 1`).
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Raw access to the coefficient rows.
    pub fn rows(&self) -> &[Vec<C>] {
        &self.rows
    }

    pub fn get(&self, k: usize, l: usize) -> C {
        self.rows[k][l]
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |m, c| m.max(c.norm()))
    }

    /// Largest deviation from the hermitian symmetry `m[k][l] = conj(m[l][k])`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.size();
        let mut dev = 0.0_f64;
        for k in 0..n {
            for l in 0..n {
                dev = dev.max((self.rows[k][l] - self.rows[l][k].conj()).norm());
            }
        }
        dev
    }

    /// Zero-pad to side length `n` (degree elevation of the numerator).
    pub fn pad_to(&self, n: usize) -> Self {
        let mut rows = vec![vec![C::new(0.0, 0.0); n]; n];
        for (k, row) in self.rows.iter().enumerate() {
            for (l, &c) in row.iter().enumerate() {
                rows[k][l] = c;
            }
        }
        Self { rows }
    }

    /// Evaluate at `(xi, conj(xi))` by nested Horner over rows and columns.
    pub fn eval(&self, xi: C) -> C {
        let xib = xi.conj();
        let mut acc = C::new(0.0, 0.0);
        for row in self.rows.iter().rev() {
            let inner = row.iter().rev().fold(C::new(0.0, 0.0), |a, &c| a * xib + c);
            acc = acc * xi + inner;
        }
        acc
    }

    /// Coefficient matrix of the `xi`-derivative.
    #[allow(clippy::needless_range_loop)]
    pub fn d_xi(&self) -> Self {
        let n = self.size();
        let mut rows = vec![vec![C::new(0.0, 0.0); n]; n];
        for k in 1..n {
            for l in 0..n {
                rows[k - 1][l] = self.rows[k][l] * k as f64;
            }
        }
        Self { rows }
    }

    /// Coefficient matrix of the `conj(xi)`-derivative.
    #[allow(clippy::needless_range_loop)]
    pub fn d_xibar(&self) -> Self {
        let n = self.size();
        let mut rows = vec![vec![C::new(0.0, 0.0); n]; n];
        for k in 0..n {
            for l in 1..n {
                rows[k][l - 1] = self.rows[k][l] * l as f64;
            }
        }
        Self { rows }
    }

    /// Matrix with both indices reversed, representing
    /// `(xi conj(xi))^(n-1) P(1/xi, 1/conj(xi))`.
    #[allow(clippy::needless_range_loop)]
    pub fn reversed(&self) -> Self {
        let n = self.size();
        let mut rows = vec![vec![C::new(0.0, 0.0); n]; n];
        for k in 0..n {
            for l in 0..n {
                rows[k][l] = self.rows[n - 1 - k][n - 1 - l];
            }
        }
        Self { rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_matches_direct_sum() {
        let c = [2.0, -1.0, 0.5, 3.0];
        let x = 1.7_f64;
        let direct: f64 = c.iter().enumerate().map(|(k, ck)| ck * x.powi(k as i32)).sum();
        assert!((eval(&c, x) - direct).abs() < 1e-12);
    }

    #[test]
    fn derivative_drops_degree() {
        let c = [1.0, 2.0, 3.0];
        assert_eq!(derivative(&c), vec![2.0, 6.0]);
        assert_eq!(derivative(&[5.0]), vec![0.0]);
    }

    #[test]
    fn binomial_rows() {
        assert_eq!(binomial_row(3), vec![1.0, 3.0, 3.0, 1.0]);
        assert_eq!(binomial_row(0), vec![1.0]);
    }

    #[test]
    fn mul_and_add_agree_with_eval() {
        let a = [1.0, -2.0, 1.5];
        let b = [0.5, 3.0];
        let x = 0.73;
        assert!((eval(&mul(&a, &b), x) - eval(&a, x) * eval(&b, x)).abs() < 1e-12);
        assert!((eval(&add(&a, &b), x) - eval(&a, x) - eval(&b, x)).abs() < 1e-12);
    }

    #[test]
    fn roots_of_cusp_like_polynomial() {
        // 3u^2 - 10u + 3 has roots 1/3 and 3
        let roots = roots_nonneg(&[3.0, -10.0, 3.0], 1e-9);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((roots[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn root_at_zero_detected() {
        let roots = roots_nonneg(&[0.0, 1.0, 1.0], 1e-9);
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0], 0.0);
    }

    #[test]
    fn matrix_eval_and_derivatives() {
        // P = 1 + xi*conj(xi), so P_xi = conj(xi), P_xixibar = 1
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        let m = CoefMatrix::new(vec![vec![one, zero], vec![zero, one]]).unwrap();
        let xi = C::new(0.3, -0.4);
        assert!((m.eval(xi) - C::new(1.25, 0.0)).norm() < 1e-14);
        assert!((m.d_xi().eval(xi) - xi.conj()).norm() < 1e-14);
        assert!((m.d_xi().d_xibar().eval(xi) - one).norm() < 1e-14);
    }

    #[test]
    fn reversed_matrix_identity() {
        let m = CoefMatrix::new(vec![
            vec![C::new(1.0, 0.0), C::new(2.0, 1.0)],
            vec![C::new(2.0, -1.0), C::new(4.0, 0.0)],
        ])
        .unwrap();
        let xi = C::new(1.9, 0.7);
        let u = 1.0 / xi;
        // reversed represents (u ubar)^(n-1) P(1/u, 1/ubar) with n = 2
        let lhs = m.reversed().eval(u);
        let expect = (u * u.conj()) * m.eval(1.0 / u);
        assert!((lhs - expect).norm() < 1e-12);
    }

    #[test]
    fn hermitian_deviation_measures_asymmetry() {
        let m = CoefMatrix::new(vec![
            vec![C::new(1.0, 0.0), C::new(2.0, 1.0)],
            vec![C::new(2.0, -1.0), C::new(4.0, 0.0)],
        ])
        .unwrap();
        assert!(m.hermitian_deviation() < 1e-15);
        let bad = CoefMatrix::new(vec![
            vec![C::new(1.0, 0.0), C::new(2.0, 1.0)],
            vec![C::new(2.0, 1.0), C::new(4.0, 0.0)],
        ])
        .unwrap();
        assert!(bad.hermitian_deviation() > 1.9);
    }
}
