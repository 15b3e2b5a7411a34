//! Legendre polynomials on the reference interval and modal coefficient
//! vectors.
//!
//! `L_n` is normalized with `L_n(1) = 1`, so that
//! `int_{-1}^{1} L_m L_n = 2 / (2n + 1) delta_{mn}`.

use std::ops::{Deref, DerefMut};

use crate::quadrature::{QuadratureRule, RefFunction};

/// `L_n(xi)` by the three-term recurrence.
pub fn eval_legendre(n: usize, xi: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, xi);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 * xi * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_n'(xi)` from `L_{k+1}' = L_{k-1}' + (2k + 1) L_k`.
pub fn eval_legendre_deriv(n: usize, xi: f64) -> f64 {
    eval_legendre_pair(n, xi).1
}

/// `(L_n(xi), L_n'(xi))` in one sweep.
pub fn eval_legendre_pair(n: usize, xi: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p_cur) = (1.0, xi);
    let (mut d_prev, mut d_cur) = (0.0, 1.0);
    for k in 1..n {
        let p_next = ((2 * k + 1) as f64 * xi * p_cur - k as f64 * p_prev) / (k + 1) as f64;
        let d_next = d_prev + (2 * k + 1) as f64 * p_cur;
        p_prev = p_cur;
        p_cur = p_next;
        d_prev = d_cur;
        d_cur = d_next;
    }
    (p_cur, d_cur)
}

/// Fills `out[n] = L_n(xi)` for `n < out.len()`.
pub fn fill_legendre(xi: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = xi;
    }
    for k in 1..out.len().saturating_sub(1) {
        out[k + 1] = ((2 * k + 1) as f64 * xi * out[k] - k as f64 * out[k - 1]) / (k + 1) as f64;
    }
}

/// `int_{-1}^{1} L_n^2 = 2 / (2n + 1)`.
#[inline]
pub fn mass(n: usize) -> f64 {
    2.0 / (2 * n + 1) as f64
}

/// Modal coefficients `c_n` of `sum_n c_n L_n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoeffVector(pub Vec<f64>);

impl CoeffVector {
    pub fn zeros(p: usize) -> Self {
        Self(vec![0.0; p + 1])
    }

    /// Polynomial degree of the representation (`len - 1`).
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, xi: f64) -> f64 {
        // Clenshaw recurrence for the Legendre three-term relation.
        let c = &self.0;
        let n = c.len();
        if n == 0 {
            return 0.0;
        }
        let (mut b1, mut b2) = (0.0, 0.0);
        for k in (1..n).rev() {
            let kf = k as f64;
            let alpha = (2.0 * kf + 1.0) / (kf + 1.0) * xi;
            let beta = (kf + 1.0) / (kf + 2.0);
            let b0 = c[k] + alpha * b1 - beta * b2;
            b2 = b1;
            b1 = b0;
        }
        c[0] + xi * b1 - 0.5 * b2
    }

    pub fn eval_deriv(&self, xi: f64) -> f64 {
        self.0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| c * eval_legendre_deriv(n, xi))
            .sum()
    }

    /// Value at `xi = 1`.
    pub fn right_trace(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Value at `xi = -1`.
    pub fn left_trace(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(n, c)| if n % 2 == 0 { *c } else { -c })
            .sum()
    }

    /// `int_{-1}^{1} (sum c_n L_n)^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(n, c)| mass(n) * c * c)
            .sum()
    }

    /// Coefficients of the derivative `d/dxi`, of length `len - 1`
    /// (empty for constants).
    pub fn derivative(&self) -> CoeffVector {
        let c = &self.0;
        let n = c.len();
        if n <= 1 {
            return CoeffVector(vec![0.0]);
        }
        // c'_k = (2k + 1) sum_{j > k, j + k odd} c_j
        let mut d = vec![0.0; n - 1];
        let (mut even, mut odd) = (0.0, 0.0);
        for j in (1..n).rev() {
            if j % 2 == 0 {
                even += c[j];
            } else {
                odd += c[j];
            }
            let k = j - 1;
            let tail = if k % 2 == 0 { odd } else { even };
            d[k] = (2 * k + 1) as f64 * tail;
        }
        CoeffVector(d)
    }
}

impl Deref for CoeffVector {
    type Target = Vec<f64>;
    fn deref(&self) -> &Vec<f64> {
        &self.0
    }
}

impl DerefMut for CoeffVector {
    fn deref_mut(&mut self) -> &mut Vec<f64> {
        &mut self.0
    }
}

impl From<Vec<f64>> for CoeffVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// `coeffs[n] = (2n + 1)/2 int f L_n` for `n = 0..=p` by the given rule.
///
/// The rule must be accurate enough for `f`; singular integrands need a
/// graded rule (see [`QuadratureRule::for_singular`]).
pub fn legendre_coeffs<F: RefFunction + ?Sized>(
    f: &F,
    p: usize,
    quad: &QuadratureRule,
) -> CoeffVector {
    let values = quad.sample(f);
    coeffs_from_samples(&values, p, quad)
}

/// Same as [`legendre_coeffs`] from precomputed node values.
///
/// Sums are compensated (Neumaier) so that small high-order coefficients
/// keep their absolute accuracy on long graded rules.
pub fn coeffs_from_samples(values: &[f64], p: usize, quad: &QuadratureRule) -> CoeffVector {
    let mut acc = vec![0.0; p + 1];
    let mut comp = vec![0.0; p + 1];
    let mut basis = vec![0.0; p + 1];
    for ((&xi, &w), &v) in quad.nodes().iter().zip(quad.weights()).zip(values) {
        fill_legendre(xi, &mut basis);
        let wv = w * v;
        for ((a, c), l) in acc.iter_mut().zip(comp.iter_mut()).zip(&basis) {
            let term = wv * l;
            let t = *a + term;
            *c += if a.abs() >= term.abs() {
                (*a - t) + term
            } else {
                (term - t) + *a
            };
            *a = t;
        }
    }
    for (n, (a, c)) in acc.iter_mut().zip(comp).enumerate() {
        *a = (*a + c) * (2 * n + 1) as f64 / 2.0;
    }
    CoeffVector(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_degree_values() {
        assert_eq!(eval_legendre(0, 0.3), 1.0);
        assert_relative_eq!(eval_legendre(2, 0.5), -0.125, epsilon = 1e-15);
        assert_eq!(eval_legendre(7, -1.0), -1.0);
        assert_eq!(eval_legendre_deriv(1, 0.7), 1.0);
        assert_relative_eq!(eval_legendre_deriv(2, 0.5), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn endpoint_values() {
        for n in 0..=64 {
            assert_relative_eq!(eval_legendre(n, 1.0), 1.0, epsilon = 1e-13);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_relative_eq!(eval_legendre(n, -1.0), sign, epsilon = 1e-13);
            let d = (n * (n + 1)) as f64 / 2.0;
            assert_relative_eq!(eval_legendre_deriv(n, 1.0), d, max_relative = 1e-13);
        }
    }

    #[test]
    fn fill_matches_pointwise() {
        let mut buf = vec![0.0; 21];
        fill_legendre(0.37, &mut buf);
        for (n, v) in buf.iter().enumerate() {
            assert_relative_eq!(*v, eval_legendre(n, 0.37), epsilon = 1e-15);
        }
    }

    #[test]
    fn orthogonality_and_normalization() {
        for m in 0..=20usize {
            for n in 0..=20usize {
                let q = (m + n) / 2 + 1;
                let r = QuadratureRule::gauss_legendre(q);
                let v = r.integrate(&|x: f64| eval_legendre(m, x) * eval_legendre(n, x));
                if m == n {
                    assert_relative_eq!(v, mass(n), max_relative = 1e-12);
                } else {
                    assert!(v.abs() <= 1e-12, "m = {m}, n = {n}: {v}");
                }
            }
        }
    }

    #[test]
    fn coefficients_of_basis_and_constant() {
        let r = QuadratureRule::gauss_legendre(6);
        let c = legendre_coeffs(&|x: f64| eval_legendre(3, x), 5, &r);
        for (n, v) in c.iter().enumerate() {
            let want = if n == 3 { 1.0 } else { 0.0 };
            assert!((v - want).abs() <= 1e-12);
        }
        let c = legendre_coeffs(&|_x: f64| 1.0, 2, &QuadratureRule::gauss_legendre(3));
        assert!((c[0] - 1.0).abs() < 1e-14 && c[1].abs() < 1e-14 && c[2].abs() < 1e-14);
    }

    #[test]
    fn clenshaw_and_traces_agree_with_direct_sum() {
        let c = CoeffVector(vec![0.3, -1.2, 0.7, 2.0, -0.1, 0.05]);
        for &x in &[-1.0, -0.4, 0.0, 0.6, 1.0] {
            let direct: f64 = c
                .iter()
                .enumerate()
                .map(|(n, v)| v * eval_legendre(n, x))
                .sum();
            assert_relative_eq!(c.eval(x), direct, epsilon = 1e-14);
        }
        assert_relative_eq!(c.right_trace(), c.eval(1.0), epsilon = 1e-14);
        assert_relative_eq!(c.left_trace(), c.eval(-1.0), epsilon = 1e-14);
    }

    #[test]
    fn derivative_coefficients() {
        let c = CoeffVector(vec![0.3, -1.2, 0.7, 2.0, -0.1, 0.05]);
        let d = c.derivative();
        for &x in &[-0.9, -0.2, 0.4, 0.8] {
            assert_relative_eq!(d.eval(x), c.eval_deriv(x), epsilon = 1e-12);
        }
    }
}
