use num_complex::Complex;

use super::{Polynomial, TransferFunction};
use crate::{Result, Scalar};

/// SISO state-space model `x' = Ax + Bu`, `y = Cx + Du`.
///
/// `a` is stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace<T> {
    n: usize,
    a: Vec<T>,
    b: Vec<T>,
    c: Vec<T>,
    d: T,
}

impl<T: Scalar> StateSpace<T> {
    pub fn new(a: Vec<T>, b: Vec<T>, c: Vec<T>, d: T) -> Self {
        let n = b.len();
        assert_eq!(a.len(), n * n, "A must be n×n");
        assert_eq!(c.len(), n, "C must be 1×n");
        Self { n, a, b, c, d }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn a(&self, row: usize, col: usize) -> T {
        self.a[row * self.n + col]
    }

    pub fn a_matrix(&self) -> &[T] {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    pub fn d(&self) -> T {
        self.d
    }

    /// Diagonal similarity `x̃ᵢ = wⁱ·xᵢ`.
    ///
    /// For a companion realization with root radius ~`w` this brings every
    /// entry of `A` to order `w`, which keeps the RK4 propagator well conditioned.
    pub fn scaled(&self, w: T) -> Self {
        let n = self.n;
        let pow: Vec<T> = (0..n).map(|i| w.powi(i as i32)).collect();
        let mut a = self.a.clone();
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = a[i * n + j] * pow[i] / pow[j];
            }
        }
        let b = self.b.iter().zip(&pow).map(|(&b, &p)| b * p).collect();
        let c = self.c.iter().zip(&pow).map(|(&c, &p)| c / p).collect();
        Self { n, a, b, c, d: self.d }
    }

    /// `dx/dt = Ax + Bu`.
    pub fn derivative(&self, x: &[T], u: T, out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.a[i * self.n..(i + 1) * self.n];
            *o = row.iter().zip(x).map(|(&a, &x)| a * x).sum::<T>() + self.b[i] * u;
        }
    }

    pub fn output(&self, x: &[T], u: T) -> T {
        self.c.iter().zip(x).map(|(&c, &x)| c * x).sum::<T>() + self.d * u
    }
}

impl StateSpace<f64> {
    /// `C (jωI − A)⁻¹ B + D` by complex Gaussian elimination.
    pub fn freq_response(&self, omega: f64) -> Complex<f64> {
        let n = self.n;
        if n == 0 {
            return Complex::new(self.d, 0.0);
        }
        let jw = Complex::new(0.0, omega);
        let mut m: Vec<Complex<f64>> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let diag = if i == j { jw } else { Complex::new(0.0, 0.0) };
                diag - self.a[k]
            })
            .collect();
        let mut rhs: Vec<Complex<f64>> = self.b.iter().map(|&b| Complex::new(b, 0.0)).collect();
        for col in 0..n {
            let pivot = (col..n).max_by(|&p, &q| m[p * n + col].norm().total_cmp(&m[q * n + col].norm())).unwrap();
            if pivot != col {
                for j in 0..n {
                    m.swap(col * n + j, pivot * n + j);
                }
                rhs.swap(col, pivot);
            }
            let p = m[col * n + col];
            for row in col + 1..n {
                let f = m[row * n + col] / p;
                for j in col..n {
                    let v = m[col * n + j];
                    m[row * n + j] -= f * v;
                }
                let v = rhs[col];
                rhs[row] -= f * v;
            }
        }
        let mut x = vec![Complex::new(0.0, 0.0); n];
        for row in (0..n).rev() {
            let mut acc = rhs[row];
            for j in row + 1..n {
                acc -= m[row * n + j] * x[j];
            }
            x[row] = acc / m[row * n + row];
        }
        self.c.iter().zip(&x).map(|(&c, &x)| x * c).sum::<Complex<f64>>() + self.d
    }
}

/// Controllable-canonical realization of a proper transfer function.
///
/// A biproper input yields `D = lead(num)/lead(den)` and the strictly proper
/// remainder in `C`.
pub fn to_state_space<T: Scalar>(tf: &TransferFunction<T>) -> Result<StateSpace<T>> {
    tf.ensure_proper()?;
    let den = tf.den().coeffs();
    let n = den.len() - 1;
    let lead = den[0];
    let a_norm: Vec<T> = den[1..].iter().map(|&a| a / lead).collect();

    let mut b_norm = vec![T::zero(); n + 1];
    let num = tf.num().coeffs();
    let offset = n + 1 - num.len();
    for (slot, &c) in b_norm[offset..].iter_mut().zip(num) {
        *slot = c / lead;
    }
    let d = b_norm[0];

    let mut a = vec![T::zero(); n * n];
    for (j, &coef) in a_norm.iter().enumerate() {
        a[j] = -coef;
    }
    for i in 1..n {
        a[i * n + i - 1] = T::one();
    }
    let mut b = vec![T::zero(); n];
    if n > 0 {
        b[0] = T::one();
    }
    let c = (0..n).map(|i| b_norm[i + 1] - d * a_norm[i]).collect();
    Ok(StateSpace::new(a, b, c, d))
}

/// Realization used by the simulators: canonical form balanced by the
/// denominator's root radius.
pub(crate) fn balanced_realization<T: Scalar>(tf: &TransferFunction<T>) -> Result<(StateSpace<T>, T)> {
    let ss = to_state_space(tf)?;
    let radius = root_radius_bound(tf.den());
    let w = if radius > T::one() { radius } else { T::one() };
    Ok((ss.scaled(w), radius))
}

/// Fujiwara upper bound on the magnitude of every root.
pub fn root_radius_bound<T: Scalar>(p: &Polynomial<T>) -> T {
    let coeffs = p.coeffs();
    let n = coeffs.len() - 1;
    if n == 0 {
        return T::zero();
    }
    let lead = coeffs[0];
    let mut bound = T::zero();
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        let mut ratio = (c / lead).abs();
        if k == n {
            ratio = ratio / T::lit(2.0);
        }
        let term = ratio.powf(T::one() / T::from_usize(k).unwrap());
        if term > bound {
            bound = term;
        }
    }
    T::lit(2.0) * bound
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tf(n: &[f64], d: &[f64]) -> TransferFunction<f64> {
        TransferFunction::from_coeffs(n, d).unwrap()
    }

    #[test]
    fn first_order_realization() {
        let ss = to_state_space(&tf(&[1.0], &[1.0, 1.0])).unwrap();
        assert_eq!(ss.a_matrix(), &[-1.0]);
        assert_eq!(ss.b(), &[1.0]);
        assert_eq!(ss.c(), &[1.0]);
        assert_eq!(ss.d(), 0.0);
    }

    #[test]
    fn biproper_splits_feedthrough() {
        let ss = to_state_space(&tf(&[1.0, 2.0], &[1.0, 1.0])).unwrap();
        assert_eq!(ss.d(), 1.0);
        assert_eq!(ss.a_matrix(), &[-1.0]);
        assert_eq!(ss.c(), &[1.0]);
    }

    #[test]
    fn second_order_canonical_form() {
        let ss = to_state_space(&tf(&[1.0], &[1.0, 3.0, 2.0])).unwrap();
        assert_eq!(ss.a_matrix(), &[-3.0, -2.0, 1.0, 0.0]);
        assert_eq!(ss.b(), &[1.0, 0.0]);
        assert_eq!(ss.c(), &[0.0, 1.0]);
        assert_eq!(ss.d(), 0.0);
    }

    #[test]
    fn static_gain_has_no_states() {
        let ss = to_state_space(&tf(&[3.0], &[2.0])).unwrap();
        assert_eq!(ss.order(), 0);
        assert_eq!(ss.d(), 1.5);
    }

    #[test]
    fn improper_rejected() {
        assert!(to_state_space(&tf(&[1.0, 0.0, 0.0], &[1.0, 1.0])).is_err());
    }

    #[test]
    fn realization_matches_rational_evaluation() {
        let cases = [
            tf(&[0.6, 12.0, 60.0], &[1.0, 0.0]).series(&tf(&[1.0], &[1.0, 1.0])),
            tf(&[2.0, -0.49, 1.0], &[0.0954, 0.49, 1.0]),
            tf(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0, 7.0, 8.0]),
        ];
        for t in cases.iter().filter(|t| t.is_proper()) {
            let ss = to_state_space(t).unwrap();
            for (scaled, w) in [(ss.clone(), 1.0), (ss.scaled(7.5), 7.5)] {
                for k in 0..20 {
                    let omega = 10f64.powf(-2.0 + 4.0 * k as f64 / 19.0);
                    let want = t.freq_response(omega);
                    let got = scaled.freq_response(omega);
                    assert!((got - want).norm() <= 1e-9 * want.norm(), "w={w} ω={omega}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn fujiwara_bounds_roots() {
        // (s+1)(s+2)(s+300)
        let p = &(&Polynomial::from_slice(&[1.0, 1.0]) * &Polynomial::from_slice(&[1.0, 2.0]))
            * &Polynomial::from_slice(&[1.0, 300.0]);
        let r = root_radius_bound(&p);
        assert!((300.0..2000.0).contains(&r), "{r}");
    }
}
