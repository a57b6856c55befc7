use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::Scalar;

/// Real polynomial in the Laplace variable `s`.
///
/// Coefficients are stored in descending powers: `coeffs[0]·sⁿ + … + coeffs[n]`.
/// Leading zeros are trimmed on construction, and the zero polynomial is the
/// single coefficient `[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut coeffs = coeffs;
        match coeffs.iter().position(|c| !c.is_zero()) {
            Some(first) => {
                coeffs.drain(..first);
            }
            None => {
                coeffs.clear();
                coeffs.push(T::zero());
            }
        }
        Self { coeffs }
    }

    pub fn from_slice(coeffs: &[T]) -> Self {
        Self::new(coeffs.to_vec())
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![T::zero()] }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `s`.
    pub fn s() -> Self {
        Self { coeffs: vec![T::one(), T::zero()] }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> T {
        self.coeffs[0]
    }

    /// Constant term, i.e. the value at `s = 0`.
    pub fn constant_term(&self) -> T {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + Complex::new(c, T::zero()))
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Coefficient of `s^power`, zero when out of range.
    pub fn coeff_of_power(&self, power: usize) -> T {
        if power > self.degree() {
            T::zero()
        } else {
            self.coeffs[self.degree() - power]
        }
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() && !(n == 0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n - i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·s")?,
                p => write!(f, "{c}·s^{p}")?,
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: Self) -> Polynomial<T> {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (&self.coeffs, &rhs.coeffs)
        } else {
            (&rhs.coeffs, &self.coeffs)
        };
        let offset = long.len() - short.len();
        let mut out = long.clone();
        for (o, &c) in out[offset..].iter_mut().zip(short) {
            *o = *o + c;
        }
        Polynomial::new(out)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: Self) -> Polynomial<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    /// Coefficient convolution.
    fn mul(self, rhs: Self) -> Polynomial<T> {
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Polynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for Polynomial<T> {
            type Output = Polynomial<T>;
            fn $m(self, rhs: Self) -> Polynomial<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[f64]) -> Polynomial<f64> {
        Polynomial::from_slice(c)
    }

    #[test]
    fn product_of_linear_factors() {
        assert_eq!(&p(&[1.0, 1.0]) * &p(&[1.0, 2.0]), p(&[1.0, 3.0, 2.0]));
    }

    #[test]
    fn multiplicative_identity_and_zero() {
        let a = p(&[2.0, -1.0, 4.0]);
        assert_eq!(&a * &Polynomial::one(), a);
        let z = &a * &Polynomial::zero();
        assert!(z.is_zero());
        assert_eq!(z.coeffs(), &[0.0]);
    }

    #[test]
    fn addition_aligns_and_trims() {
        assert_eq!(&p(&[1.0, 0.0, 1.0]) + &p(&[1.0, 0.0]), p(&[1.0, 1.0, 1.0]));
        let a = p(&[3.0, 2.0]);
        assert_eq!(&a + &Polynomial::zero(), a);
        let cancel = &p(&[1.0, 1.0]) + &p(&[-1.0, -1.0]);
        assert!(cancel.is_zero());
        assert_eq!(cancel.degree(), 0);
    }

    #[test]
    fn leading_zeros_trimmed() {
        let a = p(&[0.0, 0.0, 1.0, 2.0]);
        assert_eq!(a.degree(), 1);
        assert_eq!(a.coeffs(), &[1.0, 2.0]);
        assert_eq!(Polynomial::<f64>::new(vec![]).coeffs(), &[0.0]);
    }

    #[test]
    fn evaluation() {
        let a = p(&[1.0, 3.0, 2.0]);
        assert_eq!(a.eval(2.0), 12.0);
        let j = a.eval_complex(Complex::new(0.0, 1.0));
        assert_eq!(j, Complex::new(1.0, 3.0));
        assert_eq!(a.coeff_of_power(2), 1.0);
        assert_eq!(a.coeff_of_power(5), 0.0);
    }

    proptest! {
        #[test]
        fn product_degree_and_evaluation(
            a in prop::collection::vec(-10.0f64..10.0, 1..6),
            b in prop::collection::vec(-10.0f64..10.0, 1..6),
            x in -2.0f64..2.0,
        ) {
            let (pa, pb) = (p(&a), p(&b));
            let prod = &pa * &pb;
            if !pa.is_zero() && !pb.is_zero() {
                prop_assert_eq!(prod.degree(), pa.degree() + pb.degree());
            }
            let lhs = prod.eval(x);
            let rhs = pa.eval(x) * pb.eval(x);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
            let sum = (&pa + &pb).eval(x);
            prop_assert!((sum - (pa.eval(x) + pb.eval(x))).abs() <= 1e-9 * (1.0 + sum.abs()));
        }
    }
}
