use std::fmt;

use num_complex::Complex;

use super::Polynomial;
use crate::tuners::PidGains;
use crate::{Error, Result, Scalar};

/// Rational SISO transfer function `num(s) / den(s)`.
///
/// No pole-zero cancellation is ever performed; `s/s` stays `s/s`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction<T> {
    num: Polynomial<T>,
    den: Polynomial<T>,
}

impl<T: Scalar> TransferFunction<T> {
    pub fn new(num: Polynomial<T>, den: Polynomial<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self { num, den })
    }

    pub fn from_coeffs(num: &[T], den: &[T]) -> Result<Self> {
        Self::new(Polynomial::from_slice(num), Polynomial::from_slice(den))
    }

    /// The static gain `1/1`.
    pub fn unity() -> Self {
        Self { num: Polynomial::one(), den: Polynomial::one() }
    }

    pub fn num(&self) -> &Polynomial<T> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<T> {
        &self.den
    }

    pub fn is_proper(&self) -> bool {
        self.num.degree() <= self.den.degree()
    }

    pub(crate) fn ensure_proper(&self) -> Result<()> {
        if self.is_proper() {
            Ok(())
        } else {
            Err(Error::Improper { num: self.num.degree(), den: self.den.degree() })
        }
    }

    pub fn eval(&self, s: Complex<T>) -> Complex<T> {
        self.num.eval_complex(s) / self.den.eval_complex(s)
    }

    /// Frequency response `H(jω)`.
    pub fn freq_response(&self, omega: T) -> Complex<T> {
        self.eval(Complex::new(T::zero(), omega))
    }

    /// Value at `s = 0`; infinite when the denominator has a root at the origin.
    pub fn dc_gain(&self) -> T {
        self.num.constant_term() / self.den.constant_term()
    }

    /// Series connection.
    pub fn series(&self, other: &Self) -> Self {
        Self { num: &self.num * &other.num, den: &self.den * &other.den }
    }
}

impl<T: Scalar> fmt::Display for TransferFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// PID controller `(Kd·s² + Kp·s + Ki) / s`.
pub fn pid_tf<T: Scalar>(gains: &PidGains<T>) -> Result<TransferFunction<T>> {
    if gains.kd.is_zero() && gains.kp.is_zero() && gains.ki.is_zero() {
        return Err(Error::DegenerateController);
    }
    TransferFunction::new(Polynomial::new(vec![gains.kd, gains.kp, gains.ki]), Polynomial::s())
}

/// Unity-feedback closed loop around `controller · plant · delay`.
///
/// With the loop `L = n/d`, returns `n / (n + d)`. The result must be proper.
pub fn closed_loop<T: Scalar>(
    controller: &TransferFunction<T>,
    plant: &TransferFunction<T>,
    delay: &TransferFunction<T>,
) -> Result<TransferFunction<T>> {
    let open = controller.series(plant).series(delay);
    feedback(&open)
}

/// Unity negative feedback around an open loop.
pub fn feedback<T: Scalar>(open: &TransferFunction<T>) -> Result<TransferFunction<T>> {
    let den = &open.num + &open.den;
    let tf = TransferFunction::new(open.num.clone(), den)?;
    tf.ensure_proper()?;
    Ok(tf)
}
