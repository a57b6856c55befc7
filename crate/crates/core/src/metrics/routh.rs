use crate::lti::Polynomial;
use crate::{Error, Result, Scalar};

/// Relative size below which a Routh pivot counts as zero.
const PIVOT_TOLERANCE: f64 = 1e-12;

/// `true` iff every root lies strictly in the open left half-plane.
///
/// Builds the Routh array and requires a strictly positive first column. A
/// (near-)zero pivot is reported as not stable, so marginal polynomials such
/// as `(s+1)(s²+1)` are rejected.
pub fn routh_stable<T: Scalar>(p: &Polynomial<T>) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut coeffs = p.coeffs().to_vec();
    if coeffs[0] < T::zero() {
        coeffs.iter_mut().for_each(|c| *c = -*c);
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Ok(false);
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(true);
    }

    let width = n / 2 + 1;
    let mut upper: Vec<T> = (0..width).map(|j| coeffs.get(2 * j).copied().unwrap_or_else(T::zero)).collect();
    let mut lower: Vec<T> = (0..width).map(|j| coeffs.get(2 * j + 1).copied().unwrap_or_else(T::zero)).collect();
    let tol = T::lit(PIVOT_TOLERANCE);

    let pivot_ok = |row: &[T]| {
        let scale = row.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        row[0] > tol * scale && scale > T::zero()
    };
    if !pivot_ok(&upper) {
        return Ok(false);
    }
    for row in 1..=n {
        if !pivot_ok(&lower) {
            return Ok(false);
        }
        if row == n {
            break;
        }
        let next: Vec<T> = (0..width)
            .map(|j| {
                let a = upper.get(j + 1).copied().unwrap_or_else(T::zero);
                let b = lower.get(j + 1).copied().unwrap_or_else(T::zero);
                (lower[0] * a - upper[0] * b) / lower[0]
            })
            .collect();
        upper = std::mem::replace(&mut lower, next);
    }
    Ok(true)
}
