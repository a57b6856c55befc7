use super::routh_stable;
use crate::lti::{Polynomial, TransferFunction};
use crate::tuners::PidGains;
use crate::{Error, Result, Scalar};

/// Gains still stable at this value are reported as `+∞`.
pub const MARGIN_CEILING: f64 = 1e6;
/// Relative bracket width at which bisection stops.
const BISECTION_WIDTH: f64 = 1e-7;

/// Smallest loop-gain multiplier `K > 1` at which
/// `den(L) + K·num(L)` stops being Routh-stable, for `L = controller·plant·delay`.
///
/// Doubles `K` from 1 until the loop fails, then bisects. Returns `+∞` when the
/// loop is still stable at [`MARGIN_CEILING`].
pub fn stability_margin<T: Scalar>(
    controller: &TransferFunction<T>,
    plant: &TransferFunction<T>,
    delay: &TransferFunction<T>,
) -> Result<T> {
    let open = controller.series(plant).series(delay);
    let (num, den) = (open.num().clone(), open.den().clone());
    let characteristic = |k: T| &den + &num.scale(k);
    search_upward(T::one(), T::one(), |k| routh_stable(&characteristic(k)))
}

/// Largest proportional gain reachable from the tuned `Kp` before the loop
/// loses stability, holding `Kd` and `Ki` fixed.
///
/// This is the controller gain `K_c` raised until sustained oscillation, read
/// through the Routh predicate on
/// `s·den(G)·den(D) + (Kd·s² + K_c·s + Ki)·num(G)·num(D)`.
pub fn ultimate_proportional_gain<T: Scalar>(
    gains: &PidGains<T>,
    plant: &TransferFunction<T>,
    delay: &TransferFunction<T>,
) -> Result<T> {
    let path_num = plant.num() * delay.num();
    let path_den = plant.den() * delay.den();
    // Without integral action the controller's s/s factor is common to both
    // terms and is divided out so it does not read as a pole at the origin.
    let integral = !gains.ki.is_zero();
    let path_den = if integral { &path_den * &Polynomial::s() } else { path_den };
    let characteristic = |kp: T| {
        let pid =
            if integral { Polynomial::new(vec![gains.kd, kp, gains.ki]) } else { Polynomial::new(vec![gains.kd, kp]) };
        &path_den + &(&pid * &path_num)
    };
    let step = if gains.kp > T::one() { gains.kp } else { T::one() };
    search_upward(gains.kp, step, |kp| routh_stable(&characteristic(kp)))
}

/// Finds the first unstable value above a stable `start` by geometric probing
/// (`start + step·2^j`) and bisection.
fn search_upward<T: Scalar>(start: T, step: T, stable: impl Fn(T) -> Result<bool>) -> Result<T> {
    if !stable(start)? {
        return Err(Error::UnstableNominalLoop);
    }
    let ceiling = T::lit(MARGIN_CEILING);
    let two = T::lit(2.0);
    let mut lo = start;
    let mut offset = step;
    let hi = loop {
        let probe = (start + offset).min(ceiling);
        if !stable(probe)? {
            break probe;
        }
        if probe >= ceiling {
            return Ok(T::infinity());
        }
        lo = probe;
        offset = offset * two;
    };
    let mut hi = hi;
    let width = T::lit(BISECTION_WIDTH).max(T::epsilon() * T::lit(4.0));
    while hi - lo > width * hi {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if stable(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / two)
}
