//! Dead-time models: the second-order DFR all-pass approximation used for
//! tuning, and an exact sample-shift delay line used as a reference.

use std::collections::VecDeque;

use crate::lti::{
    balanced_realization, feedback, sample_count, state_diverged, step_response, Rk4Propagator, StepResponse,
    TransferFunction,
};
use crate::{Error, Result, Scalar};

/// First-order DFR series coefficient.
pub const DFR_C1: f64 = 0.49;
/// Second-order DFR series coefficient.
pub const DFR_C2: f64 = 0.0954;

/// Rational approximation of `e^{−sτ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayApprox<T> {
    pub tau: T,
    pub tf: TransferFunction<T>,
}

/// `(0.0954τ²s² − 0.49τs + 1) / (0.0954τ²s² + 0.49τs + 1)`; `τ = 0` gives `1/1`.
pub fn dfr_delay<T: Scalar>(tau: T) -> Result<DelayApprox<T>> {
    if !(tau >= T::zero()) || !tau.is_finite() {
        return Err(Error::InvalidDelay(tau.to_f64_lossy()));
    }
    let c2 = T::lit(DFR_C2) * tau * tau;
    let c1 = T::lit(DFR_C1) * tau;
    let tf = TransferFunction::from_coeffs(&[c2, -c1, T::one()], &[c2, c1, T::one()])?;
    Ok(DelayApprox { tau, tf })
}

/// Integer sample shift realizing a delay of `round(tau/dt)` samples.
#[derive(Debug, Clone)]
pub struct DelayLine<T> {
    buffer: VecDeque<T>,
}

impl<T: Scalar> DelayLine<T> {
    pub fn new(samples: usize) -> Self {
        Self { buffer: std::iter::repeat_n(T::zero(), samples).collect() }
    }

    /// Delay line for `tau` at sample period `dt`, rounding to the nearest sample.
    pub fn for_delay(tau: T, dt: T) -> Result<Self> {
        Ok(Self::new(delay_samples(tau, dt)?))
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    /// Output that will leave the line on the next push.
    pub fn peek(&self) -> Option<T> {
        self.buffer.front().copied()
    }

    /// Feeds one sample and returns the sample from `len()` steps ago.
    pub fn push(&mut self, input: T) -> T {
        if self.buffer.is_empty() {
            return input;
        }
        let out = self.buffer.pop_front().unwrap_or_else(T::zero);
        self.buffer.push_back(input);
        out
    }
}

fn delay_samples<T: Scalar>(tau: T, dt: T) -> Result<usize> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidTimeGrid { dt: dt.to_f64_lossy(), horizon: f64::NAN });
    }
    if !(tau >= T::zero()) || !tau.is_finite() {
        return Err(Error::InvalidDelay(tau.to_f64_lossy()));
    }
    let ratio = (tau / dt).to_f64_lossy();
    let samples = ratio.round();
    if (ratio - samples).abs() > 1e-9 {
        log::warn!("delay {tau} is not a multiple of dt {dt}; rounding to {samples} samples");
    }
    Ok(samples as usize)
}

/// Where the delay line sits relative to the forward path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopTopology {
    /// Unit step → forward path → delay → output.
    Open,
    /// Unity negative feedback around forward path and delay.
    UnityFeedback,
}

/// Step response with the delay realized as an exact sample shift.
///
/// `forward` is the delay-free forward path (for the closed loop,
/// controller·plant). The delay commutes with the LTI blocks, so placing the
/// line after the forward path is equivalent to delaying the plant input. The
/// delayed signal is held constant across each RK4 step.
pub fn delayed_step_sim<T: Scalar>(
    forward: &TransferFunction<T>,
    tau: T,
    dt: T,
    horizon: T,
    topology: LoopTopology,
) -> Result<StepResponse<T>> {
    let count = sample_count(dt, horizon)?;
    let mut line = DelayLine::for_delay(tau, dt)?;
    if line.is_empty() && topology == LoopTopology::UnityFeedback {
        // No sample shift: the loop is algebraic in the feedthrough, simulate it rationally.
        return step_response(&feedback(forward)?, dt, horizon);
    }
    let (ss, radius) = balanced_realization(forward)?;
    let prop = Rk4Propagator::new(&ss, dt, radius);
    let n = prop.order();
    let mut x = vec![T::zero(); n];
    let mut scratch = vec![T::zero(); n];
    let mut y = Vec::with_capacity(count);
    let mut diverged = false;
    let limit = T::lit(crate::lti::DIVERGENCE_LIMIT);

    for _ in 0..count {
        if diverged {
            let last = y.last().copied().unwrap_or_else(T::zero);
            y.push(last);
            continue;
        }
        let (input, out) = match topology {
            LoopTopology::Open => {
                let z = prop.output(&x, T::one());
                (T::one(), line.push(z))
            }
            LoopTopology::UnityFeedback => {
                let delayed = line.peek().unwrap_or_else(T::zero);
                let e = T::one() - delayed;
                let z = prop.output(&x, e);
                line.push(z);
                (e, delayed)
            }
        };
        if !out.is_finite() || out.abs() > limit {
            diverged = true;
            let last = y.last().copied().unwrap_or_else(T::zero);
            y.push(last);
            continue;
        }
        y.push(out);
        prop.advance(&mut x, input, &mut scratch);
        diverged = state_diverged(&x);
    }
    Ok(StepResponse::from_output(dt, horizon, y, diverged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::{closed_loop, pid_tf};
    use crate::tuners::{ziegler_nichols, PlantFolpd};
    use num_complex::Complex;
    use proptest::prelude::*;

    fn tf(n: &[f64], d: &[f64]) -> TransferFunction<f64> {
        TransferFunction::from_coeffs(n, d).unwrap()
    }

    #[test]
    fn unit_delay_coefficients() {
        let d = dfr_delay(1.0).unwrap();
        assert_eq!(d.tf.num().coeffs(), &[0.0954, -0.49, 1.0]);
        assert_eq!(d.tf.den().coeffs(), &[0.0954, 0.49, 1.0]);
    }

    #[test]
    fn zero_delay_is_identity() {
        let d = dfr_delay(0.0).unwrap();
        assert_eq!(d.tf.num().coeffs(), &[1.0]);
        assert_eq!(d.tf.den().coeffs(), &[1.0]);
    }

    #[test]
    fn negative_delay_rejected() {
        assert!(matches!(dfr_delay(-0.1), Err(Error::InvalidDelay(_))));
    }

    #[test]
    fn unit_magnitude_on_imaginary_axis() {
        let d = dfr_delay(0.5f64).unwrap();
        let h = d.tf.eval(Complex::new(0.0, 2.0));
        assert!((h.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn all_pass_structure() {
        let d = dfr_delay(0.37).unwrap();
        let (num, den) = (d.tf.num().coeffs(), d.tf.den().coeffs());
        for p in 0..=2 {
            let sign = if p % 2 == 1 { -1.0 } else { 1.0 };
            assert_eq!(d.tf.num().coeff_of_power(p), sign * d.tf.den().coeff_of_power(p));
        }
        assert_eq!(num.len(), den.len());
    }

    #[test]
    fn delay_line_shifts_exactly() {
        let mut line = DelayLine::<f64>::new(3);
        let input: Vec<f64> = (0..10).map(|k| (k as f64 * 0.7).sin()).collect();
        let out: Vec<f64> = input.iter().map(|&u| line.push(u)).collect();
        assert_eq!(&out[..3], &[0.0; 3]);
        assert_eq!(&out[3..], &input[..7]);
        let mut passthrough = DelayLine::<f64>::new(0);
        assert_eq!(passthrough.push(4.25), 4.25);
    }

    #[test]
    fn non_multiple_delay_rounds_to_nearest_sample() {
        assert_eq!(DelayLine::<f64>::for_delay(0.0249, 0.01).unwrap().len(), 2);
        assert_eq!(DelayLine::<f64>::for_delay(0.0251, 0.01).unwrap().len(), 3);
        assert_eq!(DelayLine::<f64>::for_delay(0.25, 0.01).unwrap().len(), 25);
        assert!(DelayLine::<f64>::for_delay(0.1, 0.0).is_err());
    }

    #[test]
    fn pure_delay_of_step() {
        let r = delayed_step_sim(&TransferFunction::unity(), 0.5, 0.01, 2.0, LoopTopology::Open).unwrap();
        for (t, y) in r.t.iter().zip(&r.y) {
            let want = if *t < 0.5 - 1e-9 { 0.0 } else { 1.0 };
            assert_eq!(*y, want, "t={t}");
        }
    }

    #[test]
    fn delayed_first_order_lag() {
        let r = delayed_step_sim(&tf(&[1.0], &[1.0, 1.0]), 0.25, 0.01, 5.0, LoopTopology::Open).unwrap();
        for (&t, &y) in r.t.iter().zip(&r.y) {
            let want = if t < 0.25 - 1e-9 { 0.0 } else { 1.0 - (-(t - 0.25)).exp() };
            assert!((y - want).abs() <= 1e-4, "t={t}");
        }
    }

    #[test]
    fn zero_delay_closed_loop_matches_rational_loop() {
        let fwd = tf(&[1.0, 2.0], &[1.0, 0.0]).series(&tf(&[1.0], &[1.0, 1.0]));
        let oracle = delayed_step_sim(&fwd, 0.0, 0.01, 10.0, LoopTopology::UnityFeedback).unwrap();
        let direct = step_response(&crate::lti::feedback(&fwd).unwrap(), 0.01, 10.0).unwrap();
        let worst = oracle.y.iter().zip(&direct.y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn dfr_loop_versus_exact_delay_loop_for_zn_gains() {
        let plant = PlantFolpd::new(1.0f64, 1.0, 0.1).unwrap();
        let gains = ziegler_nichols(&plant).unwrap();
        let c = pid_tf(&gains).unwrap();
        let exact = delayed_step_sim(&c.series(&plant.lag()), 0.1, 0.01, 15.0, LoopTopology::UnityFeedback).unwrap();
        let approx =
            step_response(&closed_loop(&c, &plant.lag(), &dfr_delay(0.1).unwrap().tf).unwrap(), 0.01, 15.0).unwrap();

        // The all-pass has unit gain at infinite frequency, so the derivative
        // kick reaches the output at t = 0: y(0) = Kd/(1 + Kd). The exact loop
        // stays at zero for a full delay.
        assert_eq!(exact.y[0], 0.0);
        assert!((approx.y[0] - gains.kd / (1.0 + gains.kd)).abs() < 1e-12);
        assert!(exact.y[..10].iter().all(|&y| y == 0.0));

        // Once the kick has washed out (t ≥ 10τ) the two loops agree closely.
        let tail = exact
            .t
            .iter()
            .zip(exact.y.iter().zip(&approx.y))
            .filter(|(&t, _)| t >= 1.0 - 1e-9)
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(tail <= 0.05, "{tail}");
    }

    #[test]
    fn invalid_step_rejected() {
        assert!(delayed_step_sim(&TransferFunction::<f64>::unity(), 0.1, 0.0, 1.0, LoopTopology::Open).is_err());
    }

    proptest! {
        #[test]
        fn magnitude_is_unity(tau in 1e-3f64..5.0, k in 0usize..50) {
            let omega = 10f64.powf(-2.0 + 4.0 * k as f64 / 49.0);
            let h = dfr_delay(tau).unwrap().tf.freq_response(omega);
            prop_assert!((h.norm() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn phase_tracks_delay_at_low_frequency(tau in 1e-3f64..5.0, frac in 0.0f64..1.0) {
            let omega = frac / tau;
            let h = dfr_delay(tau).unwrap().tf.freq_response(omega);
            prop_assert!((h.arg() + omega * tau).abs() <= 0.01);
        }

        #[test]
        fn shift_theorem_on_stable_lags(tc in 0.2f64..3.0, steps in 1usize..80) {
            let tau = steps as f64 * 0.01;
            let lag = tf(&[1.0], &[tc, 1.0]);
            let delayed = delayed_step_sim(&lag, tau, 0.01, 4.0, LoopTopology::Open).unwrap();
            let plain = step_response(&lag, 0.01, 4.0).unwrap();
            for k in 0..delayed.len() {
                let want = if k < steps { 0.0 } else { plain.y[k - steps] };
                prop_assert!((delayed.y[k] - want).abs() <= 1e-12);
            }
        }
    }
}
