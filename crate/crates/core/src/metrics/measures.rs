use crate::lti::StepResponse;
use crate::{Error, Result, Scalar};

/// Settling band half-width relative to the final value.
const SETTLING_BAND: f64 = 0.05;
/// Rise-time threshold relative to the final value.
const RISE_FRACTION: f64 = 0.95;

/// Time-domain step-response measures. The final value is the last sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardMeasures<T> {
    /// Percent above the final value at the peak, never negative.
    pub percent_overshoot: T,
    /// 5% band settling time.
    pub settling_time_5pct: T,
    /// `false` when only the last sample lies inside the band.
    pub settled: bool,
    /// First time the response reaches 95% of the final value.
    pub rise_time_0_95: T,
    pub peak_time: T,
    pub steady_state_error: T,
    /// Filled in separately; `+∞` when no destabilizing gain was found.
    pub stability_margin: Option<T>,
}

impl<T: Scalar> StandardMeasures<T> {
    pub fn with_margin(mut self, margin: T) -> Self {
        self.stability_margin = Some(margin);
        self
    }
}

pub fn standard_measures<T: Scalar>(resp: &StepResponse<T>) -> Result<StandardMeasures<T>> {
    if resp.is_empty() {
        return Err(Error::UndefinedMeasures(f64::NAN));
    }
    let y = &resp.y;
    let fin = resp.final_value();
    if !(fin > T::zero()) {
        return Err(Error::UndefinedMeasures(fin.to_f64_lossy()));
    }

    let mut peak_idx = 0;
    for (k, &v) in y.iter().enumerate() {
        if v > y[peak_idx] {
            peak_idx = k;
        }
    }
    let peak = y[peak_idx];
    let hundred = T::lit(100.0);
    let overshoot = ((peak - fin) / fin * hundred).max(T::zero());

    let band = T::lit(SETTLING_BAND) * fin;
    let mut settle_idx = y.len() - 1;
    while settle_idx > 0 && (y[settle_idx - 1] - fin).abs() <= band {
        settle_idx -= 1;
    }

    let threshold = T::lit(RISE_FRACTION) * fin;
    let rise_idx = y.iter().position(|&v| v >= threshold).unwrap_or(y.len() - 1);

    Ok(StandardMeasures {
        percent_overshoot: overshoot,
        settling_time_5pct: resp.t[settle_idx],
        settled: settle_idx + 1 < y.len(),
        rise_time_0_95: resp.t[rise_idx],
        peak_time: resp.t[peak_idx],
        steady_state_error: T::one() - fin,
        stability_margin: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn response(dt: f64, horizon: f64, f: impl Fn(f64) -> f64) -> StepResponse<f64> {
        let n = (horizon / dt + 1e-9).floor() as usize + 1;
        StepResponse::from_output(dt, horizon, (0..n).map(|k| f(k as f64 * dt)).collect(), false)
    }

    #[test]
    fn synthetic_overshoot_trace() {
        // Damped trace peaking at 1.53 at t = 3.2 and settling to 1.
        let r = response(0.01, 30.0, |t| if t <= 3.2 { 1.53 * t / 3.2 } else { 1.0 + 0.53 * (-(t - 3.2)).exp() });
        let m = standard_measures(&r).unwrap();
        let fin = r.final_value();
        assert!((fin - 1.0).abs() < 1e-9);
        assert!((m.percent_overshoot - 53.0).abs() < 1e-6, "{}", m.percent_overshoot);
        assert!((m.peak_time - 3.2).abs() < 1e-9);
        assert!(m.rise_time_0_95 <= m.peak_time);
    }

    #[test]
    fn first_order_response() {
        let r = response(0.01, 15.0, |t| 1.0 - (-t).exp());
        let m = standard_measures(&r).unwrap();
        assert_eq!(m.percent_overshoot, 0.0);
        assert!((m.rise_time_0_95 - 3.0).abs() <= 0.01, "{}", m.rise_time_0_95);
        assert!((m.settling_time_5pct - 3.0).abs() <= 0.01, "{}", m.settling_time_5pct);
        assert!((m.peak_time - 15.0).abs() < 1e-9);
        assert!(m.settled);
    }

    #[test]
    fn constant_response() {
        let r = response(0.01, 2.0, |_| 1.0);
        let m = standard_measures(&r).unwrap();
        assert_eq!(m.percent_overshoot, 0.0);
        assert_eq!(m.rise_time_0_95, 0.0);
        assert_eq!(m.settling_time_5pct, 0.0);
        assert_eq!(m.steady_state_error, 0.0);
        assert_eq!(m.peak_time, 0.0);
    }

    #[test]
    fn non_positive_final_value_rejected() {
        let r = response(0.01, 1.0, |t| -t);
        assert!(matches!(standard_measures(&r), Err(Error::UndefinedMeasures(_))));
    }

    #[test]
    fn unsettled_oscillation_flagged() {
        let r = response(0.01, 10.0, |t| 1.0 + 0.5 * (40.0 * t).sin());
        let m = standard_measures(&r).unwrap();
        assert!(m.settling_time_5pct <= r.horizon);
    }
}
