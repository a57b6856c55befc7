//! Ziegler-Nichols baseline for FOLPD plants and GA gene bounds derived from it.

use crate::lti::TransferFunction;
use crate::{Error, Result, Scalar};

/// First-order lag plus dead time `K·e^{−Ls} / (Ts + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantFolpd<T> {
    pub gain: T,
    pub time_constant: T,
    pub delay: T,
}

impl<T: Scalar> PlantFolpd<T> {
    pub fn new(gain: T, time_constant: T, delay: T) -> Result<Self> {
        if gain.is_zero() || !gain.is_finite() {
            return Err(Error::InvalidPlant(format!("gain must be finite and nonzero, got {gain}")));
        }
        if !(time_constant > T::zero()) || !time_constant.is_finite() {
            return Err(Error::InvalidPlant(format!("time constant must be positive, got {time_constant}")));
        }
        if !(delay >= T::zero()) || !delay.is_finite() {
            return Err(Error::InvalidDelay(delay.to_f64_lossy()));
        }
        Ok(Self { gain, time_constant, delay })
    }

    pub fn with_delay(self, delay: T) -> Result<Self> {
        Self::new(self.gain, self.time_constant, delay)
    }

    /// The delay-free lag `K / (Ts + 1)`.
    pub fn lag(&self) -> TransferFunction<T> {
        TransferFunction::from_coeffs(&[self.gain], &[self.time_constant, T::one()]).expect("positive time constant")
    }
}

/// PID gains in chromosome order `(Kd, Kp, Ki)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidGains<T> {
    pub kd: T,
    pub kp: T,
    pub ki: T,
}

impl<T: Scalar> PidGains<T> {
    pub fn new(kd: T, kp: T, ki: T) -> Self {
        Self { kd, kp, ki }
    }

    pub fn from_array([kd, kp, ki]: [T; 3]) -> Self {
        Self { kd, kp, ki }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.kd, self.kp, self.ki]
    }

    pub fn is_valid(&self) -> bool {
        self.to_array().iter().all(|g| g.is_finite() && *g >= T::zero())
    }
}

/// Closed search interval for one gene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub low: T,
    pub high: T,
}

impl<T: Scalar> Interval<T> {
    pub fn contains(&self, x: T) -> bool {
        x >= self.low && x <= self.high
    }

    pub fn width(&self) -> T {
        self.high - self.low
    }
}

/// Per-gene search bounds in chromosome order `(Kd, Kp, Ki)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneBounds<T> {
    pub genes: [Interval<T>; 3],
}

impl<T: Scalar> GeneBounds<T> {
    pub fn new(kd: (T, T), kp: (T, T), ki: (T, T)) -> Result<Self> {
        let genes = [kd, kp, ki].map(|(low, high)| Interval { low, high });
        for g in &genes {
            if !(g.low >= T::zero() && g.low < g.high && g.high.is_finite()) {
                return Err(Error::InvalidGaConfig(format!(
                    "gene bounds must satisfy 0 <= low < high, got [{}, {}]",
                    g.low, g.high
                )));
            }
        }
        Ok(Self { genes })
    }

    pub fn contains(&self, genes: &[T; 3]) -> bool {
        self.genes.iter().zip(genes).all(|(b, &g)| b.contains(g))
    }
}

/// Open-loop (process reaction curve) Ziegler-Nichols PID rule:
/// `Kp = 1.2·T/(K·L)`, `Ti = 2L`, `Td = 0.5L`, `Ki = Kp/Ti`, `Kd = Kp·Td`.
pub fn ziegler_nichols<T: Scalar>(plant: &PlantFolpd<T>) -> Result<PidGains<T>> {
    if !(plant.delay > T::zero()) {
        return Err(Error::ZieglerNicholsUndefined);
    }
    let l = plant.delay;
    let kp = T::lit(1.2) * plant.time_constant / (plant.gain * l);
    let ti = T::lit(2.0) * l;
    let td = T::lit(0.5) * l;
    Ok(PidGains { kd: kp * td, kp, ki: kp / ti })
}

/// Bounds `[0, factor·gene]` per gene; a zero gene gets `[0, factor]`.
///
/// # Panics
/// If `factor <= 1` or a baseline gain is negative or non-finite.
pub fn bounds_from_baseline<T: Scalar>(base: &PidGains<T>, factor: T) -> GeneBounds<T> {
    assert!(factor > T::one(), "bounds factor must exceed 1");
    assert!(base.is_valid(), "baseline gains must be finite and non-negative");
    let span = |g: T| (T::zero(), if g.is_zero() { factor } else { factor * g });
    GeneBounds::new(span(base.kd), span(base.kp), span(base.ki)).expect("factor > 1 gives non-empty bounds")
}
