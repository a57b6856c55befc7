use std::fmt;
use std::str::FromStr;

use crate::lti::StepResponse;
use crate::{Error, Scalar};

/// Fitness assigned to a zero (or sub-1e−12) index value.
pub const FITNESS_CAP: f64 = 1e12;
/// Fitness assigned to diverged responses and non-finite evaluations.
pub const FITNESS_PENALTY: f64 = 1e-12;

/// Error-integral criterion minimized by the tuner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectiveKind {
    Mse,
    Itae,
    Iae,
    Ise,
    Itse,
}

impl ObjectiveKind {
    /// Report order: MSE, IAE, ISE, ITAE, ITSE.
    pub const ALL: [ObjectiveKind; 5] =
        [ObjectiveKind::Mse, ObjectiveKind::Iae, ObjectiveKind::Ise, ObjectiveKind::Itae, ObjectiveKind::Itse];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::Mse => "mse",
            ObjectiveKind::Itae => "itae",
            ObjectiveKind::Iae => "iae",
            ObjectiveKind::Ise => "ise",
            ObjectiveKind::Itse => "itse",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mse" => Ok(ObjectiveKind::Mse),
            "itae" => Ok(ObjectiveKind::Itae),
            "iae" => Ok(ObjectiveKind::Iae),
            "ise" => Ok(ObjectiveKind::Ise),
            "itse" => Ok(ObjectiveKind::Itse),
            other => Err(Error::InvalidConfig(format!("unknown objective '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerformanceIndices<T> {
    pub mse: T,
    pub itae: T,
    pub iae: T,
    pub ise: T,
    pub itse: T,
}

impl<T: Scalar> PerformanceIndices<T> {
    pub fn get(&self, kind: ObjectiveKind) -> T {
        match kind {
            ObjectiveKind::Mse => self.mse,
            ObjectiveKind::Itae => self.itae,
            ObjectiveKind::Iae => self.iae,
            ObjectiveKind::Ise => self.ise,
            ObjectiveKind::Itse => self.itse,
        }
    }
}

/// dt-weighted Riemann sums of the error integrals over every sample,
/// with `MSE = ISE / horizon`.
pub fn indices<T: Scalar>(resp: &StepResponse<T>) -> PerformanceIndices<T> {
    let dt = resp.dt;
    let mut out = PerformanceIndices::<T>::default();
    for (&t, &e) in resp.t.iter().zip(&resp.e) {
        let abs = e.abs();
        let sq = e * e;
        out.iae = out.iae + abs;
        out.ise = out.ise + sq;
        out.itae = out.itae + t * abs;
        out.itse = out.itse + t * sq;
    }
    out.iae = out.iae * dt;
    out.ise = out.ise * dt;
    out.itae = out.itae * dt;
    out.itse = out.itse * dt;
    out.mse = out.ise / resp.horizon;
    out
}

/// `1 / index`, capped at [`FITNESS_CAP`] for vanishing indices.
pub fn fitness<T: Scalar>(index_value: T) -> T {
    if index_value.is_nan() {
        return T::lit(FITNESS_PENALTY);
    }
    if index_value < T::lit(1.0 / FITNESS_CAP) {
        T::lit(FITNESS_CAP)
    } else {
        T::one() / index_value
    }
}

/// Fitness of a simulated response under one objective; diverged responses
/// get [`FITNESS_PENALTY`].
pub fn response_fitness<T: Scalar>(resp: &StepResponse<T>, kind: ObjectiveKind) -> T {
    if resp.diverged {
        return T::lit(FITNESS_PENALTY);
    }
    fitness(indices(resp).get(kind))
}
