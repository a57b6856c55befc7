//! Performance indices, GA fitness, step-response measures, and Routh-based
//! stability margins.

mod indices;
mod margin;
mod measures;
mod routh;

pub use indices::{
    fitness, indices, response_fitness, ObjectiveKind, PerformanceIndices, FITNESS_CAP, FITNESS_PENALTY,
};
pub use margin::{stability_margin, ultimate_proportional_gain, MARGIN_CEILING};
pub use measures::{standard_measures, StandardMeasures};
pub use routh::routh_stable;
