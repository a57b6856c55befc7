//! Rational transfer-function algebra and fixed-step step-response simulation.
//!
//! All polynomials use descending powers of `s`.

mod polynomial;
mod response;
mod state_space;
mod transfer;

pub use polynomial::Polynomial;
pub use response::{sample_count, step_response, Rk4Propagator, StepResponse, DIVERGENCE_LIMIT};
pub use state_space::{root_radius_bound, to_state_space, StateSpace};
pub use transfer::{closed_loop, feedback, pid_tf, TransferFunction};

pub(crate) use response::state_diverged;
pub(crate) use state_space::balanced_realization;
