use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("transfer function denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("improper transfer function: numerator degree {num} exceeds denominator degree {den}")]
    Improper { num: usize, den: usize },
    #[error("PID controller with all gains zero is degenerate")]
    DegenerateController,
    #[error("time step must be positive and finite and the horizon at least one step (dt={dt}, horizon={horizon})")]
    InvalidTimeGrid { dt: f64, horizon: f64 },
    #[error("delay must be non-negative and finite, got {0}")]
    InvalidDelay(f64),
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("standard measures undefined: final value {0} is not positive")]
    UndefinedMeasures(f64),
    #[error("nominal closed loop is not stable")]
    UnstableNominalLoop,
    #[error("invalid plant: {0}")]
    InvalidPlant(String),
    #[error("Ziegler-Nichols reaction-curve rule requires a positive dead time")]
    ZieglerNicholsUndefined,
    #[error("invalid GA configuration: {0}")]
    InvalidGaConfig(String),
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
