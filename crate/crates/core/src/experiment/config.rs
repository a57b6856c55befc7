use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::ga::GaConfig;
use crate::metrics::ObjectiveKind;
use crate::tuners::{GeneBounds, PlantFolpd};
use crate::{Error, Result};

/// Delay grid used by default, in seconds.
pub const DEFAULT_DELAYS: [f64; 9] = [0.01, 0.025, 0.05, 0.075, 0.1, 0.25, 0.5, 0.75, 1.0];
pub const DEFAULT_SEED: u64 = 20_070_101;

/// How the stability margin column is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MarginKind {
    /// Largest proportional gain `K_c` (with `Kd`, `Ki` held) before instability.
    #[default]
    ProportionalGain,
    /// Largest multiplier of the whole loop gain before instability.
    LoopGain,
}

impl FromStr for MarginKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "proportional" => Ok(MarginKind::ProportionalGain),
            "loop" => Ok(MarginKind::LoopGain),
            other => Err(Error::InvalidConfig(format!("margin must be 'proportional' or 'loop', got '{other}'"))),
        }
    }
}

impl fmt::Display for MarginKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarginKind::ProportionalGain => "proportional",
            MarginKind::LoopGain => "loop",
        })
    }
}

/// GA operator settings shared by every (delay, objective) run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaSettings {
    pub pop_size: usize,
    pub max_generations: usize,
    pub selection_q: f64,
    /// Defaults to `pop_size / 2`.
    pub crossover_pairs: Option<usize>,
    pub mutation_prob: f64,
    pub elite_count: usize,
    /// Gene bounds are `[0, factor·gene]` around the Ziegler-Nichols gains.
    pub bounds_factor: f64,
}

impl Default for GaSettings {
    fn default() -> Self {
        Self {
            pop_size: GaConfig::DEFAULT_POP_SIZE,
            max_generations: GaConfig::DEFAULT_MAX_GENERATIONS,
            selection_q: GaConfig::DEFAULT_SELECTION_Q,
            crossover_pairs: None,
            mutation_prob: GaConfig::DEFAULT_MUTATION_PROB,
            elite_count: GaConfig::DEFAULT_ELITE_COUNT,
            bounds_factor: 2.0,
        }
    }
}

impl GaSettings {
    pub fn to_config(&self, bounds: GeneBounds<f64>, seed: u64) -> GaConfig {
        GaConfig {
            pop_size: self.pop_size,
            max_generations: self.max_generations,
            selection_q: self.selection_q,
            crossover_pairs_per_gen: self.crossover_pairs.unwrap_or(self.pop_size / 2),
            mutation_prob: self.mutation_prob,
            elite_count: self.elite_count,
            bounds,
            rng_seed: seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Plant gain and time constant; the per-run delay comes from `delays`.
    pub plant: PlantFolpd<f64>,
    pub delays: Vec<f64>,
    pub objectives: Vec<ObjectiveKind>,
    pub dt: f64,
    pub horizon: f64,
    pub ga: GaSettings,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Optional external reference series overlaid on the plots.
    pub reference_csv: Option<PathBuf>,
    pub margin: MarginKind,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            plant: PlantFolpd { gain: 1.0, time_constant: 1.0, delay: 0.0 },
            delays: DEFAULT_DELAYS.to_vec(),
            objectives: ObjectiveKind::ALL.to_vec(),
            dt: 0.01,
            horizon: 15.0,
            ga: GaSettings::default(),
            seed: DEFAULT_SEED,
            output_dir: PathBuf::from("results"),
            reference_csv: None,
            margin: MarginKind::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses `key = value` lines over the defaults. `#` starts a comment;
    /// unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::InvalidConfig(format!("line {}: {msg}", lineno + 1));
            let (key, value) =
                line.split_once('=').ok_or_else(|| bad(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(bad(format!("duplicate key '{key}'")));
            }
            cfg.set(key, value).map_err(|e| match e {
                Error::InvalidConfig(msg) => bad(msg),
                other => other,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "gain" => self.plant.gain = num(key, value)?,
            "time_constant" => self.plant.time_constant = num(key, value)?,
            "delays" => {
                self.delays = value.split(',').map(|v| num(key, v.trim())).collect::<Result<_>>()?;
            }
            "objectives" => {
                self.objectives = value.split(',').map(|v| v.trim().parse()).collect::<Result<_>>()?;
            }
            "dt" => self.dt = num(key, value)?,
            "horizon" => self.horizon = num(key, value)?,
            "pop_size" => self.ga.pop_size = num(key, value)?,
            "generations" => self.ga.max_generations = num(key, value)?,
            "selection_q" => self.ga.selection_q = num(key, value)?,
            "crossover_pairs" => self.ga.crossover_pairs = Some(num(key, value)?),
            "mutation_prob" => self.ga.mutation_prob = num(key, value)?,
            "elite_count" => self.ga.elite_count = num(key, value)?,
            "bounds_factor" => self.ga.bounds_factor = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "reference_csv" => self.reference_csv = Some(PathBuf::from(value)),
            "margin" => self.margin = value.parse()?,
            other => return Err(Error::InvalidConfig(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        PlantFolpd::new(self.plant.gain, self.plant.time_constant, 0.0)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if self.plant.gain <= 0.0 {
            return fail(format!("plant gain must be positive for Ziegler-Nichols bounds, got {}", self.plant.gain));
        }
        if self.delays.is_empty() {
            return fail("at least one delay is required".into());
        }
        if self.delays.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return fail(format!("delays must be positive, got {:?}", self.delays));
        }
        if self.delays.windows(2).any(|w| w[0] >= w[1]) {
            return fail(format!("delays must be strictly ascending, got {:?}", self.delays));
        }
        if self.objectives.is_empty() {
            return fail("at least one objective is required".into());
        }
        let mut objectives = self.objectives.clone();
        objectives.sort();
        objectives.dedup();
        if objectives.len() != self.objectives.len() {
            return fail("objectives must not repeat".into());
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.horizon.is_finite() && self.horizon >= self.dt) {
            return fail(format!("need dt > 0 and horizon >= dt, got dt={} horizon={}", self.dt, self.horizon));
        }
        if !(self.ga.bounds_factor.is_finite() && self.ga.bounds_factor > 1.0) {
            return fail(format!("bounds_factor must exceed 1, got {}", self.ga.bounds_factor));
        }
        let probe = GeneBounds::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0))?;
        self.ga.to_config(probe, self.seed).validate().map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Delays that are not integer multiples of `dt` (to 1e−9), which the
    /// exact delay-line reference would round.
    pub fn off_grid_delays(&self) -> Vec<f64> {
        self.delays
            .iter()
            .copied()
            .filter(|d| {
                let r = d / self.dt;
                (r - r.round()).abs() > 1e-9
            })
            .collect()
    }

    pub fn plant_with_delay(&self, delay: f64) -> Result<PlantFolpd<f64>> {
        self.plant.with_delay(delay)
    }
}

fn num<N: FromStr>(key: &str, value: &str) -> Result<N> {
    value.parse().map_err(|_| Error::InvalidConfig(format!("invalid value '{value}' for '{key}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.delays.len(), 9);
        assert_eq!(cfg.objectives.len(), 5);
        assert_eq!(cfg.off_grid_delays(), vec![0.025, 0.075]);
    }

    #[test]
    fn parses_keys_and_comments() {
        let cfg = ExperimentConfig::parse(
            "# demo\n\
             delays = 0.1, 0.25  # two delays\n\
             objectives = ise,ITAE\n\
             pop_size = 40\n\
             generations = 25\n\
             seed = 7\n\
             margin = loop\n\
             output_dir = out/run1\n",
        )
        .unwrap();
        assert_eq!(cfg.delays, vec![0.1, 0.25]);
        assert_eq!(cfg.objectives, vec![ObjectiveKind::Ise, ObjectiveKind::Itae]);
        assert_eq!(cfg.ga.pop_size, 40);
        assert_eq!(cfg.ga.max_generations, 25);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.margin, MarginKind::LoopGain);
        assert_eq!(cfg.output_dir, PathBuf::from("out/run1"));
        assert_eq!(
            cfg.ga.to_config(GeneBounds::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)).unwrap(), 1).crossover_pairs_per_gen,
            20
        );
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "colour = blue",
            "delays = 0.5, 0.1",
            "delays = 0, 0.1",
            "delays = 0.1, abc",
            "objectives = mse, mse",
            "objectives = foo",
            "dt = 0",
            "bounds_factor = 1",
            "selection_q = 1.5",
            "pop_size = 10\nelite_count = 10",
            "seed = 1\nseed = 2",
            "just a line",
            "gain = 0",
            "gain = -1",
        ] {
            assert!(matches!(ExperimentConfig::parse(text), Err(Error::InvalidConfig(_))), "{text}");
        }
    }

    #[test]
    fn flags_off_grid_delays() {
        let cfg = ExperimentConfig::parse("delays = 0.1, 0.125\ndt = 0.01").unwrap();
        assert_eq!(cfg.off_grid_delays(), vec![0.125]);
    }
}
