use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::DEFAULT_FUEL;
use crate::expr::DEFAULT_MAX_DEPTH;
use crate::schemes::DEFAULT_MAX_STEPS;
use crate::template::Limits;

/// Search parameters for one evolutionary run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GPConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub max_depth: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub elitism: usize,
    /// Fix fold nil slots to the neutral value of their type.
    pub nil_default_policy: bool,
    pub fuel: u64,
    pub max_steps: usize,
    /// Error assigned to a case that fails with an evaluation signal.
    pub penalty: f64,
    pub train_cases: usize,
    pub validation_cases: usize,
    /// Maximum number of cached genome scores before the cache is flushed.
    pub cache_limit: usize,
    pub seed: u64,
}

impl Default for GPConfig {
    fn default() -> Self {
        GPConfig {
            population_size: 1000,
            max_generations: 300,
            max_depth: DEFAULT_MAX_DEPTH,
            tournament_size: 7,
            crossover_rate: 0.8,
            mutation_rate: 0.2,
            elitism: 1,
            nil_default_policy: true,
            fuel: DEFAULT_FUEL,
            max_steps: DEFAULT_MAX_STEPS,
            penalty: 1e6,
            train_cases: 100,
            validation_cases: 100,
            cache_limit: 200_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

impl GPConfig {
    /// Reads a configuration from TOML; missing keys keep their defaults.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let c: GPConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn limits(&self) -> Limits {
        Limits { fuel: self.fuel, max_steps: self.max_steps }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("population_size", self.population_size),
            ("tournament_size", self.tournament_size),
            ("train_cases", self.train_cases),
            ("max_steps", self.max_steps),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(ConfigError(format!("{name} must be positive")));
            }
        }
        if self.fuel == 0 {
            return Err(ConfigError("fuel must be positive".into()));
        }
        for (name, r) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(ConfigError(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.crossover_rate + self.mutation_rate > 1.0 + 1e-12 {
            return Err(ConfigError("crossover_rate + mutation_rate must not exceed 1".into()));
        }
        if self.elitism > self.population_size {
            return Err(ConfigError("elitism exceeds population_size".into()));
        }
        if !(self.penalty.is_finite() && self.penalty > 0.0) {
            return Err(ConfigError("penalty must be positive and finite".into()));
        }
        Ok(())
    }
}

/// Derives the seed of the `index`-th independent stream from a master seed
/// (SplitMix64 finalizer over the master seed advanced by `index + 1` steps).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
