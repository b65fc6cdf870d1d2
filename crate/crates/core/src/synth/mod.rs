//! Evolutionary search over template genomes.

pub mod config;
pub mod evolve;
pub mod fitness;
pub mod gen;
pub mod variation;

pub use config::{derive_seed, ConfigError, GPConfig};
pub use evolve::{evolve, race, universe_for, universe_for_slot, EvolveError, RaceOutcome, RunOutcome, Task};
pub use fitness::{case_error, fitness, levenshtein, total_error, value_error, Case, FitnessResult, Scoring};
pub use gen::{Generator, Unconstructible, TERMINAL_PROBABILITY};
pub use variation::{crossover_expr, mutate_expr, tournament, Space, VARIATION_ATTEMPTS};
