//! Workloads shared by the criterion benches.

use foldsynth::problems::fixtures::fixture;
use foldsynth::synth::{universe_for, Generator, Scoring};
use foldsynth::{find, parse_genome, Case, GPConfig, Genome, Limits, Problem, Template};

/// A stored solution together with cases to run it on.
pub struct Workload {
    pub problem: Problem,
    pub template: Template,
    pub genome: Genome,
    pub cases: Vec<Case>,
}

impl Workload {
    /// Loads the fixture genome for `name` and `n` training cases.
    pub fn fixture(name: &str, n: usize) -> Workload {
        let problem = find(name).unwrap_or_else(|| panic!("unknown problem {name}"));
        let f = fixture(name).unwrap_or_else(|| panic!("no fixture for {name}"));
        let (template, genome) = parse_genome(f.genome).expect("fixture parses");
        let cases = problem.training_cases(n, 11);
        Workload { problem, template, genome, cases }
    }

    pub fn scoring(&self) -> Scoring {
        Scoring { rounding: self.problem.rounding, penalty: 1e6, limits: Limits::default() }
    }

    /// Generator over the problem's primitive set and the template's types.
    pub fn generator(&self) -> Generator {
        let prims = self.problem.prims().expect("known primitives");
        Generator::new(prims, universe_for(&self.template))
    }
}

/// A small configuration for timing whole searches.
pub fn quick_config(population_size: usize, max_generations: usize, seed: u64) -> GPConfig {
    GPConfig { population_size, max_generations, train_cases: 20, validation_cases: 20, seed, ..GPConfig::default() }
}
