//! The generational loop and multi-template racing.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::prims::Primitive;
use crate::template::{Genome, Slot, Template, TemplateKind};
use crate::types::{SemType, TypeUniverse};

use super::config::{derive_seed, ConfigError, GPConfig};
use super::fitness::{fitness, total_error, Case, Scoring};
use super::gen::{Generator, Unconstructible};
use super::variation::{better, tournament, Space};

/// One search problem: a template plus its data.
#[derive(Debug, Clone, Copy)]
pub struct Task<'a> {
    pub template: &'a Template,
    pub prims: &'a [&'static Primitive],
    pub train: &'a [Case],
    pub validation: &'a [Case],
    pub rounding: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub template: TemplateKind,
    pub best: Genome,
    pub train_error: f64,
    /// Only measured when the training cases are solved.
    pub validation_error: Option<f64>,
    /// Perfect on both training and validation cases.
    pub solved: bool,
    /// Completed generations after the initial population.
    pub generations: usize,
    /// Best training error after initialization and after each generation.
    pub history: Vec<f64>,
    pub evaluations: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("slot cannot be filled: {0}")]
    Unconstructible(#[from] Unconstructible),
    #[error("no template to search")]
    NoTemplates,
}

/// Types a slot body may compute with: `Bool` plus the subterms of the
/// slot's return type and variable types.
pub fn universe_for_slot(slot: &Slot) -> TypeUniverse {
    TypeUniverse::scoped(std::iter::once(&slot.ret).chain(slot.vars.iter().map(|(_, t)| t)))
}

/// Types available for instantiating polymorphic primitives in a template:
/// `Bool` plus the subterms of the signature and slot types.
pub fn universe_for(template: &Template) -> TypeUniverse {
    let mut seeds: Vec<&SemType> = template.sig.params.iter().chain(std::iter::once(&template.sig.ret)).collect();
    for s in &template.slots {
        seeds.push(&s.ret);
        seeds.extend(s.vars.iter().map(|(_, t)| t));
    }
    TypeUniverse::scoped(seeds.into_iter().filter(|t| !t.contains_fn()))
}

struct Scorer<'a> {
    task: &'a Task<'a>,
    scoring: Scoring,
    cache: HashMap<Genome, f64>,
    limit: usize,
    evaluations: usize,
}

impl Scorer<'_> {
    fn score(&mut self, g: &Genome) -> f64 {
        if let Some(e) = self.cache.get(g) {
            return *e;
        }
        self.evaluations += 1;
        let e = total_error(g, self.task.template, self.task.train, &self.scoring);
        if self.cache.len() >= self.limit {
            self.cache.clear();
        }
        self.cache.insert(g.clone(), e);
        e
    }
}

fn best_index(scores: &[(f64, usize)]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if better(*s, scores[best]) {
            best = i;
        }
    }
    best
}

/// Runs one evolutionary search. Fully determined by the task and
/// `config` (including `config.seed`).
pub fn evolve(task: &Task<'_>, config: &GPConfig) -> Result<RunOutcome, EvolveError> {
    config.validate()?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let generator = Generator::new(task.prims.to_vec(), universe_for(task.template));
    let space = Space::new(task.template, &generator, config.max_depth, config.nil_default_policy);
    let scoring = Scoring { rounding: task.rounding, penalty: config.penalty, limits: config.limits() };
    let mut scorer = Scorer { task, scoring, cache: HashMap::new(), limit: config.cache_limit.max(1), evaluations: 0 };

    let mut pop = Vec::with_capacity(config.population_size);
    for _ in 0..config.population_size {
        pop.push(space.random_genome(&mut rng)?);
    }
    let mut scores: Vec<(f64, usize)> = pop.iter().map(|g| (scorer.score(g), g.size())).collect();
    let mut best = best_index(&scores);
    let mut history = vec![scores[best].0];
    let mut generations = 0;

    while generations < config.max_generations && scores[best].0 > 0.0 {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|a, b| {
            scores[*a].0.total_cmp(&scores[*b].0).then(scores[*a].1.cmp(&scores[*b].1)).then(a.cmp(b))
        });
        let mut next: Vec<Genome> = order.iter().take(config.elitism).map(|i| pop[*i].clone()).collect();
        while next.len() < config.population_size {
            let p = tournament(&scores, config.tournament_size, &mut rng);
            let r: f64 = rng.gen();
            let child = if r < config.crossover_rate {
                let q = tournament(&scores, config.tournament_size, &mut rng);
                space.crossover(&pop[p], &pop[q], &mut rng)
            } else if r < config.crossover_rate + config.mutation_rate {
                space.mutate(&pop[p], &mut rng)
            } else {
                pop[p].clone()
            };
            next.push(child);
        }
        pop = next;
        scores = pop.iter().map(|g| (scorer.score(g), g.size())).collect();
        best = best_index(&scores);
        history.push(scores[best].0);
        generations += 1;
    }

    let champion = pop[best].clone();
    let train_error = scores[best].0;
    let validation_error =
        (train_error == 0.0).then(|| fitness(&champion, task.template, task.validation, &scoring).total());
    Ok(RunOutcome {
        template: task.template.kind,
        best: champion,
        train_error,
        validation_error,
        solved: validation_error == Some(0.0),
        generations,
        history,
        evaluations: scorer.evaluations,
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RaceOutcome {
    pub runs: Vec<RunOutcome>,
    /// Index into `runs` of the selected result.
    pub winner: usize,
}

impl RaceOutcome {
    pub fn best(&self) -> &RunOutcome {
        &self.runs[self.winner]
    }
}

/// Searches several templates concurrently with the generation budget split
/// evenly between them. The winner is the first solved run in task order,
/// otherwise the run with the lowest training error.
pub fn race(tasks: &[Task<'_>], config: &GPConfig) -> Result<RaceOutcome, EvolveError> {
    if tasks.is_empty() {
        return Err(EvolveError::NoTemplates);
    }
    let share = (config.max_generations / tasks.len()).max(usize::from(config.max_generations > 0));
    let configs: Vec<GPConfig> = (0..tasks.len())
        .map(|i| GPConfig { max_generations: share, seed: derive_seed(config.seed, i as u64), ..config.clone() })
        .collect();
    let results: Vec<Result<RunOutcome, EvolveError>> = std::thread::scope(|s| {
        let handles: Vec<_> =
            tasks.iter().zip(&configs).map(|(t, c)| s.spawn(move || evolve(t, c))).collect();
        handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let winner = runs.iter().position(|r| r.solved).unwrap_or_else(|| {
        let mut w = 0;
        for (i, r) in runs.iter().enumerate() {
            if r.train_error < runs[w].train_error {
                w = i;
            }
        }
        w
    });
    Ok(RaceOutcome { runs, winner })
}
