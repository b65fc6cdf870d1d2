//! Benchmark problems: registry, case generation and experiment runs.

mod cases;
pub mod fixtures;
mod report;
mod problem_file;

use std::sync::Mutex;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use cases::{Builtin, GenParams};
pub use report::{RunRecord, RunReport};
pub use problem_file::{load_problem_file, parse_problem_file, ProblemFileError};

use crate::genome_file::render_genome;
use crate::prims::{builtin_set, lookup, user_set, Primitive};
use crate::synth::{derive_seed, evolve, race, Case, EvolveError, GPConfig, Task};
use crate::template::{build_template, templates_for, Incompatible, SchemeKind, Template, TemplateKind};
use crate::types::{parse_signature, Signature};
use crate::value::Value;

/// Where a problem's examples come from.
#[derive(Debug, Clone, PartialEq)]
pub enum CaseSource {
    Generated(Builtin),
    /// Fixed examples supplied by the user.
    Explicit { train: Vec<Case>, validation: Vec<Case> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub name: String,
    pub signature: Signature,
    pub description: String,
    /// Names of the user-provided primitives and constants.
    pub user_prims: Vec<String>,
    pub params: GenParams,
    /// Decimal places floats are rounded to before comparison.
    pub rounding: Option<u32>,
    /// The template the hand-written solution uses.
    pub template: Option<TemplateKind>,
    pub source: CaseSource,
}

struct Entry {
    builtin: Builtin,
    name: &'static str,
    sig: &'static str,
    template: TemplateKind,
    rounding: Option<u32>,
    description: &'static str,
}

const ENTRIES: [Entry; 13] = {
    use Builtin as B;
    use TemplateKind as T;
    const fn e(
        builtin: Builtin,
        name: &'static str,
        sig: &'static str,
        template: TemplateKind,
        description: &'static str,
    ) -> Entry {
        Entry { builtin, name, sig, template, rounding: None, description }
    }
    [
        e(B::CountOdds, "count-odds", "[Int] -> Int", T::CataReduce, "number of odd integers in a list"),
        e(
            B::DoubleLetters,
            "double-letters",
            "[Char] -> [Char]",
            T::CataMap,
            "double every letter and triple every exclamation point",
        ),
        e(B::NegativeToZero, "negative-to-zero", "[Int] -> [Int]", T::CataMap, "replace negative integers by 0"),
        e(
            B::ReplaceSpaceWithNewline,
            "replace-space-with-newline",
            "[Char] -> ([Char], Int)",
            T::CataTuple,
            "replace spaces by newlines and count non-whitespace characters",
        ),
        e(B::ScrabbleScore, "scrabble-score", "[Char] -> Int", T::CataReduce, "scrabble score of a string"),
        e(
            B::StringLengthsBackwards,
            "string-lengths-backwards",
            "[[Char]] -> [Int]",
            T::CataMap,
            "lengths of a list of strings in reverse order",
        ),
        e(B::Syllables, "syllables", "[Char] -> Int", T::CataReduce, "number of vowels (a, e, i, o, u, y)"),
        e(
            B::LastIndexOfZero,
            "last-index-of-zero",
            "[Int] -> Int",
            T::AccuIndex,
            "index of the last 0 in a list containing at least one 0",
        ),
        Entry {
            builtin: B::VectorAverage,
            name: "vector-average",
            sig: "[Float] -> Float",
            template: T::AccuCombine,
            rounding: Some(4),
            description: "mean of a nonempty vector, rounded to 4 decimal places",
        },
        e(
            B::Checksum,
            "checksum",
            "[Char] -> Char",
            T::AccuIndex,
            "character with code (sum of codes mod 64) + 32",
        ),
        e(
            B::ForLoopIndex,
            "for-loop-index",
            "Int -> Int -> Int -> [Int]",
            T::AnaStd,
            "start, start + step, ... while below end",
        ),
        e(
            B::CollatzNumbers,
            "collatz-numbers",
            "Int -> Int",
            T::HyloStd,
            "number of terms in the hailstone sequence starting at n",
        ),
        e(
            B::SuperAnagrams,
            "super-anagrams",
            "[Char] -> [Char] -> Bool",
            T::CataFn,
            "whether every character of x occurs in y at least as often",
        ),
    ]
};

fn from_entry(e: &Entry) -> Problem {
    Problem {
        name: e.name.to_string(),
        signature: parse_signature(e.sig).expect("registry signature"),
        description: e.description.to_string(),
        user_prims: user_set(e.name).map(|ps| ps.iter().map(|p| p.name.to_string()).collect()).unwrap_or_default(),
        params: GenParams::default(),
        rounding: e.rounding,
        template: Some(e.template),
        source: CaseSource::Generated(e.builtin),
    }
}

/// Every registered problem.
pub fn registry() -> Vec<Problem> {
    ENTRIES.iter().map(from_entry).collect()
}

pub fn is_registered(name: &str) -> bool {
    ENTRIES.iter().any(|e| e.name == name)
}

pub fn find(name: &str) -> Option<Problem> {
    ENTRIES.iter().find(|e| e.name == name).map(from_entry)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("unknown primitive '{0}'")]
    UnknownPrimitive(String),
    #[error(transparent)]
    Incompatible(#[from] Incompatible),
    #[error("no template fits signature {0}")]
    NoTemplate(String),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
}

impl Problem {
    pub fn builtin(&self) -> Option<Builtin> {
        match self.source {
            CaseSource::Generated(b) => Some(b),
            CaseSource::Explicit { .. } => None,
        }
    }

    /// Builtin primitives plus this problem's user primitives.
    pub fn prims(&self) -> Result<Vec<&'static Primitive>, ProblemError> {
        let mut ps = builtin_set();
        for name in &self.user_prims {
            let p = lookup(name).ok_or_else(|| ProblemError::UnknownPrimitive(name.clone()))?;
            if !ps.iter().any(|q| q.id == p.id) {
                ps.push(p);
            }
        }
        Ok(ps)
    }

    /// The reference answer; `None` for problems defined only by examples.
    pub fn oracle(&self, inputs: &[Value]) -> Option<Value> {
        self.builtin().map(|b| b.oracle(inputs))
    }

    /// `n` training cases: mandated edge cases first, then random ones.
    pub fn training_cases(&self, n: usize, seed: u64) -> Vec<Case> {
        match &self.source {
            CaseSource::Generated(b) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut inputs: Vec<Vec<Value>> = b.edge_cases().into_iter().take(n).collect();
                while inputs.len() < n {
                    inputs.push(b.random_inputs(&self.params, &mut rng));
                }
                inputs.into_iter().map(|i| Case { expected: b.oracle(&i), inputs: i }).collect()
            }
            CaseSource::Explicit { train, .. } => train.iter().take(n).cloned().collect(),
        }
    }

    /// `n` held-out random cases.
    pub fn validation_cases(&self, n: usize, seed: u64) -> Vec<Case> {
        match &self.source {
            CaseSource::Generated(_) => generate_cases(self, n, seed),
            CaseSource::Explicit { validation, train } => {
                let v = if validation.is_empty() { train } else { validation };
                v.iter().take(n).cloned().collect()
            }
        }
    }
}

/// `n` random cases with oracle answers. Empty for example-only problems.
pub fn generate_cases(p: &Problem, n: usize, seed: u64) -> Vec<Case> {
    let Some(b) = p.builtin() else { return Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let inputs = b.random_inputs(&p.params, &mut rng);
            Case { expected: b.oracle(&inputs), inputs }
        })
        .collect()
}

/// How the template(s) for a run are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// The problem's own template, or a race over every fitting template.
    #[default]
    Auto,
    Scheme(SchemeKind),
    Forced(TemplateKind),
}

impl Selection {
    pub fn templates(self, p: &Problem) -> Result<Vec<Template>, ProblemError> {
        let kinds = match self {
            Selection::Forced(k) => vec![k],
            Selection::Auto => match p.template {
                Some(k) => vec![k],
                None => templates_for(&p.signature),
            },
            Selection::Scheme(s) => {
                s.templates().iter().copied().filter(|k| build_template(*k, &p.signature).is_ok()).collect()
            }
        };
        if kinds.is_empty() {
            return Err(ProblemError::NoTemplate(p.signature.to_string()));
        }
        kinds.into_iter().map(|k| Ok(build_template(k, &p.signature)?)).collect()
    }
}

/// Seeds used by the `run`-th run of an experiment with master seed `master`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSeeds {
    pub run: u64,
    pub train: u64,
    pub validation: u64,
    pub search: u64,
}

impl RunSeeds {
    pub fn new(master: u64, run: usize) -> Self {
        let run = derive_seed(master, run as u64);
        RunSeeds { run, train: derive_seed(run, 0), validation: derive_seed(run, 1), search: derive_seed(run, 2) }
    }
}

/// One synthesis run: fresh data, then a search over the selected templates.
pub fn synthesize(p: &Problem, selection: Selection, config: &GPConfig, seeds: RunSeeds) -> Result<RunRecord, ProblemError> {
    let start = Instant::now();
    let templates = selection.templates(p)?;
    let prims = p.prims()?;
    let train = p.training_cases(config.train_cases, seeds.train);
    let validation = p.validation_cases(config.validation_cases, seeds.validation);
    let tasks: Vec<Task<'_>> = templates
        .iter()
        .map(|t| Task { template: t, prims: &prims, train: &train, validation: &validation, rounding: p.rounding })
        .collect();
    let cfg = GPConfig { seed: seeds.search, ..config.clone() };
    let (outcome, template) = if tasks.len() == 1 {
        (evolve(&tasks[0], &cfg)?, &templates[0])
    } else {
        let r = race(&tasks, &cfg)?;
        let w = r.winner;
        (r.runs.into_iter().nth(w).expect("winner index"), &templates[w])
    };
    Ok(RunRecord {
        seed: seeds.run,
        solved: outcome.solved,
        generations: outcome.generations,
        seconds: start.elapsed().as_secs_f64(),
        template: template.kind,
        train_error: outcome.train_error,
        validation_error: outcome.validation_error,
        genome: render_genome(template, &outcome.best),
    })
}

/// Runs `runs` independent searches, up to `parallel` at a time. Records
/// appear in run order regardless of completion order.
pub fn run_benchmark(
    p: &Problem,
    runs: usize,
    selection: Selection,
    config: &GPConfig,
    parallel: usize,
) -> Result<RunReport, ProblemError> {
    let slots: Vec<Mutex<Option<Result<RunRecord, ProblemError>>>> = (0..runs).map(|_| Mutex::new(None)).collect();
    let next = Mutex::new(0usize);
    let workers = parallel.clamp(1, runs.max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = {
                    let mut n = next.lock().expect("work counter");
                    if *n >= runs {
                        break;
                    }
                    *n += 1;
                    *n - 1
                };
                let r = synthesize(p, selection, config, RunSeeds::new(config.seed, i));
                *slots[i].lock().expect("result slot") = Some(r);
            });
        }
    });
    let mut records = Vec::with_capacity(runs);
    for slot in slots {
        records.push(slot.into_inner().expect("result slot").expect("every run finished")?);
    }
    Ok(RunReport::new(&p.name, records))
}
