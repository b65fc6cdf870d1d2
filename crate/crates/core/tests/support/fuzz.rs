//! Random genomes across every template kind, run on generated inputs.

use std::collections::BTreeMap;

use foldsynth::synth::{universe_for, Generator, Space};
use foldsynth::{assemble, registry, EvalError, Limits, Problem, TemplateKind};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const LIMITS: Limits = Limits { fuel: 20_000, max_steps: 1_000 };
const INPUTS_PER_GENOME: usize = 4;

/// Counts per template kind: genomes tried, runs that returned a value,
/// runs that ended in an evaluation signal.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct KindStats {
    pub genomes: usize,
    pub values: usize,
    pub signals: usize,
}

fn problems_by_kind() -> BTreeMap<TemplateKind, Vec<Problem>> {
    let mut by_kind: BTreeMap<TemplateKind, Vec<Problem>> = BTreeMap::new();
    for p in registry() {
        if let Some(k) = p.template {
            by_kind.entry(k).or_default().push(p);
        }
    }
    by_kind
}

/// Draws `per_kind` genomes for each of the eight template kinds. Returns
/// the first genome that fails to assemble, returns a value of the wrong
/// type, or fails with anything other than an evaluation signal.
pub fn soundness(per_kind: usize, seed: u64) -> Result<BTreeMap<TemplateKind, KindStats>, String> {
    let by_kind = problems_by_kind();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeMap::new();
    for kind in TemplateKind::ALL {
        let problems = by_kind.get(&kind).ok_or_else(|| format!("no problem uses {}", kind.name()))?;
        let mut stats = KindStats::default();
        for i in 0..per_kind {
            let p = problems.choose(&mut rng).expect("nonempty");
            let template = foldsynth::build_template(kind, &p.signature).map_err(|e| e.to_string())?;
            let generator = Generator::new(p.prims().map_err(|e| e.to_string())?, universe_for(&template));
            let space = Space::new(&template, &generator, 5, i % 2 == 0);
            let genome = space.random_genome(&mut rng).map_err(|e| e.to_string())?;
            let program = assemble(&template, &genome).map_err(|e| format!("{}: {e}", kind.name()))?;
            stats.genomes += 1;
            for case in p.training_cases(INPUTS_PER_GENOME, i as u64) {
                match program.run(&case.inputs, LIMITS) {
                    Ok(v) if v.has_type(&p.signature.ret) => stats.values += 1,
                    Ok(v) => return Err(format!("{}: {genome:?} returned {v} for {}", kind.name(), p.signature.ret)),
                    Err(EvalError::FuelExhausted | EvalError::Partial(_) | EvalError::Diverged) => stats.signals += 1,
                    Err(e) => return Err(format!("{}: {genome:?} failed with {e}", kind.name())),
                }
            }
        }
        out.insert(kind, stats);
    }
    Ok(out)
}
