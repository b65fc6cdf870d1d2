//! Random genomes, subtree mutation, subtree crossover and tournament selection.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::expr::{annotate, Expr, Name};
use crate::template::{Genome, SeedGene, SlotGrammar, Template};
use crate::types::SemType;

use super::evolve::universe_for_slot;
use super::gen::{Generator, Unconstructible};

/// Attempts made by mutation and crossover before giving up.
pub const VARIATION_ATTEMPTS: usize = 5;

/// Everything variation needs to know about one search.
pub struct Space<'a> {
    pub template: &'a Template,
    /// Used for seed genes.
    pub generator: &'a Generator,
    /// One per slot, over that slot's own types.
    pub slot_generators: Vec<Generator>,
    pub max_depth: usize,
    /// Slots fixed to their nil default and excluded from variation.
    pub fixed: Vec<bool>,
}

impl<'a> Space<'a> {
    pub fn new(template: &'a Template, generator: &'a Generator, max_depth: usize, nil_default_policy: bool) -> Self {
        let fixed = template.slots.iter().map(|s| nil_default_policy && s.nil_default.is_some()).collect();
        let slot_generators = template.slots.iter().map(|s| generator.with_universe(universe_for_slot(s))).collect();
        Space { template, generator, slot_generators, max_depth, fixed }
    }

    fn evolvable(&self) -> Vec<usize> {
        (0..self.template.slots.len()).filter(|i| !self.fixed[*i]).collect()
    }

    fn random_seed(&self, rng: &mut impl Rng) -> Option<SeedGene> {
        let dom = self.template.seed.as_ref()?;
        if !dom.args.is_empty() && rng.gen_bool(0.5) {
            return dom.args.choose(rng).map(|i| SeedGene::Arg(*i));
        }
        match self.generator.random_expr(&dom.ty, 0, &[], SlotGrammar::Full, rng) {
            Ok(e) => Some(SeedGene::Const(e)),
            Err(_) => dom.args.choose(rng).map(|i| SeedGene::Arg(*i)),
        }
    }

    /// A random genome: each evolvable slot grown to a depth drawn
    /// uniformly from `1..=max_depth` (ramped initialization).
    pub fn random_genome(&self, rng: &mut impl Rng) -> Result<Genome, Unconstructible> {
        let mut slots = Vec::with_capacity(self.template.slots.len());
        for (i, s) in self.template.slots.iter().enumerate() {
            let e = match (&s.nil_default, self.fixed[i]) {
                (Some(d), true) => d.clone(),
                _ => {
                    let depth = rng.gen_range(1..=self.max_depth.max(1));
                    let g = &self.slot_generators[i];
                    match g.random_expr(&s.ret, depth, &s.vars, s.grammar, rng) {
                        Ok(e) => e,
                        Err(_) => g.random_expr(&s.ret, self.max_depth, &s.vars, s.grammar, rng)?,
                    }
                }
            };
            slots.push(e);
        }
        Ok(Genome { slots, seed: self.random_seed(rng) })
    }

    /// Replaces one random subtree of one evolvable slot (or redraws the
    /// seed gene). Returns the genome unchanged when every attempt fails.
    pub fn mutate(&self, g: &Genome, rng: &mut impl Rng) -> Genome {
        let slots = self.evolvable();
        let seed_choice = usize::from(self.template.seed.is_some());
        let n = slots.len() + seed_choice;
        if n == 0 {
            return g.clone();
        }
        let pick = rng.gen_range(0..n);
        if pick == slots.len() {
            let mut out = g.clone();
            out.seed = self.random_seed(rng).or_else(|| g.seed.clone());
            return out;
        }
        let i = slots[pick];
        let slot = &self.template.slots[i];
        for _ in 0..VARIATION_ATTEMPTS {
            if let Some(e) = mutate_expr(&g.slots[i], &slot.vars, slot.grammar, &self.slot_generators[i], self.max_depth, rng) {
                let mut out = g.clone();
                out.slots[i] = e;
                return out;
            }
        }
        g.clone()
    }

    /// Swaps a same-typed subtree from `b` into `a` within one slot.
    pub fn crossover(&self, a: &Genome, b: &Genome, rng: &mut impl Rng) -> Genome {
        if a == b {
            return a.clone();
        }
        let slots = self.evolvable();
        let Some(&i) = slots.choose(rng) else { return a.clone() };
        let vars = &self.template.slots[i].vars;
        match crossover_expr(&a.slots[i], &b.slots[i], vars, self.max_depth, rng) {
            Some(e) => {
                let mut out = a.clone();
                out.slots[i] = e;
                out
            }
            None => a.clone(),
        }
    }
}

/// Replaces a uniformly chosen subtree with a fresh expression of the same
/// type. The fresh subtree's depth limit is drawn uniformly from the room
/// left under `max_depth`.
pub fn mutate_expr(
    e: &Expr,
    vars: &[(Name, SemType)],
    grammar: SlotGrammar,
    generator: &Generator,
    max_depth: usize,
    rng: &mut impl Rng,
) -> Option<Expr> {
    let nodes = annotate(e, vars).ok()?;
    let node = nodes.choose(rng)?;
    let room = max_depth.checked_sub(node.depth_at)?;
    let limit = rng.gen_range(0..=room);
    let fresh = generator
        .random_expr(&node.ty, limit, vars, grammar, rng)
        .or_else(|_| generator.random_expr(&node.ty, room, vars, grammar, rng))
        .ok()?;
    let mut out = e.clone();
    out.replace_at(&node.path, fresh).then_some(out)
}

/// Grafts a subtree of `b` into `a` at a position of the same type. Gives up
/// after [`VARIATION_ATTEMPTS`] positions without a depth-respecting donor.
pub fn crossover_expr(a: &Expr, b: &Expr, vars: &[(Name, SemType)], max_depth: usize, rng: &mut impl Rng) -> Option<Expr> {
    let na = annotate(a, vars).ok()?;
    let nb = annotate(b, vars).ok()?;
    for _ in 0..VARIATION_ATTEMPTS {
        let at = na.choose(rng)?;
        let donors: Vec<_> = nb.iter().filter(|d| d.ty == at.ty && at.depth_at + d.height <= max_depth).collect();
        if let Some(d) = donors.choose(rng) {
            let mut out = a.clone();
            let sub = b.at(&d.path)?.clone();
            if out.replace_at(&at.path, sub) {
                return Some(out);
            }
        }
    }
    None
}

/// Index of the tournament winner: lowest error, ties broken by size.
pub fn tournament(scores: &[(f64, usize)], k: usize, rng: &mut impl Rng) -> usize {
    let mut best = rng.gen_range(0..scores.len());
    for _ in 1..k {
        let c = rng.gen_range(0..scores.len());
        if better(scores[c], scores[best]) {
            best = c;
        }
    }
    best
}

pub fn better(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}
