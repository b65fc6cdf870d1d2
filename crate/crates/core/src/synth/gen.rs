//! Typed random expression generation.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::expr::{Expr, Name};
use crate::prims::{instantiate_for, PrimId, Primitive, Semantics};
use crate::template::{SlotGrammar, PREDICATE_PRIMS};
use crate::types::{SemType, TypeUniverse};
use crate::value::Value;

/// Probability of stopping at a terminal before the depth limit.
pub const TERMINAL_PROBABILITY: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no expression of type {0} can be built")]
pub struct Unconstructible(pub SemType);

/// A primitive instantiated to a target type, with every admissible
/// assignment of its argument types.
#[derive(Debug, Clone)]
struct Candidate {
    id: PrimId,
    params: Vec<Vec<SemType>>,
}

/// Builds random well-typed expressions from a fixed primitive set.
/// Primitives are only applied to arguments whose types lie in the
/// universe.
///
type CandidateCache = RefCell<HashMap<(SemType, bool), Rc<Vec<Candidate>>>>;

/// Not `Sync`: create one per search thread.
pub struct Generator {
    prims: Vec<&'static Primitive>,
    constants: Vec<(Value, SemType)>,
    universe: TypeUniverse,
    cache: CandidateCache,
}

enum Choice<'a> {
    Var(&'a Name),
    Erc,
    Empty,
    Constant(&'a Value),
    If,
    Tuple,
    ListLit,
    Apply(&'a Name, &'a SemType),
    Prim(&'a Candidate),
}

fn erc(ty: &SemType, rng: &mut impl Rng) -> Option<Expr> {
    Some(match ty {
        SemType::Int if rng.gen_bool(0.5) => Expr::Int(rng.gen_range(-2..=2)),
        SemType::Int => Expr::Int(rng.gen_range(-10..=10)),
        SemType::Float => {
            if rng.gen_bool(0.5) {
                Expr::Float(rng.gen_range(-10..=10) as f64)
            } else {
                Expr::Float(rng.gen_range(-1000..=1000) as f64 / 100.0)
            }
        }
        SemType::Bool => Expr::Bool(rng.gen_bool(0.5)),
        SemType::Char => Expr::Char(char::from(rng.gen_range(32u8..=126))),
        _ => return None,
    })
}

fn has_erc(ty: &SemType) -> bool {
    matches!(ty, SemType::Int | SemType::Float | SemType::Bool | SemType::Char)
}

impl Generator {
    pub fn new(prims: Vec<&'static Primitive>, universe: TypeUniverse) -> Self {
        let mut constants = Vec::new();
        let mut rest = Vec::new();
        for p in prims {
            match &p.semantics {
                Semantics::Constant(v) => constants.push((v.clone(), p.sig.ret.clone())),
                _ => rest.push(p),
            }
        }
        Generator { prims: rest, constants, universe, cache: RefCell::new(HashMap::new()) }
    }

    pub fn universe(&self) -> &TypeUniverse {
        &self.universe
    }

    /// The same primitives and constants over another universe.
    pub fn with_universe(&self, universe: TypeUniverse) -> Generator {
        Generator {
            prims: self.prims.clone(),
            constants: self.constants.clone(),
            universe,
            cache: RefCell::new(HashMap::new()),
        }
    }

    fn candidates(&self, target: &SemType, predicate_only: bool) -> Rc<Vec<Candidate>> {
        let key = (target.clone(), predicate_only);
        if let Some(c) = self.cache.borrow().get(&key) {
            return Rc::clone(c);
        }
        let mut out = Vec::new();
        for p in &self.prims {
            if predicate_only && !PREDICATE_PRIMS.contains(&p.name) {
                continue;
            }
            let Some(subst) = instantiate_for(p, target, &self.universe) else { continue };
            let mut substs = vec![subst];
            for v in p.sig.vars() {
                if substs[0].get(&v).is_some() {
                    continue;
                }
                let bound = p.sig.bound_of(&v);
                let choices: Vec<&SemType> =
                    self.universe.types().iter().filter(|t| bound.is_none_or(|b| b.admits(t))).collect();
                let mut next = Vec::with_capacity(substs.len() * choices.len());
                for s in &substs {
                    for t in &choices {
                        let mut s = s.clone();
                        s.insert(&v, (*t).clone());
                        next.push(s);
                    }
                }
                substs = next;
            }
            let params: Vec<Vec<SemType>> = substs
                .iter()
                .map(|s| p.sig.params.iter().map(|t| s.apply(t)).collect::<Vec<_>>())
                .filter(|ps| ps.iter().all(|t| t.contains_fn() || self.universe.contains(t)))
                .collect();
            if !params.is_empty() {
                out.push(Candidate { id: p.id, params });
            }
        }
        let out = Rc::new(out);
        self.cache.borrow_mut().insert(key, Rc::clone(&out));
        out
    }

    /// Whether some expression of type `ty` with height at most `depth` exists.
    pub fn constructible(&self, ty: &SemType, depth: usize, vars: &[(Name, SemType)]) -> bool {
        if vars.iter().any(|(_, t)| t == ty) {
            return true;
        }
        match ty {
            SemType::Int | SemType::Float | SemType::Bool | SemType::Char | SemType::List(_) => true,
            SemType::Tuple(a, b) => {
                depth >= 1 && self.constructible(a, depth - 1, vars) && self.constructible(b, depth - 1, vars)
            }
            SemType::Fn(..) | SemType::Var(_) => false,
        }
    }

    /// Random expression of type `target` and height at most `max_depth`,
    /// grown with early termination probability [`TERMINAL_PROBABILITY`].
    pub fn random_expr(
        &self,
        target: &SemType,
        max_depth: usize,
        vars: &[(Name, SemType)],
        grammar: SlotGrammar,
        rng: &mut impl Rng,
    ) -> Result<Expr, Unconstructible> {
        self.grow(target, max_depth, vars, grammar, rng).ok_or_else(|| Unconstructible(target.clone()))
    }

    fn terminal(&self, target: &SemType, vars: &[(Name, SemType)], rng: &mut impl Rng) -> Option<Expr> {
        let mut options: Vec<Choice<'_>> = Vec::new();
        for (n, t) in vars {
            if t == target {
                options.push(Choice::Var(n));
            }
        }
        if has_erc(target) {
            options.push(Choice::Erc);
        }
        if target.is_list() {
            options.push(Choice::Empty);
        }
        for (v, t) in &self.constants {
            if t == target {
                options.push(Choice::Constant(v));
            }
        }
        self.build(options.choose(rng)?, target, 0, vars, SlotGrammar::Full, rng)
    }

    fn grow(
        &self,
        target: &SemType,
        depth: usize,
        vars: &[(Name, SemType)],
        grammar: SlotGrammar,
        rng: &mut impl Rng,
    ) -> Option<Expr> {
        let stop_early = rng.gen_bool(TERMINAL_PROBABILITY);
        if depth == 0 || stop_early {
            if let Some(e) = self.terminal(target, vars, rng) {
                return Some(e);
            }
            if depth == 0 {
                return None;
            }
        }
        let sub = depth - 1;
        let full = grammar == SlotGrammar::Full;
        let candidates = self.candidates(target, !full);
        let mut options: Vec<Choice<'_>> = Vec::new();
        if full {
            if self.constructible(target, sub, vars) {
                options.push(Choice::If);
            }
            match target {
                SemType::Tuple(a, b) if self.constructible(a, sub, vars) && self.constructible(b, sub, vars) => {
                    options.push(Choice::Tuple)
                }
                SemType::List(_) => options.push(Choice::ListLit),
                _ => {}
            }
            for (n, t) in vars {
                if let SemType::Fn(arg, ret) = t {
                    if **ret == *target && self.constructible(arg, sub, vars) {
                        options.push(Choice::Apply(n, arg));
                    }
                }
            }
        }
        for c in candidates.iter() {
            if c.params.iter().any(|ps| ps.iter().all(|p| self.constructible(p, sub, vars))) {
                options.push(Choice::Prim(c));
            }
        }
        options.shuffle(rng);
        for choice in &options {
            if let Some(e) = self.build(choice, target, sub, vars, grammar, rng) {
                return Some(e);
            }
        }
        self.terminal(target, vars, rng)
    }

    fn build(
        &self,
        choice: &Choice<'_>,
        target: &SemType,
        sub: usize,
        vars: &[(Name, SemType)],
        grammar: SlotGrammar,
        rng: &mut impl Rng,
    ) -> Option<Expr> {
        Some(match choice {
            Choice::Var(n) => Expr::Var(Name::clone(n)),
            Choice::Erc => erc(target, rng)?,
            Choice::Empty => Expr::List(vec![], target.elem()?.clone()),
            Choice::Constant(v) => Expr::from_value(v, target)?,
            Choice::If => Expr::If(
                Box::new(self.grow(&SemType::Bool, sub, vars, grammar, rng)?),
                Box::new(self.grow(target, sub, vars, grammar, rng)?),
                Box::new(self.grow(target, sub, vars, grammar, rng)?),
            ),
            Choice::Tuple => {
                let SemType::Tuple(a, b) = target else { return None };
                Expr::Tuple(
                    Box::new(self.grow(a, sub, vars, grammar, rng)?),
                    Box::new(self.grow(b, sub, vars, grammar, rng)?),
                )
            }
            Choice::ListLit => {
                let elem = target.elem()?;
                let n = rng.gen_range(1..=2);
                let items = (0..n).map(|_| self.grow(elem, sub, vars, grammar, rng)).collect::<Option<Vec<_>>>()?;
                Expr::List(items, elem.clone())
            }
            Choice::Apply(n, arg) => Expr::Apply(
                Box::new(Expr::Var(Name::clone(n))),
                Box::new(self.grow(arg, sub, vars, grammar, rng)?),
            ),
            Choice::Prim(c) => {
                let params = c.params.choose(rng)?;
                if !params.iter().all(|p| self.constructible(p, sub, vars)) {
                    return None;
                }
                let args = params
                    .iter()
                    .map(|p| self.grow(p, sub, vars, grammar, rng))
                    .collect::<Option<Vec<_>>>()?;
                Expr::Prim(c.id, args)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::typecheck;
    use crate::prims::{builtin_set, lookup};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gen_for(types: &[SemType]) -> Generator {
        Generator::new(builtin_set(), TypeUniverse::from_types(types))
    }

    fn vars(list: &[(&str, SemType)]) -> Vec<(Name, SemType)> {
        list.iter().map(|(n, t)| (Name::from(*n), t.clone())).collect()
    }

    #[test]
    fn depth_zero_gives_terminals() {
        let g = gen_for(&[SemType::Int]);
        let v = vars(&[("x", SemType::Int)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let e = g.random_expr(&SemType::Int, 0, &v, SlotGrammar::Full, &mut rng).unwrap();
            assert!(matches!(e, Expr::Var(_) | Expr::Int(_)), "{e}");
        }
    }

    #[test]
    fn bool_terminals_without_vars() {
        let g = gen_for(&[]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let e = g.random_expr(&SemType::Bool, 0, &[], SlotGrammar::Full, &mut rng).unwrap();
            assert!(matches!(e, Expr::Bool(_)));
        }
    }

    #[test]
    fn generated_exprs_typecheck() {
        let sig_types = [SemType::list(SemType::Int), SemType::Int];
        let g = gen_for(&sig_types);
        let v = vars(&[("x", SemType::Int), ("xs", SemType::Int)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let e = g.random_expr(&SemType::Int, 5, &v, SlotGrammar::Full, &mut rng).unwrap();
            assert_eq!(typecheck(&e, &v).unwrap(), SemType::Int, "{e}");
            assert!(e.depth() <= 5);
        }
    }

    #[test]
    fn function_vars_are_applied() {
        let ys = SemType::string();
        let g = gen_for(&[ys.clone(), SemType::Bool]);
        let v = vars(&[("x", SemType::Char), ("xs", SemType::func(ys.clone(), SemType::Bool)), ("ys", ys)]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut applied = false;
        for _ in 0..500 {
            let e = g.random_expr(&SemType::Bool, 4, &v, SlotGrammar::Full, &mut rng).unwrap();
            assert_eq!(typecheck(&e, &v).unwrap(), SemType::Bool);
            applied |= e.to_string().contains("apply xs");
        }
        assert!(applied);
    }

    #[test]
    fn predicate_grammar() {
        let g = gen_for(&[SemType::Int]);
        let v = vars(&[("seed", SemType::Int), ("arg1", SemType::Int)]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let e = g.random_expr(&SemType::Bool, 4, &v, SlotGrammar::Predicate, &mut rng).unwrap();
            assert!(crate::template::grammar_admits(SlotGrammar::Predicate, &e), "{e}");
            assert_eq!(typecheck(&e, &v).unwrap(), SemType::Bool);
        }
    }

    #[test]
    fn function_types_need_a_variable() {
        let g = gen_for(&[]);
        let f = SemType::func(SemType::Int, SemType::Int);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert!(g.random_expr(&f, 3, &[], SlotGrammar::Full, &mut rng).is_err());
        let tuple = SemType::tuple(SemType::Int, SemType::Int);
        assert!(g.random_expr(&tuple, 0, &[], SlotGrammar::Full, &mut rng).is_err());
        assert!(g.random_expr(&tuple, 1, &[], SlotGrammar::Full, &mut rng).is_ok());
    }

    #[test]
    fn user_constants_appear_as_literals() {
        let mut prims = builtin_set();
        prims.push(lookup("\"!!!\"").unwrap());
        let g = Generator::new(prims, TypeUniverse::from_types(&[SemType::string()]));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let seen = (0..300).any(|_| {
            g.random_expr(&SemType::string(), 0, &[], SlotGrammar::Full, &mut rng).unwrap().to_string() == "\"!!!\""
        });
        assert!(seen);
    }
}
