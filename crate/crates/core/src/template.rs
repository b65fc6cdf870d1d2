//! Scheme selection, template slot layouts, and program assembly.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::eval::{eval, Env, EvalError, Fuel, DEFAULT_FUEL};
use crate::expr::{typecheck, Expr, Name, TypeCheckError};
use crate::prims::prim;
use crate::schemes::{
    run_accu, run_ana, run_cata, run_cata_fn, run_hylo, Accumulator, Algebra, Coalgebra, StateVars,
    DEFAULT_MAX_STEPS, S, S1, S2, SEED, X, XS, YS,
};
use crate::types::{SemType, Signature};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    Cata,
    Ana,
    Hylo,
    Accu,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [SchemeKind::Cata, SchemeKind::Ana, SchemeKind::Hylo, SchemeKind::Accu];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Cata => "cata",
            SchemeKind::Ana => "ana",
            SchemeKind::Hylo => "hylo",
            SchemeKind::Accu => "accu",
        }
    }

    /// Templates of this scheme, in preference order.
    pub fn templates(self) -> &'static [TemplateKind] {
        use TemplateKind::*;
        match self {
            SchemeKind::Cata => &[CataFn, CataMap, CataTuple, CataReduce],
            SchemeKind::Ana => &[AnaStd],
            SchemeKind::Hylo => &[HyloStd],
            SchemeKind::Accu => &[AccuIndex, AccuCombine],
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {what} '{name}'")]
pub struct UnknownName {
    pub what: &'static str,
    pub name: String,
}

impl FromStr for SchemeKind {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownName { what: "scheme", name: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemplateKind {
    CataReduce,
    CataMap,
    CataFn,
    CataTuple,
    AnaStd,
    HyloStd,
    AccuIndex,
    AccuCombine,
}

impl TemplateKind {
    pub const ALL: [TemplateKind; 8] = [
        TemplateKind::CataReduce,
        TemplateKind::CataMap,
        TemplateKind::CataFn,
        TemplateKind::CataTuple,
        TemplateKind::AnaStd,
        TemplateKind::HyloStd,
        TemplateKind::AccuIndex,
        TemplateKind::AccuCombine,
    ];

    pub fn scheme(self) -> SchemeKind {
        match self {
            TemplateKind::CataReduce | TemplateKind::CataMap | TemplateKind::CataFn | TemplateKind::CataTuple => {
                SchemeKind::Cata
            }
            TemplateKind::AnaStd => SchemeKind::Ana,
            TemplateKind::HyloStd => SchemeKind::Hylo,
            TemplateKind::AccuIndex | TemplateKind::AccuCombine => SchemeKind::Accu,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TemplateKind::CataReduce => "cata-reduce",
            TemplateKind::CataMap => "cata-map",
            TemplateKind::CataFn => "cata-fn",
            TemplateKind::CataTuple => "cata-tuple",
            TemplateKind::AnaStd => "ana-std",
            TemplateKind::HyloStd => "hylo-std",
            TemplateKind::AccuIndex => "accu-index",
            TemplateKind::AccuCombine => "accu-combine",
        }
    }

    fn nil_defaults_apply(self) -> bool {
        matches!(self, TemplateKind::CataReduce | TemplateKind::CataMap | TemplateKind::CataTuple)
    }
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TemplateKind {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownName { what: "template", name: s.to_string() })
    }
}

/// Which primitives a slot may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotGrammar {
    Full,
    /// Comparison and logical primitives only, no conditionals.
    Predicate,
}

pub const PREDICATE_PRIMS: [&str; 9] = ["<", "<=", ">", ">=", "==", "/=", "&&", "||", "not"];

#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    pub name: &'static str,
    pub ret: SemType,
    pub vars: Vec<(Name, SemType)>,
    pub role: &'static str,
    pub grammar: SlotGrammar,
    /// Fixed body used when the nil-default policy is on.
    pub nil_default: Option<Expr>,
}

/// Where an unfold's initial seed comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SeedGene {
    Arg(usize),
    /// A closed literal expression.
    Const(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedDomain {
    pub ty: SemType,
    /// Parameter indices whose type matches the seed type.
    pub args: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub kind: TemplateKind,
    pub sig: Signature,
    pub slots: Vec<Slot>,
    pub seed: Option<SeedDomain>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("template {kind} does not fit signature {sig}")]
pub struct Incompatible {
    pub kind: TemplateKind,
    pub sig: String,
}

/// Recursion schemes whose shape fits the signature, most specific first.
pub fn candidate_schemes(sig: &Signature) -> Vec<SchemeKind> {
    let scalar = |t: &SemType| !t.is_list() && !t.is_fn();
    match sig.params.first() {
        None => vec![],
        Some(first) if first.is_list() => vec![SchemeKind::Cata, SchemeKind::Accu],
        Some(_) if sig.ret.is_list() && sig.params.iter().all(scalar) => vec![SchemeKind::Ana],
        Some(_) if scalar(&sig.ret) && sig.params.iter().all(scalar) => vec![SchemeKind::Hylo],
        Some(_) => vec![],
    }
}

/// Every template that can be built for the signature, following the order
/// of [`candidate_schemes`].
pub fn templates_for(sig: &Signature) -> Vec<TemplateKind> {
    candidate_schemes(sig)
        .into_iter()
        .flat_map(|s| s.templates().iter().copied())
        .filter(|k| build_template(*k, sig).is_ok())
        .collect()
}

/// The value a nil slot is fixed to under the nil-default policy.
pub fn default_value(ty: &SemType) -> Option<Value> {
    Some(match ty {
        SemType::Int => Value::Int(0),
        SemType::Float => Value::Float(0.0),
        SemType::Bool => Value::Bool(false),
        SemType::Char => Value::Char(' '),
        SemType::List(_) => Value::list(vec![]),
        SemType::Tuple(a, b) => Value::tuple(default_value(a)?, default_value(b)?),
        SemType::Fn(..) | SemType::Var(_) => return None,
    })
}

fn arg_name(i: usize) -> Name {
    Name::from(format!("arg{i}").as_str())
}

fn with(base: &[(Name, SemType)], more: &[(&str, SemType)]) -> Vec<(Name, SemType)> {
    let mut v = base.to_vec();
    v.extend(more.iter().map(|(n, t)| (Name::from(*n), t.clone())));
    v
}

fn slot(name: &'static str, ret: SemType, vars: Vec<(Name, SemType)>, role: &'static str) -> Slot {
    Slot { name, ret, vars, role, grammar: SlotGrammar::Full, nil_default: None }
}

pub fn build_template(kind: TemplateKind, sig: &Signature) -> Result<Template, Incompatible> {
    let bad = || Incompatible { kind, sig: sig.to_string() };
    if !sig.is_ground() || sig.ret.contains_fn() || sig.params.iter().any(SemType::contains_fn) {
        return Err(bad());
    }
    let ret = sig.ret.clone();
    let extras = |from: usize| -> Vec<(Name, SemType)> {
        sig.params.iter().enumerate().skip(from).map(|(i, t)| (arg_name(i), t.clone())).collect()
    };
    let list_elem = || sig.params.first().and_then(SemType::elem).cloned().ok_or_else(bad);

    let mut seed = None;
    let slots = match kind {
        TemplateKind::CataReduce | TemplateKind::CataMap => {
            let a = list_elem()?;
            if kind == TemplateKind::CataMap && !ret.is_list() {
                return Err(bad());
            }
            let ex = extras(1);
            vec![
                slot("nil", ret.clone(), ex.clone(), "result for the empty list"),
                slot("cons", ret.clone(), with(&ex, &[(X, a), (XS, ret)]), "combine an element with the folded tail"),
            ]
        }
        TemplateKind::CataFn => {
            let a = list_elem()?;
            let ys_ty = sig.params.get(1).cloned().ok_or_else(bad)?;
            let ex = extras(2);
            let fn_ty = SemType::func(ys_ty.clone(), ret.clone());
            vec![
                slot("nil", ret.clone(), with(&ex, &[(YS, ys_ty.clone())]), "result for the empty list given ys"),
                slot(
                    "cons",
                    ret,
                    with(&ex, &[(X, a), (XS, fn_ty), (YS, ys_ty)]),
                    "combine an element with the folded tail function given ys",
                ),
            ]
        }
        TemplateKind::CataTuple => {
            let a = list_elem()?;
            let SemType::Tuple(l, r) = &ret else { return Err(bad()) };
            let ex = extras(1);
            let (l, r) = ((**l).clone(), (**r).clone());
            vec![
                slot("nil0", l.clone(), ex.clone(), "first component for the empty list"),
                slot("cons0", l.clone(), with(&ex, &[(X, a.clone()), (XS, l)]), "first component fold step"),
                slot("nil1", r.clone(), ex.clone(), "second component for the empty list"),
                slot("cons1", r.clone(), with(&ex, &[(X, a), (XS, r)]), "second component fold step"),
            ]
        }
        TemplateKind::AnaStd | TemplateKind::HyloStd => {
            let seed_ty = sig.params.first().cloned().ok_or_else(bad)?;
            let elem_ty = if kind == TemplateKind::AnaStd {
                if !ret.is_list() || sig.params.iter().any(SemType::is_list) {
                    return Err(bad());
                }
                ret.elem().cloned().ok_or_else(bad)?
            } else {
                seed_ty.clone()
            };
            let ex = with(&extras(0), &[(SEED, seed_ty.clone())]);
            let args = sig.params.iter().enumerate().filter(|(_, t)| **t == seed_ty).map(|(i, _)| i).collect();
            seed = Some(SeedDomain { ty: seed_ty.clone(), args });
            let mut v = vec![
                Slot {
                    grammar: SlotGrammar::Predicate,
                    ..slot("stop", SemType::Bool, ex.clone(), "stop unfolding")
                },
                slot("elem", elem_ty.clone(), ex.clone(), "element emitted for the seed"),
                slot("next", seed_ty, ex, "next seed"),
            ];
            if kind == TemplateKind::HyloStd {
                let cx = extras(0);
                v.push(slot("nil", ret.clone(), cx.clone(), "result for the end of the unfold"));
                v.push(slot("cons", ret.clone(), with(&cx, &[(X, elem_ty), (XS, ret)]), "fold step"));
            }
            v
        }
        TemplateKind::AccuIndex => {
            let a = list_elem()?;
            let ex = extras(1);
            vec![
                slot("init", SemType::Int, ex.clone(), "initial state"),
                slot("step", SemType::Int, with(&ex, &[(X, a.clone()), (S, SemType::Int)]), "state update"),
                slot("nil", ret.clone(), with(&ex, &[(S, SemType::Int)]), "result for the end of the list"),
                slot(
                    "cons",
                    ret.clone(),
                    with(&ex, &[(X, a), (XS, ret), (S, SemType::Int)]),
                    "combine an element with the folded tail and the state",
                ),
            ]
        }
        TemplateKind::AccuCombine => {
            let a = list_elem()?;
            if ret.is_list() {
                return Err(bad());
            }
            let ex = extras(1);
            let state = SemType::tuple(ret.clone(), ret.clone());
            let pair = [(S1, ret.clone()), (S2, ret.clone())];
            vec![
                slot("init", state.clone(), ex.clone(), "initial pair of accumulators"),
                slot("step", state, with(&ex, &[(X, a), pair[0].clone(), pair[1].clone()]), "update both accumulators"),
                slot("nil", ret.clone(), with(&ex, &pair), "combine the final accumulators"),
            ]
        }
    };

    let mut t = Template { kind, sig: sig.clone(), slots, seed };
    if kind.nil_defaults_apply() {
        for s in t.slots.iter_mut().filter(|s| s.name.starts_with("nil")) {
            s.nil_default = default_value(&s.ret).and_then(|v| Expr::from_value(&v, &s.ret));
        }
    }
    Ok(t)
}

impl Template {
    pub fn slot_index(&self, name: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.name == name)
    }

    pub fn needs_seed(&self) -> bool {
        self.seed.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Genome {
    /// One expression per template slot, in slot order.
    pub slots: Vec<Expr>,
    pub seed: Option<SeedGene>,
}

impl Genome {
    pub fn slot<'a>(&'a self, template: &Template, name: &str) -> Option<&'a Expr> {
        template.slot_index(name).and_then(|i| self.slots.get(i))
    }

    pub fn size(&self) -> usize {
        self.slots.iter().map(Expr::size).sum::<usize>() + usize::from(self.seed.is_some())
    }

    pub fn depth(&self) -> usize {
        self.slots.iter().map(Expr::depth).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssembleError {
    #[error("expected {expected} slot expressions, found {found}")]
    SlotCount { expected: usize, found: usize },
    #[error("slot {slot}: {error}")]
    SlotType { slot: &'static str, error: TypeCheckError },
    #[error("slot {slot} must have type {expected}, found {found}")]
    SlotReturn { slot: &'static str, expected: SemType, found: SemType },
    #[error("slot {slot} uses a construct outside its grammar")]
    Grammar { slot: &'static str },
    #[error("template {0} requires a seed gene")]
    MissingSeed(TemplateKind),
    #[error("template {0} has no seed gene")]
    UnexpectedSeed(TemplateKind),
    #[error("seed gene does not denote a {0} value")]
    BadSeed(SemType),
}

pub fn grammar_admits(grammar: SlotGrammar, e: &Expr) -> bool {
    match grammar {
        SlotGrammar::Full => true,
        SlotGrammar::Predicate => {
            let ok = match e {
                Expr::If(..) | Expr::Apply(..) => false,
                Expr::Prim(id, _) => {
                    let p = prim(*id);
                    p.is_constant() || PREDICATE_PRIMS.contains(&p.name)
                }
                _ => true,
            };
            ok && e.children().into_iter().all(|c| grammar_admits(grammar, c))
        }
    }
}

/// Checks a seed gene against the template's seed domain.
pub fn check_seed(template: &Template, seed: &SeedGene) -> Result<(), AssembleError> {
    let Some(dom) = &template.seed else { return Err(AssembleError::UnexpectedSeed(template.kind)) };
    let ok = match seed {
        SeedGene::Arg(i) => dom.args.contains(i),
        SeedGene::Const(e) => is_closed(e) && typecheck(e, &[]).is_ok_and(|t| t == dom.ty),
    };
    if ok {
        Ok(())
    } else {
        Err(AssembleError::BadSeed(dom.ty.clone()))
    }
}

fn is_closed(e: &Expr) -> bool {
    let mut v = Vec::new();
    e.free_vars(&mut v);
    v.is_empty()
}

/// Evaluation budgets applied to every program call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub fuel: u64,
    pub max_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { fuel: DEFAULT_FUEL, max_steps: DEFAULT_MAX_STEPS }
    }
}

/// A template filled by a genome, callable on input values.
#[derive(Debug, Clone, Copy)]
pub struct Program<'a> {
    template: &'a Template,
    genome: &'a Genome,
}

/// Typechecks every slot and the seed gene.
pub fn assemble<'a>(template: &'a Template, genome: &'a Genome) -> Result<Program<'a>, AssembleError> {
    if genome.slots.len() != template.slots.len() {
        return Err(AssembleError::SlotCount { expected: template.slots.len(), found: genome.slots.len() });
    }
    for (s, e) in template.slots.iter().zip(&genome.slots) {
        let found = typecheck(e, &s.vars).map_err(|error| AssembleError::SlotType { slot: s.name, error })?;
        if found != s.ret {
            return Err(AssembleError::SlotReturn { slot: s.name, expected: s.ret.clone(), found });
        }
        if !grammar_admits(s.grammar, e) {
            return Err(AssembleError::Grammar { slot: s.name });
        }
    }
    match (&genome.seed, template.needs_seed()) {
        (None, true) => return Err(AssembleError::MissingSeed(template.kind)),
        (Some(_), false) => return Err(AssembleError::UnexpectedSeed(template.kind)),
        (Some(seed), true) => check_seed(template, seed)?,
        (None, false) => {}
    }
    Ok(Program { template, genome })
}

fn list_input(v: Option<&Value>) -> Result<&[Value], EvalError> {
    v.and_then(Value::as_list).ok_or_else(|| EvalError::Ill("list input expected".into()))
}

impl Program<'_> {
    pub fn template(&self) -> &Template {
        self.template
    }

    pub fn genome(&self) -> &Genome {
        self.genome
    }

    fn extra_env(&self, inputs: &[Value], from: usize) -> Env {
        let mut env = Env::new();
        for (i, (ty, v)) in self.template.sig.params.iter().zip(inputs).enumerate().skip(from) {
            env.push(arg_name(i), ty.clone(), v.clone());
        }
        env
    }

    /// Runs the program on one input tuple with a fresh fuel budget.
    pub fn run(&self, inputs: &[Value], limits: Limits) -> Result<Value, EvalError> {
        let mut fuel = Fuel::new(limits.fuel);
        self.run_with(inputs, limits.max_steps, &mut fuel)
    }

    pub fn run_with(&self, inputs: &[Value], max_steps: usize, fuel: &mut Fuel) -> Result<Value, EvalError> {
        let t = self.template;
        let g = &self.genome.slots;
        if inputs.len() != t.sig.arity() {
            return Err(EvalError::Ill(format!("expected {} inputs, got {}", t.sig.arity(), inputs.len())));
        }
        let ret = &t.sig.ret;
        let elem = |i: usize| t.sig.params.get(i).and_then(SemType::elem).cloned().unwrap_or(SemType::Int);
        match t.kind {
            TemplateKind::CataReduce | TemplateKind::CataMap => {
                let a = elem(0);
                let alg = Algebra { nil: &g[0], cons: &g[1], elem_ty: &a, result_ty: ret };
                run_cata(&alg, &self.extra_env(inputs, 1), list_input(inputs.first())?, fuel)
            }
            TemplateKind::CataFn => {
                let a = elem(0);
                let alg = Algebra { nil: &g[0], cons: &g[1], elem_ty: &a, result_ty: ret };
                let env = self.extra_env(inputs, 2);
                run_cata_fn(&alg, &t.sig.params[1], &env, list_input(inputs.first())?, inputs[1].clone(), fuel)
            }
            TemplateKind::CataTuple => {
                let a = elem(0);
                let env = self.extra_env(inputs, 1);
                let xs = list_input(inputs.first())?;
                let alg0 = Algebra { nil: &g[0], cons: &g[1], elem_ty: &a, result_ty: &t.slots[0].ret };
                let alg1 = Algebra { nil: &g[2], cons: &g[3], elem_ty: &a, result_ty: &t.slots[2].ret };
                let l = run_cata(&alg0, &env, xs, fuel)?;
                let r = run_cata(&alg1, &env, xs, fuel)?;
                Ok(Value::tuple(l, r))
            }
            TemplateKind::AnaStd | TemplateKind::HyloStd => {
                let env = self.extra_env(inputs, 0);
                let seed = match &self.genome.seed {
                    Some(SeedGene::Arg(i)) => inputs[*i].clone(),
                    Some(SeedGene::Const(e)) => eval(e, &Env::new(), fuel)?,
                    None => return Err(EvalError::Ill("missing seed gene".into())),
                };
                let seed_ty = &t.slots[2].ret;
                let elem_ty = &t.slots[1].ret;
                let coalg = Coalgebra { stop: &g[0], elem: &g[1], next: &g[2], seed_ty, elem_ty };
                if t.kind == TemplateKind::AnaStd {
                    let (items, diverged) = run_ana(&coalg, seed, &env, max_steps, fuel)?;
                    if diverged {
                        return Err(EvalError::Diverged);
                    }
                    Ok(Value::list(items))
                } else {
                    let alg = Algebra { nil: &g[3], cons: &g[4], elem_ty, result_ty: ret };
                    run_hylo(&coalg, &alg, seed, &env, max_steps, fuel)
                }
            }
            TemplateKind::AccuIndex => {
                let a = elem(0);
                let acc = Accumulator { init: &g[0], step: &g[1], state_ty: &SemType::Int, vars: StateVars::Single };
                let alg = Algebra { nil: &g[2], cons: &g[3], elem_ty: &a, result_ty: ret };
                run_accu(&acc, &alg, &self.extra_env(inputs, 1), list_input(inputs.first())?, fuel)
            }
            TemplateKind::AccuCombine => {
                let a = elem(0);
                let pass = Expr::var(XS);
                let acc = Accumulator { init: &g[0], step: &g[1], state_ty: &t.slots[0].ret, vars: StateVars::Pair };
                let alg = Algebra { nil: &g[2], cons: &pass, elem_ty: &a, result_ty: ret };
                run_accu(&acc, &alg, &self.extra_env(inputs, 1), list_input(inputs.first())?, fuel)
            }
        }
    }
}
