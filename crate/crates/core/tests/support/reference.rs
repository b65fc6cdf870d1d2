//! Direct-recursive reference semantics for the scheme drivers, and random
//! driver instances built from generated slot bodies.

#![allow(dead_code)]

use foldsynth::eval::{eval, Env, EvalError, Fuel};
use foldsynth::expr::{Expr, Name};
use foldsynth::prims::builtin_set;
use foldsynth::schemes::{
    run_accu, run_ana, run_cata, run_hylo, Accumulator, Algebra, Coalgebra, StateVars,
};
use foldsynth::synth::Generator;
use foldsynth::template::SlotGrammar;
use foldsynth::types::{SemType, TypeUniverse};
use foldsynth::value::Value;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FUEL: u64 = 1_000_000;
pub const MAX_STEPS: usize = 16;
const DEPTH: usize = 3;

fn bind(env: &Env, name: &str, ty: &SemType, v: Value) -> Env {
    env.bind(name, ty.clone(), v)
}

pub fn cata(nil: &Expr, cons: &Expr, elem: &SemType, res: &SemType, input: &[Value], fuel: &mut Fuel) -> Result<Value, EvalError> {
    match input.split_first() {
        None => eval(nil, &Env::new(), fuel),
        Some((x, rest)) => {
            let xs = cata(nil, cons, elem, res, rest, fuel)?;
            let env = bind(&bind(&Env::new(), "x", elem, x.clone()), "xs", res, xs);
            eval(cons, &env, fuel)
        }
    }
}

pub fn ana(
    stop: &Expr,
    elem: &Expr,
    next: &Expr,
    seed_ty: &SemType,
    seed: Value,
    steps_left: usize,
    fuel: &mut Fuel,
) -> Result<(Vec<Value>, bool), EvalError> {
    if steps_left == 0 {
        return Ok((Vec::new(), true));
    }
    let env = bind(&Env::new(), "seed", seed_ty, seed);
    match eval(stop, &env, fuel)? {
        Value::Bool(true) => return Ok((Vec::new(), false)),
        Value::Bool(false) => {}
        _ => return Err(EvalError::Ill("non-boolean stop test".into())),
    }
    let e = eval(elem, &env, fuel)?;
    let n = eval(next, &env, fuel)?;
    let (mut rest, diverged) = ana(stop, elem, next, seed_ty, n, steps_left - 1, fuel)?;
    rest.insert(0, e);
    Ok((rest, diverged))
}

fn with_state(state_ty: &SemType, pair: bool, s: &Value) -> Env {
    match (pair, state_ty, s) {
        (true, SemType::Tuple(a, b), Value::Tuple(p)) => {
            bind(&bind(&Env::new(), "s1", a, p.0.clone()), "s2", b, p.1.clone())
        }
        _ => bind(&Env::new(), "s", state_ty, s.clone()),
    }
}

pub struct AccuRef<'a> {
    pub step: &'a Expr,
    pub nil: &'a Expr,
    pub cons: &'a Expr,
    pub state_ty: &'a SemType,
    pub pair: bool,
    pub elem: &'a SemType,
    pub res: &'a SemType,
}

/// The state flows down the recursion, the result back up.
pub fn accu(a: &AccuRef<'_>, s: Value, input: &[Value], fuel: &mut Fuel) -> Result<Value, EvalError> {
    let here = with_state(a.state_ty, a.pair, &s);
    match input.split_first() {
        None => eval(a.nil, &here, fuel),
        Some((x, rest)) => {
            let with_x = bind(&here, "x", a.elem, x.clone());
            let s2 = eval(a.step, &with_x, fuel)?;
            let r = accu(a, s2, rest, fuel)?;
            eval(a.cons, &bind(&with_x, "xs", a.res, r), fuel)
        }
    }
}

fn var(n: &str, t: &SemType) -> (Name, SemType) {
    (Name::from(n), t.clone())
}

fn generator(types: &[&SemType]) -> Generator {
    Generator::new(builtin_set(), TypeUniverse::from_types(types.iter().copied()))
}

fn body(g: &Generator, ty: &SemType, vars: &[(Name, SemType)], grammar: SlotGrammar, rng: &mut ChaCha8Rng) -> Expr {
    g.random_expr(ty, DEPTH, vars, grammar, rng).expect("constructible slot")
}

fn random_value(ty: &SemType, rng: &mut ChaCha8Rng) -> Value {
    match ty {
        SemType::Int => Value::Int(rng.gen_range(-20..=20)),
        SemType::Char => Value::Char(*b"abcde ".choose(rng).expect("nonempty") as char),
        SemType::Bool => Value::Bool(rng.gen()),
        other => panic!("no generator for {other}"),
    }
}

fn random_list(elem: &SemType, rng: &mut ChaCha8Rng) -> Vec<Value> {
    let n = rng.gen_range(0..=8);
    (0..n).map(|_| random_value(elem, rng)).collect()
}

/// Outcomes that may legitimately differ: the drivers and the reference
/// spend fuel at different rates.
fn comparable<T>(a: &Result<T, EvalError>, b: &Result<T, EvalError>) -> bool {
    !matches!(a, Err(EvalError::FuelExhausted)) && !matches!(b, Err(EvalError::FuelExhausted))
}

/// Result of one fuzzed comparison.
#[derive(Debug)]
pub enum Outcome {
    Agree,
    Skipped,
    Disagree(String),
}

fn judge<T: PartialEq + std::fmt::Debug>(what: String, driver: Result<T, EvalError>, reference: Result<T, EvalError>) -> Outcome {
    if !comparable(&driver, &reference) {
        Outcome::Skipped
    } else if driver == reference {
        Outcome::Agree
    } else {
        Outcome::Disagree(format!("{what}: driver {driver:?}, reference {reference:?}"))
    }
}

pub fn check_cata(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elem = [SemType::Int, SemType::Char].choose(&mut rng).cloned().expect("nonempty");
    let res = [SemType::Int, SemType::Bool, SemType::list(SemType::Int), SemType::string()]
        .choose(&mut rng)
        .cloned()
        .expect("nonempty");
    let g = generator(&[&elem, &res]);
    let nil = body(&g, &res, &[], SlotGrammar::Full, &mut rng);
    let cons = body(&g, &res, &[var("x", &elem), var("xs", &res)], SlotGrammar::Full, &mut rng);
    let input = random_list(&elem, &mut rng);
    let alg = Algebra { nil: &nil, cons: &cons, elem_ty: &elem, result_ty: &res };
    let d = run_cata(&alg, &Env::new(), &input, &mut Fuel::new(FUEL));
    let r = cata(&nil, &cons, &elem, &res, &input, &mut Fuel::new(FUEL));
    judge(format!("nil {nil} cons {cons} on {input:?}"), d, r)
}

struct AnaInstance {
    stop: Expr,
    elem: Expr,
    next: Expr,
    elem_ty: SemType,
    seed: Value,
}

fn ana_instance(rng: &mut ChaCha8Rng, elem_ty: SemType) -> AnaInstance {
    let seed_ty = SemType::Int;
    let g = generator(&[&seed_ty, &elem_ty]);
    let vars = [var("seed", &seed_ty)];
    AnaInstance {
        stop: body(&g, &SemType::Bool, &vars, SlotGrammar::Predicate, rng),
        elem: body(&g, &elem_ty, &vars, SlotGrammar::Full, rng),
        next: body(&g, &seed_ty, &vars, SlotGrammar::Full, rng),
        elem_ty,
        seed: random_value(&seed_ty, rng),
    }
}

pub fn check_ana(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elem_ty = [SemType::Int, SemType::Bool].choose(&mut rng).cloned().expect("nonempty");
    let a = ana_instance(&mut rng, elem_ty);
    let co = Coalgebra { stop: &a.stop, elem: &a.elem, next: &a.next, seed_ty: &SemType::Int, elem_ty: &a.elem_ty };
    let d = run_ana(&co, a.seed.clone(), &Env::new(), MAX_STEPS, &mut Fuel::new(FUEL));
    let r = ana(&a.stop, &a.elem, &a.next, &SemType::Int, a.seed.clone(), MAX_STEPS, &mut Fuel::new(FUEL));
    judge(format!("stop {} elem {} next {} from {}", a.stop, a.elem, a.next, a.seed), d, r)
}

pub fn check_accu(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elem = SemType::Int;
    let pair = rng.gen_bool(0.5);
    let res = if pair {
        SemType::Int
    } else {
        [SemType::Int, SemType::list(SemType::Int)].choose(&mut rng).cloned().expect("nonempty")
    };
    let state_ty = if pair { SemType::tuple(res.clone(), res.clone()) } else { SemType::Int };
    let g = generator(&[&elem, &res, &state_ty]);
    let svars: Vec<(Name, SemType)> =
        if pair { vec![var("s1", &res), var("s2", &res)] } else { vec![var("s", &SemType::Int)] };
    let init = body(&g, &state_ty, &[], SlotGrammar::Full, &mut rng);
    let mut step_vars = svars.clone();
    step_vars.push(var("x", &elem));
    let step = body(&g, &state_ty, &step_vars, SlotGrammar::Full, &mut rng);
    let nil = body(&g, &res, &svars, SlotGrammar::Full, &mut rng);
    let cons = if pair {
        Expr::var("xs")
    } else {
        let mut cv = step_vars.clone();
        cv.push(var("xs", &res));
        body(&g, &res, &cv, SlotGrammar::Full, &mut rng)
    };
    let input = random_list(&elem, &mut rng);
    let vars = if pair { StateVars::Pair } else { StateVars::Single };
    let acc = Accumulator { init: &init, step: &step, state_ty: &state_ty, vars };
    let alg = Algebra { nil: &nil, cons: &cons, elem_ty: &elem, result_ty: &res };
    let d = run_accu(&acc, &alg, &Env::new(), &input, &mut Fuel::new(FUEL));
    let mut fuel = Fuel::new(FUEL);
    let a = AccuRef { step: &step, nil: &nil, cons: &cons, state_ty: &state_ty, pair, elem: &elem, res: &res };
    let r = eval(&init, &Env::new(), &mut fuel).and_then(|s0| accu(&a, s0, &input, &mut fuel));
    judge(format!("init {init} step {step} nil {nil} cons {cons} on {input:?}"), d, r)
}

/// Compares the hylomorphism with a fold of the unfold. Instances whose
/// unfold does not terminate are redrawn, so every call checks a
/// terminating instance.
pub fn check_hylo(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let a = ana_instance(&mut rng, SemType::Int);
        let co = Coalgebra { stop: &a.stop, elem: &a.elem, next: &a.next, seed_ty: &SemType::Int, elem_ty: &SemType::Int };
        match run_ana(&co, a.seed.clone(), &Env::new(), MAX_STEPS, &mut Fuel::new(FUEL)) {
            Ok((items, false)) => {
                let res = [SemType::Int, SemType::list(SemType::Int)].choose(&mut rng).cloned().expect("nonempty");
                let g = generator(&[&SemType::Int, &res]);
                let nil = body(&g, &res, &[], SlotGrammar::Full, &mut rng);
                let cons =
                    body(&g, &res, &[var("x", &SemType::Int), var("xs", &res)], SlotGrammar::Full, &mut rng);
                let alg = Algebra { nil: &nil, cons: &cons, elem_ty: &SemType::Int, result_ty: &res };
                let h = run_hylo(&co, &alg, a.seed.clone(), &Env::new(), MAX_STEPS, &mut Fuel::new(FUEL));
                let c = run_cata(&alg, &Env::new(), &items, &mut Fuel::new(FUEL));
                return judge(format!("unfold {items:?} nil {nil} cons {cons}"), h, c);
            }
            _ => continue,
        }
    }
}

/// Runs `check` on seeds `0..n`; returns (agreements, skipped, first failure).
pub fn sweep(n: u64, base: u64, check: fn(u64) -> Outcome) -> (usize, usize, Option<String>) {
    let (mut agree, mut skipped) = (0, 0);
    for i in 0..n {
        match check(base.wrapping_add(i)) {
            Outcome::Agree => agree += 1,
            Outcome::Skipped => skipped += 1,
            Outcome::Disagree(msg) => return (agree, skipped, Some(msg)),
        }
    }
    (agree, skipped, None)
}
