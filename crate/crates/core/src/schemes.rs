//! Recursion-scheme drivers over the list base functor.
//!
//! This is the only place where recursion over data happens: evolved bodies
//! are single layers (one `NilF`/`ConsF` case, one coalgebra step) and the
//! drivers iterate them. Native vectors stand in for the fixed point of the
//! base functor, so folding from the right is a reverse iteration.

use std::sync::Arc;

use crate::eval::{eval, Env, EvalError, Fuel};
use crate::expr::{Expr, Name};
use crate::types::SemType;
use crate::value::{FnValue, Value};

/// Default step limit for unfolds.
pub const DEFAULT_MAX_STEPS: usize = 10_000;

/// One layer of a list, as seen by an algebra or produced by a coalgebra.
#[derive(Debug, Clone, PartialEq)]
pub enum ListStep {
    Nil,
    Cons { head: Value, rest: Value },
}

/// The two cases of a list algebra. `nil` sees the extra environment; `cons`
/// additionally sees `x` (the element) and `xs` (the folded tail).
#[derive(Debug, Clone, Copy)]
pub struct Algebra<'a> {
    pub nil: &'a Expr,
    pub cons: &'a Expr,
    pub elem_ty: &'a SemType,
    pub result_ty: &'a SemType,
}

/// A list coalgebra split into its stop test, emitted element and next seed.
/// All three see `seed`.
#[derive(Debug, Clone, Copy)]
pub struct Coalgebra<'a> {
    pub stop: &'a Expr,
    pub elem: &'a Expr,
    pub next: &'a Expr,
    pub seed_ty: &'a SemType,
    pub elem_ty: &'a SemType,
}

/// How the accumulator state is exposed to bodies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateVars {
    /// Bound whole as `s`.
    Single,
    /// A pair, destructured into `s1` and `s2`.
    Pair,
}

#[derive(Debug, Clone, Copy)]
pub struct Accumulator<'a> {
    pub init: &'a Expr,
    pub step: &'a Expr,
    pub state_ty: &'a SemType,
    pub vars: StateVars,
}

pub const X: &str = "x";
pub const XS: &str = "xs";
pub const YS: &str = "ys";
pub const SEED: &str = "seed";
pub const S: &str = "s";
pub const S1: &str = "s1";
pub const S2: &str = "s2";

fn name(s: &str) -> Name {
    Name::from(s)
}

/// Interprets one algebra layer.
pub fn apply_algebra(alg: &Algebra<'_>, extra: &Env, step: ListStep, fuel: &mut Fuel) -> Result<Value, EvalError> {
    match step {
        ListStep::Nil => eval(alg.nil, extra, fuel),
        ListStep::Cons { head, rest } => {
            let env = extra.bind(X, alg.elem_ty.clone(), head).bind(XS, alg.result_ty.clone(), rest);
            eval(alg.cons, &env, fuel)
        }
    }
}

/// Catamorphism (right fold): `r_n = nil`, `r_i = cons[x := input_i, xs := r_{i+1}]`.
pub fn run_cata(alg: &Algebra<'_>, extra: &Env, input: &[Value], fuel: &mut Fuel) -> Result<Value, EvalError> {
    let mut env = extra.clone();
    let mut acc = eval(alg.nil, &env, fuel)?;
    let xi = env.push(name(X), alg.elem_ty.clone(), Value::default());
    let xsi = env.push(name(XS), alg.result_ty.clone(), Value::default());
    for v in input.iter().rev() {
        fuel.tick()?;
        env.set(xi, v.clone());
        env.set(xsi, acc);
        acc = eval(alg.cons, &env, fuel)?;
    }
    Ok(acc)
}

struct CataFnFrame {
    nil: Expr,
    cons: Expr,
    elem_ty: SemType,
    ys_ty: SemType,
    fn_ty: SemType,
    extra: Env,
    input: Vec<Value>,
}

fn fold_suffix(frame: &Arc<CataFnFrame>, i: usize, ys: &Value, fuel: &mut Fuel) -> Result<Value, EvalError> {
    fuel.tick()?;
    let env = frame.extra.bind(YS, frame.ys_ty.clone(), ys.clone());
    if i == frame.input.len() {
        return eval(&frame.nil, &env, fuel);
    }
    let rest = {
        let frame = Arc::clone(frame);
        FnValue::new(move |ys, fuel| fold_suffix(&frame, i + 1, ys, fuel))
    };
    let env = env
        .bind(X, frame.elem_ty.clone(), frame.input[i].clone())
        .bind(XS, frame.fn_ty.clone(), Value::Fn(rest));
    eval(&frame.cons, &env, fuel)
}

/// Catamorphism whose carrier is a function of a second argument `ys`.
///
/// `nil` sees `ys`; `cons` sees `x`, `ys` and `xs : ys_ty -> result_ty`, the
/// fold of the remaining suffix. Returns the fold of the whole input applied
/// to `ys`.
pub fn run_cata_fn(
    alg: &Algebra<'_>,
    ys_ty: &SemType,
    extra: &Env,
    input: &[Value],
    ys: Value,
    fuel: &mut Fuel,
) -> Result<Value, EvalError> {
    let frame = Arc::new(CataFnFrame {
        nil: alg.nil.clone(),
        cons: alg.cons.clone(),
        elem_ty: alg.elem_ty.clone(),
        ys_ty: ys_ty.clone(),
        fn_ty: SemType::func(ys_ty.clone(), alg.result_ty.clone()),
        extra: extra.clone(),
        input: input.to_vec(),
    });
    fold_suffix(&frame, 0, &ys, fuel)
}

/// Anamorphism. Emits elements until `stop` holds; `diverged` is set when
/// `max_steps` elements were produced without stopping.
pub fn run_ana(
    coalg: &Coalgebra<'_>,
    seed: Value,
    extra: &Env,
    max_steps: usize,
    fuel: &mut Fuel,
) -> Result<(Vec<Value>, bool), EvalError> {
    let mut env = extra.clone();
    let si = env.push(name(SEED), coalg.seed_ty.clone(), seed);
    let mut out = Vec::new();
    loop {
        if out.len() >= max_steps {
            return Ok((out, true));
        }
        fuel.tick()?;
        match eval(coalg.stop, &env, fuel)? {
            Value::Bool(true) => return Ok((out, false)),
            Value::Bool(false) => {}
            _ => return Err(EvalError::Ill("non-boolean stop test".into())),
        }
        out.push(eval(coalg.elem, &env, fuel)?);
        let next = eval(coalg.next, &env, fuel)?;
        env.set(si, next);
    }
}

/// Hylomorphism: unfold from `seed`, then fold the produced list.
pub fn run_hylo(
    coalg: &Coalgebra<'_>,
    alg: &Algebra<'_>,
    seed: Value,
    extra: &Env,
    max_steps: usize,
    fuel: &mut Fuel,
) -> Result<Value, EvalError> {
    let (items, diverged) = run_ana(coalg, seed, extra, max_steps, fuel)?;
    if diverged {
        return Err(EvalError::Diverged);
    }
    run_cata(alg, extra, &items, fuel)
}

fn push_state(env: &mut Env, acc: &Accumulator<'_>, state: Value) -> Result<(), EvalError> {
    match acc.vars {
        StateVars::Single => {
            env.push(name(S), acc.state_ty.clone(), state);
        }
        StateVars::Pair => {
            let (SemType::Tuple(lt, rt), Value::Tuple(p)) = (acc.state_ty, &state) else {
                return Err(EvalError::Ill("pair state expected".into()));
            };
            env.push(name(S1), (**lt).clone(), p.0.clone());
            env.push(name(S2), (**rt).clone(), p.1.clone());
        }
    }
    Ok(())
}

/// Accumorphism: a left scan of accumulator states followed by a right fold
/// in which every layer also sees the state reached before its element.
pub fn run_accu(
    acc: &Accumulator<'_>,
    alg: &Algebra<'_>,
    extra: &Env,
    input: &[Value],
    fuel: &mut Fuel,
) -> Result<Value, EvalError> {
    let mut states = Vec::with_capacity(input.len() + 1);
    states.push(eval(acc.init, extra, fuel)?);
    for v in input {
        fuel.tick()?;
        let mut env = extra.clone();
        push_state(&mut env, acc, states.last().cloned().unwrap_or_default())?;
        env.push(name(X), alg.elem_ty.clone(), v.clone());
        states.push(eval(acc.step, &env, fuel)?);
    }

    let mut env = extra.clone();
    push_state(&mut env, acc, states[input.len()].clone())?;
    let mut r = eval(alg.nil, &env, fuel)?;
    for (i, v) in input.iter().enumerate().rev() {
        fuel.tick()?;
        let mut env = extra.clone();
        push_state(&mut env, acc, states[i].clone())?;
        env.push(name(X), alg.elem_ty.clone(), v.clone());
        env.push(name(XS), alg.result_ty.clone(), r);
        r = eval(alg.cons, &env, fuel)?;
    }
    Ok(r)
}
