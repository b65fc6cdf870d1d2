//! Fuel-limited evaluation of slot expressions.

use std::sync::Arc;

use thiserror::Error;

use crate::expr::{Expr, Name};
use crate::prims::{prim, Semantics};
use crate::types::SemType;
use crate::value::Value;

/// Default evaluation budget per test case, counted in evaluated nodes.
pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("fuel exhausted")]
    FuelExhausted,
    /// A partial primitive was applied outside its domain.
    #[error("partial primitive: {0}")]
    Partial(&'static str),
    #[error("unfold did not terminate within the step limit")]
    Diverged,
    /// Evaluation of an ill-typed program or input. Never produced by
    /// programs that passed the typechecker.
    #[error("ill-typed evaluation: {0}")]
    Ill(String),
}

impl EvalError {
    /// Signals that are scored as failed cases during search.
    pub fn is_signal(&self) -> bool {
        !matches!(self, EvalError::Ill(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fuel {
    remaining: u64,
}

impl Fuel {
    pub fn new(budget: u64) -> Self {
        Fuel { remaining: budget }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    #[inline]
    pub fn tick(&mut self) -> Result<(), EvalError> {
        if self.remaining == 0 {
            return Err(EvalError::FuelExhausted);
        }
        self.remaining -= 1;
        Ok(())
    }

    /// Spends `n` units at once, or all that is left.
    #[inline]
    pub fn charge(&mut self, n: u64) -> Result<(), EvalError> {
        if self.remaining < n {
            self.remaining = 0;
            return Err(EvalError::FuelExhausted);
        }
        self.remaining -= n;
        Ok(())
    }
}

/// Lists cost one unit per element when built, so fuel also bounds memory.
#[inline]
fn charge_for(v: Value, fuel: &mut Fuel) -> Result<Value, EvalError> {
    if let Value::List(items) = &v {
        fuel.charge(items.len() as u64)?;
    }
    Ok(v)
}

#[derive(Debug, Clone)]
struct Binding {
    name: Name,
    ty: SemType,
    value: Value,
}

/// Variable bindings: every name carries both its value and its type.
#[derive(Debug, Clone, Default)]
pub struct Env {
    bindings: Vec<Binding>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    /// Returns a new environment with `name` bound; later bindings shadow
    /// earlier ones.
    pub fn bind(&self, name: impl Into<Name>, ty: SemType, value: Value) -> Env {
        let mut env = self.clone();
        env.push(name.into(), ty, value);
        env
    }

    pub(crate) fn push(&mut self, name: Name, ty: SemType, value: Value) -> usize {
        self.bindings.push(Binding { name, ty, value });
        self.bindings.len() - 1
    }

    /// Replaces the value of a binding owned by a driver frame.
    #[inline]
    pub(crate) fn set(&mut self, slot: usize, value: Value) {
        self.bindings[slot].value = value;
    }

    #[inline]
    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.bindings.iter().rev().find(|b| &*b.name == name).map(|b| &b.value)
    }

    pub fn type_of(&self, name: &str) -> Option<&SemType> {
        self.bindings.iter().rev().find(|b| &*b.name == name).map(|b| &b.ty)
    }

    /// The name/type view used by the typechecker.
    pub fn var_types(&self) -> Vec<(Name, SemType)> {
        let mut out: Vec<(Name, SemType)> = Vec::new();
        for b in &self.bindings {
            out.retain(|(n, _)| *n != b.name);
            out.push((b.name.clone(), b.ty.clone()));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

pub fn eval(e: &Expr, env: &Env, fuel: &mut Fuel) -> Result<Value, EvalError> {
    fuel.tick()?;
    match e {
        Expr::Var(name) => env
            .lookup(name)
            .cloned()
            .ok_or_else(|| EvalError::Ill(format!("unbound variable {name}"))),
        Expr::Int(i) => Ok(Value::Int(*i)),
        Expr::Float(x) => Ok(Value::Float(*x)),
        Expr::Bool(b) => Ok(Value::Bool(*b)),
        Expr::Char(c) => Ok(Value::Char(*c)),
        Expr::List(items, _) => {
            let mut out = Vec::with_capacity(items.len());
            for it in items {
                out.push(eval(it, env, fuel)?);
            }
            charge_for(Value::List(Arc::new(out)), fuel)
        }
        Expr::Prim(id, args) => {
            let p = prim(*id);
            match &p.semantics {
                Semantics::And => {
                    if truth(&eval(&args[0], env, fuel)?)? {
                        Ok(Value::Bool(truth(&eval(&args[1], env, fuel)?)?))
                    } else {
                        Ok(Value::Bool(false))
                    }
                }
                Semantics::Or => {
                    if truth(&eval(&args[0], env, fuel)?)? {
                        Ok(Value::Bool(true))
                    } else {
                        Ok(Value::Bool(truth(&eval(&args[1], env, fuel)?)?))
                    }
                }
                Semantics::Constant(v) => Ok(v.clone()),
                Semantics::Strict(f) => {
                    let mut vals: [Value; 4] = Default::default();
                    for (slot, a) in vals.iter_mut().zip(args) {
                        *slot = eval(a, env, fuel)?;
                    }
                    charge_for(f(&vals[..args.len()], fuel)?, fuel)
                }
            }
        }
        Expr::If(c, t, f) => {
            if truth(&eval(c, env, fuel)?)? {
                eval(t, env, fuel)
            } else {
                eval(f, env, fuel)
            }
        }
        Expr::Apply(f, a) => {
            let fv = eval(f, env, fuel)?;
            let av = eval(a, env, fuel)?;
            match fv {
                Value::Fn(func) => func.call(&av, fuel),
                _ => Err(EvalError::Ill("application of a non-function".into())),
            }
        }
        Expr::Tuple(l, r) => Ok(Value::tuple(eval(l, env, fuel)?, eval(r, env, fuel)?)),
    }
}

fn truth(v: &Value) -> Result<bool, EvalError> {
    v.as_bool().ok_or_else(|| EvalError::Ill("non-boolean condition".into()))
}
