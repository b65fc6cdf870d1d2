//! Primitive registry: the builtin function set and the per-problem
//! user-provided functions and constants.
//!
//! `if-then-else` is the [`Expr::If`](crate::expr::Expr::If) node rather than
//! a registry entry, and `case` is expressed as nested `if` over equality
//! tests. Maps are association lists `[(k, v)]`.

use std::collections::HashMap;
use std::fmt;
use std::sync::LazyLock;

use thiserror::Error;

use crate::eval::{EvalError, Fuel};
use crate::types::{instantiate, parse_signature, Bound, SemType, Signature, Subst, TypeUniverse};
use crate::value::Value;

pub type StrictFn = fn(&[Value], &mut Fuel) -> Result<Value, EvalError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimId(pub u16);

#[derive(Clone)]
pub enum Semantics {
    Strict(StrictFn),
    /// Short-circuiting conjunction.
    And,
    /// Short-circuiting disjunction.
    Or,
    Constant(Value),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Builtin,
    /// Provided by the user for the named problems.
    User(&'static [&'static str]),
}

#[derive(Clone)]
pub struct Primitive {
    pub id: PrimId,
    pub name: &'static str,
    pub sig: Signature,
    pub semantics: Semantics,
    pub origin: Origin,
}

impl Primitive {
    pub fn arity(&self) -> usize {
        self.sig.arity()
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.semantics, Semantics::Constant(_))
    }

    pub fn is_builtin(&self) -> bool {
        self.origin == Origin::Builtin
    }
}

impl fmt::Debug for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :: {}", self.name, self.sig)
    }
}

pub struct Registry {
    prims: Vec<Primitive>,
    by_name: HashMap<&'static str, PrimId>,
}

impl Registry {
    pub fn get(&self, id: PrimId) -> &Primitive {
        &self.prims[id.0 as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<&Primitive> {
        self.by_name.get(name).map(|id| self.get(*id))
    }

    pub fn all(&self) -> &[Primitive] {
        &self.prims
    }
}

static REGISTRY: LazyLock<Registry> = LazyLock::new(build_registry);

pub fn registry() -> &'static Registry {
    &REGISTRY
}

pub fn prim(id: PrimId) -> &'static Primitive {
    REGISTRY.get(id)
}

pub fn lookup(name: &str) -> Option<&'static Primitive> {
    REGISTRY.lookup(name)
}

pub fn builtin_set() -> Vec<&'static Primitive> {
    REGISTRY.prims.iter().filter(|p| p.is_builtin()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown problem '{0}'")]
pub struct UnknownProblem(pub String);

/// The user-provided primitives for a registered problem.
pub fn user_set(problem: &str) -> Result<Vec<&'static Primitive>, UnknownProblem> {
    if !crate::problems::is_registered(problem) {
        return Err(UnknownProblem(problem.to_string()));
    }
    Ok(REGISTRY
        .prims
        .iter()
        .filter(|p| matches!(p.origin, Origin::User(users) if users.contains(&problem)))
        .collect())
}

/// Instantiates `p` to return `target`, or `None`. Free type variables must
/// have at least one admissible type in `universe`, and no variable may be
/// bound to a type containing a function.
pub fn instantiate_for(p: &Primitive, target: &SemType, universe: &TypeUniverse) -> Option<Subst> {
    let subst = instantiate(&p.sig, target)?;
    if subst.iter().any(|(_, t)| t.contains_fn()) {
        return None;
    }
    for v in p.sig.vars() {
        if subst.get(&v).is_none() {
            let bound = p.sig.bound_of(&v);
            if !universe.types().iter().any(|t| bound.is_none_or(|b| b.admits(t))) {
                return None;
            }
        }
    }
    Some(subst)
}

/// Every registry entry whose signature instantiates to return `target`.
pub fn primitives_returning(target: &SemType, universe: &TypeUniverse) -> Vec<(&'static Primitive, Subst)> {
    REGISTRY
        .prims
        .iter()
        .filter_map(|p| instantiate_for(p, target, universe).map(|s| (p, s)))
        .collect()
}

// ---------------------------------------------------------------------------
// semantics

fn partial(msg: &'static str) -> EvalError {
    EvalError::Partial(msg)
}

fn ill() -> EvalError {
    EvalError::Ill("primitive applied to ill-typed arguments".into())
}

fn float(x: f64) -> Result<Value, EvalError> {
    if x.is_finite() {
        Ok(Value::Float(x))
    } else {
        Err(partial("non-finite float"))
    }
}

fn int_arg(v: &Value) -> Result<i64, EvalError> {
    v.as_int().ok_or_else(ill)
}

fn list_arg(v: &Value) -> Result<&[Value], EvalError> {
    v.as_list().ok_or_else(ill)
}

fn num2(args: &[Value], fi: fn(i64, i64) -> i64, ff: fn(f64, f64) -> f64) -> Result<Value, EvalError> {
    match (&args[0], &args[1]) {
        (Value::Int(a), Value::Int(b)) => Ok(Value::Int(fi(*a, *b))),
        (Value::Float(a), Value::Float(b)) => float(ff(*a, *b)),
        _ => Err(ill()),
    }
}

fn int2(args: &[Value], f: fn(i64, i64) -> Result<i64, EvalError>) -> Result<Value, EvalError> {
    Ok(Value::Int(f(int_arg(&args[0])?, int_arg(&args[1])?)?))
}

fn floor_div(a: i64, b: i64) -> Result<i64, EvalError> {
    if b == 0 {
        return Err(partial("division by zero"));
    }
    let q = a.wrapping_div(b);
    if a.wrapping_rem(b) != 0 && ((a < 0) != (b < 0)) {
        Ok(q.wrapping_sub(1))
    } else {
        Ok(q)
    }
}

fn floor_mod(a: i64, b: i64) -> Result<i64, EvalError> {
    if b == 0 {
        return Err(partial("modulo by zero"));
    }
    let r = a.wrapping_rem(b);
    if r != 0 && ((r < 0) != (b < 0)) {
        Ok(r.wrapping_add(b))
    } else {
        Ok(r)
    }
}

fn int_pow(base: i64, exp: i64) -> Result<i64, EvalError> {
    if exp < 0 {
        return Err(partial("negative exponent"));
    }
    let (mut acc, mut b, mut e) = (1i64, base, exp as u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.wrapping_mul(b);
        }
        b = b.wrapping_mul(b);
        e >>= 1;
    }
    Ok(acc)
}

fn cmp_prim(args: &[Value], f: fn(std::cmp::Ordering) -> bool) -> Result<Value, EvalError> {
    Ok(Value::Bool(f(args[0].compare(&args[1]))))
}

fn is_vowel(c: char) -> bool {
    matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

pub fn scrabble_score(c: char) -> i64 {
    match c.to_ascii_lowercase() {
        'a' | 'e' | 'i' | 'o' | 'u' | 'l' | 'n' | 's' | 't' | 'r' => 1,
        'd' | 'g' => 2,
        'b' | 'c' | 'm' | 'p' => 3,
        'f' | 'h' | 'v' | 'w' | 'y' => 4,
        'k' => 5,
        'j' | 'x' => 8,
        'q' | 'z' => 10,
        _ => 0,
    }
}

fn enum_code(v: &Value) -> Result<i64, EvalError> {
    match v {
        Value::Int(i) => Ok(*i),
        Value::Char(c) => Ok(*c as i64),
        Value::Bool(b) => Ok(*b as i64),
        _ => Err(ill()),
    }
}

// ---------------------------------------------------------------------------
// construction

struct Builder {
    prims: Vec<Primitive>,
}

impl Builder {
    fn add(&mut self, name: &'static str, sig: Signature, semantics: Semantics, origin: Origin) {
        let id = PrimId(self.prims.len() as u16);
        self.prims.push(Primitive { id, name, sig, semantics, origin });
    }

    fn builtin(&mut self, name: &'static str, sig: &str, f: StrictFn) {
        self.builtin_bounded(name, sig, &[], f);
    }

    fn builtin_bounded(&mut self, name: &'static str, sig: &str, bounds: &[(&str, Bound)], f: StrictFn) {
        let mut s = parse_signature(sig).expect("builtin signature");
        for (v, b) in bounds {
            s = s.with_bound(v, *b);
        }
        self.add(name, s, Semantics::Strict(f), Origin::Builtin);
    }

    fn user(&mut self, name: &'static str, sig: &str, f: StrictFn, users: &'static [&'static str]) {
        let s = parse_signature(sig).expect("user signature");
        self.add(name, s, Semantics::Strict(f), Origin::User(users));
    }

    fn constant(&mut self, name: &'static str, value: Value, ty: SemType, users: &'static [&'static str]) {
        self.add(name, Signature::new(vec![], ty), Semantics::Constant(value), Origin::User(users));
    }
}

fn build_registry() -> Registry {
    use Bound::*;
    let mut b = Builder { prims: Vec::new() };

    // numbers
    b.builtin("fromIntegral", "Int -> Float", |a, _| Ok(Value::Float(int_arg(&a[0])? as f64)));
    b.builtin_bounded("+", "a -> a -> a", &[("a", Num)], |a, _| num2(a, i64::wrapping_add, |x, y| x + y));
    b.builtin_bounded("-", "a -> a -> a", &[("a", Num)], |a, _| num2(a, i64::wrapping_sub, |x, y| x - y));
    b.builtin_bounded("*", "a -> a -> a", &[("a", Num)], |a, _| num2(a, i64::wrapping_mul, |x, y| x * y));
    b.builtin("/", "Float -> Float -> Float", |a, _| match (&a[0], &a[1]) {
        (Value::Float(_), Value::Float(y)) if *y == 0.0 => Err(partial("division by zero")),
        (Value::Float(x), Value::Float(y)) => float(x / y),
        _ => Err(ill()),
    });
    b.builtin("^", "Int -> Int -> Int", |a, _| int2(a, int_pow));
    b.builtin("div", "Int -> Int -> Int", |a, _| int2(a, floor_div));
    b.builtin("quot", "Int -> Int -> Int", |a, _| {
        int2(a, |x, y| if y == 0 { Err(partial("division by zero")) } else { Ok(x.wrapping_div(y)) })
    });
    b.builtin("mod", "Int -> Int -> Int", |a, _| int2(a, floor_mod));
    b.builtin("rem", "Int -> Int -> Int", |a, _| {
        int2(a, |x, y| if y == 0 { Err(partial("modulo by zero")) } else { Ok(x.wrapping_rem(y)) })
    });
    b.builtin_bounded("abs", "a -> a", &[("a", Num)], |a, _| match &a[0] {
        Value::Int(i) => Ok(Value::Int(i.wrapping_abs())),
        Value::Float(x) => float(x.abs()),
        _ => Err(ill()),
    });
    b.builtin_bounded("min", "a -> a -> a", &[("a", Ord)], |a, _| {
        Ok(if a[1].compare(&a[0]).is_lt() { a[1].clone() } else { a[0].clone() })
    });
    b.builtin_bounded("max", "a -> a -> a", &[("a", Ord)], |a, _| {
        Ok(if a[1].compare(&a[0]).is_gt() { a[1].clone() } else { a[0].clone() })
    });

    // logical
    b.builtin_bounded("<", "a -> a -> Bool", &[("a", Ord)], |a, _| cmp_prim(a, |o| o.is_lt()));
    b.builtin_bounded("<=", "a -> a -> Bool", &[("a", Ord)], |a, _| cmp_prim(a, |o| o.is_le()));
    b.builtin_bounded(">", "a -> a -> Bool", &[("a", Ord)], |a, _| cmp_prim(a, |o| o.is_gt()));
    b.builtin_bounded(">=", "a -> a -> Bool", &[("a", Ord)], |a, _| cmp_prim(a, |o| o.is_ge()));
    b.builtin_bounded("==", "a -> a -> Bool", &[("a", Eq)], |a, _| Ok(Value::Bool(a[0] == a[1])));
    b.builtin_bounded("/=", "a -> a -> Bool", &[("a", Eq)], |a, _| Ok(Value::Bool(a[0] != a[1])));
    b.add("&&", parse_signature("Bool -> Bool -> Bool").unwrap(), Semantics::And, Origin::Builtin);
    b.add("||", parse_signature("Bool -> Bool -> Bool").unwrap(), Semantics::Or, Origin::Builtin);
    b.builtin("not", "Bool -> Bool", |a, _| a[0].as_bool().map(|x| Value::Bool(!x)).ok_or_else(ill));

    // lists
    b.builtin("cons", "a -> [a] -> [a]", |a, _| {
        let xs = list_arg(&a[1])?;
        let mut out = Vec::with_capacity(xs.len() + 1);
        out.push(a[0].clone());
        out.extend_from_slice(xs);
        Ok(Value::list(out))
    });
    b.builtin("snoc", "[a] -> a -> [a]", |a, _| {
        let xs = list_arg(&a[0])?;
        let mut out = Vec::with_capacity(xs.len() + 1);
        out.extend_from_slice(xs);
        out.push(a[1].clone());
        Ok(Value::list(out))
    });
    b.builtin("<>", "[a] -> [a] -> [a]", |a, _| {
        let (xs, ys) = (list_arg(&a[0])?, list_arg(&a[1])?);
        let mut out = Vec::with_capacity(xs.len() + ys.len());
        out.extend_from_slice(xs);
        out.extend_from_slice(ys);
        Ok(Value::list(out))
    });
    b.builtin("head", "[a] -> a", |a, _| list_arg(&a[0])?.first().cloned().ok_or(partial("head of empty list")));
    b.builtin("last", "[a] -> a", |a, _| list_arg(&a[0])?.last().cloned().ok_or(partial("last of empty list")));
    b.builtin("tail", "[a] -> [a]", |a, _| match list_arg(&a[0])? {
        [] => Err(partial("tail of empty list")),
        [_, rest @ ..] => Ok(Value::list(rest.to_vec())),
    });
    b.builtin("init", "[a] -> [a]", |a, _| match list_arg(&a[0])? {
        [] => Err(partial("init of empty list")),
        [rest @ .., _] => Ok(Value::list(rest.to_vec())),
    });
    b.builtin("null", "[a] -> Bool", |a, _| Ok(Value::Bool(list_arg(&a[0])?.is_empty())));
    b.builtin("length", "[a] -> Int", |a, _| Ok(Value::Int(list_arg(&a[0])?.len() as i64)));
    b.builtin_bounded("delete", "a -> [a] -> [a]", &[("a", Eq)], |a, _| {
        let xs = list_arg(&a[1])?;
        let mut out = xs.to_vec();
        if let Some(i) = xs.iter().position(|x| *x == a[0]) {
            out.remove(i);
        }
        Ok(Value::list(out))
    });
    b.builtin_bounded("elem", "a -> [a] -> Bool", &[("a", Eq)], |a, _| {
        Ok(Value::Bool(list_arg(&a[1])?.contains(&a[0])))
    });

    // tuples
    b.builtin("fst", "(a, b) -> a", |a, _| a[0].as_tuple().map(|p| p.0.clone()).ok_or_else(ill));
    b.builtin("snd", "(a, b) -> b", |a, _| a[0].as_tuple().map(|p| p.1.clone()).ok_or_else(ill));

    // association-list maps
    b.builtin_bounded("findMap", "k -> [(k, v)] -> v", &[("k", Eq)], |a, _| {
        list_arg(&a[1])?
            .iter()
            .filter_map(Value::as_tuple)
            .find(|(k, _)| **k == a[0])
            .map(|(_, v)| v.clone())
            .ok_or(partial("key not found"))
    });
    b.builtin_bounded("insertWith", "(v -> v -> v) -> k -> v -> [(k, v)] -> [(k, v)]", &[("k", Eq)], |a, fuel| {
        let Value::Fn(f) = &a[0] else { return Err(ill()) };
        let entries = list_arg(&a[3])?;
        let mut out = Vec::with_capacity(entries.len() + 1);
        let mut found = false;
        for e in entries {
            let (k, old) = e.as_tuple().ok_or_else(ill)?;
            if !found && *k == a[1] {
                let Value::Fn(g) = f.call(&a[2], fuel)? else { return Err(ill()) };
                out.push(Value::tuple(k.clone(), g.call(old, fuel)?));
                found = true;
            } else {
                out.push(e.clone());
            }
        }
        if !found {
            out.push(Value::tuple(a[1].clone(), a[2].clone()));
        }
        Ok(Value::list(out))
    });

    // general purpose
    b.builtin("uncurry", "(a -> b -> c) -> (a, b) -> c", |a, fuel| {
        let Value::Fn(f) = &a[0] else { return Err(ill()) };
        let (x, y) = a[1].as_tuple().ok_or_else(ill)?;
        let Value::Fn(g) = f.call(x, fuel)? else { return Err(ill()) };
        g.call(y, fuel)
    });
    b.builtin_bounded("fromEnum", "a -> Int", &[("a", Enum)], |a, _| enum_code(&a[0]).map(Value::Int));
    b.builtin("toEnum", "Int -> Char", |a, _| {
        let code = int_arg(&a[0])?;
        u32::try_from(code)
            .ok()
            .and_then(char::from_u32)
            .map(Value::Char)
            .ok_or(partial("invalid character code"))
    });
    b.builtin("id", "a -> a", |a, _| Ok(a[0].clone()));

    // user-provided
    const SMALL_OR_LARGE: &[&str] = &["small-or-large"];
    const DOUBLE_LETTERS: &[&str] = &["double-letters"];
    b.user("<1000", "Int -> Bool", |a, _| Ok(Value::Bool(int_arg(&a[0])? < 1000)), SMALL_OR_LARGE);
    b.user(">=2000", "Int -> Bool", |a, _| Ok(Value::Bool(int_arg(&a[0])? >= 2000)), SMALL_OR_LARGE);
    b.constant("\"small\"", Value::string("small"), SemType::string(), SMALL_OR_LARGE);
    b.constant("\"large\"", Value::string("large"), SemType::string(), SMALL_OR_LARGE);
    b.constant("\"!!!\"", Value::string("!!!"), SemType::string(), DOUBLE_LETTERS);
    b.constant("\"ABCDF\"", Value::string("ABCDF"), SemType::string(), &["grade"]);
    b.constant("\"ay\"", Value::string("ay"), SemType::string(), &["pig-latin"]);
    b.constant("'!'", Value::Char('!'), SemType::Char, DOUBLE_LETTERS);
    b.constant("' '", Value::Char(' '), SemType::Char, &["replace-space-with-newline", "checksum"]);
    b.constant("'\\n'", Value::Char('\n'), SemType::Char, &["replace-space-with-newline"]);
    b.constant("0", Value::Int(0), SemType::Int, &["negative-to-zero", "last-index-of-zero"]);
    b.constant("1", Value::Int(1), SemType::Int, &["last-index-of-zero"]);
    b.constant("64", Value::Int(64), SemType::Int, &["checksum"]);
    b.user(
        "isVowel",
        "Char -> Bool",
        |a, _| a[0].as_char().map(|c| Value::Bool(is_vowel(c))).ok_or_else(ill),
        &["syllables", "pig-latin"],
    );
    b.user(
        "isLetter",
        "Char -> Bool",
        |a, _| a[0].as_char().map(|c| Value::Bool(c.is_alphabetic())).ok_or_else(ill),
        DOUBLE_LETTERS,
    );
    b.user(
        "scrabbleScore",
        "Char -> Int",
        |a, _| a[0].as_char().map(|c| Value::Int(scrabble_score(c))).ok_or_else(ill),
        &["scrabble-score"],
    );

    let by_name = b.prims.iter().map(|p| (p.name, p.id)).collect();
    Registry { prims: b.prims, by_name }
}
