//! Slot expressions: the typed trees evolved inside templates.
//!
//! Canonical text form (prefix, parenthesized):
//!
//! ```text
//! expr := var | int | float | "true" | "false" | 'c' | "string"
//!       | "(" prim expr* ")"
//!       | "(if" expr expr expr ")"
//!       | "(apply" expr expr ")"
//!       | "(tuple" expr expr ")"
//!       | "(list" type expr* ")"
//! ```
//!
//! A `"string"` literal is a `[Char]` list of character constants. Floats
//! always contain a `.` or an exponent.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::prims::{self, PrimId, Semantics};
use crate::types::{parse_type_prefix, SemType, Subst};
use crate::value::{escape_char, format_float, Value, ValueReader};

pub type Name = Arc<str>;

/// Default maximum depth for evolved expressions.
pub const DEFAULT_MAX_DEPTH: usize = 5;

#[derive(Clone, Debug)]
pub enum Expr {
    Var(Name),
    Int(i64),
    Float(f64),
    Bool(bool),
    Char(char),
    /// List literal with its element type.
    List(Vec<Expr>, SemType),
    Prim(PrimId, Vec<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Apply(Box<Expr>, Box<Expr>),
    Tuple(Box<Expr>, Box<Expr>),
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use Expr::*;
        match (self, other) {
            (Var(a), Var(b)) => a == b,
            (Int(a), Int(b)) => a == b,
            (Float(a), Float(b)) => a.to_bits() == b.to_bits(),
            (Bool(a), Bool(b)) => a == b,
            (Char(a), Char(b)) => a == b,
            (List(a, t), List(b, u)) => t == u && a == b,
            (Prim(p, a), Prim(q, b)) => p == q && a == b,
            (If(a, b, c), If(d, e, f)) => a == d && b == e && c == f,
            (Apply(a, b), Apply(c, d)) | (Tuple(a, b), Tuple(c, d)) => a == c && b == d,
            _ => false,
        }
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Expr::Var(n) => n.hash(state),
            Expr::Int(i) => i.hash(state),
            Expr::Float(x) => x.to_bits().hash(state),
            Expr::Bool(b) => b.hash(state),
            Expr::Char(c) => c.hash(state),
            Expr::List(items, t) => {
                t.hash(state);
                items.hash(state);
            }
            Expr::Prim(p, args) => {
                p.hash(state);
                args.hash(state);
            }
            Expr::If(c, t, f) => {
                c.hash(state);
                t.hash(state);
                f.hash(state);
            }
            Expr::Apply(a, b) | Expr::Tuple(a, b) => {
                a.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Var(Name::from(name))
    }

    /// Application of a registered primitive by name.
    ///
    /// # Panics
    /// If `name` is not a registered primitive.
    pub fn prim(name: &str, args: Vec<Expr>) -> Self {
        let p = prims::lookup(name).unwrap_or_else(|| panic!("unknown primitive {name}"));
        Expr::Prim(p.id, args)
    }

    pub fn string(s: &str) -> Self {
        Expr::List(s.chars().map(Expr::Char).collect(), SemType::Char)
    }

    /// Literal expression denoting `v`. `ty` disambiguates empty lists.
    pub fn from_value(v: &Value, ty: &SemType) -> Option<Expr> {
        Some(match (v, ty) {
            (Value::Int(i), _) => Expr::Int(*i),
            (Value::Float(x), _) => Expr::Float(*x),
            (Value::Bool(b), _) => Expr::Bool(*b),
            (Value::Char(c), _) => Expr::Char(*c),
            (Value::List(xs), SemType::List(t)) => Expr::List(
                xs.iter().map(|x| Expr::from_value(x, t)).collect::<Option<_>>()?,
                (**t).clone(),
            ),
            (Value::Tuple(p), SemType::Tuple(a, b)) => Expr::Tuple(
                Box::new(Expr::from_value(&p.0, a)?),
                Box::new(Expr::from_value(&p.1, b)?),
            ),
            _ => return None,
        })
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::List(items, _) | Expr::Prim(_, items) => items.iter().collect(),
            Expr::If(c, t, f) => vec![c, t, f],
            Expr::Apply(a, b) | Expr::Tuple(a, b) => vec![a, b],
            _ => Vec::new(),
        }
    }

    fn child_mut(&mut self, i: usize) -> Option<&mut Expr> {
        match self {
            Expr::List(items, _) | Expr::Prim(_, items) => items.get_mut(i),
            Expr::If(c, t, f) => match i {
                0 => Some(c),
                1 => Some(t),
                2 => Some(f),
                _ => None,
            },
            Expr::Apply(a, b) | Expr::Tuple(a, b) => match i {
                0 => Some(a),
                1 => Some(b),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children().is_empty()
    }

    fn is_scalar_literal(&self) -> bool {
        matches!(self, Expr::Int(_) | Expr::Float(_) | Expr::Bool(_) | Expr::Char(_))
    }

    /// Leaves and list literals of scalars (such as strings) have depth 0.
    pub fn depth(&self) -> usize {
        if let Expr::List(items, _) = self {
            if items.iter().all(Expr::is_scalar_literal) {
                return 0;
            }
        }
        self.children().iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn at(&self, path: &[usize]) -> Option<&Expr> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.children().get(*i).and_then(|c| c.at(rest)),
        }
    }

    /// Replaces the subtree at `path`; returns false if the path is invalid.
    pub fn replace_at(&mut self, path: &[usize], new: Expr) -> bool {
        match path.split_first() {
            None => {
                *self = new;
                true
            }
            Some((i, rest)) => match self.child_mut(*i) {
                Some(c) => c.replace_at(rest, new),
                None => false,
            },
        }
    }

    /// Variables referenced anywhere in the tree.
    pub fn free_vars(&self, out: &mut Vec<Name>) {
        if let Expr::Var(n) = self {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
        for c in self.children() {
            c.free_vars(out);
        }
    }
}

// ---------------------------------------------------------------------------
// typechecking

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnknownVariable(Name),
    Arity { prim: &'static str, expected: usize, found: usize },
    Mismatch { expected: SemType, found: SemType },
    NoInstance { prim: &'static str, args: Vec<SemType> },
    NotAFunction(SemType),
    ConstantApplied(&'static str),
    NonFiniteFloat,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type error at {}: {kind:?}", show_path(path))]
pub struct TypeCheckError {
    pub path: Vec<usize>,
    pub kind: TypeErrorKind,
}

fn show_path(path: &[usize]) -> String {
    let mut s = String::from("root");
    for i in path {
        s.push('/');
        s.push_str(&i.to_string());
    }
    s
}

pub type VarTypes = [(Name, SemType)];

fn var_type<'a>(vars: &'a VarTypes, name: &str) -> Option<&'a SemType> {
    vars.iter().rev().find(|(n, _)| &**n == name).map(|(_, t)| t)
}

/// Per-node facts collected by [`annotate`], in pre-order.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeInfo {
    pub path: Vec<usize>,
    pub ty: SemType,
    /// Distance from the root.
    pub depth_at: usize,
    /// Depth of the subtree rooted here.
    pub height: usize,
}

struct Checker<'a> {
    vars: &'a VarTypes,
    path: Vec<usize>,
    nodes: Option<Vec<NodeInfo>>,
}

impl Checker<'_> {
    fn fail<T>(&self, kind: TypeErrorKind) -> Result<T, TypeCheckError> {
        Err(TypeCheckError { path: self.path.clone(), kind })
    }

    fn child(&mut self, i: usize, e: &Expr) -> Result<(SemType, usize), TypeCheckError> {
        self.path.push(i);
        let r = self.check(e);
        self.path.pop();
        r
    }

    fn expect(&self, expected: &SemType, found: &SemType) -> Result<(), TypeCheckError> {
        if expected == found {
            Ok(())
        } else {
            self.fail(TypeErrorKind::Mismatch { expected: expected.clone(), found: found.clone() })
        }
    }

    /// Returns (type, height).
    fn check(&mut self, e: &Expr) -> Result<(SemType, usize), TypeCheckError> {
        let slot = self.nodes.as_mut().map(|n| {
            n.push(NodeInfo { path: Vec::new(), ty: SemType::Bool, depth_at: 0, height: 0 });
            n.len() - 1
        });
        let (ty, height) = match e {
            Expr::Var(n) => match var_type(self.vars, n) {
                Some(t) => (t.clone(), 0),
                None => return self.fail(TypeErrorKind::UnknownVariable(n.clone())),
            },
            Expr::Int(_) => (SemType::Int, 0),
            Expr::Float(x) => {
                if !x.is_finite() {
                    return self.fail(TypeErrorKind::NonFiniteFloat);
                }
                (SemType::Float, 0)
            }
            Expr::Bool(_) => (SemType::Bool, 0),
            Expr::Char(_) => (SemType::Char, 0),
            Expr::List(items, elem) => {
                let mut h = 0;
                for (i, it) in items.iter().enumerate() {
                    let (t, ch) = self.child(i, it)?;
                    self.path.push(i);
                    self.expect(elem, &t)?;
                    self.path.pop();
                    h = h.max(ch + 1);
                }
                if items.iter().all(Expr::is_scalar_literal) {
                    h = 0;
                }
                (SemType::list(elem.clone()), h)
            }
            Expr::Prim(id, args) => {
                let p = prims::prim(*id);
                if let Semantics::Constant(_) = p.semantics {
                    return self.fail(TypeErrorKind::ConstantApplied(p.name));
                }
                if args.len() != p.arity() {
                    return self.fail(TypeErrorKind::Arity {
                        prim: p.name,
                        expected: p.arity(),
                        found: args.len(),
                    });
                }
                let mut arg_types = Vec::with_capacity(args.len());
                let mut h = 0;
                for (i, a) in args.iter().enumerate() {
                    let (t, ch) = self.child(i, a)?;
                    arg_types.push(t);
                    h = h.max(ch + 1);
                }
                let mut subst = Subst::new();
                let ok = p.sig.params.iter().zip(&arg_types).all(|(pat, t)| subst.match_type(pat, t))
                    && subst.respects_bounds(&p.sig);
                let ret = subst.apply(&p.sig.ret);
                if !ok || !ret.is_ground() {
                    return self.fail(TypeErrorKind::NoInstance { prim: p.name, args: arg_types });
                }
                (ret, h)
            }
            Expr::If(c, t, f) => {
                let (ct, ch) = self.child(0, c)?;
                self.path.push(0);
                self.expect(&SemType::Bool, &ct)?;
                self.path.pop();
                let (tt, th) = self.child(1, t)?;
                let (ft, fh) = self.child(2, f)?;
                self.path.push(2);
                self.expect(&tt, &ft)?;
                self.path.pop();
                (tt, 1 + ch.max(th).max(fh))
            }
            Expr::Apply(f, a) => {
                let (ft, fh) = self.child(0, f)?;
                let (at, ah) = self.child(1, a)?;
                match ft {
                    SemType::Fn(arg, ret) => {
                        self.path.push(1);
                        self.expect(&arg, &at)?;
                        self.path.pop();
                        (*ret, 1 + fh.max(ah))
                    }
                    other => {
                        self.path.push(0);
                        return self.fail(TypeErrorKind::NotAFunction(other));
                    }
                }
            }
            Expr::Tuple(l, r) => {
                let (lt, lh) = self.child(0, l)?;
                let (rt, rh) = self.child(1, r)?;
                (SemType::tuple(lt, rt), 1 + lh.max(rh))
            }
        };
        if let (Some(nodes), Some(i)) = (self.nodes.as_mut(), slot) {
            nodes[i] = NodeInfo { path: self.path.clone(), ty: ty.clone(), depth_at: self.path.len(), height };
        }
        Ok((ty, height))
    }
}

/// The unique ground type of `e` under `vars`.
pub fn typecheck(e: &Expr, vars: &VarTypes) -> Result<SemType, TypeCheckError> {
    Checker { vars, path: Vec::new(), nodes: None }.check(e).map(|(t, _)| t)
}

/// Typechecks and records type, position and height of every node.
pub fn annotate(e: &Expr, vars: &VarTypes) -> Result<Vec<NodeInfo>, TypeCheckError> {
    let mut c = Checker { vars, path: Vec::new(), nodes: Some(Vec::new()) };
    c.check(e)?;
    Ok(c.nodes.unwrap_or_default())
}

// ---------------------------------------------------------------------------
// text form

fn is_string_literal(items: &[Expr], elem: &SemType) -> bool {
    *elem == SemType::Char && items.iter().all(|e| matches!(e, Expr::Char(_)))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(n) => f.write_str(n),
            Expr::Int(i) => write!(f, "{i}"),
            Expr::Float(x) => f.write_str(&format_float(*x)),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Char(c) => {
                let mut s = String::from("'");
                escape_char(*c, '\'', &mut s);
                s.push('\'');
                f.write_str(&s)
            }
            Expr::List(items, elem) if is_string_literal(items, elem) => {
                let mut s = String::from("\"");
                for it in items {
                    if let Expr::Char(c) = it {
                        escape_char(*c, '"', &mut s);
                    }
                }
                s.push('"');
                f.write_str(&s)
            }
            Expr::List(items, elem) => {
                write!(f, "(list {elem}")?;
                for it in items {
                    write!(f, " {it}")?;
                }
                f.write_str(")")
            }
            Expr::Prim(id, args) => {
                write!(f, "({}", prims::prim(*id).name)?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Expr::If(c, t, e) => write!(f, "(if {c} {t} {e})"),
            Expr::Apply(a, b) => write!(f, "(apply {a} {b})"),
            Expr::Tuple(a, b) => write!(f, "(tuple {a} {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expression syntax error at offset {pos}: {msg}")]
pub struct ExprParseError {
    pub pos: usize,
    pub msg: String,
}

const KEYWORDS: &[&str] = &["if", "apply", "tuple", "list", "true", "false"];

/// Whether `name` can be used as a variable in the text form.
pub fn is_valid_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&name)
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprParseError> {
        Err(ExprParseError { pos: self.pos, msg: msg.into() })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn atom(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '(' || c == ')' {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn quoted(&mut self, ty: &SemType) -> Result<Value, ExprParseError> {
        let mut r = ValueReader::new(&self.src[self.pos..]);
        match r.read(ty) {
            Ok(v) => {
                self.pos += r.position();
                Ok(v)
            }
            Err(e) => Err(ExprParseError { pos: self.pos + e.pos, msg: e.msg }),
        }
    }

    fn close(&mut self) -> Result<(), ExprParseError> {
        self.skip_ws();
        if self.peek() == Some(')') {
            self.pos += 1;
            Ok(())
        } else {
            self.err("expected ')'")
        }
    }

    fn args_until_close(&mut self) -> Result<Vec<Expr>, ExprParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(')') => {
                    self.pos += 1;
                    return Ok(out);
                }
                None => return self.err("unterminated application"),
                _ => out.push(self.expr()?),
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprParseError> {
        self.skip_ws();
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(')') => self.err("unexpected ')'"),
            Some('\'') => Ok(Expr::Char(self.quoted(&SemType::Char)?.as_char().unwrap_or_default())),
            Some('"') => {
                let v = self.quoted(&SemType::string())?;
                let s = v.as_string().unwrap_or_default();
                Ok(Expr::string(&s))
            }
            Some('(') => {
                self.pos += 1;
                self.skip_ws();
                let head_pos = self.pos;
                let head = self.atom();
                match head {
                    "if" => {
                        let c = self.expr()?;
                        let t = self.expr()?;
                        let e = self.expr()?;
                        self.close()?;
                        Ok(Expr::If(Box::new(c), Box::new(t), Box::new(e)))
                    }
                    "apply" | "tuple" => {
                        let a = self.expr()?;
                        let b = self.expr()?;
                        self.close()?;
                        Ok(if head == "apply" {
                            Expr::Apply(Box::new(a), Box::new(b))
                        } else {
                            Expr::Tuple(Box::new(a), Box::new(b))
                        })
                    }
                    "list" => {
                        self.skip_ws();
                        let (ty, used) = parse_type_prefix(&self.src[self.pos..])
                            .map_err(|e| ExprParseError { pos: self.pos + e.pos, msg: e.msg })?;
                        if ty.is_fn() {
                            return self.err("list literal of function type");
                        }
                        self.pos += used;
                        let items = self.args_until_close()?;
                        Ok(Expr::List(items, ty))
                    }
                    "" => self.err("empty application"),
                    name => {
                        let Some(p) = prims::lookup(name) else {
                            self.pos = head_pos;
                            return self.err(format!("unknown primitive '{name}'"));
                        };
                        if p.is_constant() {
                            self.pos = head_pos;
                            return self.err(format!("constant '{name}' cannot be applied"));
                        }
                        let args = self.args_until_close()?;
                        if args.len() != p.arity() {
                            self.pos = head_pos;
                            return self.err(format!("'{name}' takes {} arguments, got {}", p.arity(), args.len()));
                        }
                        Ok(Expr::Prim(p.id, args))
                    }
                }
            }
            Some(_) => {
                let start = self.pos;
                let tok = self.atom();
                match tok {
                    "true" => Ok(Expr::Bool(true)),
                    "false" => Ok(Expr::Bool(false)),
                    t if looks_numeric(t) => {
                        if t.contains(['.', 'e', 'E']) {
                            match t.parse::<f64>() {
                                Ok(x) if x.is_finite() => Ok(Expr::Float(x)),
                                _ => {
                                    self.pos = start;
                                    self.err(format!("bad float '{t}'"))
                                }
                            }
                        } else {
                            t.parse::<i64>().map(Expr::Int).or_else(|_| {
                                self.pos = start;
                                self.err(format!("bad integer '{t}'"))
                            })
                        }
                    }
                    t if is_valid_var_name(t) => Ok(Expr::var(t)),
                    t => {
                        self.pos = start;
                        self.err(format!("bad token '{t}'"))
                    }
                }
            }
        }
    }
}

fn looks_numeric(t: &str) -> bool {
    let digits = t.strip_prefix('-').unwrap_or(t);
    digits.starts_with(|c: char| c.is_ascii_digit())
}

pub fn parse_expr(text: &str) -> Result<Expr, ExprParseError> {
    let mut p = ExprParser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return p.err("trailing input");
    }
    Ok(e)
}
