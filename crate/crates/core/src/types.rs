//! Semantic types shared by expressions, primitive signatures, templates and
//! problem definitions.
//!
//! Concrete grammar (arrows associate to the right):
//!
//! ```text
//! type  := atom ( "->" type )?
//! atom  := "Int" | "Float" | "Bool" | "Char" | "String"
//!        | ident                      -- type variable, lowercase
//!        | "[" type "]"
//!        | "(" type ")" | "(" type "," type ")"
//! ```
//!
//! `String` is accepted as an alias and always shown as `[Char]`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemType {
    Int,
    Float,
    Bool,
    Char,
    List(Box<SemType>),
    Tuple(Box<SemType>, Box<SemType>),
    Fn(Box<SemType>, Box<SemType>),
    Var(String),
}

impl SemType {
    pub fn list(elem: SemType) -> Self {
        SemType::List(Box::new(elem))
    }

    pub fn tuple(left: SemType, right: SemType) -> Self {
        SemType::Tuple(Box::new(left), Box::new(right))
    }

    pub fn func(arg: SemType, ret: SemType) -> Self {
        SemType::Fn(Box::new(arg), Box::new(ret))
    }

    pub fn var(name: &str) -> Self {
        SemType::Var(name.to_string())
    }

    pub fn string() -> Self {
        SemType::list(SemType::Char)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            SemType::Var(_) => false,
            SemType::List(t) => t.is_ground(),
            SemType::Tuple(a, b) | SemType::Fn(a, b) => a.is_ground() && b.is_ground(),
            _ => true,
        }
    }

    pub fn is_list(&self) -> bool {
        matches!(self, SemType::List(_))
    }

    pub fn is_fn(&self) -> bool {
        matches!(self, SemType::Fn(..))
    }

    pub fn elem(&self) -> Option<&SemType> {
        match self {
            SemType::List(t) => Some(t),
            _ => None,
        }
    }

    /// True when a function type occurs anywhere inside.
    pub fn contains_fn(&self) -> bool {
        match self {
            SemType::Fn(..) => true,
            SemType::List(t) => t.contains_fn(),
            SemType::Tuple(a, b) => a.contains_fn() || b.contains_fn(),
            _ => false,
        }
    }

    /// Nesting depth: base types and variables are 0.
    pub fn depth(&self) -> usize {
        match self {
            SemType::List(t) => 1 + t.depth(),
            SemType::Tuple(a, b) | SemType::Fn(a, b) => 1 + a.depth().max(b.depth()),
            _ => 0,
        }
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            SemType::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            SemType::List(t) => t.vars(out),
            SemType::Tuple(a, b) | SemType::Fn(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            _ => {}
        }
    }

    fn subterms(&self, out: &mut Vec<SemType>) {
        if !out.contains(self) {
            out.push(self.clone());
        }
        match self {
            SemType::List(t) => t.subterms(out),
            SemType::Tuple(a, b) | SemType::Fn(a, b) => {
                a.subterms(out);
                b.subterms(out);
            }
            _ => {}
        }
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemType::Int => f.write_str("Int"),
            SemType::Float => f.write_str("Float"),
            SemType::Bool => f.write_str("Bool"),
            SemType::Char => f.write_str("Char"),
            SemType::List(t) => write!(f, "[{t}]"),
            SemType::Tuple(a, b) => write!(f, "({a}, {b})"),
            SemType::Fn(a, b) if a.is_fn() => write!(f, "({a}) -> {b}"),
            SemType::Fn(a, b) => write!(f, "{a} -> {b}"),
            SemType::Var(v) => f.write_str(v),
        }
    }
}

/// Instantiation constraint on a type variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    /// `Int` or `Float`.
    Num,
    /// Any type without functions inside.
    Eq,
    /// Any type without functions inside (ordering is structural).
    Ord,
    /// `Int`, `Char` or `Bool`.
    Enum,
}

impl Bound {
    pub fn admits(self, ty: &SemType) -> bool {
        match self {
            Bound::Num => matches!(ty, SemType::Int | SemType::Float),
            Bound::Eq | Bound::Ord => !ty.contains_fn(),
            Bound::Enum => matches!(ty, SemType::Int | SemType::Char | SemType::Bool),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub params: Vec<SemType>,
    pub ret: SemType,
    pub bounds: Vec<(String, Bound)>,
}

impl Signature {
    pub fn new(params: Vec<SemType>, ret: SemType) -> Self {
        Signature { params, ret, bounds: Vec::new() }
    }

    /// Uncurries a (possibly arrow) type into parameters and a result.
    pub fn from_type(mut ty: SemType) -> Self {
        let mut params = Vec::new();
        while let SemType::Fn(a, b) = ty {
            params.push(*a);
            ty = *b;
        }
        Signature::new(params, ty)
    }

    pub fn with_bound(mut self, var: &str, bound: Bound) -> Self {
        self.bounds.push((var.to_string(), bound));
        self
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn as_type(&self) -> SemType {
        self.params
            .iter()
            .rev()
            .fold(self.ret.clone(), |acc, p| SemType::func(p.clone(), acc))
    }

    pub fn is_ground(&self) -> bool {
        self.ret.is_ground() && self.params.iter().all(SemType::is_ground)
    }

    /// Type variables of `ret` that do not occur in any parameter.
    pub fn constant_polymorphic_vars(&self) -> Vec<String> {
        let mut ret_vars = Vec::new();
        self.ret.vars(&mut ret_vars);
        let mut param_vars = Vec::new();
        for p in &self.params {
            p.vars(&mut param_vars);
        }
        ret_vars.retain(|v| !param_vars.contains(v));
        ret_vars
    }

    pub fn bound_of(&self, var: &str) -> Option<Bound> {
        self.bounds.iter().find(|(v, _)| v == var).map(|(_, b)| *b)
    }

    /// All type variables, in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        for p in &self.params {
            p.vars(&mut out);
        }
        self.ret.vars(&mut out);
        out
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.params {
            if p.is_fn() {
                write!(f, "({p}) -> ")?;
            } else {
                write!(f, "{p} -> ")?;
            }
        }
        write!(f, "{}", self.ret)
    }
}

/// A type-variable substitution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst(BTreeMap<String, SemType>);

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn get(&self, var: &str) -> Option<&SemType> {
        self.0.get(var)
    }

    pub fn insert(&mut self, var: &str, ty: SemType) {
        self.0.insert(var.to_string(), ty);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &SemType)> {
        self.0.iter()
    }

    pub fn apply(&self, ty: &SemType) -> SemType {
        match ty {
            SemType::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| ty.clone()),
            SemType::List(t) => SemType::list(self.apply(t)),
            SemType::Tuple(a, b) => SemType::tuple(self.apply(a), self.apply(b)),
            SemType::Fn(a, b) => SemType::func(self.apply(a), self.apply(b)),
            _ => ty.clone(),
        }
    }

    /// One-sided matching of `pattern` against the ground type `ground`,
    /// extending the substitution. Returns false on mismatch.
    pub fn match_type(&mut self, pattern: &SemType, ground: &SemType) -> bool {
        match (pattern, ground) {
            (SemType::Var(v), _) => match self.0.get(v) {
                Some(bound) => bound == ground,
                None => {
                    self.0.insert(v.clone(), ground.clone());
                    true
                }
            },
            (SemType::List(p), SemType::List(g)) => self.match_type(p, g),
            (SemType::Tuple(pa, pb), SemType::Tuple(ga, gb))
            | (SemType::Fn(pa, pb), SemType::Fn(ga, gb)) => {
                self.match_type(pa, ga) && self.match_type(pb, gb)
            }
            _ => pattern == ground,
        }
    }

    /// Checks every bound of `sig` whose variable is bound here.
    pub fn respects_bounds(&self, sig: &Signature) -> bool {
        sig.bounds.iter().all(|(v, b)| match self.0.get(v) {
            Some(t) => b.admits(t),
            None => true,
        })
    }
}

/// Most general substitution making `sig.ret` equal to the ground `target`.
///
/// Variables occurring only in parameters stay free; the caller resolves them
/// from a [`TypeUniverse`].
pub fn instantiate(sig: &Signature, target: &SemType) -> Option<Subst> {
    debug_assert!(target.is_ground());
    let mut subst = Subst::new();
    if !subst.match_type(&sig.ret, target) {
        return None;
    }
    subst.respects_bounds(sig).then_some(subst)
}

/// Ground types available for resolving otherwise unconstrained type
/// variables: base types plus every subterm of the seeding types, capped at
/// nesting depth 2. Function types are never part of the universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeUniverse {
    types: Vec<SemType>,
}

impl TypeUniverse {
    pub const MAX_DEPTH: usize = 2;

    pub fn from_types<'a>(seeds: impl IntoIterator<Item = &'a SemType>) -> Self {
        let mut types = vec![SemType::Int, SemType::Float, SemType::Bool, SemType::Char];
        for s in seeds {
            s.subterms(&mut types);
        }
        types.retain(|t| t.is_ground() && !t.contains_fn() && t.depth() <= Self::MAX_DEPTH);
        TypeUniverse { types }
    }

    /// Like [`TypeUniverse::from_types`] but with `Bool` as the only base
    /// type added to the seeds' subterms.
    pub fn scoped<'a>(seeds: impl IntoIterator<Item = &'a SemType>) -> Self {
        let mut types = vec![SemType::Bool];
        for s in seeds {
            s.subterms(&mut types);
        }
        types.retain(|t| t.is_ground() && !t.contains_fn() && t.depth() <= Self::MAX_DEPTH);
        let mut out = TypeUniverse { types: Vec::new() };
        for t in types {
            if !out.types.contains(&t) {
                out.types.push(t);
            }
        }
        out
    }

    pub fn for_signature(sig: &Signature) -> Self {
        Self::from_types(sig.params.iter().chain(std::iter::once(&sig.ret)))
    }

    pub fn types(&self) -> &[SemType] {
        &self.types
    }

    pub fn contains(&self, ty: &SemType) -> bool {
        self.types.contains(ty)
    }

    pub fn extend<'a>(&mut self, more: impl IntoIterator<Item = &'a SemType>) {
        let mut extra = Vec::new();
        for t in more {
            t.subterms(&mut extra);
        }
        for t in extra {
            if t.is_ground() && !t.contains_fn() && t.depth() <= Self::MAX_DEPTH && !self.types.contains(&t)
            {
                self.types.push(t);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type syntax error at offset {pos}: {msg}")]
pub struct TypeParseError {
    pub pos: usize,
    pub msg: String,
}

struct TypeParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> TypeParser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, TypeParseError> {
        Err(TypeParseError { pos: self.pos, msg: msg.into() })
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

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn ty(&mut self) -> Result<SemType, TypeParseError> {
        let lhs = self.atom()?;
        if self.eat("->") {
            let rhs = self.ty()?;
            Ok(SemType::func(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn atom(&mut self) -> Result<SemType, TypeParseError> {
        self.skip_ws();
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let inner = self.ty()?;
                if !self.eat("]") {
                    return self.err("expected ']'");
                }
                Ok(SemType::list(inner))
            }
            Some('(') => {
                self.pos += 1;
                let first = self.ty()?;
                if self.eat(",") {
                    let second = self.ty()?;
                    if !self.eat(")") {
                        return self.err("expected ')'");
                    }
                    Ok(SemType::tuple(first, second))
                } else if self.eat(")") {
                    Ok(first)
                } else {
                    self.err("expected ',' or ')'")
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let word = &self.src[start..self.pos];
                match word {
                    "Int" => Ok(SemType::Int),
                    "Float" => Ok(SemType::Float),
                    "Bool" => Ok(SemType::Bool),
                    "Char" => Ok(SemType::Char),
                    "String" => Ok(SemType::string()),
                    w if w.starts_with(|c: char| c.is_ascii_lowercase()) => Ok(SemType::var(w)),
                    w => {
                        self.pos = start;
                        self.err(format!("unknown type '{w}'"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a type that may be followed by other text. Returns the type and
/// the number of bytes consumed.
pub fn parse_type_prefix(text: &str) -> Result<(SemType, usize), TypeParseError> {
    let mut p = TypeParser { src: text, pos: 0 };
    let ty = p.ty()?;
    Ok((ty, p.pos))
}

pub fn parse_type(text: &str) -> Result<SemType, TypeParseError> {
    let mut p = TypeParser { src: text, pos: 0 };
    let ty = p.ty()?;
    p.skip_ws();
    if p.pos != text.len() {
        return p.err("trailing input");
    }
    Ok(ty)
}

pub fn parse_signature(text: &str) -> Result<Signature, TypeParseError> {
    parse_type(text).map(Signature::from_type)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ground_type() -> impl Strategy<Value = SemType> {
        let leaf = prop_oneof![
            Just(SemType::Int),
            Just(SemType::Float),
            Just(SemType::Bool),
            Just(SemType::Char),
        ];
        leaf.prop_recursive(4, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(SemType::list),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SemType::tuple(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| SemType::func(a, b)),
            ]
        })
    }

    #[test]
    fn parses_signatures() {
        let sig = parse_signature("[Int] -> Int").unwrap();
        assert_eq!(sig.params, vec![SemType::list(SemType::Int)]);
        assert_eq!(sig.ret, SemType::Int);
        assert_eq!(
            parse_type("[Int] -> Int").unwrap(),
            SemType::func(SemType::list(SemType::Int), SemType::Int)
        );
        assert_eq!(parse_type("Int").unwrap(), SemType::Int);
        let sig = parse_signature("[Char] -> ([Char], Int)").unwrap();
        assert_eq!(sig.params, vec![SemType::string()]);
        assert_eq!(sig.ret, SemType::tuple(SemType::string(), SemType::Int));
    }

    #[test]
    fn arrows_associate_right() {
        let t = parse_type("Int -> Int -> Bool").unwrap();
        assert_eq!(t, SemType::func(SemType::Int, SemType::func(SemType::Int, SemType::Bool)));
        let t = parse_type("(Int -> Int) -> Bool").unwrap();
        assert_eq!(t, SemType::func(SemType::func(SemType::Int, SemType::Int), SemType::Bool));
        assert_eq!(Signature::from_type(t).arity(), 1);
    }

    #[test]
    fn string_is_char_list() {
        assert_eq!(parse_type("String").unwrap(), SemType::list(SemType::Char));
        assert_eq!(SemType::string().to_string(), "[Char]");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_type("[Int").unwrap_err();
        assert_eq!(err.pos, 4);
        let err = parse_type("Int ->").unwrap_err();
        assert_eq!(err.pos, 6);
        assert!(parse_type("Integer").is_err());
        assert!(parse_type("Int Int").is_err());
        assert!(parse_type("(Int,").is_err());
    }

    #[test]
    fn instantiate_head_to_int() {
        let head = parse_signature("[a] -> a").unwrap();
        let s = instantiate(&head, &SemType::Int).unwrap();
        assert_eq!(s.get("a"), Some(&SemType::Int));
        assert_eq!(s.apply(&head.params[0]), SemType::list(SemType::Int));
    }

    #[test]
    fn instantiate_plus_to_bool_fails() {
        let plus = parse_signature("Int -> Int -> Int").unwrap();
        assert!(instantiate(&plus, &SemType::Bool).is_none());
        let num_plus = parse_signature("a -> a -> a").unwrap().with_bound("a", Bound::Num);
        assert!(instantiate(&num_plus, &SemType::Bool).is_none());
        assert!(instantiate(&num_plus, &SemType::Float).is_some());
    }

    #[test]
    fn instantiate_fst_leaves_second_free() {
        let fst = parse_signature("(a, b) -> a").unwrap();
        let s = instantiate(&fst, &SemType::Char).unwrap();
        assert_eq!(s.get("a"), Some(&SemType::Char));
        assert_eq!(s.get("b"), None);
        // Independent oracle: enumerate the universe for b and check each
        // completion is a valid instance whose result is Char.
        let universe = TypeUniverse::from_types([&SemType::list(SemType::Int)]);
        for b in universe.types() {
            let mut full = s.clone();
            full.insert("b", b.clone());
            assert_eq!(full.apply(&fst.ret), SemType::Char);
            assert_eq!(full.apply(&fst.params[0]), SemType::tuple(SemType::Char, b.clone()));
        }
    }

    #[test]
    fn universe_is_depth_capped() {
        let sig = parse_signature("[[[Int]]] -> (Char, Bool)").unwrap();
        let u = TypeUniverse::for_signature(&sig);
        assert!(u.types().iter().all(|t| t.depth() <= 2));
        assert!(u.types().contains(&SemType::list(SemType::list(SemType::Int))));
        assert!(u.types().contains(&SemType::tuple(SemType::Char, SemType::Bool)));
        assert!(!u.types().contains(&SemType::list(SemType::list(SemType::list(SemType::Int)))));
    }

    proptest! {
        #[test]
        fn show_parse_roundtrip(t in ground_type()) {
            prop_assert_eq!(parse_type(&t.to_string()).unwrap(), t);
        }

        #[test]
        fn instantiate_is_sound(t in ground_type()) {
            let sigs = ["[a] -> a", "(a, b) -> a", "a -> a", "Int -> Int -> Int", "[a] -> [a]", "(a, b) -> b"];
            for s in sigs {
                let sig = parse_signature(s).unwrap();
                if let Some(sub) = instantiate(&sig, &t) {
                    prop_assert_eq!(sub.apply(&sig.ret), t.clone());
                }
            }
        }
    }
}
