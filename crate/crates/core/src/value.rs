//! Runtime values and their textual form.
//!
//! Text form, guided by the expected type: `42`, `-1.5`, `true`, `'a'`,
//! `"abc"` (any `[Char]`), `[1, 2, 3]`, `(1, 'x')`. Function values have no
//! text form.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::eval::{EvalError, Fuel};
use crate::types::SemType;

type Callable = dyn Fn(&Value, &mut Fuel) -> Result<Value, EvalError> + Send + Sync;

/// An opaque function produced by a scheme driver.
#[derive(Clone)]
pub struct FnValue(Arc<Callable>);

impl FnValue {
    pub fn new(f: impl Fn(&Value, &mut Fuel) -> Result<Value, EvalError> + Send + Sync + 'static) -> Self {
        FnValue(Arc::new(f))
    }

    pub fn call(&self, arg: &Value, fuel: &mut Fuel) -> Result<Value, EvalError> {
        (self.0)(arg, fuel)
    }
}

impl fmt::Debug for FnValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<fn>")
    }
}

/// Floats are always finite: operations that would produce NaN or an
/// infinity signal a partial result instead.
#[derive(Clone, Debug)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Char(char),
    List(Arc<Vec<Value>>),
    Tuple(Arc<(Value, Value)>),
    Fn(FnValue),
}

impl Default for Value {
    fn default() -> Self {
        Value::Bool(false)
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Float(a), Value::Float(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Char(a), Value::Char(b)) => a == b,
            (Value::List(a), Value::List(b)) => a == b,
            (Value::Tuple(a), Value::Tuple(b)) => a == b,
            (Value::Fn(a), Value::Fn(b)) => Arc::ptr_eq(&a.0, &b.0),
            _ => false,
        }
    }
}

impl Value {
    pub fn list(items: Vec<Value>) -> Self {
        Value::List(Arc::new(items))
    }

    pub fn tuple(left: Value, right: Value) -> Self {
        Value::Tuple(Arc::new((left, right)))
    }

    pub fn string(s: &str) -> Self {
        Value::list(s.chars().map(Value::Char).collect())
    }

    pub fn int_list(xs: &[i64]) -> Self {
        Value::list(xs.iter().copied().map(Value::Int).collect())
    }

    pub fn float_list(xs: &[f64]) -> Self {
        Value::list(xs.iter().copied().map(Value::Float).collect())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_float(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_char(&self) -> Option<char> {
        match self {
            Value::Char(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match self {
            Value::List(xs) => Some(xs),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Tuple(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    /// Collects a `[Char]` value into a `String`.
    pub fn as_string(&self) -> Option<String> {
        self.as_list()?.iter().map(Value::as_char).collect()
    }

    /// Whether this value inhabits `ty`. Empty lists inhabit every list type.
    pub fn has_type(&self, ty: &SemType) -> bool {
        match (self, ty) {
            (Value::Int(_), SemType::Int)
            | (Value::Float(_), SemType::Float)
            | (Value::Bool(_), SemType::Bool)
            | (Value::Char(_), SemType::Char)
            | (Value::Fn(_), SemType::Fn(..)) => true,
            (Value::List(xs), SemType::List(t)) => xs.iter().all(|x| x.has_type(t)),
            (Value::Tuple(p), SemType::Tuple(a, b)) => p.0.has_type(a) && p.1.has_type(b),
            _ => false,
        }
    }

    /// Total structural order on non-function values of one type.
    pub fn compare(&self, other: &Value) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Float(a), Value::Float(b)) => a.total_cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Char(a), Value::Char(b)) => a.cmp(b),
            (Value::List(a), Value::List(b)) => {
                for (x, y) in a.iter().zip(b.iter()) {
                    match x.compare(y) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                a.len().cmp(&b.len())
            }
            (Value::Tuple(a), Value::Tuple(b)) => a.0.compare(&b.0).then_with(|| a.1.compare(&b.1)),
            _ => Ordering::Equal,
        }
    }

    /// Rounds every float inside to `decimals` places.
    pub fn rounded(&self, decimals: u32) -> Value {
        match self {
            Value::Float(x) => Value::Float(round_to(*x, decimals)),
            Value::List(xs) => Value::list(xs.iter().map(|x| x.rounded(decimals)).collect()),
            Value::Tuple(p) => Value::tuple(p.0.rounded(decimals), p.1.rounded(decimals)),
            v => v.clone(),
        }
    }
}

pub fn round_to(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    let r = (x * scale).round() / scale;
    // normalise -0.0
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub(crate) fn escape_char(c: char, quote: char, out: &mut String) {
    match c {
        '\n' => out.push_str("\\n"),
        '\t' => out.push_str("\\t"),
        '\r' => out.push_str("\\r"),
        '\\' => out.push_str("\\\\"),
        c if c == quote => {
            out.push('\\');
            out.push(c);
        }
        c if c.is_control() => out.push_str(&format!("\\u{{{:x}}}", c as u32)),
        c => out.push(c),
    }
}

pub(crate) fn format_float(x: f64) -> String {
    format!("{x:?}")
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => f.write_str(&format_float(*x)),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Char(c) => {
                let mut s = String::from("'");
                escape_char(*c, '\'', &mut s);
                s.push('\'');
                f.write_str(&s)
            }
            Value::List(xs) if !xs.is_empty() && xs.iter().all(|x| matches!(x, Value::Char(_))) => {
                let mut s = String::from("\"");
                for x in xs.iter() {
                    if let Value::Char(c) = x {
                        escape_char(*c, '"', &mut s);
                    }
                }
                s.push('"');
                f.write_str(&s)
            }
            Value::List(xs) => {
                f.write_str("[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
            Value::Tuple(p) => write!(f, "({}, {})", p.0, p.1),
            Value::Fn(_) => f.write_str("<fn>"),
        }
    }
}

/// Displays a value using its type, so that empty strings show as `""`.
pub fn show_typed(v: &Value, ty: &SemType) -> String {
    match (v, ty) {
        (Value::List(xs), SemType::List(t)) if **t == SemType::Char && xs.is_empty() => "\"\"".into(),
        (Value::List(xs), SemType::List(t)) if **t != SemType::Char => {
            let items: Vec<String> = xs.iter().map(|x| show_typed(x, t)).collect();
            format!("[{}]", items.join(", "))
        }
        (Value::Tuple(p), SemType::Tuple(a, b)) => {
            format!("({}, {})", show_typed(&p.0, a), show_typed(&p.1, b))
        }
        _ => v.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("value syntax error at offset {pos}: {msg}")]
pub struct ValueParseError {
    pub pos: usize,
    pub msg: String,
}

/// Cursor over value text.
pub struct ValueReader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> ValueReader<'a> {
    pub fn new(src: &'a str) -> Self {
        ValueReader { src, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ValueParseError> {
        Err(ValueParseError { pos: self.pos, msg: msg.into() })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn expect(&mut self, c: char) -> Result<(), ValueParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn number_token(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '-' || c == '+' || c == '.' {
                self.pos += 1;
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    /// Reads one escaped character inside a quoted literal.
    pub(crate) fn escaped_char(&mut self) -> Result<char, ValueParseError> {
        match self.bump() {
            Some('\\') => match self.bump() {
                Some('n') => Ok('\n'),
                Some('t') => Ok('\t'),
                Some('r') => Ok('\r'),
                Some('\\') => Ok('\\'),
                Some('\'') => Ok('\''),
                Some('"') => Ok('"'),
                Some('0') => Ok('\0'),
                Some('u') => {
                    self.expect('{')?;
                    let start = self.pos;
                    while self.peek().is_some_and(|c| c.is_ascii_hexdigit()) {
                        self.pos += 1;
                    }
                    let code = u32::from_str_radix(&self.src[start..self.pos], 16)
                        .ok()
                        .and_then(char::from_u32);
                    let Some(c) = code else {
                        return self.err("bad unicode escape");
                    };
                    self.expect('}')?;
                    Ok(c)
                }
                _ => self.err("unknown escape"),
            },
            Some(c) => Ok(c),
            None => self.err("unterminated literal"),
        }
    }

    pub fn read(&mut self, ty: &SemType) -> Result<Value, ValueParseError> {
        self.skip_ws();
        match ty {
            SemType::Int => {
                let tok = self.number_token();
                tok.parse::<i64>()
                    .map(Value::Int)
                    .or_else(|_| self.err(format!("bad Int '{tok}'")))
            }
            SemType::Float => {
                let tok = self.number_token();
                match tok.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(Value::Float(x)),
                    _ => self.err(format!("bad Float '{tok}'")),
                }
            }
            SemType::Bool => {
                let tok = self.number_token();
                match tok {
                    "true" | "True" => Ok(Value::Bool(true)),
                    "false" | "False" => Ok(Value::Bool(false)),
                    _ => self.err(format!("bad Bool '{tok}'")),
                }
            }
            SemType::Char => {
                self.expect('\'')?;
                let c = self.escaped_char()?;
                if self.bump() != Some('\'') {
                    return self.err("expected closing quote");
                }
                Ok(Value::Char(c))
            }
            SemType::List(elem) if **elem == SemType::Char && self.peek() == Some('"') => {
                self.pos += 1;
                let mut out = Vec::new();
                loop {
                    match self.peek() {
                        Some('"') => {
                            self.pos += 1;
                            break;
                        }
                        None => return self.err("unterminated string"),
                        _ => out.push(Value::Char(self.escaped_char()?)),
                    }
                }
                Ok(Value::list(out))
            }
            SemType::List(elem) => {
                self.expect('[')?;
                let mut out = Vec::new();
                self.skip_ws();
                if self.peek() == Some(']') {
                    self.pos += 1;
                    return Ok(Value::list(out));
                }
                loop {
                    out.push(self.read(elem)?);
                    self.skip_ws();
                    match self.bump() {
                        Some(',') => continue,
                        Some(']') => break,
                        _ => return self.err("expected ',' or ']'"),
                    }
                }
                Ok(Value::list(out))
            }
            SemType::Tuple(a, b) => {
                self.expect('(')?;
                let left = self.read(a)?;
                self.expect(',')?;
                let right = self.read(b)?;
                self.expect(')')?;
                Ok(Value::tuple(left, right))
            }
            SemType::Fn(..) => self.err("function values cannot be parsed"),
            SemType::Var(v) => self.err(format!("cannot parse a value of open type '{v}'")),
        }
    }
}

pub fn parse_value(text: &str, ty: &SemType) -> Result<Value, ValueParseError> {
    let mut r = ValueReader::new(text);
    let v = r.read(ty)?;
    if !r.at_end() {
        return r.err("trailing input");
    }
    Ok(v)
}

/// Parses whitespace-separated arguments, one per parameter type.
pub fn parse_args(text: &str, params: &[SemType]) -> Result<Vec<Value>, ValueParseError> {
    let mut r = ValueReader::new(text);
    let mut out = Vec::with_capacity(params.len());
    for p in params {
        out.push(r.read(p)?);
    }
    if !r.at_end() {
        return r.err("trailing input");
    }
    Ok(out)
}
