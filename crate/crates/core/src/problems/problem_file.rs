//! TOML problem files.
//!
//! A file either tweaks a registered problem or defines a new one from
//! examples:
//!
//! ```toml
//! name = "sum-positive"
//! signature = "[Int] -> Int"
//! template = "cata-reduce"
//! user_prims = []
//! train = ["[] => 0", "[1, -2, 3] => 4"]
//! validation = ["[5] => 5"]
//! ```
//!
//! With `base = "count-odds"` the registered problem is the starting point
//! and only the given keys change. `[params]` adjusts the case generators.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use super::{find, CaseSource, GenParams, Problem};
use crate::prims::lookup;
use crate::synth::Case;
use crate::template::TemplateKind;
use crate::types::{parse_signature, Signature};
use crate::value::{parse_args, parse_value};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    base: Option<String>,
    name: Option<String>,
    signature: Option<String>,
    description: Option<String>,
    user_prims: Option<Vec<String>>,
    template: Option<String>,
    rounding: Option<u32>,
    params: Option<GenParams>,
    #[serde(default)]
    train: Vec<String>,
    #[serde(default)]
    validation: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ProblemFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("unknown base problem '{0}'")]
    UnknownBase(String),
    #[error("missing key '{0}'")]
    Missing(&'static str),
    #[error("bad signature: {0}")]
    Signature(String),
    #[error("signature of '{0}' can only change together with explicit train cases")]
    SignatureChange(String),
    #[error("signature must be ground: {0}")]
    NotGround(String),
    #[error("bad template name: {0}")]
    Template(String),
    #[error("unknown primitive '{0}'")]
    UnknownPrimitive(String),
    #[error("{list} case {index}: {msg}")]
    Case { list: &'static str, index: usize, msg: String },
}

fn parse_case(text: &str, sig: &Signature) -> Result<Case, String> {
    let (lhs, rhs) = text.split_once("=>").ok_or("expected 'inputs => expected'")?;
    let inputs = parse_args(lhs, &sig.params).map_err(|e| format!("inputs: {e}"))?;
    let expected = parse_value(rhs.trim(), &sig.ret).map_err(|e| format!("expected: {e}"))?;
    Ok(Case { inputs, expected })
}

fn parse_cases(list: &'static str, items: &[String], sig: &Signature) -> Result<Vec<Case>, ProblemFileError> {
    items
        .iter()
        .enumerate()
        .map(|(index, s)| parse_case(s, sig).map_err(|msg| ProblemFileError::Case { list, index, msg }))
        .collect()
}

/// Builds a problem from TOML text.
pub fn parse_problem_file(text: &str) -> Result<Problem, ProblemFileError> {
    let f: ProblemFile = toml::from_str(text)?;
    let mut p = match &f.base {
        Some(b) => find(b).ok_or_else(|| ProblemFileError::UnknownBase(b.clone()))?,
        None => Problem {
            name: f.name.clone().ok_or(ProblemFileError::Missing("name"))?,
            signature: Signature::new(vec![], crate::types::SemType::Int),
            description: String::new(),
            user_prims: Vec::new(),
            params: GenParams::default(),
            rounding: None,
            template: None,
            source: CaseSource::Explicit { train: Vec::new(), validation: Vec::new() },
        },
    };
    if let Some(n) = f.name {
        p.name = n;
    }
    if let Some(d) = f.description {
        p.description = d;
    }
    match &f.signature {
        Some(s) => {
            let sig = parse_signature(s).map_err(|e| ProblemFileError::Signature(e.to_string()))?;
            if f.base.is_some() && sig != p.signature && f.train.is_empty() {
                return Err(ProblemFileError::SignatureChange(p.name));
            }
            p.signature = sig;
        }
        None if f.base.is_none() => return Err(ProblemFileError::Missing("signature")),
        None => {}
    }
    if !p.signature.is_ground() {
        return Err(ProblemFileError::NotGround(p.signature.to_string()));
    }
    if let Some(us) = f.user_prims {
        if let Some(bad) = us.iter().find(|u| lookup(u).is_none()) {
            return Err(ProblemFileError::UnknownPrimitive(bad.clone()));
        }
        p.user_prims = us;
    }
    if let Some(t) = f.template {
        let k: TemplateKind = t.parse().map_err(|e: crate::template::UnknownName| ProblemFileError::Template(e.to_string()))?;
        p.template = Some(k);
    }
    if f.rounding.is_some() {
        p.rounding = f.rounding;
    }
    if let Some(params) = f.params {
        p.params = params;
    }
    if !f.train.is_empty() {
        let train = parse_cases("train", &f.train, &p.signature)?;
        let validation = parse_cases("validation", &f.validation, &p.signature)?;
        p.source = CaseSource::Explicit { train, validation };
    } else if f.base.is_none() {
        return Err(ProblemFileError::Missing("train"));
    }
    Ok(p)
}

pub fn load_problem_file(path: &Path) -> Result<Problem, ProblemFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ProblemFileError::Io { path: path.display().to_string(), source })?;
    parse_problem_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Value;

    #[test]
    fn explicit_problem() {
        let p = parse_problem_file(
            r#"
name = "sum-positive"
signature = "[Int] -> Int"
template = "cata-reduce"
train = ["[] => 0", "[1, -2, 3] => 4"]
validation = ["[5] => 5"]
"#,
        )
        .unwrap();
        assert_eq!(p.name, "sum-positive");
        assert_eq!(p.template, Some(TemplateKind::CataReduce));
        assert!(p.builtin().is_none());
        let train = p.training_cases(100, 0);
        assert_eq!(train.len(), 2);
        assert_eq!(train[1].inputs, vec![Value::int_list(&[1, -2, 3])]);
        assert_eq!(train[1].expected, Value::Int(4));
        assert_eq!(p.validation_cases(100, 0).len(), 1);
    }

    #[test]
    fn multi_argument_cases() {
        let p = parse_problem_file(
            "name = \"anagram\"\nsignature = \"[Char] -> [Char] -> Bool\"\ntrain = ['\"ab\" \"ba\" => true']\n",
        )
        .unwrap();
        assert_eq!(p.training_cases(1, 0)[0].inputs, vec![Value::string("ab"), Value::string("ba")]);
        assert_eq!(p.template, None);
    }

    #[test]
    fn override_registered() {
        let p = parse_problem_file("base = \"count-odds\"\n[params]\nmax_len = 5\n").unwrap();
        assert_eq!(p.name, "count-odds");
        assert_eq!(p.params.max_len, 5);
        assert!(p.builtin().is_some());
        assert!(p.validation_cases(50, 1).iter().all(|c| c.inputs[0].as_list().unwrap().len() <= 5));
    }

    #[test]
    fn rejects_bad_files() {
        let err = |s: &str| parse_problem_file(s).unwrap_err();
        assert!(matches!(err("base = \"nope\""), ProblemFileError::UnknownBase(_)));
        assert!(matches!(err("name = \"x\"\ntrain = [\"[] => 0\"]"), ProblemFileError::Missing("signature")));
        assert!(matches!(err("name = \"x\"\nsignature = \"Int -> Int\""), ProblemFileError::Missing("train")));
        assert!(matches!(
            err("base = \"count-odds\"\nsignature = \"[Int] -> Bool\""),
            ProblemFileError::SignatureChange(_)
        ));
        assert!(matches!(
            err("name = \"x\"\nsignature = \"[Int] -> Int\"\ntrain = [\"[1] => true\"]"),
            ProblemFileError::Case { list: "train", index: 0, .. }
        ));
        assert!(matches!(err("colour = 3"), ProblemFileError::Toml(_)));
        assert!(matches!(
            err("base = \"count-odds\"\nuser_prims = [\"frob\"]"),
            ProblemFileError::UnknownPrimitive(_)
        ));
        assert!(matches!(err("base = \"count-odds\"\ntemplate = \"cata\""), ProblemFileError::Template(_)));
    }
}
