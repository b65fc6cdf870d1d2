//! Text format for filled templates.
//!
//! ```text
//! # comment
//! template ana-std
//! signature Int -> Int -> Int -> [Int]
//! seed arg 0
//! slot stop = (== seed arg1)
//! slot elem = seed
//! slot next = (+ seed arg2)
//! ```
//!
//! `seed const <expr>` gives a literal seed instead. Every slot of the
//! template must appear exactly once; order is free.

use thiserror::Error;

use crate::expr::{parse_expr, ExprParseError};
use crate::template::{assemble, build_template, AssembleError, Genome, Incompatible, SeedGene, Template, TemplateKind, UnknownName};
use crate::types::{parse_signature, TypeParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenomeFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Expr { line: usize, source: ExprParseError },
    #[error("line {line}: {source}")]
    Type { line: usize, source: TypeParseError },
    #[error("line {line}: {source}")]
    Name { line: usize, source: UnknownName },
    #[error("missing '{0}' line")]
    Missing(&'static str),
    #[error("missing slot '{0}'")]
    MissingSlot(&'static str),
    #[error(transparent)]
    Incompatible(#[from] Incompatible),
    #[error(transparent)]
    Assemble(#[from] AssembleError),
}

/// Renders a genome in the genome file format.
pub fn render_genome(template: &Template, genome: &Genome) -> String {
    let mut out = format!("template {}\nsignature {}\n", template.kind, template.sig);
    match &genome.seed {
        Some(SeedGene::Arg(i)) => out.push_str(&format!("seed arg {i}\n")),
        Some(SeedGene::Const(e)) => out.push_str(&format!("seed const {e}\n")),
        None => {}
    }
    for (s, e) in template.slots.iter().zip(&genome.slots) {
        out.push_str(&format!("slot {} = {}\n", s.name, e));
    }
    out
}

/// Parses and typechecks a genome file.
pub fn parse_genome(text: &str) -> Result<(Template, Genome), GenomeFileError> {
    let mut kind: Option<TemplateKind> = None;
    let mut sig = None;
    let mut seed = None;
    let mut slots: Vec<(usize, String, crate::expr::Expr)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        let syntax = |msg: &str| GenomeFileError::Syntax { line, msg: msg.to_string() };
        match key {
            "template" => kind = Some(rest.parse().map_err(|source| GenomeFileError::Name { line, source })?),
            "signature" => sig = Some(parse_signature(rest).map_err(|source| GenomeFileError::Type { line, source })?),
            "seed" => {
                let (how, val) = rest.split_once(char::is_whitespace).ok_or_else(|| syntax("expected 'seed arg N' or 'seed const E'"))?;
                seed = Some(match how {
                    "arg" => SeedGene::Arg(val.trim().parse().map_err(|_| syntax("bad argument index"))?),
                    "const" => SeedGene::Const(parse_expr(val.trim()).map_err(|source| GenomeFileError::Expr { line, source })?),
                    _ => return Err(syntax("expected 'seed arg N' or 'seed const E'")),
                });
            }
            "slot" => {
                let (name, body) = rest.split_once('=').ok_or_else(|| syntax("expected 'slot NAME = EXPR'"))?;
                let name = name.trim();
                if slots.iter().any(|(_, n, _)| n == name) {
                    return Err(syntax(&format!("duplicate slot '{name}'")));
                }
                let e = parse_expr(body.trim()).map_err(|source| GenomeFileError::Expr { line, source })?;
                slots.push((line, name.to_string(), e));
            }
            _ => return Err(syntax(&format!("unknown directive '{key}'"))),
        }
    }
    let kind = kind.ok_or(GenomeFileError::Missing("template"))?;
    let sig = sig.ok_or(GenomeFileError::Missing("signature"))?;
    let template = build_template(kind, &sig)?;
    for (line, name, _) in &slots {
        if template.slot_index(name).is_none() {
            return Err(GenomeFileError::Syntax { line: *line, msg: format!("template {kind} has no slot '{name}'") });
        }
    }
    let mut ordered = Vec::with_capacity(template.slots.len());
    for s in &template.slots {
        let i = slots.iter().position(|(_, n, _)| n == s.name).ok_or(GenomeFileError::MissingSlot(s.name))?;
        ordered.push(slots.swap_remove(i).2);
    }
    let genome = Genome { slots: ordered, seed };
    assemble(&template, &genome)?;
    Ok((template, genome))
}
