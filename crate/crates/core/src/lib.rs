//! Typed program synthesis over recursion schemes.

pub mod eval;
pub mod expr;
pub mod genome_file;
pub mod prims;
pub mod problems;
pub mod schemes;
pub mod synth;
pub mod template;
pub mod types;
pub mod value;

pub use eval::{EvalError, Fuel};
pub use expr::{parse_expr, typecheck, Expr};
pub use genome_file::{parse_genome, render_genome, GenomeFileError};
pub use problems::{find, registry, run_benchmark, synthesize, Problem, RunRecord, RunReport, RunSeeds, Selection};
pub use synth::{evolve, race, Case, GPConfig, RunOutcome};
pub use template::{assemble, build_template, Genome, Limits, Program, SchemeKind, Template, TemplateKind};
pub use types::{parse_signature, parse_type, SemType, Signature};
pub use value::{parse_args, parse_value, Value};
