//! Hand-written solutions stored as genome files, with traced examples.

use crate::genome_file::{parse_genome, GenomeFileError};
use crate::template::{assemble, Limits};
use crate::value::{parse_args, parse_value, Value};

use super::find;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixture {
    pub problem: &'static str,
    pub genome: &'static str,
    /// `(inputs, expected)` pairs in value syntax.
    pub traces: &'static [(&'static str, &'static str)],
    /// Scored against the problem oracle on generated cases.
    pub oracle_scored: bool,
    /// One of the worked solutions published with the method.
    pub published: bool,
}

macro_rules! genome {
    ($name:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/", $name, ".genome"))
    };
}

pub const FIXTURES: [Fixture; 13] = [
    Fixture {
        problem: "count-odds",
        genome: genome!("count-odds"),
        traces: &[("[5, 2, 7]", "2"), ("[]", "0"), ("[-3]", "1")],
        oracle_scored: true,
        published: true,
    },
    Fixture {
        problem: "double-letters",
        genome: genome!("double-letters"),
        traces: &[("\"a!\"", "\"aa!!!\""), ("\"\"", "\"\""), ("\"b?\"", "\"bb?\"")],
        oracle_scored: true,
        published: true,
    },
    Fixture {
        problem: "super-anagrams",
        genome: genome!("super-anagrams"),
        traces: &[("\"ab\" \"bca\"", "true"), ("\"aa\" \"a\"", "false"), ("\"\" \"\"", "true")],
        oracle_scored: true,
        published: true,
    },
    Fixture {
        problem: "for-loop-index",
        genome: genome!("for-loop-index"),
        traces: &[("0 6 2", "[0, 2, 4]"), ("3 3 1", "[]")],
        oracle_scored: true,
        published: true,
    },
    Fixture {
        problem: "last-index-of-zero",
        genome: genome!("last-index-of-zero"),
        traces: &[("[0, 1, 0, 2]", "2"), ("[0]", "0")],
        oracle_scored: true,
        published: true,
    },
    Fixture {
        problem: "vector-average",
        genome: genome!("vector-average"),
        traces: &[("[1.0, 2.0, 3.0]", "2.0"), ("[-5.5, 5.5]", "0.0")],
        oracle_scored: true,
        published: true,
    },
    Fixture {
        problem: "collatz-numbers",
        genome: genome!("collatz-numbers"),
        traces: &[("1", "1"), ("2", "2")],
        oracle_scored: false,
        published: true,
    },
    Fixture {
        problem: "negative-to-zero",
        genome: genome!("negative-to-zero"),
        traces: &[("[-1, 2, 0]", "[0, 2, 0]")],
        oracle_scored: true,
        published: false,
    },
    Fixture {
        problem: "replace-space-with-newline",
        genome: genome!("replace-space-with-newline"),
        traces: &[("\"a b\"", "(\"a\\nb\", 2)")],
        oracle_scored: true,
        published: false,
    },
    Fixture {
        problem: "scrabble-score",
        genome: genome!("scrabble-score"),
        traces: &[("\"quiz\"", "22")],
        oracle_scored: true,
        published: false,
    },
    Fixture {
        problem: "string-lengths-backwards",
        genome: genome!("string-lengths-backwards"),
        traces: &[("[\"a\", \"bb\", \"\"]", "[0, 2, 1]")],
        oracle_scored: true,
        published: false,
    },
    Fixture {
        problem: "syllables",
        genome: genome!("syllables"),
        traces: &[("\"syllable\"", "3")],
        oracle_scored: true,
        published: false,
    },
    Fixture {
        problem: "checksum",
        genome: genome!("checksum"),
        traces: &[("\"\"", "' '"), ("\"A\"", "'!'")],
        oracle_scored: true,
        published: false,
    },
];

pub fn fixture(problem: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.problem == problem)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureCheck {
    pub problem: &'static str,
    pub traces_passed: usize,
    pub traces_total: usize,
    pub cases_passed: usize,
    pub cases_total: usize,
    pub failures: Vec<String>,
}

impl FixtureCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("fixture for unknown problem '{0}'")]
    UnknownProblem(String),
    #[error(transparent)]
    Genome(#[from] GenomeFileError),
    #[error("fixture signature {found} does not match problem signature {expected}")]
    Signature { expected: String, found: String },
    #[error("bad trace: {0}")]
    Trace(String),
}

fn agrees(got: &Value, expected: &Value, rounding: Option<u32>) -> bool {
    match rounding {
        Some(d) => got.rounded(d) == expected.rounded(d),
        None => got == expected,
    }
}

/// Runs a fixture on its traces and, when oracle scored, on `cases`
/// generated cases (edge cases first).
pub fn check_fixture(f: &Fixture, cases: usize, seed: u64) -> Result<FixtureCheck, FixtureError> {
    let p = find(f.problem).ok_or_else(|| FixtureError::UnknownProblem(f.problem.to_string()))?;
    let (template, genome) = parse_genome(f.genome)?;
    if template.sig != p.signature {
        return Err(FixtureError::Signature { expected: p.signature.to_string(), found: template.sig.to_string() });
    }
    let program = assemble(&template, &genome).map_err(GenomeFileError::from)?;
    let limits = Limits::default();
    let mut out = FixtureCheck {
        problem: f.problem,
        traces_passed: 0,
        traces_total: f.traces.len(),
        cases_passed: 0,
        cases_total: 0,
        failures: Vec::new(),
    };
    for (inputs, expected) in f.traces {
        let args = parse_args(inputs, &p.signature.params).map_err(|e| FixtureError::Trace(format!("{inputs}: {e}")))?;
        let want = parse_value(expected, &p.signature.ret).map_err(|e| FixtureError::Trace(format!("{expected}: {e}")))?;
        match program.run(&args, limits) {
            Ok(v) if agrees(&v, &want, p.rounding) => out.traces_passed += 1,
            Ok(v) => out.failures.push(format!("{inputs} gave {v}, expected {want}")),
            Err(e) => out.failures.push(format!("{inputs} failed: {e}")),
        }
    }
    if f.oracle_scored {
        for c in p.training_cases(cases, seed) {
            out.cases_total += 1;
            match program.run(&c.inputs, limits) {
                Ok(v) if agrees(&v, &c.expected, p.rounding) => out.cases_passed += 1,
                Ok(v) => out.failures.push(format!("{:?} gave {v}, expected {}", c.inputs, c.expected)),
                Err(e) => out.failures.push(format!("{:?} failed: {e}", c.inputs)),
            }
        }
    }
    Ok(out)
}
