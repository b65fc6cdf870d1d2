//! Per-case error measures.

use crate::eval::EvalError;
use crate::template::{assemble, Genome, Limits, Template};
use crate::value::{round_to, Value};

/// One input/output example.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub inputs: Vec<Value>,
    pub expected: Value,
}

/// How case errors are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scoring {
    /// Decimal places floats are rounded to before comparison.
    pub rounding: Option<u32>,
    pub penalty: f64,
    pub limits: Limits,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitnessResult {
    pub errors: Vec<f64>,
}

impl FitnessResult {
    pub fn total(&self) -> f64 {
        self.errors.iter().sum()
    }

    pub fn solved(&self) -> bool {
        self.errors.iter().all(|e| *e == 0.0)
    }
}

/// Edit distance between two sequences under a custom equality.
pub fn levenshtein<T>(a: &[T], b: &[T], eq: impl Fn(&T, &T) -> bool) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(!eq(x, y));
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn floats_equal(a: f64, b: f64, rounding: Option<u32>) -> bool {
    match rounding {
        Some(d) => round_to(a, d) == round_to(b, d),
        None => a == b,
    }
}

fn values_equal(a: &Value, b: &Value, rounding: Option<u32>) -> bool {
    match (a, b) {
        (Value::Float(x), Value::Float(y)) => floats_equal(*x, *y, rounding),
        (Value::List(xs), Value::List(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| values_equal(x, y, rounding))
        }
        (Value::Tuple(p), Value::Tuple(q)) => values_equal(&p.0, &q.0, rounding) && values_equal(&p.1, &q.1, rounding),
        _ => a == b,
    }
}

/// Distance between an output and the expected value, capped at `penalty`.
pub fn value_error(got: &Value, expected: &Value, rounding: Option<u32>, penalty: f64) -> f64 {
    let e = match (got, expected) {
        (Value::Int(a), Value::Int(b)) => (i128::from(*a) - i128::from(*b)).unsigned_abs() as f64,
        (Value::Float(a), Value::Float(b)) => {
            if floats_equal(*a, *b, rounding) {
                0.0
            } else {
                match rounding {
                    Some(d) => (round_to(*a, d) - round_to(*b, d)).abs(),
                    None => (a - b).abs(),
                }
            }
        }
        (Value::Char(a), Value::Char(b)) => (i64::from(u32::from(*a)) - i64::from(u32::from(*b))).unsigned_abs() as f64,
        (Value::Bool(a), Value::Bool(b)) => f64::from(u8::from(a != b)),
        (Value::List(a), Value::List(b)) => levenshtein(a, b, |x, y| values_equal(x, y, rounding)) as f64,
        (Value::Tuple(p), Value::Tuple(q)) => {
            value_error(&p.0, &q.0, rounding, penalty) + value_error(&p.1, &q.1, rounding, penalty)
        }
        _ => penalty,
    };
    if e.is_finite() {
        e.min(penalty)
    } else {
        penalty
    }
}

pub fn case_error(got: &Result<Value, EvalError>, expected: &Value, scoring: &Scoring) -> f64 {
    match got {
        Ok(v) => value_error(v, expected, scoring.rounding, scoring.penalty),
        Err(_) => scoring.penalty,
    }
}

/// Scores a genome on every case. A genome that fails to assemble scores the
/// penalty everywhere.
pub fn fitness(genome: &Genome, template: &Template, cases: &[Case], scoring: &Scoring) -> FitnessResult {
    let errors = match assemble(template, genome) {
        Ok(program) => cases
            .iter()
            .map(|c| case_error(&program.run(&c.inputs, scoring.limits), &c.expected, scoring))
            .collect(),
        Err(_) => vec![scoring.penalty; cases.len()],
    };
    FitnessResult { errors }
}

/// Sum of case errors without materializing the per-case vector.
pub fn total_error(genome: &Genome, template: &Template, cases: &[Case], scoring: &Scoring) -> f64 {
    let Ok(program) = assemble(template, genome) else {
        return scoring.penalty * cases.len() as f64;
    };
    cases
        .iter()
        .map(|c| case_error(&program.run(&c.inputs, scoring.limits), &c.expected, scoring))
        .sum()
}
