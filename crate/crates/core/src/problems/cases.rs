//! Case generators and reference oracles for the registered problems.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::prims::scrabble_score;
use crate::value::{round_to, Value};

/// Ranges used by the random case generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    pub int_min: i64,
    pub int_max: i64,
    pub min_len: usize,
    pub max_len: usize,
    pub float_min: f64,
    pub float_max: f64,
    pub max_str_len: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            int_min: -1000,
            int_max: 1000,
            min_len: 0,
            max_len: 50,
            float_min: -100.0,
            float_max: 100.0,
            max_str_len: 20,
        }
    }
}

/// The registered problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Builtin {
    CountOdds,
    DoubleLetters,
    NegativeToZero,
    ReplaceSpaceWithNewline,
    ScrabbleScore,
    StringLengthsBackwards,
    Syllables,
    LastIndexOfZero,
    VectorAverage,
    Checksum,
    ForLoopIndex,
    CollatzNumbers,
    SuperAnagrams,
}

fn int(p: &GenParams, rng: &mut impl Rng) -> i64 {
    rng.gen_range(p.int_min..=p.int_max.max(p.int_min))
}

fn len(p: &GenParams, rng: &mut impl Rng, min: usize) -> usize {
    let lo = p.min_len.max(min);
    rng.gen_range(lo..=p.max_len.max(lo))
}

fn int_list(p: &GenParams, rng: &mut impl Rng, min: usize) -> Vec<i64> {
    let n = len(p, rng, min);
    (0..n).map(|_| int(p, rng)).collect()
}

fn printable<R: Rng + ?Sized>(rng: &mut R) -> char {
    char::from(rng.gen_range(32u8..=126))
}

fn string_of(p: &GenParams, rng: &mut impl Rng, mut ch: impl FnMut(&mut dyn rand::RngCore) -> char) -> String {
    let n = rng.gen_range(0..=p.max_str_len);
    (0..n).map(|_| ch(rng)).collect()
}

fn from_pool(pool: &[u8], rng: &mut dyn rand::RngCore) -> char {
    char::from(*pool.choose(rng).expect("nonempty pool"))
}

const LOWER: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

fn quantized(p: &GenParams, rng: &mut impl Rng) -> f64 {
    round_to(rng.gen_range(p.float_min..=p.float_max.max(p.float_min)), 4)
}

fn ints(xs: &[i64]) -> Vec<Value> {
    vec![Value::int_list(xs)]
}

fn text(s: &str) -> Vec<Value> {
    vec![Value::string(s)]
}

fn is_ascii_vowel(c: char) -> bool {
    "aeiouyAEIOUY".contains(c)
}

impl Builtin {
    pub const ALL: [Builtin; 13] = [
        Builtin::CountOdds,
        Builtin::DoubleLetters,
        Builtin::NegativeToZero,
        Builtin::ReplaceSpaceWithNewline,
        Builtin::ScrabbleScore,
        Builtin::StringLengthsBackwards,
        Builtin::Syllables,
        Builtin::LastIndexOfZero,
        Builtin::VectorAverage,
        Builtin::Checksum,
        Builtin::ForLoopIndex,
        Builtin::CollatzNumbers,
        Builtin::SuperAnagrams,
    ];

    /// Inputs every training set starts with.
    pub fn edge_cases(self) -> Vec<Vec<Value>> {
        match self {
            Builtin::CountOdds => [&[][..], &[0], &[1], &[-1], &[2, 4], &[1, 3, 5], &[5, 2, 7]].map(ints).to_vec(),
            Builtin::NegativeToZero => [&[][..], &[-1], &[0], &[1], &[-5, 5], &[3, -2, 0]].map(ints).to_vec(),
            Builtin::LastIndexOfZero => {
                [&[0][..], &[0, 0], &[0, 1], &[1, 0], &[0, 0, 0], &[0, 1, 0, 2], &[5, 0, -3]].map(ints).to_vec()
            }
            Builtin::DoubleLetters => ["", "a", "!", "a!", "!!", "A1 b", "?"].map(text).to_vec(),
            Builtin::ReplaceSpaceWithNewline => ["", " ", "a", "a b", "  ", " x "].map(text).to_vec(),
            Builtin::ScrabbleScore => ["", "a", "Z", "q!", "hello world"].map(text).to_vec(),
            Builtin::Syllables => ["", "a", "y", "b", "aeiouy", "hello 123"].map(text).to_vec(),
            Builtin::Checksum => ["", "a", " ", "~~~", "Hello"].map(text).to_vec(),
            Builtin::StringLengthsBackwards => {
                let cases: [&[&str]; 5] = [&[], &[""], &["a"], &["abc", ""], &["a", "bb", "ccc"]];
                cases
                    .iter()
                    .map(|ss| vec![Value::list(ss.iter().map(|s| Value::string(s)).collect())])
                    .collect()
            }
            Builtin::VectorAverage => {
                let cases: [&[f64]; 5] = [&[0.0], &[1.0], &[1.0, 0.0], &[1.0, 2.0, 3.0], &[-5.5, 5.5]];
                cases.iter().map(|xs| vec![Value::float_list(xs)]).collect()
            }
            Builtin::ForLoopIndex => [(0, 1, 1), (0, 6, 2), (-3, 3, 3), (5, 15, 10), (0, 20, 1)]
                .iter()
                .map(|&(a, b, c)| vec![Value::Int(a), Value::Int(b), Value::Int(c)])
                .collect(),
            Builtin::CollatzNumbers => [1, 2, 3, 6, 7, 27].iter().map(|n| vec![Value::Int(*n)]).collect(),
            Builtin::SuperAnagrams => [("", ""), ("a", ""), ("", "a"), ("aa", "a"), ("ab", "bca"), ("abc", "cba")]
                .iter()
                .map(|(x, y)| vec![Value::string(x), Value::string(y)])
                .collect(),
        }
    }

    /// A random input tuple.
    pub fn random_inputs(self, p: &GenParams, rng: &mut impl Rng) -> Vec<Value> {
        match self {
            Builtin::CountOdds | Builtin::NegativeToZero => ints(&int_list(p, rng, 0)),
            Builtin::LastIndexOfZero => {
                let mut xs = int_list(p, rng, 1);
                for x in xs.iter_mut() {
                    if rng.gen_bool(0.25) {
                        *x = 0;
                    }
                }
                if !xs.contains(&0) {
                    let i = rng.gen_range(0..xs.len());
                    xs[i] = 0;
                }
                ints(&xs)
            }
            Builtin::DoubleLetters => {
                let s = string_of(p, rng, |r| match r.gen_range(0..10) {
                    0..=1 => '!',
                    2..=5 => from_pool(b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ", r),
                    _ => printable(r),
                });
                text(&s)
            }
            Builtin::ReplaceSpaceWithNewline => {
                let s = string_of(p, rng, |r| if r.gen_bool(0.2) { ' ' } else { printable(r) });
                text(&s)
            }
            Builtin::ScrabbleScore | Builtin::Checksum => {
                let s = string_of(p, rng, |r| printable(r));
                text(&s)
            }
            Builtin::Syllables => {
                let s = string_of(p, rng, |r| match r.gen_range(0..10) {
                    0..=5 => from_pool(LOWER, r),
                    6 => ' ',
                    7 => from_pool(b"0123456789", r),
                    _ => from_pool(b"!\"#$%&'()*+,-./:;<=>?@[]^_{|}~", r),
                });
                text(&s)
            }
            Builtin::StringLengthsBackwards => {
                let n = len(p, rng, 0);
                let items = (0..n).map(|_| Value::string(&string_of(p, rng, |r| printable(r)))).collect();
                vec![Value::list(items)]
            }
            Builtin::VectorAverage => {
                let n = len(p, rng, 1);
                vec![Value::float_list(&(0..n).map(|_| quantized(p, rng)).collect::<Vec<_>>())]
            }
            Builtin::ForLoopIndex => {
                let start = rng.gen_range(-500..=500);
                let step = rng.gen_range(1..=10);
                let k = rng.gen_range(1..=20);
                vec![Value::Int(start), Value::Int(start + k * step), Value::Int(step)]
            }
            Builtin::CollatzNumbers => vec![Value::Int(rng.gen_range(1..=1000))],
            Builtin::SuperAnagrams => {
                let short = GenParams { max_str_len: p.max_str_len.min(10), ..p.clone() };
                let x = string_of(&short, rng, |r| from_pool(b"abcdef", r));
                let y = if rng.gen_bool(0.5) {
                    let extra = string_of(&short, rng, |r| from_pool(b"abcdef", r));
                    let mut cs: Vec<char> = x.chars().chain(extra.chars()).collect();
                    cs.shuffle(rng);
                    if rng.gen_bool(0.3) && !cs.is_empty() {
                        let i = rng.gen_range(0..cs.len());
                        cs.remove(i);
                    }
                    cs.into_iter().collect()
                } else {
                    string_of(&short, rng, |r| from_pool(b"abcdef", r))
                };
                vec![Value::string(&x), Value::string(&y)]
            }
        }
    }

    /// The reference answer, computed directly without recursion schemes.
    pub fn oracle(self, inputs: &[Value]) -> Value {
        let list = || inputs[0].as_list().expect("list input");
        let ints = || list().iter().map(|v| v.as_int().expect("int element")).collect::<Vec<_>>();
        let string = || inputs[0].as_string().expect("string input");
        match self {
            Builtin::CountOdds => Value::Int(ints().iter().filter(|x| *x % 2 != 0).count() as i64),
            Builtin::NegativeToZero => Value::int_list(&ints().iter().map(|x| (*x).max(0)).collect::<Vec<_>>()),
            Builtin::LastIndexOfZero => {
                Value::Int(ints().iter().rposition(|x| *x == 0).map_or(-1, |i| i as i64))
            }
            Builtin::DoubleLetters => {
                let mut out = String::new();
                for c in string().chars() {
                    let n = if c == '!' {
                        3
                    } else if c.is_ascii_alphabetic() {
                        2
                    } else {
                        1
                    };
                    out.extend(std::iter::repeat_n(c, n));
                }
                Value::string(&out)
            }
            Builtin::ReplaceSpaceWithNewline => {
                let s = string();
                let replaced = s.replace(' ', "\n");
                let count = s.chars().filter(|c| !c.is_whitespace()).count() as i64;
                Value::tuple(Value::string(&replaced), Value::Int(count))
            }
            Builtin::ScrabbleScore => Value::Int(string().chars().map(scrabble_score).sum()),
            Builtin::Syllables => Value::Int(string().chars().filter(|c| is_ascii_vowel(*c)).count() as i64),
            Builtin::Checksum => {
                let sum: i64 = string().chars().map(|c| i64::from(u32::from(c))).sum();
                Value::Char(char::from((sum.rem_euclid(64) + 32) as u8))
            }
            Builtin::StringLengthsBackwards => {
                let lens: Vec<i64> =
                    list().iter().rev().map(|s| s.as_list().expect("string element").len() as i64).collect();
                Value::int_list(&lens)
            }
            Builtin::VectorAverage => {
                let xs: Vec<f64> = list().iter().map(|v| v.as_float().expect("float element")).collect();
                Value::Float(round_to(xs.iter().sum::<f64>() / xs.len() as f64, 4))
            }
            Builtin::ForLoopIndex => {
                let [start, end, step] = [0, 1, 2].map(|i| inputs[i].as_int().expect("int input"));
                let mut out = Vec::new();
                let mut n = start;
                while n < end && out.len() < 100_000 {
                    out.push(n);
                    n += step;
                }
                Value::int_list(&out)
            }
            Builtin::CollatzNumbers => {
                let mut n = inputs[0].as_int().expect("int input");
                let mut terms = 1;
                while n > 1 {
                    n = if n % 2 == 0 { n / 2 } else { 3 * n + 1 };
                    terms += 1;
                }
                Value::Int(terms)
            }
            Builtin::SuperAnagrams => {
                let x = string();
                let y = inputs[1].as_string().expect("string input");
                let mut counts = [0i32; 128];
                let mut other: Vec<char> = Vec::new();
                for c in y.chars() {
                    if c.is_ascii() {
                        counts[c as usize] += 1;
                    } else {
                        other.push(c);
                    }
                }
                let ok = x.chars().all(|c| {
                    if c.is_ascii() {
                        counts[c as usize] -= 1;
                        counts[c as usize] >= 0
                    } else if let Some(i) = other.iter().position(|o| *o == c) {
                        other.swap_remove(i);
                        true
                    } else {
                        false
                    }
                });
                Value::Bool(ok)
            }
        }
    }
}
