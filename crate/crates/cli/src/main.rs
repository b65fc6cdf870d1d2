use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use foldsynth::problems::fixtures::{check_fixture, FIXTURES};
use foldsynth::problems::{load_problem_file, registry};
use foldsynth::value::show_typed;
use foldsynth::{
    assemble, build_template, find, parse_args, parse_genome, run_benchmark, synthesize, GPConfig, Limits, Problem,
    RunSeeds, SchemeKind, Selection, TemplateKind,
};

/// Program synthesis by evolving the holes of recursion-scheme templates.
#[derive(Parser, Debug)]
#[command(name = "foldsynth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one search and print the best genome with its slot types.
    Synth(SynthArgs),
    /// Run independent searches and write a report.
    Bench(BenchArgs),
    /// Check the stored solutions against their traces and the oracles.
    VerifyFixtures(VerifyArgs),
    /// Print the registered problems.
    ListProblems,
    /// Evaluate a genome file on inputs read from stdin, one case per line.
    EvalGenome(EvalArgs),
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Registered problem name (see list-problems).
    problem: Option<String>,
    /// TOML problem file; replaces or adjusts the named problem.
    #[arg(long)]
    problem_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Master seed.
    #[arg(long, env = "ORIGAMI_SEED", default_value_t = 1)]
    seed: u64,
    /// TOML file with search parameters; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Population size [default: 1000].
    #[arg(long)]
    pop: Option<usize>,
    /// Maximum generations [default: 300].
    #[arg(long)]
    gens: Option<usize>,
    /// Maximum slot expression depth [default: 5].
    #[arg(long)]
    max_depth: Option<usize>,
    /// Tournament size [default: 7].
    #[arg(long)]
    tournament: Option<usize>,
    /// Evaluation fuel per case [default: 100000].
    #[arg(long)]
    fuel: Option<u64>,
    /// Maximum unfold steps per case [default: 10000].
    #[arg(long)]
    max_steps: Option<usize>,
    /// Training cases per run [default: 100].
    #[arg(long)]
    train_cases: Option<usize>,
    /// Validation cases per run [default: 100].
    #[arg(long)]
    validation_cases: Option<usize>,
    /// Use this template only.
    #[arg(long, conflicts_with = "scheme")]
    template: Option<TemplateKind>,
    /// Race every template of this scheme.
    #[arg(long)]
    scheme: Option<SchemeKind>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Also write the best genome to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Number of independent runs.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
    /// Runs executed concurrently.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    parallel: u64,
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Include wall-clock seconds per run (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Generated cases per oracle-scored fixture.
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    #[arg(long, env = "ORIGAMI_SEED", default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Genome file as written by synth --out.
    genome: PathBuf,
    #[arg(long, default_value_t = foldsynth::eval::DEFAULT_FUEL)]
    fuel: u64,
    #[arg(long, default_value_t = foldsynth::schemes::DEFAULT_MAX_STEPS)]
    max_steps: usize,
}

/// Failures caused by bad user input rather than by a search.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: anyhow::Error) -> anyhow::Error {
    anyhow::Error::new(Usage(e))
}

fn resolve_problem(args: &ProblemArgs) -> Result<Problem> {
    match (&args.problem_file, &args.problem) {
        (Some(path), name) => {
            let p = load_problem_file(path).map_err(|e| usage(anyhow!(e)))?;
            if let Some(n) = name {
                if *n != p.name {
                    return Err(usage(anyhow!("problem file defines '{}', not '{n}'", p.name)));
                }
            }
            Ok(p)
        }
        (None, Some(n)) => find(n).ok_or_else(|| usage(anyhow!("unknown problem '{n}' (see list-problems)"))),
        (None, None) => Err(usage(anyhow!("a problem name or --problem-file is required"))),
    }
}

fn resolve_config(s: &SearchArgs) -> Result<GPConfig> {
    let mut c = match &s.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))
                .map_err(usage)?;
            GPConfig::from_toml(&text).map_err(|e| usage(anyhow!(e)))?
        }
        None => GPConfig::default(),
    };
    c.seed = s.seed;
    let set = |dst: &mut usize, v: Option<usize>| {
        if let Some(v) = v {
            *dst = v;
        }
    };
    set(&mut c.population_size, s.pop);
    set(&mut c.max_generations, s.gens);
    set(&mut c.max_depth, s.max_depth);
    set(&mut c.tournament_size, s.tournament);
    set(&mut c.max_steps, s.max_steps);
    set(&mut c.train_cases, s.train_cases);
    set(&mut c.validation_cases, s.validation_cases);
    if let Some(f) = s.fuel {
        c.fuel = f;
    }
    c.validate().map_err(|e| usage(anyhow!(e)))?;
    Ok(c)
}

fn selection(s: &SearchArgs) -> Selection {
    match (s.template, s.scheme) {
        (Some(t), _) => Selection::Forced(t),
        (None, Some(s)) => Selection::Scheme(s),
        (None, None) => Selection::Auto,
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path.file_name().ok_or_else(|| usage(anyhow!("bad output path {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, contents).with_context(|| format!("cannot write {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn synth(a: &SynthArgs) -> Result<ExitCode> {
    let p = resolve_problem(&a.problem)?;
    let config = resolve_config(&a.search)?;
    let sel = selection(&a.search);
    let r = synthesize(&p, sel, &config, RunSeeds::new(config.seed, 0)).map_err(|e| usage(anyhow!(e)))?;
    let template = build_template(r.template, &p.signature)?;
    println!("problem: {}", p.name);
    println!("template: {}", r.template);
    println!("solved: {}", r.solved);
    println!("generations: {}", r.generations);
    println!("train error: {}", r.train_error);
    match r.validation_error {
        Some(v) => println!("validation error: {v}"),
        None => println!("validation error: not measured"),
    }
    println!("slots:");
    for s in &template.slots {
        let vars: Vec<String> = s.vars.iter().map(|(n, t)| format!("{n} : {t}")).collect();
        println!("  {} : {}  [{}]", s.name, s.ret, vars.join(", "));
    }
    println!("genome:");
    print!("{}", r.genome);
    if let Some(out) = &a.out {
        write_atomic(out, &r.genome)?;
    }
    Ok(if r.solved { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn bench(a: &BenchArgs) -> Result<ExitCode> {
    let p = resolve_problem(&a.problem)?;
    let config = resolve_config(&a.search)?;
    let report = run_benchmark(&p, a.runs as usize, selection(&a.search), &config, a.parallel as usize)
        .map_err(|e| usage(anyhow!(e)))?;
    let text = match a.format {
        Format::Csv => report.to_csv(a.timing),
        Format::Json => report.to_json(a.timing),
    };
    match &a.out {
        Some(path) => write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    eprintln!("{}: {}/{} solved", report.problem, report.successes, report.runs);
    Ok(ExitCode::SUCCESS)
}

fn verify(a: &VerifyArgs) -> Result<ExitCode> {
    let mut ok = true;
    for f in &FIXTURES {
        let c = check_fixture(f, a.cases, a.seed)?;
        let status = if c.passed() { "ok" } else { "FAIL" };
        let cases = if f.oracle_scored {
            format!("{}/{} cases", c.cases_passed, c.cases_total)
        } else {
            "trace only".to_string()
        };
        println!("{status:4} {:28} {}/{} traces, {cases}", f.problem, c.traces_passed, c.traces_total);
        for msg in c.failures.iter().take(3) {
            println!("     {msg}");
        }
        ok &= c.passed();
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn list_problems() -> Result<ExitCode> {
    for p in registry() {
        let t = p.template.map_or_else(|| "-".to_string(), |t| t.to_string());
        println!("{:28} {:30} {:14} {}", p.name, p.signature.to_string(), t, p.description);
    }
    Ok(ExitCode::SUCCESS)
}

fn eval_genome(a: &EvalArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&a.genome)
        .with_context(|| format!("cannot read {}", a.genome.display()))
        .map_err(usage)?;
    let (template, genome) = parse_genome(&text).map_err(|e| usage(anyhow!(e)))?;
    let program = assemble(&template, &genome)?;
    let limits = Limits { fuel: a.fuel, max_steps: a.max_steps };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut failed = false;
    for line in std::io::stdin().lock().lines() {
        let line = line?;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let args = match parse_args(&line, &template.sig.params) {
            Ok(a) => a,
            Err(e) => bail!(usage(anyhow!("bad input '{line}': {e}"))),
        };
        match program.run(&args, limits) {
            Ok(v) => writeln!(out, "{}", show_typed(&v, &template.sig.ret))?,
            Err(e) => {
                failed = true;
                writeln!(out, "error: {e}")?;
            }
        }
    }
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Bench(a) => bench(a),
        Command::VerifyFixtures(a) => verify(a),
        Command::ListProblems => list_problems(),
        Command::EvalGenome(a) => eval_genome(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
