use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn foldsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foldsynth"))
        .args(args)
        .env_remove("ORIGAMI_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(format!("{name}.genome"))
}

#[test]
fn list_problems_shows_the_registry() {
    let o = foldsynth(&["list-problems"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().count() >= 13);
    assert!(text.lines().any(|l| l.starts_with("count-odds") && l.contains("[Int] -> Int")));
}

#[test]
fn verify_fixtures_passes() {
    let o = foldsynth(&["verify-fixtures", "--cases", "200"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("ok")).count(), 13);
}

#[test]
fn eval_genome_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_foldsynth"))
        .args(["eval-genome", fixture_path("count-odds").to_str().expect("utf-8 path")])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().expect("stdin").write_all(b"[5, 2, 7]\n# comment\n[]\n[1, 3, -5, 8]\n").expect("write");
    let o = child.wait_with_output().expect("finishes");
    assert!(o.status.success());
    assert_eq!(stdout(&o), "2\n0\n3\n");
}

#[test]
fn eval_genome_reports_partial_results() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("head.genome");
    std::fs::write(&path, "template cata-reduce\nsignature [Int] -> Int\nslot nil = (head (list Int))\nslot cons = xs\n")
        .expect("write");
    let mut child = Command::new(env!("CARGO_BIN_EXE_foldsynth"))
        .args(["eval-genome", path.to_str().expect("utf-8 path")])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().expect("stdin").write_all(b"[1]\n").expect("write");
    let o = child.wait_with_output().expect("finishes");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("error: partial primitive"), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(foldsynth(&["synth", "no-such-problem"]).status.code(), Some(2));
    assert_eq!(foldsynth(&["bench", "count-odds", "--colour", "red"]).status.code(), Some(2));
    assert_eq!(foldsynth(&["bench", "count-odds", "--runs", "0"]).status.code(), Some(2));
    assert_eq!(foldsynth(&["synth", "count-odds", "--template", "ana-std"]).status.code(), Some(2));
    assert_eq!(foldsynth(&["synth", "count-odds", "--pop", "0"]).status.code(), Some(2));
}

#[test]
fn synth_prints_genome_and_slot_types() {
    let o = foldsynth(&["synth", "count-odds", "--pop", "60", "--gens", "3", "--seed", "5"]);
    assert!(matches!(o.status.code(), Some(0 | 1)));
    let text = stdout(&o);
    assert!(text.contains("template: cata-reduce"));
    assert!(text.contains("cons : Int  [x : Int, xs : Int]"), "{text}");
    assert!(text.contains("validation error:"));
    assert!(text.contains("slot cons = "));
}

#[test]
fn synth_output_round_trips_through_eval_genome() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().join("best.genome");
    let o = foldsynth(&["synth", "negative-to-zero", "--pop", "40", "--gens", "2", "--out", out.to_str().expect("utf-8")]);
    assert!(matches!(o.status.code(), Some(0 | 1)));
    let text = std::fs::read_to_string(&out).expect("genome written");
    assert!(text.starts_with("template cata-map"));
    let mut child = Command::new(env!("CARGO_BIN_EXE_foldsynth"))
        .args(["eval-genome", out.to_str().expect("utf-8")])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().expect("stdin").write_all(b"[-1, 2]\n").expect("write");
    let o = child.wait_with_output().expect("finishes");
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn bench_reports_are_reproducible() {
    let dir = tempfile::tempdir().expect("tempdir");
    let run = |name: &str, extra: &[&str]| {
        let path = dir.path().join(name);
        let mut args = vec!["bench", "count-odds", "--runs", "3", "--pop", "40", "--gens", "4", "--seed", "11"];
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--out", path.to_str().expect("utf-8")]);
        let o = foldsynth(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(path).expect("report written")
    };
    let a = run("a.csv", &[]);
    assert_eq!(a, run("b.csv", &[]));
    assert_eq!(a, run("c.csv", &["--parallel", "3"]));
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("problem,seed,solved,generations"));
    assert_eq!(lines.count(), 3);
    let json = run("a.json", &["--format", "json"]);
    assert!(json.trim_start().starts_with('{'));
    assert!(json.contains("\"records\"") && json.contains("\"genome\""));
    assert!(!json.contains("seconds"));
}

#[test]
fn seed_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().expect("tempdir");
    let run = |envseed: Option<&str>, flag: Option<&str>| {
        let path = dir.path().join("r.csv");
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_foldsynth"));
        cmd.args(["bench", "count-odds", "--runs", "2", "--pop", "30", "--gens", "2", "--out"]).arg(&path);
        cmd.env_remove("ORIGAMI_SEED");
        if let Some(s) = envseed {
            cmd.env("ORIGAMI_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        assert!(cmd.output().expect("runs").status.success());
        std::fs::read_to_string(path).expect("report")
    };
    assert_eq!(run(Some("77"), None), run(None, Some("77")));
    assert_eq!(run(Some("77"), Some("5")), run(None, Some("5")));
}

#[test]
fn problem_files_define_new_tasks() {
    let dir = tempfile::tempdir().expect("tempdir");
    let file = dir.path().join("sum.toml");
    std::fs::write(
        &file,
        "name = \"sum\"\nsignature = \"[Int] -> Int\"\ntemplate = \"cata-reduce\"\n\
         train = [\"[] => 0\", \"[1, 2] => 3\", \"[5, -1, 4] => 8\"]\nvalidation = [\"[10] => 10\"]\n",
    )
    .expect("write");
    let o = foldsynth(&["synth", "--problem-file", file.to_str().expect("utf-8"), "--pop", "200", "--gens", "20"]);
    let text = stdout(&o);
    assert!(text.contains("problem: sum"), "{text}");
    assert_eq!(o.status.code(), Some(if text.contains("solved: true") { 0 } else { 1 }));
}
