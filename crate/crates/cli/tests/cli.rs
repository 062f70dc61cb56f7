use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_banglambek"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const G1: &str = "\
# a^n b^n
nonterminals: s t
terminals: a b
start: s
s => a b
s => a t
t => s b
";

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn decide_exit_codes() {
    let o = run(&["decide", "np, (np\\s)/np, np -> s"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "DERIVABLE"));
    let o = run(&["decide", "!p, q -> q"]);
    assert_eq!((code(&o), stdout(&o).trim()), (1, "NOT_DERIVABLE"));
    let o = run(&["decide", "!(p/q), q -> p"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn prove_in_lstar() {
    let o = run(&["prove", "--system", "lstar", "q/(p/p) -> q"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "DERIVABLE"));
    let o = run(&["prove", "--system", "lstar", "!p -> p"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn tree_round_trips_through_check() {
    let dir = TempDir::new().unwrap();
    let o = run(&["decide", "--json", "--tree", "!p, q/p -> q"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "DERIVABLE");
    let tree = write(&dir, "d.json", &v["derivation"].to_string());
    let o = run(&["check", &tree]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("VALID"));
    // the same tree is not an L* derivation
    let o = run(&["check", "--system", "lstar", &tree]);
    assert_eq!(code(&o), 1);
}

#[test]
fn parse_sentences() {
    let o = run(&["parse", "John", "met", "Pete"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("DERIVABLE"));
    let o = run(&["parse", "met", "John", "Pete"]);
    assert_eq!(code(&o), 1);
    let o = run(&[
        "parse",
        "--target",
        "np",
        "the",
        "person",
        "whom",
        "John",
        "met",
        "yesterday",
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&["parse", "John", "snores"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("snores"));
}

#[test]
fn parse_with_lexicon_file() {
    let dir = TempDir::new().unwrap();
    let lex = write(&dir, "lex.txt", "# tiny\nx: p\nx: q\ny: p\\r\n");
    let o = run(&["parse", "--lexicon", &lex, "--target", "r", "x", "y"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn encode_then_deduce() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", G1);
    let rules = dir.path().join("r.txt");
    let o = run(&["encode", &g, "--out", rules.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(Path::new(&rules).exists());
    let sys = format!("lstar+R:{}", rules.display());
    let o = run(&["deduce", "--system", &sys, "--json", "a, a, b, b -> s"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "FOUND");
    let o = run(&["deduce", "--system", &sys, "b, a -> s"]);
    assert_eq!(code(&o), 1);
    let o = run(&["embed", "--system", &sys, "a, b -> s"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).matches('!').count(), 3);
}

#[test]
fn oracle_and_usage_errors() {
    let o = run(&["oracle", "--system", "lstar", "p, p\\q -> q"]);
    assert_eq!(code(&o), 0);
    let o = run(&["oracle", "--bound", "3", "p -> q"]);
    assert_eq!(code(&o), 1);
    assert!(code(&run(&["frobnicate"])) > 2);
    assert!(code(&run(&["prove", "--system", "nonsense", "p -> p"])) > 2);
    assert!(code(&run(&["prove", "p -> "])) > 2);
}
