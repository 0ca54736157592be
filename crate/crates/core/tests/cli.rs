use std::path::PathBuf;
use std::process::Command;

use balmat::cli;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["balmat"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn fixture(path: &str) -> String {
    format!("{}/fixtures/{path}", env!("CARGO_MANIFEST_DIR"))
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn vanilla_bfile() {
    let (code, out, _) = run(&["count", "vanilla", "--k", "2", "--terms", "10", "--format", "bfile"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 10);
    assert_eq!(out.lines().last(), Some("10 25989269017140"));
}

#[test]
fn json_mode_everywhere() {
    let (code, out, _) = run(&["count", "vanilla", "--k", "2", "--terms", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["terms"][2], "1860");
    let (code, out, _) = run(&["gf", "--system", &data("notalone.json"), "--k", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["denominator"], serde_json::json!(["1", "-2", "-5", "0", "1"]));
    let (code, out, _) = run(&["puzzle", "catalog", "--size", "4", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Vec<Vec<String>> = serde_json::from_str(&out).unwrap();
    assert_eq!(v.len(), 16);
}

#[test]
fn output_is_independent_of_threads() {
    let a = run(&["count", "vanilla", "--k", "3", "--terms", "12", "--threads", "1"]);
    let b = run(&["count", "vanilla", "--k", "3", "--terms", "12", "--threads", "4"]);
    assert_eq!(a, b);
}

#[test]
fn pipeline_count_guess_verify_compare() {
    let dir = tempfile::tempdir().unwrap();
    let (_, terms, _) = run(&["count", "vanilla", "--k", "2", "--terms", "25", "--format", "bfile"]);
    let input = write_temp(&dir, "b2.txt", &terms);
    let input = input.to_str().unwrap();
    let (code, out, _) = run(&["guess", "precursive", "--input", input, "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["recurrence"]["order"], 2);
    let rec = write_temp(&dir, "rec.json", &v["recurrence"].to_string());
    let (code, out, _) = run(&["verify", "--recurrence", rec.to_str().unwrap(), "--input", input]);
    assert_eq!(code, 0, "{out}");
    let (code, _, _) = run(&["oeis", "compare", "--id", "A002896", "--input", input, "--offline"]);
    assert_eq!(code, 0);

    let mut lines: Vec<String> = terms.lines().map(String::from).collect();
    lines[4] = "5 1172557".into();
    let bad = write_temp(&dir, "bad.txt", &(lines.join("\n") + "\n"));
    let (code, out, _) = run(&["oeis", "compare", "--id", "A002896", "--input", bad.to_str().unwrap()]);
    assert_eq!(code, cli::EXIT_MISMATCH);
    assert!(out.contains("first mismatch at n = 5"));
    let (code, _, _) = run(&["verify", "--recurrence", rec.to_str().unwrap(), "--input", bad.to_str().unwrap()]);
    assert_eq!(code, cli::EXIT_MISMATCH);
}

#[test]
fn unroll_from_two_terms() {
    let dir = tempfile::tempdir().unwrap();
    let init = write_temp(&dir, "init.txt", "1 6\n2 90\n");
    let rec = fixture("recurrences/b2_order2.json");
    let (code, out, _) = run(&["unroll", "--recurrence", &rec, "--initial", init.to_str().unwrap(), "--terms", "10"]);
    assert_eq!(code, 0);
    assert!(out.trim_end().ends_with("25989269017140"));
    let halve = write_temp(&dir, "half.json", r#"{"order":1,"degree":0,"coeffs":[["-1"],["2"]]}"#);
    let one = write_temp(&dir, "one.txt", "1 1\n");
    let (code, out, err) = run(&["unroll", "--recurrence", halve.to_str().unwrap(), "--initial", one.to_str().unwrap(), "--terms", "3"]);
    assert_eq!(code, cli::EXIT_MISMATCH);
    assert_eq!(out, "1 1/2 1/4\n");
    assert!(err.contains("n = 2"));
}

#[test]
fn puzzle_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let (code, puzzle, _) = run(&["puzzle", "generate", "--size", "6", "--seed", "7", "--max-clues", "12"]);
    assert_eq!(code, 0);
    let p = write_temp(&dir, "p.txt", &puzzle);
    let logic = run(&["puzzle", "solve", "--input", p.to_str().unwrap()]);
    let brute = run(&["puzzle", "solve", "--input", p.to_str().unwrap(), "--method", "brute"]);
    assert_eq!(logic.0, 0);
    assert_eq!(logic.1, brute.1);

    let empty = write_temp(&dir, "e.txt", "......\n......\n......\n......\n......\n......\n");
    assert_eq!(run(&["puzzle", "solve", "--input", empty.to_str().unwrap()]).0, cli::EXIT_MULTIPLE);
    let bad = write_temp(&dir, "b.txt", "101...\n......\n......\n......\n......\n......\n");
    assert_eq!(run(&["puzzle", "solve", "--input", bad.to_str().unwrap()]).0, cli::EXIT_NO_SOLUTION);
    let (code, out, _) = run(&["puzzle", "solve", "--input", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "unique");
}

#[test]
fn usage_errors() {
    let (code, _, err) = run(&["count", "vanilla", "--k", "2"]);
    assert_eq!(code, cli::EXIT_USAGE);
    assert_eq!(err.lines().count(), 1);
    assert_eq!(run(&["count", "vanilla", "--k", "2", "--terms", "3", "--bogus"]).0, cli::EXIT_USAGE);
    assert_eq!(run(&["count", "vanilla", "--k", "0", "--terms", "3"]).0, cli::EXIT_USAGE);
    assert_eq!(run(&["oeis", "compare", "--id", "X123", "--input", "x"]).0, cli::EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn resource_limit_prints_partial_terms() {
    let (code, out, err) = run(&[
        "count",
        "balanced-avoid",
        "--system",
        &data("notalone.json"),
        "--k",
        "3",
        "--terms",
        "6",
        "--memory-cap",
        "200K",
    ]);
    assert_eq!(code, cli::EXIT_RESOURCE);
    assert!(out.starts_with("8 64"), "{out}");
    assert!(err.contains("resource limit"));
}

#[test]
fn offline_lookup_without_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_temp(&dir, "x.txt", "1 1\n2 1\n");
    let cache = dir.path().join("cache");
    let (code, _, err) = run(&[
        "oeis",
        "compare",
        "--id",
        "A000045",
        "--input",
        input.to_str().unwrap(),
        "--offline",
        "--cache-dir",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(code, cli::EXIT_FAILURE);
    assert!(err.contains("not available offline"));
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_balmat");
    let ok = Command::new(exe)
        .args(["count", "avoid", "--system", &data("notalone.json"), "--k", "3", "--terms", "4"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "6 36 102 378\n");
    let usage = Command::new(exe).arg("nonsense").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}
