//! End-to-end tests of the `ptower` binary: exit codes, output formats,
//! and the usage contract, driven through a real subprocess.

use std::path::PathBuf;
use std::process::{Command, Output};

const REDUCED_EXAMPLE: &str = "\
p = 2
precision = 4
cap = 4
variables = [x, y]
ideal = [\"p*x\", \"p*y\"]
mode = torsion_reduced
levels = 2
";

const CM_CONTROL: &str = "\
p = 2
precision = 3
cap = 4
variables = [x, y]
ideal = [\"x*y\"]
mode = torsion_free
levels = 1
sop = [\"x + y\"]
";

fn config_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("ptower-cli-{}-{}.cfg", name, std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptower"))
        .args(args)
        .output()
        .unwrap()
}

fn run_with_config(name: &str, contents: &str, before: &[&str], after: &[&str]) -> Output {
    let path = config_file(name, contents);
    let mut args: Vec<&str> = before.to_vec();
    let path_str = path.to_str().unwrap().to_string();
    args.push(&path_str);
    args.extend_from_slice(after);
    let out = run(&args);
    let _ = std::fs::remove_file(&path);
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn an_unstable_ideal_fails_with_a_witness() {
    let cfg = "p = 2\nprecision = 3\ncap = 4\nvariables = [x]\nideal = [\"x + p\"]\nmode = torsion_free\nlevels = 1\n";
    let out = run_with_config("unstable", cfg, &["check-stable"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("outside the ideal"), "{text}");
    assert!(text.ends_with("overall: fail\n"), "{text}");
}

#[test]
fn the_reduced_example_verifies_with_exit_zero() {
    let out = run_with_config("verify", REDUCED_EXAMPLE, &["verify"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("axiom (g) at level 0"), "{text}");
    assert!(text.ends_with("overall: pass\n"), "{text}");
}

#[test]
fn composite_p_is_rejected_before_any_work() {
    let cfg = "p = 4\nprecision = 3\ncap = 4\nvariables = [x]\nideal = []\nmode = torsion_free\nlevels = 1\n";
    let out = run_with_config("composite", cfg, &["verify"], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("not prime"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_three() {
    let out = run(&["frobnicate", "nope.cfg"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("usage:"), "{}", stderr(&out));

    let out = run(&["verify", "/nonexistent/path.cfg"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run_with_config("csvmisuse", REDUCED_EXAMPLE, &["build"], &["--format", "csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_prints_the_usage_and_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("usage:"));
}

#[test]
fn json_output_has_the_fixed_schema() {
    let out = run_with_config(
        "json",
        REDUCED_EXAMPLE,
        &["build"],
        &["--format", "json", "--seed", "9"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let top = doc.as_object().unwrap();
    let mut keys: Vec<&str> = top.keys().map(|k| k.as_str()).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        ["command", "config", "elapsed_ms", "results", "version"]
    );
    assert_eq!(top["elapsed_ms"], 0);
    assert_eq!(top["command"], "build");
    // The seed override is echoed in the config block.
    assert_eq!(top["config"]["seed"], 9);
    let result = &top["results"][0];
    let mut rkeys: Vec<&str> = result.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    rkeys.sort_unstable();
    assert_eq!(rkeys, ["check", "status", "window", "witness"]);
    assert_eq!(result["status"], "pass");
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = run_with_config("det-a", REDUCED_EXAMPLE, &["verify"], &["--format", "json"]);
    let b = run_with_config("det-b", REDUCED_EXAMPLE, &["verify"], &["--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(!stdout(&a).is_empty());
}

#[test]
fn limcm_exports_the_frozen_csv_table() {
    let out = run_with_config("csv", CM_CONTROL, &["limcm"], &["--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("n,i,l,nu,ratio\n"), "{text}");
    assert!(text.contains("0,1,0,1,0\n"), "{text}");
    assert!(text.contains("1,1,0,3,0\n"), "{text}");
}

#[test]
fn limcm_on_the_reduced_example_reports_exploratory() {
    let out = run_with_config(
        "exploratory",
        REDUCED_EXAMPLE,
        &["limcm"],
        &["--max-level", "1"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("limcm verdict | - | Exploratory"), "{text}");
}
