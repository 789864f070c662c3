use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn l0check(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l0check"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim_end().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).to_string()
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn with_config(path: &Path, args: &[&str]) -> Output {
    let mut all = vec!["--config", path.to_str().unwrap()];
    all.extend_from_slice(args);
    l0check(&all)
}

#[test]
fn eval_prints_values() {
    let cases = [
        (vec!["prob", "{1, 3}"], "5/8"),
        (vec!["prob", "co{1}"], "1/2"),
        (vec!["gauge", "m_plus_ball({|1})", "{1:5 | 1/2}"], "{0}"),
        (vec!["contains", "m_plus_ball({|1})", "{1:5 | 3}"], "false"),
        (vec!["contains", "m_plus_ball({|1})", "{1:1 | 0}"], "true"),
        (vec!["norm", "weighted({|2})", "{1:-1 | 3}"], "{1:2 | 6}"),
        (vec!["glue", "diag({|1})", "singletons_from(1)"], "{1}"),
        (vec!["classify", "{1:0 | 2}"], "in_l0_plus=true in_l0_plusplus=false in_m=false"),
    ];
    for (expr, want) in cases {
        let mut args = vec!["eval"];
        args.extend(expr.iter().copied());
        let o = l0check(&args);
        assert!(o.status.success(), "{expr:?}: {}", stderr(&o));
        assert_eq!(stdout(&o), want, "{expr:?}");
    }
}

#[test]
fn eval_accepts_a_single_quoted_expression() {
    let o = l0check(&["eval", "prob {1, 3}"]);
    assert_eq!(stdout(&o), "5/8");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["eval", "nope", "1"],
        vec!["eval", "prob", "{1"],
        vec!["eval", "recip", "{0}"],
        vec!["partition", "finite[{1}]"],
        vec!["check", "cc"],
    ] {
        let o = l0check(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).starts_with("error:"), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(l0check(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_errors_point_at_line_and_column() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "bad.toml", "seed = 3\nset = \"m_plus_ball({1:x | 1})\"\n");
    let o = with_config(&path, &["check", "roundtrip"]);
    assert_eq!(o.status.code(), Some(2));
    let want = format!("{}:2:23:", path.display());
    assert!(stderr(&o).contains(&want), "{}", stderr(&o));

    let path = write_config(&dir, "unknown.toml", "seed = 3\n\n[base]\nepsilon = \"{1}\"\n");
    let o = with_config(&path, &["check", "base"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":4:"), "{}", stderr(&o));
}

#[test]
fn expected_failures_exit_0_and_unexpected_ones_exit_1() {
    let dir = TempDir::new().unwrap();
    let body = "set = \"m_plus_ball({|1})\"\n\n[seq]\ndiag = \"{|2}\"\n\n[part]\nsingletons_from = 1\n";
    let expecting = write_config(&dir, "expect_fail.toml", &format!("expect = \"fail\"\n{body}"));
    let o = with_config(&expecting, &["check", "cc"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["cc_failures"], 1);
    assert_eq!(report["pass"], false);

    let plain = write_config(&dir, "plain.toml", body);
    assert_eq!(with_config(&plain, &["check", "cc"]).status.code(), Some(1));

    let ball = write_config(
        &dir,
        "ball.toml",
        "expect = \"fail\"\nset = \"ball(weighted({|1}); {|1})\"\n\n[seq]\ndiag = \"{|1}\"\n\n[part]\nsingletons_from = 1\n",
    );
    let o = with_config(&ball, &["check", "cc"]);
    assert_eq!(o.status.code(), Some(1), "passing check under expect = fail");
}

#[test]
fn check_targets_pass_on_valid_objects() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "ok.toml",
        "samples = 40\nseminorm = \"sup[localized({1, 2}), weighted({3:2 | 1/2})]\"\n\n[base]\neps = \"{1:3 | 1}\"\ndelta = \"{|1/4}\"\n",
    );
    for target in ["axioms", "roundtrip", "base"] {
        let o = with_config(&cfg, &["check", target]);
        assert!(o.status.success(), "{target}: {}", stderr(&o));
        let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(report["target"], target);
        assert_eq!(report["pass"], true);
    }
}

#[test]
fn verify_counterexample_reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |seed: &str, name: &str| {
        let path = dir.path().join(name);
        let o = l0check(&["verify-counterexample", "--samples", "40", "--seed", seed, "--json", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).starts_with("verdict NotInduced"), "{}", stdout(&o));
        std::fs::read(path).unwrap()
    };
    let first = run("5", "a.json");
    assert_eq!(first, run("5", "b.json"));
    assert_ne!(first, run("6", "c.json"));

    let report: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["seed"], 5);
    assert_eq!(report["samples"], 40);
    assert_eq!(report["verdict"], "NotInduced");
}

#[test]
fn seminorm_bases_are_induced() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "fam.toml", "samples = 30\n\n[base]\nfrom_seminorms = [\"localized(co{1})\"]\n");
    let o = with_config(&cfg, &["verify-counterexample"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["verdict"], "Induced");
}

#[test]
fn partition_masses() {
    let o = l0check(&["partition", "singletons_from(3; [{1}, {2}])", "--horizon", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["remainder_mass"], "1/4");
    let cells = report["tail_cells"].as_array().unwrap();
    assert_eq!(cells.len(), 5);
    assert_eq!(cells[0]["cell"], "{3}");
    assert_eq!(cells[0]["mass"], "1/8");
    assert_eq!(cells[4]["mass"], "1/128");

    // a general space whose weights stop being dyadic only before the tail
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "space.toml", "[space]\nexplicit = [[1, \"3/4\"]]\ntail_coefficient = \"1/2\"\n");
    let o = with_config(&cfg, &["partition", "singletons_from(2; [{1}])", "--horizon", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["remainder_mass"], "1/4");
    assert_eq!(report["tail_cells"][2]["mass"], "1/32");
}
