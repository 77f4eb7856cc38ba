use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const P3: &str = "3 2\n1 2\n2 3\n";
const P4: &str = "4 3\n1 2\n2 3\n3 4\n";
const C4: &str = "4 4\n1 2\n2 3\n3 4\n4 1\n";
const PETERSEN: &str = "10 15\n1 2\n2 3\n3 4\n4 5\n5 1\n1 6\n2 7\n3 8\n4 9\n5 10\n6 8\n8 10\n10 7\n7 9\n9 6\n";

fn scar(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scar")).args(args).current_dir(dir).output().expect("binary runs")
}

fn workspace(graphs: &[(&str, &str)]) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in graphs {
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn solve_p3_matches_capture_time() {
    let dir = workspace(&[("p3.txt", P3)]);
    let out = scar(
        &["solve", "--graph", "p3.txt", "--n", "2", "--gamma", "0.5", "--epsilon", "0", "--s0", "1,3,1"],
        dir.path(),
    );
    let doc = stdout_json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "solve");
    let u = doc["result"]["values_at_s0"][0].as_f64().unwrap();
    assert!((u - 0.125).abs() < 1e-12, "u1(s0) = {u}");
    assert_eq!(doc["result"]["trace"]["capture_time"], 3);
    // The echo is self-contained: graph inlined, tolerances spelled out.
    assert_eq!(doc["scenario"]["graph"], P3);
    assert!(doc["scenario"]["tolerances"].is_object());
}

#[test]
fn scenario_file_resolves_graph_relative_to_itself() {
    let dir = workspace(&[]);
    fs::create_dir(dir.path().join("sub")).unwrap();
    fs::write(dir.path().join("sub/p3.txt"), P3).unwrap();
    let scenario = r#"{"graph_file": "p3.txt", "players": 2, "gamma": 0.5, "epsilon": 0.0, "s0": "1,3,1"}"#;
    fs::write(dir.path().join("sub/game.json"), scenario).unwrap();
    let doc = stdout_json(&scar(&["solve", "--scenario", "sub/game.json"], dir.path()));
    assert!((doc["result"]["values_at_s0"][0].as_f64().unwrap() - 0.125).abs() < 1e-12);

    // Flags override scenario fields.
    let doc = stdout_json(&scar(&["solve", "--scenario", "sub/game.json", "--gamma", "0.9"], dir.path()));
    assert!((doc["result"]["values_at_s0"][0].as_f64().unwrap() - 0.729).abs() < 1e-12);
    assert_eq!(doc["scenario"]["gamma"], 0.9);
}

#[test]
fn undiscounted_game_is_a_validation_error() {
    let dir = workspace(&[("p3.txt", P3)]);
    let out = scar(
        &["solve", "--graph", "p3.txt", "--n", "2", "--gamma", "1.0", "--epsilon", "0", "--s0", "1,3,1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("gamma") && err.contains("(0, 1)"), "{err}");
}

#[test]
fn validation_errors_exit_2() {
    let dir = workspace(&[("p3.txt", P3), ("bad.txt", "3 2\n1 1\n2 3\n")]);
    let cases: [&[&str]; 5] = [
        &["solve", "--graph", "bad.txt", "--n", "2", "--gamma", "0.5", "--epsilon", "0", "--s0", "1,3,1"],
        &["solve", "--graph", "p3.txt", "--n", "2", "--gamma", "0.5", "--s0", "1,3,1"],
        &["solve", "--graph", "p3.txt", "--n", "2", "--gamma", "0.5", "--epsilon", "0", "--s0", "1,4,1"],
        &["solve", "--graph", "p3.txt", "--n", "2", "--gamma", "0.5", "--epsilon", "0", "--s0", "tau"],
        &["solve", "--graph", "p3.txt", "--n", "3", "--gamma", "0.5", "--epsilon", "0.7", "--s0", "1,1,3,1"],
    ];
    for args in cases {
        assert_eq!(scar(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn oversized_state_space_exits_3() {
    // 8 players on Petersen: 8 * 10^8 states.
    let dir = workspace(&[("petersen.txt", PETERSEN)]);
    let out = scar(&["sweep", "--graph", "petersen.txt", "--n", "8"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn capture_state_start_has_zero_capture_time() {
    let dir = workspace(&[("c4.txt", C4)]);
    let out = scar(
        &["solve", "--graph", "c4.txt", "--n", "3", "--gamma", "0.9", "--epsilon", "0.25", "--s0", "1,3,1,1"],
        dir.path(),
    );
    let doc = stdout_json(&out);
    let r = &doc["result"];
    assert_eq!(r["trace"]["capture_time"], 0);
    let u: Vec<f64> = r["values_at_s0"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(u, vec![0.75, 0.25, -1.0]);
}

#[test]
fn reproduce_example_default_passes() {
    let out = scar(&["reproduce-example"], Path::new("."));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("C1 vertex | 6 | 5 | 5 | 5 | 4 | 4"), "{text}");
    assert!(text.contains("R vertex  |  4 |  4 |  4 |  5 |  5 |  5 |  8 |  8 |  8 |  9 |  9 |  9 |  9 |  9"), "{text}");
    assert!(text.contains("T_C = 5, captured by C2"));
    assert!(text.contains("T_C = 13, captured by C1"));
    assert!(text.contains("PASS"));
}

#[test]
fn reproduce_example_below_threshold_is_not_profitable() {
    for (g, e) in [("0.8", "0.25"), ("0.9", "0.45")] {
        let out = scar(&["reproduce-example", "--gamma", g, "--epsilon", e, "--json"], Path::new("."));
        let doc = stdout_json(&out);
        assert_eq!(doc["result"]["deviation_profitable"], false, "gamma {g}, eps {e}");
        assert_eq!(doc["result"]["consistent"], true);
    }
}

#[test]
fn copnumber_of_small_graphs() {
    let dir = workspace(&[("p4.txt", P4), ("c4.txt", C4), ("petersen.txt", PETERSEN)]);
    for (file, expected) in [("p4.txt", 1), ("c4.txt", 2), ("petersen.txt", 3)] {
        let doc = stdout_json(&scar(&["copnumber", "--graph", file, "--max-cops", "3"], dir.path()));
        assert_eq!(doc["result"]["value"], expected, "{file}");
        let doc = stdout_json(&scar(&["copnumber", "--graph", file, "--selfish"], dir.path()));
        assert_eq!(doc["result"]["value"], expected, "{file} (selfish)");
    }
}

#[test]
fn copnumber_verify_finds_no_contradiction() {
    let dir = workspace(&[("c4.txt", C4)]);
    let doc = stdout_json(&scar(&["copnumber", "--graph", "c4.txt", "--verify"], dir.path()));
    assert_eq!(doc["result"]["value"], 2);
    assert_eq!(doc["result"]["verification"]["contradiction"], false);
}

#[test]
fn sweep_writes_csv() {
    let dir = workspace(&[("c4.txt", C4)]);
    let out = scar(&["sweep", "--graph", "c4.txt", "--n", "3", "--grid", "0.5,0.9;0,0.25"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma,epsilon,s0,omega_tilde,cr_optimal_is_ne,max_gap,threat_capture_time"));
    // 4 grid points times 192 states.
    assert_eq!(lines.count(), 4 * 192);
}

#[test]
fn simulate_every_profile() {
    let dir = workspace(&[("c4.txt", C4)]);
    let base = ["simulate", "--graph", "c4.txt", "--n", "3", "--gamma", "0.9", "--epsilon", "0.25"];
    for (profile, termination) in [
        ("cr-optimal", "captured"),
        ("capturing-threat", "captured"),
        ("positional", "captured"),
        // Stacked cops following their own auxiliary-game strategies, or
        // greedy pursuit, make identical choices and chase the robber
        // around the cycle in lockstep.
        ("threat", "cycle_certified"),
        ("pursuit", "cycle_certified"),
    ] {
        let mut args = base.to_vec();
        args.extend(["--s0", "1,1,3,1", "--profile", profile]);
        let doc = stdout_json(&scar(&args, dir.path()));
        assert_eq!(doc["result"]["trace"]["termination"], termination, "{profile}");
    }
    let mut args = base.to_vec();
    args.extend(["--s0", "1,1,3,1", "--profile", "non-capturing", "--table"]);
    let out = scar(&args, dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("T_C = ∞"));
}

#[test]
fn simulate_is_deterministic() {
    let dir = workspace(&[("c4.txt", C4)]);
    let args = [
        "simulate",
        "--graph",
        "c4.txt",
        "--n",
        "3",
        "--gamma",
        "0.9",
        "--epsilon",
        "0.25",
        "--s0",
        "1,1,3,1",
        "--profile",
        "positional",
    ];
    assert_eq!(scar(&args, dir.path()).stdout, scar(&args, dir.path()).stdout);
}

#[test]
fn theorems_on_cycle_pass() {
    let dir = workspace(&[("c4.txt", C4)]);
    let doc = stdout_json(&scar(&["theorems", "--graph", "c4.txt", "--n", "3"], dir.path()));
    let reports = doc["result"].as_array().unwrap();
    assert_eq!(reports.len(), 5);
    assert!(reports.iter().all(|r| r["verdict"] != "fail"));
}

#[test]
fn theorems_report_failure_with_exit_5() {
    // The delayed-capture tree: one cop suffices, but with eps = 0 a cop
    // that cannot be the captor has nothing to gain from capture, and a
    // non-capturing equilibrium exists.
    let fig = "9 8\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n5 8\n8 9\n";
    let dir = workspace(&[("fig.txt", fig)]);
    let out = scar(&["theorems", "--graph", "fig.txt", "--n", "3", "--grid", "0.9;0,0.25"], dir.path());
    assert_eq!(out.status.code(), Some(5));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failing: Vec<_> = doc["result"].as_array().unwrap().iter().filter(|r| r["verdict"] == "fail").collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["theorem"], "cop_win_all_ne_capture");
    let examples = failing[0]["counterexamples"].as_array().unwrap();
    assert!(!examples.is_empty());
    assert!(examples.iter().all(|c| c["scenario"]["epsilon"] == 0.0));
}

#[test]
fn equivalence_battery_passes() {
    let dir = workspace(&[("c4.txt", C4)]);
    let doc = stdout_json(&scar(
        &["equivalence", "--graph", "c4.txt", "--n", "3", "--trials", "25", "--seed", "3"],
        dir.path(),
    ));
    assert_eq!(doc["result"]["payoff_mismatches"], 0);
    assert_eq!(doc["result"]["path_mismatches"], 0);
    assert_eq!(doc["scenario"]["split_equivalent"], true);
}

#[test]
fn verify_reports_each_verifier() {
    let dir = workspace(&[("c4.txt", C4)]);
    let doc = stdout_json(&scar(
        &["verify", "--graph", "c4.txt", "--n", "3", "--gamma", "0.9", "--epsilon", "0.25", "--s0", "1,1,3,1"],
        dir.path(),
    ));
    let r = &doc["result"];
    assert_eq!(r["standard_threat"]["is_ne"], true);
    assert_eq!(r["capturing_threat"]["is_ne"], true);
    assert_eq!(r["positional"]["converged"], true);
    assert_eq!(r["non_capturing"]["is_ne"], true);
}
