//! CLI acceptance: deterministic byte-identical output under a fixed seed,
//! plus the exit-code contract on the worked examples.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_digraph-balance")
}

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name]
        .iter()
        .collect();
    path.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_12_seeded_runs_are_byte_identical() {
    let started = Instant::now();
    let commands: Vec<Vec<String>> = vec![
        vec![
            "check".into(),
            "--input".into(),
            fixture("fig1.json"),
            "--method".into(),
            "cycle-cover".into(),
        ],
        vec![
            "balance".into(),
            "--algo".into(),
            "wbmda".into(),
            "--input".into(),
            fixture("fig6.json"),
        ],
        vec![
            "dsify".into(),
            "--self-loops".into(),
            "--input".into(),
            fixture("fig2a.json"),
        ],
        vec![
            "cycles".into(),
            "--ds-set".into(),
            "--input".into(),
            fixture("fig9.json"),
        ],
        vec![
            "oracle".into(),
            "--cross-check".into(),
            "--input".into(),
            fixture("fig2b.json"),
        ],
        vec![
            "bench".into(),
            "--sizes".into(),
            "4,6,8".into(),
            "--trials".into(),
            "5".into(),
            "--seed".into(),
            "7".into(),
        ],
    ];
    for command in &commands {
        let args: Vec<&str> = command.iter().map(|s| s.as_str()).collect();
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.stdout, second.stdout, "stdout differs for {command:?}");
        assert_eq!(first.stderr, second.stderr, "stderr differs for {command:?}");
        assert_eq!(
            first.status.code(),
            second.status.code(),
            "exit code differs for {command:?}"
        );
    }
    println!(
        "ACCEPTANCE 12: PASS — {} commands repeated byte-identically ({} ms)",
        commands.len(),
        started.elapsed().as_millis()
    );
    assert!(started.elapsed() < Duration::from_secs(60));
}

#[test]
fn check_exit_codes_follow_the_verdicts() {
    let negative = run(&["check", "--input", &fixture("fig1.json")]);
    assert_eq!(negative.status.code(), Some(1));
    let stdout = String::from_utf8(negative.stdout).unwrap();
    assert!(stdout.contains("connectivity=strongly_connected"));
    assert!(stdout.contains("weight_balanceable=true"));
    assert!(stdout.contains("doubly_stochasticable=false"));

    let negative = run(&["check", "--input", &fixture("fig2a.json")]);
    assert_eq!(negative.status.code(), Some(1));

    let positive = run(&["check", "--input", &fixture("fig2b.json")]);
    assert_eq!(positive.status.code(), Some(0));
    let stdout = String::from_utf8(positive.stdout).unwrap();
    assert!(stdout.contains("doubly_stochasticable=true"));

    let usage = run(&["check", "--input", "/nonexistent.json"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn balance_replay_reproduces_the_six_round_descent() {
    let out = run(&[
        "balance",
        "--algo",
        "wbda",
        "--input",
        &fixture("fig2a.json"),
        "--policy",
        &format!("replay={}", fixture("fig4.choices.json")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("rounds=6"));
    assert!(stdout.contains("lyapunov=6,4,4,4,4,4,0"));
}

#[test]
fn balance_trace_csv_matches_the_descent_column() {
    let dir = std::env::temp_dir().join(format!("dbal-trace-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let trace_path = dir.join("fig4.csv");
    let out = run(&[
        "balance",
        "--algo",
        "wbda",
        "--input",
        &fixture("fig2a.json"),
        "--policy",
        &format!("replay={}", fixture("fig4.choices.json")),
        "--trace",
        trace_path.to_str().unwrap(),
        "--trace-format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&trace_path).unwrap();
    let column: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|line| line.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(column, vec!["6", "4", "4", "4", "4", "4", "0"]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn dsify_cregular_follows_the_schedule_and_verdicts() {
    let out = run(&[
        "dsify",
        "--cregular",
        "--c",
        "3",
        "--input",
        &fixture("fig9.json"),
        "--schedule",
        &fixture("fig10.schedule.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("iterations=5"));
    assert!(stdout.contains("verdict=c_regular"));

    // at C = |E| - |V| + 1 a negative verdict certifies non-stochasticability
    let out = run(&[
        "dsify",
        "--cregular",
        "--c",
        "auto",
        "--input",
        &fixture("fig2a.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("verdict=not_c_regular"));
    assert!(stdout.contains("doubly_stochasticable=false"));
}

#[test]
fn dsify_self_loops_prints_the_worked_matrix() {
    let out = run(&[
        "dsify",
        "--self-loops",
        "--input",
        &fixture("fig2a.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    for entry in ["\"5/6\"", "\"1/6\"", "\"1/2\""] {
        assert!(stdout.contains(entry), "missing weight {entry}");
    }
}

#[test]
fn cycles_certificates_and_exit_codes() {
    let out = run(&["cycles", "--principal", "--input", &fixture("fig2b.json")]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"cardinality\": 2"));

    let out = run(&["cycles", "--ds-set", "--input", &fixture("fig9.json")]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["cycles", "--ds-set", "--input", &fixture("fig2a.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_cross_check_agrees_on_examples() {
    for (name, expected) in [("fig1.json", 1), ("fig2b.json", 0), ("fig9.json", 0)] {
        let out = run(&["oracle", "--cross-check", "--input", &fixture(name)]);
        assert_eq!(out.status.code(), Some(expected), "graph {name}");
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(stdout.contains("agree=true"));
    }
}

#[test]
fn dot_and_edge_list_inputs_parse() {
    let dir = std::env::temp_dir().join(format!("dbal-fmt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let dot = dir.join("two_cycle.dot");
    std::fs::write(&dot, "digraph { a -> b; b -> a; }\n").unwrap();
    let out = run(&[
        "check",
        "--input",
        dot.to_str().unwrap(),
        "--format",
        "dot",
    ]);
    assert_eq!(out.status.code(), Some(0));

    let list = dir.join("ring.edges");
    std::fs::write(&list, "n 3\n0 1\n1 2\n2 0 3/2\n").unwrap();
    let out = run(&[
        "check",
        "--input",
        list.to_str().unwrap(),
        "--format",
        "edge-list",
    ]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}
