use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psro-cli"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn walkthrough_writes_its_log() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let o = cli(&[
        "--experiment",
        "fixture_walkthrough",
        "--game",
        "example1",
        "--out-dir",
        out_dir,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("converged"));
    assert!(Path::new(out_dir)
        .join("walkthrough_example1.json")
        .is_file());
}

#[test]
fn walkthrough_mismatch_exits_with_three() {
    let o = cli(&["--experiment", "fixture_walkthrough", "--game", "example3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("MISMATCH"));
}

#[test]
fn alpharank_on_a_fixture() {
    let o = cli(&[
        "--experiment",
        "alpharank_solve",
        "--game",
        "prisoners_dilemma",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["support"], serde_json::json!([["D", "D"]]));
}

#[test]
fn bad_configurations_exit_with_two() {
    for args in [
        &[
            "--experiment",
            "poker_meta_solvers",
            "--players",
            "3",
            "--meta-solver",
            "nash_lp",
        ][..],
        &["--experiment", "oracle_compare", "--oracle", "nope"],
        &[
            "--experiment",
            "alpharank_solve",
            "--game",
            "no_such_fixture",
        ],
        &[
            "--experiment",
            "alpharank_solve",
            "--alpha-policy",
            "fixed:abc",
        ],
        &["--game", "kuhn"],
    ] {
        let o = cli(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("poker.json");
    std::fs::write(
        &config,
        r#"{"experiment": "poker_meta_solvers", "game": {"kind": "kuhn", "players": 2},
            "solvers": [{"kind": "uniform"}], "max_iterations": 10}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = cli(&[
        "--config",
        config.to_str().unwrap(),
        "--max-iterations",
        "2",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(out.join("kuhn2_uniform_br.csv")).unwrap();
    // Header plus one row per solved population.
    assert_eq!(csv.lines().count(), 4);
    assert!(out.join("kuhn2_uniform_br.jsonl").is_file());
}

#[test]
fn oracle_compare_is_reproducible() {
    let args = [
        "--experiment",
        "oracle_compare",
        "--players",
        "2",
        "--strategies",
        "4",
        "--games",
        "3",
        "--trials",
        "2",
        "--seed",
        "11",
    ];
    let a = cli(&args);
    let b = cli(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("players,strategies,oracle"));
}
