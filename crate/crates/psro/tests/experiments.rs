use psro::experiments::{
    run_experiment, run_walkthrough, ExperimentConfig, ExperimentKind, GameSpec, Walkthrough,
};
use psro::game::Fixture;
use psro::graph::{AlphaPolicy, AlphaRankConfig};
use psro::oracles::{OracleConfig, OracleKind};
use psro::psro::PayoffMode;
use psro::solvers::{MetaSolverConfig, PrdConfig};

fn configs() -> Vec<ExperimentConfig> {
    let mut a = ExperimentConfig::new(
        ExperimentKind::OracleCompare,
        GameSpec::Random {
            players: vec![2, 3],
            strategies: vec![4],
        },
    );
    a.games = 3;
    a.trials = 2;
    a.seed = 42;
    let mut b = ExperimentConfig::new(
        ExperimentKind::PokerMetaSolvers,
        GameSpec::Kuhn { players: 2 },
    );
    b.solvers = vec![
        MetaSolverConfig::Uniform,
        MetaSolverConfig::NashLp,
        MetaSolverConfig::Prd(PrdConfig::default()),
        MetaSolverConfig::AlphaRank(AlphaRankConfig {
            alpha: AlphaPolicy::Fixed { alpha: 2.5 },
            m: 7,
            ..Default::default()
        }),
    ];
    b.oracles = vec![OracleConfig::new(OracleKind::RectifiedBr)];
    b.payoff_mode = PayoffMode::Simulate {
        episodes: 10,
        seed: 3,
    };
    b.max_iterations = 4;
    let c = ExperimentConfig::new(
        ExperimentKind::FixtureWalkthrough,
        GameSpec::Walkthrough {
            name: Walkthrough::Snowflake,
        },
    );
    let mut d = ExperimentConfig::new(
        ExperimentKind::AlpharankSolve,
        GameSpec::Fixture {
            fixture: Fixture::Table2 {
                eps: 0.05,
                phi: 20.0,
            },
        },
    );
    d.solvers = vec![MetaSolverConfig::alpharank()];
    vec![a, b, c, d]
}

#[test]
fn configs_round_trip_through_json() {
    for cfg in configs() {
        let text = cfg.to_json().unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }
}

#[test]
fn minimal_config_fills_defaults() {
    let cfg = ExperimentConfig::from_json(
        r#"{"experiment": "poker_meta_solvers", "game": {"kind": "kuhn", "players": 3}}"#,
    )
    .unwrap();
    assert_eq!(cfg.games, 100);
    assert_eq!(cfg.trials, 10);
    assert_eq!(cfg.payoff_mode, PayoffMode::Exact);
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        r#"{"experiment": "poker_meta_solvers", "game": {"kind": "kuhn", "players": 3}, "solvers": [{"kind": "nash_lp"}]}"#,
        r#"{"experiment": "poker_meta_solvers", "game": {"kind": "kuhn", "players": 7}}"#,
        r#"{"experiment": "oracle_compare", "game": {"kind": "kuhn", "players": 2}}"#,
        r#"{"experiment": "oracle_compare", "game": {"kind": "random", "players": [2], "strategies": [4]}, "games": 0}"#,
        r#"{"experiment": "fixture_walkthrough", "game": {"kind": "walkthrough", "name": "example9"}}"#,
    ];
    for text in bad {
        assert!(ExperimentConfig::from_json(text).is_err(), "{text}");
    }
}

#[test]
fn experiment_files_are_byte_stable() {
    for cfg in configs() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let mut c1 = cfg.clone();
        c1.out_dir = Some(d1.path().to_path_buf());
        let mut c2 = cfg.clone();
        c2.out_dir = Some(d2.path().to_path_buf());
        let o1 = run_experiment(&c1).unwrap();
        let o2 = run_experiment(&c2).unwrap();
        assert!(!o1.files.is_empty());
        for (a, b) in o1.files.iter().zip(&o2.files) {
            assert_eq!(a.file_name(), b.file_name());
            assert_eq!(
                std::fs::read(a).unwrap(),
                std::fs::read(b).unwrap(),
                "{}",
                a.display()
            );
        }
    }
}

#[test]
fn oracle_compare_has_one_summary_row_per_cell_and_oracle() {
    let cfg = &configs()[0];
    let res = psro::experiments::oracle_compare(cfg).unwrap();
    assert_eq!(res.summary.len(), 4);
    assert_eq!(res.runs.len(), 2 * 3 * 2 * 2);
    for s in &res.summary {
        assert_eq!(s.runs, 6);
    }
}

#[test]
fn poker_traces_are_named_per_solver() {
    let mut cfg = ExperimentConfig::new(
        ExperimentKind::PokerMetaSolvers,
        GameSpec::Kuhn { players: 2 },
    );
    cfg.solvers = vec![
        MetaSolverConfig::alpharank_tolerant(),
        MetaSolverConfig::NashLp,
        MetaSolverConfig::Uniform,
    ];
    cfg.max_iterations = 3;
    let names: Vec<String> = psro::experiments::poker_meta_solvers(&cfg)
        .unwrap()
        .into_iter()
        .map(|t| t.name)
        .collect();
    assert_eq!(
        names,
        vec!["kuhn2_alpharank_br", "kuhn2_nash_lp_br", "kuhn2_uniform_br"]
    );
}

#[test]
fn alpharank_report_on_single_strategy_game() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    std::fs::write(
        &path,
        r#"{"players": 2, "strategy_counts": [1, 1], "payoffs": [[3.0], [1.0]]}"#,
    )
    .unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentKind::AlpharankSolve, GameSpec::File { path });
    cfg.solvers = vec![MetaSolverConfig::alpharank()];
    let report = psro::experiments::alpharank_solve(&cfg).unwrap();
    assert_eq!(report.nodes.len(), 1);
    assert_eq!(report.nodes[0].mass, 1.0);
}

#[test]
fn walkthroughs_follow_their_traces() {
    for w in [
        Walkthrough::Example1,
        Walkthrough::Example2,
        Walkthrough::Snowflake,
    ] {
        let log = run_walkthrough(w).unwrap();
        assert!(log.passed(), "{w}: {:?}", log.first_mismatch());
    }
    // Example 3: everything but the step-4 score values, which follow the
    // computed table2 subgame distribution (0.3, 0.4, 0.2, 0.1).
    let log = run_walkthrough(Walkthrough::Example3).unwrap();
    let failed: Vec<_> = log.checks.iter().filter(|c| !c.passed).collect();
    assert!(failed
        .iter()
        .all(|c| c.step == 4 && c.description.starts_with("PBR score")));
    assert!(log
        .checks
        .iter()
        .any(|c| c.passed && c.description.contains("adds") && c.step == 4));
}
