mod common;

use psro::game::{fixture_game, generate_random_game, Fixture, NormalFormGame};
use psro::graph::PopulationMode;
use psro::metrics::nashconv;
use psro::solvers::{
    first_equilibrium, project_lower_bounded_simplex, solve, solve_matrix_game, MetaSolverConfig,
    PrdConfig,
};
use rand::Rng;

fn zero_sum(seed: u64, rows: usize, cols: usize) -> NormalFormGame<f64> {
    let mut r = common::rng(seed);
    let a: Vec<f64> = (0..rows * cols)
        .map(|_| r.random_range(-1.0..1.0))
        .collect();
    let b = a.iter().map(|x| -x).collect();
    NormalFormGame::new(vec![rows, cols], vec![a, b]).unwrap()
}

fn all_solvers() -> Vec<MetaSolverConfig> {
    vec![
        MetaSolverConfig::Uniform,
        MetaSolverConfig::NashLp,
        MetaSolverConfig::NashSupportEnum { max_support: 6 },
        MetaSolverConfig::alpharank_tolerant(),
        MetaSolverConfig::Prd(PrdConfig {
            iterations: 5000,
            ..Default::default()
        }),
    ]
}

#[test]
fn outputs_are_distributions() {
    for seed in 0..20 {
        let g = zero_sum(seed, 2 + seed as usize % 4, 3 + seed as usize % 3);
        for cfg in all_solvers() {
            let d = solve(&g, PopulationMode::Multi, &cfg).unwrap();
            for m in &d.marginals {
                assert!(m.iter().all(|&x| x >= 0.0), "{}: {m:?}", cfg.name());
                assert!(
                    (m.iter().sum::<f64>() - 1.0).abs() < 1e-10,
                    "{}: {m:?}",
                    cfg.name()
                );
            }
        }
    }
}

#[test]
fn lp_solution_has_zero_nashconv() {
    for seed in 0..100 {
        let g = zero_sum(seed, 1 + seed as usize % 7, 1 + seed as usize % 5);
        let d = solve(&g, PopulationMode::Multi, &MetaSolverConfig::NashLp).unwrap();
        let nc = nashconv(&g, &d.profile(2)).unwrap();
        assert!(nc < 1e-8, "seed {seed}: NashConv {nc:e}");
        let sol = solve_matrix_game(&g).unwrap();
        let v = g.expected_payoffs(&d.profile(2)).unwrap()[0];
        assert!((v - sol.value).abs() < 1e-9);
    }
}

#[test]
fn support_enumeration_finds_equilibria_of_general_sum_games() {
    for seed in 0..50 {
        let g: NormalFormGame<f64> = generate_random_game(4, 2, seed).unwrap();
        let eq = first_equilibrium(&g, 4, false).unwrap();
        let d = solve(
            &g,
            PopulationMode::Multi,
            &MetaSolverConfig::NashSupportEnum { max_support: 4 },
        )
        .unwrap();
        assert_eq!(d.marginals, vec![eq.row.clone(), eq.col.clone()]);
        assert!(nashconv(&g, &d.profile(2)).unwrap() < 1e-8, "seed {seed}");
    }
}

#[test]
fn projection_respects_bounds() {
    let mut r = common::rng(17);
    for _ in 0..1000 {
        let n = r.random_range(1..=12);
        let v: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let gamma = r.random_range(0.0..0.5);
        let lb = gamma / (n as f64 + 1.0);
        let p = project_lower_bounded_simplex(&v, lb);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(p.iter().all(|&x| x >= lb - 1e-12));
    }
}

#[test]
fn prd_output_stays_above_the_exploration_floor() {
    let gamma = 0.05;
    for seed in 0..10 {
        let g = zero_sum(seed, 4, 4);
        let cfg = MetaSolverConfig::Prd(PrdConfig {
            gamma,
            iterations: 2000,
            ..Default::default()
        });
        let d = solve(&g, PopulationMode::Multi, &cfg).unwrap();
        for m in &d.marginals {
            assert!(m.iter().all(|&x| x >= gamma / 5.0 - 1e-12), "{m:?}");
            assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn alpharank_puts_all_mass_on_a_unique_pure_sink() {
    let pd: NormalFormGame<f64> = fixture_game(&Fixture::PrisonersDilemma).unwrap();
    let d = solve(&pd, PopulationMode::Multi, &MetaSolverConfig::alpharank()).unwrap();
    let joint = d.joint.unwrap();
    // Strategy 0 is defect.
    assert!((joint[pd.flat_index(&[0, 0])] - 1.0).abs() < 1e-6);
}

#[test]
fn solvers_are_deterministic() {
    let g = zero_sum(3, 5, 5);
    for cfg in all_solvers() {
        let a = solve(&g, PopulationMode::Multi, &cfg).unwrap();
        let b = solve(&g, PopulationMode::Multi, &cfg).unwrap();
        assert_eq!(a, b, "{}", cfg.name());
    }
}

#[test]
fn lp_rejects_general_sum_games() {
    let chicken: NormalFormGame<f64> = fixture_game(&Fixture::Chicken).unwrap();
    assert!(solve(&chicken, PopulationMode::Multi, &MetaSolverConfig::NashLp).is_err());
}
