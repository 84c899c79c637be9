use hilfer::harness::oracle::s_alpha_gamma_oracle;
use hilfer::harness::{execute, trajectory_csv, ProblemKind, Scenario};
use hilfer::operators::{s_alpha_gamma_apply, FracParams, FractionalFamilies};
use hilfer::solver::NonlocalPoint;
use hilfer::Exec;
use proptest::prelude::*;

fn small(alpha: f64, gamma: f64, beta: f64) -> Scenario {
    Scenario {
        params: FracParams::new(alpha, gamma, beta, 1.0).unwrap(),
        modes: 4,
        nodes: 24,
        output: hilfer::harness::OutputBlock { points: 6, ..Scenario::example().output },
        ..Scenario::example()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scenario_round_trip(
        alpha in 0.1f64..0.99,
        gamma in 0.0f64..=1.0,
        beta in -0.95f64..-0.05,
        modes in 1usize..40,
        nodes in 2usize..500,
        t in proptest::collection::vec(0.01f64..1.0, 0..4),
    ) {
        let mut s = small(alpha, gamma, beta);
        s.modes = modes;
        s.nodes = nodes;
        s.output.points = modes + 3;
        s.nonlocal = t.iter().map(|&t| NonlocalPoint { t, c: 0.01 }).collect();
        let back = Scenario::parse(&s.to_toml()).unwrap();
        prop_assert_eq!(back.config_hash(), s.config_hash());
        prop_assert_eq!(back, s);
    }

    #[test]
    fn linear_solve_is_the_family_applied_to_u0(
        alpha in 0.2f64..0.95,
        gamma in 0.0f64..=1.0,
        u0 in proptest::collection::vec(-2.0f64..2.0, 4),
    ) {
        let s = Scenario { kind: ProblemKind::Linear, nonlocal: Vec::new(), u0, ..small(alpha, gamma, -0.5) };
        let (traj, report) = execute(&s, Exec::Sequential).unwrap();
        prop_assert!(report.converged && report.iterations_used == 1);
        let op = s.operator().unwrap();
        for j in 1..traj.grid.len() {
            let want = s_alpha_gamma_apply(&s.params, &op, traj.grid.t(j), &s.initial_field()).unwrap();
            prop_assert!(traj.weight(j) * traj.states[j].sub(&want).l2_norm() <= 1e-10);
        }
    }

    #[test]
    fn laplace_oracle_agrees_with_series(
        alpha in 0.2f64..0.95,
        gamma in 0.0f64..=1.0,
        lambda in 0.0f64..400.0,
        t in 0.001f64..1.0,
    ) {
        let p = FracParams::new(alpha, gamma, -0.5, 1.0).unwrap();
        let series = FractionalFamilies::new(p).unwrap().s_alpha_gamma(lambda, t).unwrap();
        let oracle = s_alpha_gamma_oracle(&p, lambda, t).unwrap();
        prop_assert!((series - oracle).abs() <= 1e-8 * series.abs().max(1e-2), "{} {}", series, oracle);
    }

    #[test]
    fn csv_independent_of_execution_strategy(
        alpha in 0.5f64..0.9,
        gamma in 0.0f64..=1.0,
        c in 0.0f64..0.1,
    ) {
        let mut s = small(alpha, gamma, -0.5);
        s.nonlocal = vec![NonlocalPoint { t: 0.4, c }];
        let (a, _) = execute(&s, Exec::Sequential).unwrap();
        let (b, _) = execute(&s, Exec::Parallel).unwrap();
        prop_assert_eq!(trajectory_csv(&s, &a).unwrap(), trajectory_csv(&s, &b).unwrap());
    }
}
