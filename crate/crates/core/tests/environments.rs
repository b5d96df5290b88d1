use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsparq::acquisition::DecisionGrid;
use wsparq::environments::{
    reward, solve_lower_level, Environment, EnvironmentKind, EnvironmentSpec, QuadraticLowerLevel, Regime,
    SolverOptions, TargetMap,
};
use wsparq::window::{next_window_length, WindowSchedule};
use wsparq::Error;

fn options(mu: f64, bound: f64) -> SolverOptions {
    SolverOptions {
        step_lipschitz: mu,
        y_low: -bound,
        y_high: bound,
        tol: 1e-10,
        max_iter: 10_000,
    }
}

#[test]
fn quadratic_argmin_matches_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let mu = rng.random_range(0.1..10.0);
        let h: Vec<f64> = (0..2).map(|_| rng.random_range(-5.0..5.0)).collect();
        let x = [rng.random::<f64>()];
        let mut opts = options(mu, 3.0);
        opts.step_lipschitz = mu * rng.random_range(1.0..4.0);
        let lower = QuadraticLowerLevel { mu, target: h.clone() };
        let y0: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
        let sol = solve_lower_level(&lower, &x, &y0, mu, &opts).unwrap();
        for (y, hi) in sol.y.iter().zip(&h) {
            assert!((y - hi.clamp(-3.0, 3.0)).abs() < 1e-6);
        }
    }
}

#[test]
fn solver_rejects_bad_curvature_and_reports_the_cap() {
    let lower = QuadraticLowerLevel {
        mu: 1.0,
        target: vec![0.5, 0.5],
    };
    assert!(matches!(
        solve_lower_level(&lower, &[0.0], &[0.0, 0.0], 0.0, &options(1.0, 3.0)),
        Err(Error::Config { .. })
    ));
    let mut opts = options(1.0, 3.0);
    opts.step_lipschitz = 1e6;
    opts.max_iter = 3;
    assert!(matches!(
        solve_lower_level(&lower, &[0.0], &[0.0, 0.0], 1.0, &opts),
        Err(Error::NonConvergence { iterations: 3, .. })
    ));
}

#[test]
fn quadratic_environment_uses_the_solver() {
    let spec = EnvironmentSpec {
        kind: EnvironmentKind::QuadraticLowerLevel {
            mu: 2.0,
            target: TargetMap::Linear,
            step_lipschitz: None,
        },
        sigma2: 0.01,
        y_bound: 3.0,
    };
    let env = Environment::new(spec, 10, 0).unwrap();
    let y = env.response(&[0.3], 4);
    assert!((y[0] - 0.3).abs() < 1e-9 && (y[1] - 0.7).abs() < 1e-9);
}

#[test]
fn window_inequality_holds_to_1e5() {
    for ratio in [0.2, 0.5, 1.0] {
        let mut s = WindowSchedule::new(1.0, ratio).unwrap();
        let starts = s.starts_up_to(100_000).to_vec();
        assert_eq!(starts[0], 1);
        for w in starts.windows(2) {
            let bound = (w[0] as f64).powf(ratio);
            let len = (w[1] - w[0]) as f64;
            assert!(bound < len && len <= bound + 1.0, "ratio {ratio}, start {}", w[0]);
            assert_eq!(w[1] - w[0], next_window_length(w[0], 1.0, ratio).unwrap());
        }
    }
}

#[test]
fn finer_grid_never_lowers_the_optimum() {
    let base = DecisionGrid::unit_interval(33).unwrap();
    let fine = base.refined(8).unwrap();
    for regime in [Regime::Stationary, Regime::Moderate, Regime::Fast] {
        let env = Environment::new(EnvironmentSpec::synthetic(regime), 50, 0).unwrap();
        for t in [1, 10, 50] {
            assert!(env.oracle_optimum(t, &fine).value >= env.oracle_optimum(t, &base).value);
        }
    }
}

#[test]
fn moderate_drift_is_bounded() {
    let grid = DecisionGrid::unit_interval(256).unwrap();
    let env = Environment::new(EnvironmentSpec::synthetic(Regime::Moderate), 301, 0).unwrap();
    for t in 0..300 {
        for x in grid.points() {
            let a = env.response(x, t);
            let b = env.response(x, t + 1);
            let d = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(d <= 0.53, "t = {t}");
        }
    }
}

#[test]
fn reward_closed_forms() {
    assert_eq!(reward(&[0.5], &[0.0, 0.0]), 0.0);
    assert_eq!(reward(&[0.0], &[1.0, 0.0]), -0.75);
    assert_eq!(reward(&[1.0], &[0.0, 0.0]), -0.25);
}
