//! Ground-truth environments.
//!
//! An [`EnvironmentSpec`] is the serializable description; [`Environment`]
//! is one realization of it (opponent-drift environments draw their type path
//! from a dedicated seeded stream so every learner faces the same path).

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::acquisition::{DecisionGrid, RewardSpec, RewardStructure};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `(sin 2πx, cos 2πx)`.
    Stationary,
    /// `(sin(2πx + 0.5t), cos(2πx − 0.03t))`.
    Moderate,
    /// Piecewise-linear tent with `0.2√t` and `0.1t` offsets.
    Fast,
}

/// Targets `h(x, t)` of the quadratic lower level `½μ‖y − h(x, t)‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "map")]
pub enum TargetMap {
    /// `(x, 1 − x)`.
    Linear,
    /// `(sin(2πx + rate·t), cos(2πx))`; `rate = 0` is stationary.
    Circle {
        #[serde(default)]
        rate: f64,
    },
}

impl TargetMap {
    pub fn eval(&self, x: &[f64], t: u64) -> Vec<f64> {
        let x0 = x[0];
        match *self {
            TargetMap::Linear => vec![x0, 1.0 - x0],
            TargetMap::Circle { rate } => {
                vec![(2.0 * PI * x0 + rate * t as f64).sin(), (2.0 * PI * x0).cos()]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EnvironmentKind {
    SyntheticBilevel {
        regime: Regime,
    },
    QuadraticLowerLevel {
        mu: f64,
        target: TargetMap,
        /// Gradient Lipschitz constant used for the solver step; defaults to `mu`.
        #[serde(default)]
        step_lipschitz: Option<f64>,
    },
    /// Synthetic stand-in for a congestion response:
    /// `g(x, θ) = sin(2πx)·(1 + 0.1‖θ‖)` with a Gaussian random-walk type `θ`.
    OpponentDrift {
        alpha: f64,
        /// Drift scale `σ` of the type increments.
        sigma: f64,
        /// Lipschitz constant `L_g` of the response in `θ`.
        #[serde(default = "default_type_lipschitz")]
        type_lipschitz: f64,
        theta0: Vec<f64>,
        #[serde(default)]
        base_response: OpponentResponse,
    },
}

/// Scalar response `g(x, θ)` of the opponent-drift environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpponentResponse {
    /// `sin(2πx)·(1 + L_g‖θ‖)`; the best action stays at `x = 0.5`.
    #[default]
    ScaledSine,
    /// `sin(2πx + L_g·θ_0)`; the best action moves with the type.
    PhaseShift,
}

impl OpponentResponse {
    pub fn eval(&self, x: f64, theta: &[f64], type_lipschitz: f64) -> f64 {
        match self {
            OpponentResponse::ScaledSine => {
                let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
                (2.0 * PI * x).sin() * (1.0 + type_lipschitz * norm)
            }
            OpponentResponse::PhaseShift => (2.0 * PI * x + type_lipschitz * theta[0]).sin(),
        }
    }
}

fn default_type_lipschitz() -> f64 {
    0.1
}

fn default_sigma2() -> f64 {
    0.01
}

fn default_y_bound() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    #[serde(flatten)]
    pub kind: EnvironmentKind,
    /// Observation noise variance per output coordinate.
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    /// Half-width of the lower-level box `𝒴 = [−b, b]^m`.
    #[serde(default = "default_y_bound")]
    pub y_bound: f64,
}

impl EnvironmentSpec {
    pub fn synthetic(regime: Regime) -> Self {
        EnvironmentSpec {
            kind: EnvironmentKind::SyntheticBilevel { regime },
            sigma2: default_sigma2(),
            y_bound: default_y_bound(),
        }
    }

    pub fn with_sigma2(mut self, sigma2: f64) -> Self {
        self.sigma2 = sigma2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::config("environment.sigma2", "must be positive"));
        }
        if !(self.y_bound > 0.0) {
            return Err(Error::config("environment.y_bound", "must be positive"));
        }
        match &self.kind {
            EnvironmentKind::SyntheticBilevel { .. } => {}
            EnvironmentKind::QuadraticLowerLevel { mu, step_lipschitz, .. } => {
                if !(*mu > 0.0) {
                    return Err(Error::config("environment.mu", "strong convexity modulus must be positive"));
                }
                if let Some(l) = step_lipschitz {
                    if !(*l >= *mu) {
                        return Err(Error::config("environment.step_lipschitz", "must be at least mu"));
                    }
                }
            }
            EnvironmentKind::OpponentDrift {
                alpha,
                sigma,
                type_lipschitz,
                theta0,
                ..
            } => {
                if !(*alpha >= 0.0) {
                    return Err(Error::config("environment.alpha", "must be non-negative"));
                }
                if !(*sigma >= 0.0) {
                    return Err(Error::config("environment.sigma", "must be non-negative"));
                }
                if !(*type_lipschitz > 0.0) {
                    return Err(Error::config("environment.type_lipschitz", "must be positive"));
                }
                if theta0.is_empty() {
                    return Err(Error::config("environment.theta0", "must be non-empty"));
                }
            }
        }
        Ok(())
    }

    /// Drift exponent `α`; 0 for time-invariant environments.
    pub fn alpha(&self) -> f64 {
        match &self.kind {
            EnvironmentKind::SyntheticBilevel { regime } => match regime {
                Regime::Stationary => 0.0,
                Regime::Moderate | Regime::Fast => 1.0,
            },
            EnvironmentKind::QuadraticLowerLevel { target, .. } => match target {
                TargetMap::Circle { rate } if *rate != 0.0 => 1.0,
                _ => 0.0,
            },
            EnvironmentKind::OpponentDrift { alpha, sigma, .. } => {
                if *sigma == 0.0 {
                    0.0
                } else {
                    *alpha
                }
            }
        }
    }

    pub fn input_dim(&self) -> usize {
        1
    }

    pub fn output_dim(&self) -> usize {
        match self.kind {
            EnvironmentKind::OpponentDrift { .. } => 1,
            _ => 2,
        }
    }

    pub fn is_sequential_game(&self) -> bool {
        matches!(self.kind, EnvironmentKind::OpponentDrift { .. })
    }

    pub fn reward(&self) -> RewardSpec {
        benchmark_reward(self.y_bound)
    }
}

/// `f(x, y) = −(x − 0.5)² − ½‖y‖²`.
///
/// On `x ∈ [0, 1]`, `‖y‖∞ ≤ y_bound` the ℓ1-Lipschitz constant is
/// `max(1, y_bound)`.
pub fn benchmark_reward(y_bound: f64) -> RewardSpec {
    RewardSpec::new(
        Arc::new(|x: &[f64], y: &[f64]| reward(x, y)),
        RewardStructure::SeparableConcaveInY {
            maximizer: Arc::new(|_, _| 0.0),
        },
        y_bound.max(1.0),
    )
}

pub fn reward(x: &[f64], y: &[f64]) -> f64 {
    let dx: f64 = x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum();
    -dx - 0.5 * y.iter().map(|v| v * v).sum::<f64>()
}

fn synthetic_response(regime: Regime, x: f64, t: u64) -> Vec<f64> {
    let t = t as f64;
    match regime {
        Regime::Stationary => vec![(2.0 * PI * x).sin(), (2.0 * PI * x).cos()],
        Regime::Moderate => vec![(2.0 * PI * x + 0.5 * t).sin(), (2.0 * PI * x - 0.03 * t).cos()],
        Regime::Fast => {
            let (a, b) = (0.2 * t.sqrt(), 0.1 * t);
            if x < 0.5 {
                vec![2.0 * x + a, -2.0 * x + b]
            } else {
                vec![-2.0 * x + 2.0 + a, 2.0 * x - 2.0 + b]
            }
        }
    }
}

/// One realization of an environment over `t = 0..=horizon`.
#[derive(Debug, Clone)]
pub struct Environment {
    spec: EnvironmentSpec,
    thetas: Vec<Vec<f64>>,
}

impl Environment {
    /// `seed` drives the opponent type path and is unused otherwise.
    pub fn new(spec: EnvironmentSpec, horizon: u64, seed: u64) -> Result<Self> {
        spec.validate()?;
        let thetas = match &spec.kind {
            EnvironmentKind::OpponentDrift {
                alpha,
                sigma,
                type_lipschitz,
                theta0,
                ..
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut path = Vec::with_capacity(horizon as usize + 1);
                path.push(theta0.clone());
                for _ in 0..horizon {
                    let prev = path.last().unwrap();
                    path.push(drift_opponent(prev, 1, *alpha, *sigma, *type_lipschitz, &mut rng));
                }
                path
            }
            _ => Vec::new(),
        };
        Ok(Environment { spec, thetas })
    }

    pub fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    pub fn alpha(&self) -> f64 {
        self.spec.alpha()
    }

    pub fn sigma2(&self) -> f64 {
        self.spec.sigma2
    }

    pub fn output_dim(&self) -> usize {
        self.spec.output_dim()
    }

    pub fn input_dim(&self) -> usize {
        self.spec.input_dim()
    }

    pub fn reward(&self) -> RewardSpec {
        self.spec.reward()
    }

    /// Opponent type at time `t`, for sequential-game environments.
    pub fn theta(&self, t: u64) -> Option<&[f64]> {
        self.thetas.get(t as usize).map(Vec::as_slice)
    }

    /// Noiseless response `g̃_t(x)`.
    pub fn response(&self, x: &[f64], t: u64) -> Vec<f64> {
        match &self.spec.kind {
            EnvironmentKind::SyntheticBilevel { regime } => synthetic_response(*regime, x[0], t),
            EnvironmentKind::QuadraticLowerLevel {
                mu,
                target,
                step_lipschitz,
            } => {
                let lower = QuadraticLowerLevel {
                    mu: *mu,
                    target: target.eval(x, t),
                };
                let opts = SolverOptions {
                    step_lipschitz: step_lipschitz.unwrap_or(*mu),
                    y_low: -self.spec.y_bound,
                    y_high: self.spec.y_bound,
                    tol: 1e-10,
                    max_iter: 100_000,
                };
                solve_lower_level(&lower, x, &[0.0, 0.0], *mu, &opts)
                    .expect("validated strongly convex quadratic always converges")
                    .y
            }
            EnvironmentKind::OpponentDrift {
                type_lipschitz,
                base_response,
                ..
            } => {
                let theta = self
                    .theta(t)
                    .unwrap_or_else(|| panic!("time {t} beyond the realized opponent path"));
                vec![base_response.eval(x[0], theta, *type_lipschitz)]
            }
        }
    }

    /// Response plus independent `N(0, σ²)` noise per coordinate.
    pub fn observe<R: Rng + ?Sized>(&self, x: &[f64], t: u64, rng: &mut R) -> Vec<f64> {
        let sd = self.spec.sigma2.sqrt();
        self.response(x, t)
            .into_iter()
            .map(|v| v + sd * rng.sample::<f64, _>(StandardNormal))
            .collect()
    }

    /// Best grid action for `f(x, g̃_t(x))`; lowest index wins ties.
    pub fn oracle_optimum(&self, t: u64, grid: &DecisionGrid) -> Optimum {
        let reward = self.reward();
        let mut best = Optimum {
            index: 0,
            point: Vec::new(),
            value: f64::NEG_INFINITY,
        };
        for (i, x) in grid.points().iter().enumerate() {
            let v = reward.eval(x, &self.response(x, t));
            if v > best.value {
                best = Optimum {
                    index: i,
                    point: x.clone(),
                    value: v,
                };
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub index: usize,
    pub point: Vec<f64>,
    pub value: f64,
}

/// `θ_prev + N(0, (σ²/L_g²)·dt^α)` per coordinate.
pub fn drift_opponent<R: Rng + ?Sized>(
    theta_prev: &[f64],
    dt: u64,
    alpha: f64,
    sigma: f64,
    type_lipschitz: f64,
    rng: &mut R,
) -> Vec<f64> {
    if dt == 0 || sigma == 0.0 {
        return theta_prev.to_vec();
    }
    let sd = sigma / type_lipschitz * (dt as f64).powf(alpha / 2.0);
    theta_prev
        .iter()
        .map(|v| v + sd * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Lower-level objective `g(x, ·)` with its gradient in `y`.
pub trait LowerLevel {
    fn value(&self, x: &[f64], y: &[f64]) -> f64;
    fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64>;
}

/// `½μ‖y − h‖²` for a fixed target `h` (already evaluated at `(x, t)`).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLowerLevel {
    pub mu: f64,
    pub target: Vec<f64>,
}

impl LowerLevel for QuadraticLowerLevel {
    fn value(&self, _x: &[f64], y: &[f64]) -> f64 {
        0.5 * self.mu * y.iter().zip(&self.target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
    }

    fn grad_y(&self, _x: &[f64], y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.target).map(|(a, b)| self.mu * (a - b)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Gradient Lipschitz constant `L`; the step is `1/L`.
    pub step_lipschitz: f64,
    pub y_low: f64,
    pub y_high: f64,
    /// Stop once the projected-gradient norm `L‖y − P(y − ∇g/L)‖` is at most this.
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerLevelSolution {
    pub y: Vec<f64>,
    pub iterations: usize,
}

/// Projected gradient descent on a `mu`-strongly convex lower level over a box.
pub fn solve_lower_level(
    g: &dyn LowerLevel,
    x: &[f64],
    y0: &[f64],
    mu: f64,
    opts: &SolverOptions,
) -> Result<LowerLevelSolution> {
    if !(mu > 0.0) {
        return Err(Error::config("mu", "strong convexity modulus must be positive"));
    }
    if !(opts.step_lipschitz >= mu) {
        return Err(Error::config("step_lipschitz", "must be at least mu"));
    }
    let l = opts.step_lipschitz;
    let project = |v: f64| v.clamp(opts.y_low, opts.y_high);
    let mut y: Vec<f64> = y0.iter().map(|&v| project(v)).collect();
    let mut residual = f64::INFINITY;
    for iteration in 1..=opts.max_iter {
        let grad = g.grad_y(x, &y);
        let next: Vec<f64> = y.iter().zip(&grad).map(|(v, gv)| project(v - gv / l)).collect();
        residual = l * next
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        y = next;
        if residual <= opts.tol {
            return Ok(LowerLevelSolution { y, iterations: iteration });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(regime: Regime) -> Environment {
        Environment::new(EnvironmentSpec::synthetic(regime), 300, 0).unwrap()
    }

    fn opts(l: f64) -> SolverOptions {
        SolverOptions {
            step_lipschitz: l,
            y_low: -3.0,
            y_high: 3.0,
            tol: 1e-10,
            max_iter: 10_000,
        }
    }

    #[test]
    fn regime_formulas() {
        let s = env(Regime::Stationary).response(&[0.0], 17);
        assert!(s[0].abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15);
        assert_eq!(env(Regime::Moderate).response(&[0.0], 0), vec![0.0, 1.0]);
        assert_eq!(env(Regime::Fast).response(&[0.25], 0), vec![0.5, -0.5]);
        let f = env(Regime::Fast).response(&[0.75], 4);
        assert!((f[0] - (0.5 + 0.4)).abs() < 1e-15 && (f[1] - (-0.5 + 0.4)).abs() < 1e-15);
    }

    #[test]
    fn reward_formula() {
        assert_eq!(reward(&[0.5], &[0.0, 0.0]), 0.0);
        assert_eq!(reward(&[0.0], &[1.0, 0.0]), -0.75);
        assert_eq!(reward(&[1.0], &[0.0, 0.0]), -0.25);
    }

    #[test]
    fn alpha_reporting() {
        assert_eq!(EnvironmentSpec::synthetic(Regime::Stationary).alpha(), 0.0);
        assert_eq!(EnvironmentSpec::synthetic(Regime::Moderate).alpha(), 1.0);
        assert_eq!(EnvironmentSpec::synthetic(Regime::Fast).alpha(), 1.0);
    }

    #[test]
    fn stationary_is_time_invariant() {
        let e = env(Regime::Stationary);
        for i in 0..50 {
            let x = [i as f64 / 49.0];
            for t in [1, 10, 299] {
                assert_eq!(e.response(&x, t), e.response(&x, 0));
            }
        }
    }

    #[test]
    fn moderate_drift_is_bounded() {
        let e = env(Regime::Moderate);
        let grid = DecisionGrid::unit_interval(256).unwrap();
        for t in 0..300 {
            for x in grid.points() {
                let a = e.response(x, t);
                let b = e.response(x, t + 1);
                let d = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
                assert!(d <= 0.53);
            }
        }
    }

    #[test]
    fn observation_noise() {
        let e = Environment::new(EnvironmentSpec::synthetic(Regime::Moderate).with_sigma2(1e-300), 10, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = e.observe(&[0.3], 4, &mut rng);
        let r = e.response(&[0.3], 4);
        assert!(y.iter().zip(&r).all(|(a, b)| (a - b).abs() < 1e-140));

        let e = env(Regime::Stationary);
        let a = e.observe(&[0.3], 1, &mut ChaCha8Rng::seed_from_u64(7));
        let b = e.observe(&[0.3], 1, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 10_000;
        let r = e.response(&[0.3], 1);
        let devs: Vec<f64> = (0..n).map(|_| e.observe(&[0.3], 1, &mut rng)[0] - r[0]).collect();
        let mean = devs.iter().sum::<f64>() / n as f64;
        let var = devs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1) as f64;
        assert!((var / e.sigma2() - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn stationary_oracle_is_center() {
        let e = env(Regime::Stationary);
        let grid = DecisionGrid::unit_interval(101).unwrap();
        let o = e.oracle_optimum(5, &grid);
        assert_eq!(o.point, vec![0.5]);
        assert!((o.value + 0.5).abs() < 1e-12);
    }

    #[test]
    fn finer_grid_never_worse() {
        for regime in [Regime::Stationary, Regime::Moderate, Regime::Fast] {
            let e = env(regime);
            let coarse = DecisionGrid::unit_interval(33).unwrap();
            let fine = coarse.refined(4).unwrap();
            for t in [0, 3, 50, 299] {
                assert!(e.oracle_optimum(t, &fine).value >= e.oracle_optimum(t, &coarse).value);
            }
        }
    }

    #[test]
    fn fast_oracle_matches_brute_force() {
        let e = env(Regime::Fast);
        let grid = DecisionGrid::unit_interval(64).unwrap();
        let o = e.oracle_optimum(0, &grid);
        let brute = grid
            .points()
            .iter()
            .map(|p| {
                let x = p[0];
                let y = if x < 0.5 { [2.0 * x, -2.0 * x] } else { [2.0 - 2.0 * x, 2.0 * x - 2.0] };
                -(x - 0.5) * (x - 0.5) - 0.5 * (y[0] * y[0] + y[1] * y[1])
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(o.value, brute);
    }

    #[test]
    fn reward_lipschitz_metadata_bounds_slopes() {
        let f = benchmark_reward(3.0);
        let grid = DecisionGrid::unit_interval(101).unwrap();
        let e = env(Regime::Stationary);
        let h = 1e-6;
        for x in grid.points() {
            let y = e.response(x, 0);
            let dx = (f.eval(&[x[0] + h], &y) - f.eval(x, &y)).abs() / h;
            let dy: f64 = (0..2)
                .map(|i| {
                    let mut yp = y.clone();
                    yp[i] += h;
                    (f.eval(x, &yp) - f.eval(x, &y)).abs() / h
                })
                .fold(0.0, f64::max);
            assert!(dx <= f.lipschitz + 1e-4 && dy <= f.lipschitz + 1e-4);
        }
    }

    #[test]
    fn quadratic_argmin() {
        let x = [0.3];
        let lower = QuadraticLowerLevel {
            mu: 2.0,
            target: TargetMap::Linear.eval(&x, 0),
        };
        let sol = solve_lower_level(&lower, &x, &[0.0, 0.0], 2.0, &opts(5.0)).unwrap();
        assert!((sol.y[0] - 0.3).abs() < 1e-9 && (sol.y[1] - 0.7).abs() < 1e-9);

        let sol = solve_lower_level(&lower, &x, &[0.3, 0.7], 2.0, &opts(5.0)).unwrap();
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.y, vec![0.3, 0.7]);

        let outside = QuadraticLowerLevel {
            mu: 1.0,
            target: vec![4.5, -0.5],
        };
        let sol = solve_lower_level(&outside, &x, &[0.0, 0.0], 1.0, &opts(3.0)).unwrap();
        assert!((sol.y[0] - 3.0).abs() < 1e-9 && (sol.y[1] + 0.5).abs() < 1e-9);
    }

    #[test]
    fn solver_rejects_bad_setup_and_reports_stalls() {
        let lower = QuadraticLowerLevel {
            mu: 1.0,
            target: vec![0.5],
        };
        assert!(solve_lower_level(&lower, &[0.0], &[0.0], 0.0, &opts(1.0)).is_err());
        assert!(solve_lower_level(&lower, &[0.0], &[0.0], 2.0, &opts(1.0)).is_err());
        let mut o = opts(1e6);
        o.max_iter = 3;
        assert!(matches!(
            solve_lower_level(&lower, &[0.0], &[0.0], 1.0, &o),
            Err(Error::NonConvergence { iterations: 3, .. })
        ));
    }

    #[test]
    fn quadratic_environment_uses_solver() {
        let spec = EnvironmentSpec {
            kind: EnvironmentKind::QuadraticLowerLevel {
                mu: 2.0,
                target: TargetMap::Circle { rate: 0.0 },
                step_lipschitz: Some(4.0),
            },
            sigma2: 0.01,
            y_bound: 3.0,
        };
        let e = Environment::new(spec, 10, 0).unwrap();
        let s = env(Regime::Stationary);
        for x in [[0.0], [0.13], [0.77]] {
            let a = e.response(&x, 3);
            let b = s.response(&x, 3);
            assert!(a.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-9));
        }
    }

    #[test]
    fn drift_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(drift_opponent(&[1.0, 2.0], 0, 1.0, 0.5, 0.1, &mut rng), vec![1.0, 2.0]);

        let n = 10_000;
        let (alpha, sigma, lg) = (0.7, 0.3, 0.5);
        let dt = 3;
        let samples: Vec<f64> = (0..n)
            .map(|_| drift_opponent(&[0.0], dt, alpha, sigma, lg, &mut rng)[0])
            .collect();
        let var = samples.iter().map(|v| v * v).sum::<f64>() / n as f64;
        let expected = sigma * sigma / (lg * lg) * (dt as f64).powf(alpha);
        assert!((var / expected - 1.0).abs() < 0.05, "{var} vs {expected}");

        let two_step: Vec<f64> = (0..n)
            .map(|_| {
                let a = drift_opponent(&[0.0], 2, 1.0, sigma, lg, &mut rng);
                drift_opponent(&a, 5, 1.0, sigma, lg, &mut rng)[0]
            })
            .collect();
        let var = two_step.iter().map(|v| v * v).sum::<f64>() / n as f64;
        let expected = sigma * sigma / (lg * lg) * 7.0;
        assert!((var / expected - 1.0).abs() < 0.05, "{var} vs {expected}");
    }

    #[test]
    fn frozen_opponent_has_constant_type() {
        let spec = EnvironmentSpec {
            kind: EnvironmentKind::OpponentDrift {
                alpha: 1.0,
                sigma: 0.0,
                type_lipschitz: 0.1,
                theta0: vec![3.0, 4.0],
                base_response: OpponentResponse::ScaledSine,
            },
            sigma2: 0.01,
            y_bound: 3.0,
        };
        assert_eq!(spec.alpha(), 0.0);
        let e = Environment::new(spec, 20, 9).unwrap();
        assert_eq!(e.theta(20), Some(&[3.0, 4.0][..]));
        let y = e.response(&[0.25], 7);
        assert!((y[0] - 1.5).abs() < 1e-12);
    }
}
