use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{build_learner, AlgorithmConfig, Learner, StepOutcome};
use crate::acquisition::DecisionGrid;
use crate::environments::Environment;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: u64,
    pub window_id: usize,
    pub action: Vec<f64>,
    pub observation: Vec<f64>,
    pub instant_regret: f64,
    pub cumulative_regret: f64,
    /// Cumulative additional queries `N_t`.
    pub queries: u64,
    pub beta: f64,
    pub theta: Option<Vec<f64>>,
}

/// Per-step dynamic-regret record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub rows: Vec<TraceRow>,
}

impl RegretTrace {
    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    pub fn final_regret(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cumulative_regret)
    }

    pub fn final_queries(&self) -> u64 {
        self.rows.last().map_or(0, |r| r.queries)
    }

    /// `R_t` at 1-based time `t`.
    pub fn regret_at(&self, t: usize) -> f64 {
        self.rows[t - 1].cumulative_regret
    }
}

/// Runs `config` for `horizon` steps with a learner stream seeded by `seed`.
///
/// Regret is measured on noiseless values:
/// `r_t = f(x*_t, g̃_t(x*_t)) − f(x_t, g̃_t(x_t))` with `x*_t` the grid oracle.
pub fn run_episode(
    config: &AlgorithmConfig,
    env: &Environment,
    kernel: KernelSpec,
    grid: &DecisionGrid,
    horizon: u64,
    seed: u64,
) -> Result<RegretTrace> {
    let mut learner = build_learner(config, env, kernel, grid)?;
    run_policy(learner.as_mut(), env, grid, horizon, seed)
}

/// Drives any [`Learner`] and accounts dynamic regret.
pub fn run_policy(
    learner: &mut dyn Learner,
    env: &Environment,
    grid: &DecisionGrid,
    horizon: u64,
    seed: u64,
) -> Result<RegretTrace> {
    if horizon == 0 {
        return Err(Error::config("horizon", "must be at least 1"));
    }
    let reward = env.reward();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(horizon as usize);
    let mut cumulative = 0.0;
    let mut queries = 0;
    for t in 1..=horizon {
        let StepOutcome {
            action,
            observation,
            beta,
            queries: spent,
            window_id,
            theta,
        } = learner.step(env, t, &mut rng)?;
        let best = env.oracle_optimum(t, grid);
        let instant_regret = best.value - reward.eval(&action, &env.response(&action, t));
        cumulative += instant_regret;
        queries += spent;
        rows.push(TraceRow {
            t,
            window_id,
            action,
            observation,
            instant_regret,
            cumulative_regret: cumulative,
            queries,
            beta,
            theta,
        });
    }
    Ok(RegretTrace { rows })
}
