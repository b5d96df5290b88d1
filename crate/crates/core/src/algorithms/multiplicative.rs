//! HEDGE and EXP3 over the decision-grid arms.
//!
//! Both keep log-weights and update `w_i ← w_i · exp(η · r̂_i)`. HEDGE sees
//! the true reward `f(x_i, g̃_t(x_i))` of every arm; EXP3 sees only the noisy
//! reward of the arm it played and uses the importance-weighted estimate
//! `r̂_i = r / p_i` for that arm.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Learner, StepOutcome};
use crate::acquisition::{DecisionGrid, RewardSpec};
use crate::environments::Environment;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeWeights {
    log_weights: Vec<f64>,
    eta: f64,
}

impl MultiplicativeWeights {
    pub fn uniform(arms: usize, eta: f64) -> Self {
        MultiplicativeWeights {
            log_weights: vec![0.0; arms],
            eta,
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_weights.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Multiplies arm `i`'s weight by `exp(η · rewards[i])`.
    pub fn update(&mut self, rewards: &[f64]) {
        for (l, r) in self.log_weights.iter_mut().zip(rewards) {
            *l += self.eta * r;
        }
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for l in &mut self.log_weights {
            *l -= max;
        }
    }

    pub fn update_one(&mut self, arm: usize, reward: f64) {
        let mut rewards = vec![0.0; self.log_weights.len()];
        rewards[arm] = reward;
        self.update(&rewards);
    }
}

fn sample(probabilities: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probabilities.len() - 1
}

#[derive(Debug, Clone)]
pub struct Hedge {
    grid: DecisionGrid,
    reward: RewardSpec,
    weights: MultiplicativeWeights,
}

impl Hedge {
    pub fn new(grid: DecisionGrid, reward: RewardSpec, eta: f64) -> Self {
        let weights = MultiplicativeWeights::uniform(grid.len(), eta);
        Hedge { grid, reward, weights }
    }

    pub fn weights(&self) -> &MultiplicativeWeights {
        &self.weights
    }
}

impl Learner for Hedge {
    fn step(&mut self, env: &Environment, t: u64, rng: &mut ChaCha8Rng) -> Result<StepOutcome> {
        let arm = sample(&self.weights.probabilities(), rng);
        let action = self.grid.points()[arm].clone();
        let observation = env.observe(&action, t, rng);
        let rewards: Vec<f64> = self
            .grid
            .points()
            .iter()
            .map(|x| self.reward.eval(x, &env.response(x, t)))
            .collect();
        self.weights.update(&rewards);
        Ok(StepOutcome {
            action,
            observation,
            beta: 0.0,
            queries: 0,
            window_id: 0,
            theta: None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Exp3 {
    grid: DecisionGrid,
    reward: RewardSpec,
    weights: MultiplicativeWeights,
    exploration: f64,
}

impl Exp3 {
    pub fn new(grid: DecisionGrid, reward: RewardSpec, eta: f64, exploration: f64) -> Self {
        let weights = MultiplicativeWeights::uniform(grid.len(), eta);
        Exp3 {
            grid,
            reward,
            weights,
            exploration,
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let k = self.grid.len() as f64;
        self.weights
            .probabilities()
            .into_iter()
            .map(|p| (1.0 - self.exploration) * p + self.exploration / k)
            .collect()
    }
}

impl Learner for Exp3 {
    fn step(&mut self, env: &Environment, t: u64, rng: &mut ChaCha8Rng) -> Result<StepOutcome> {
        let probabilities = self.probabilities();
        let arm = sample(&probabilities, rng);
        let action = self.grid.points()[arm].clone();
        let observation = env.observe(&action, t, rng);
        let r = self.reward.eval(&action, &observation);
        self.weights.update_one(arm, r / probabilities[arm]);
        Ok(StepOutcome {
            action,
            observation,
            beta: 0.0,
            queries: 0,
            window_id: 0,
            theta: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{Environment, EnvironmentSpec, Regime};
    use rand::SeedableRng;

    #[test]
    fn constant_gap_gives_exponential_ratio() {
        let (eta, gap, n) = (0.05, 0.3, 40);
        let mut mw = MultiplicativeWeights::uniform(2, eta);
        for _ in 0..n {
            mw.update(&[-1.0, -1.0 - gap]);
        }
        let p = mw.probabilities();
        let ratio = p[0] / p[1];
        assert!((ratio / (eta * gap * n as f64).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_learning_rate_keeps_uniform_play() {
        let env = Environment::new(EnvironmentSpec::synthetic(Regime::Fast), 50, 0).unwrap();
        let grid = DecisionGrid::unit_interval(8).unwrap();
        let mut hedge = Hedge::new(grid.clone(), env.reward(), 0.0);
        let mut exp3 = Exp3::new(grid, env.reward(), 0.0, 0.2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for t in 1..=50 {
            hedge.step(&env, t, &mut rng).unwrap();
            exp3.step(&env, t, &mut rng).unwrap();
            assert!(hedge.weights().probabilities().iter().all(|p| (p - 0.125).abs() < 1e-15));
            assert!(exp3.probabilities().iter().all(|p| (p - 0.125).abs() < 1e-15));
        }
    }

    #[test]
    fn first_action_is_a_uniform_draw() {
        let env = Environment::new(EnvironmentSpec::synthetic(Regime::Stationary), 1, 0).unwrap();
        let grid = DecisionGrid::unit_interval(4).unwrap();
        let mut counts = [0usize; 4];
        for seed in 0..4000 {
            let mut hedge = Hedge::new(grid.clone(), env.reward(), 1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = hedge.step(&env, 1, &mut rng).unwrap().action[0];
            counts[(a * 3.0).round() as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 / 1000.0 - 1.0).abs() < 0.1, "{counts:?}");
        }
    }

    #[test]
    fn hedge_concentrates_on_the_best_arm() {
        let env = Environment::new(EnvironmentSpec::synthetic(Regime::Stationary), 200, 0).unwrap();
        let grid = DecisionGrid::unit_interval(11).unwrap();
        let mut hedge = Hedge::new(grid, env.reward(), 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for t in 1..=200 {
            hedge.step(&env, t, &mut rng).unwrap();
        }
        let p = hedge.weights().probabilities();
        assert!(p[5] > 0.9, "{p:?}");
    }
}
