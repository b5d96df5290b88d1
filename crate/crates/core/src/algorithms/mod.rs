//! Step-wise learners and the episode driver.

mod episode;
mod gp_learner;
mod multiplicative;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::DecisionGrid;
use crate::environments::Environment;
use crate::error::{Error, Result};
use crate::gp::{BetaDenominator, BetaParams};
use crate::kernels::KernelSpec;

pub use episode::{run_episode, run_policy, RegretTrace, TraceRow};
pub use gp_learner::{query_schedule, GpLearner};
pub use multiplicative::{Exp3, Hedge, MultiplicativeWeights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    /// Scalar-response GP-UCB composed with the optimistic reward box.
    GpUcb,
    /// Time-invariant optimistic bilevel learner over all history.
    GpUcbl,
    /// Windowed sparse-query bilevel learner.
    WsparqBl,
    /// Windowed sparse-query learner for sequential games (records `θ_t`).
    WsparqSeqgame,
    Hedge,
    Exp3,
}

impl AlgorithmKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmKind::GpUcb => "gp_ucb",
            AlgorithmKind::GpUcbl => "gp_ucbl",
            AlgorithmKind::WsparqBl => "wsparq_bl",
            AlgorithmKind::WsparqSeqgame => "wsparq_seqgame",
            AlgorithmKind::Hedge => "hedge",
            AlgorithmKind::Exp3 => "exp3",
        }
    }

    pub fn is_windowed(&self) -> bool {
        matches!(self, AlgorithmKind::WsparqBl | AlgorithmKind::WsparqSeqgame)
    }

    pub fn is_gp(&self) -> bool {
        !matches!(self, AlgorithmKind::Hedge | AlgorithmKind::Exp3)
    }
}

/// Where window-start re-queries are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundSet {
    /// Inputs in the current windowed dataset.
    #[default]
    Window,
    /// Every distinct input played so far.
    FullHistory,
}

fn default_delta() -> f64 {
    0.1
}

fn default_rkhs_bound() -> f64 {
    2.0
}

fn default_budget_scale() -> f64 {
    1.0
}

fn default_eta() -> f64 {
    0.1
}

fn default_exploration() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub kind: AlgorithmKind,
    /// Label used in output file names; defaults to the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_rkhs_bound")]
    pub rkhs_bound: f64,
    #[serde(default)]
    pub beta_denominator: BetaDenominator,
    /// Window exponent `α̃` (windowed learners only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_tilde: Option<f64>,
    /// Drift exponent assumed by the learner; defaults to the environment's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Base noise variance assumed by the learner; defaults to the environment's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_var: Option<f64>,
    #[serde(default = "default_budget_scale")]
    pub query_budget_scale: f64,
    #[serde(default)]
    pub dpp_ground_set: GroundSet,
    /// Learning rate of HEDGE / EXP3.
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Uniform exploration mix of EXP3.
    #[serde(default = "default_exploration")]
    pub exploration: f64,
}

impl AlgorithmConfig {
    pub fn new(kind: AlgorithmKind) -> Self {
        AlgorithmConfig {
            kind,
            name: None,
            delta: default_delta(),
            rkhs_bound: default_rkhs_bound(),
            beta_denominator: BetaDenominator::default(),
            alpha_tilde: None,
            alpha: None,
            noise_var: None,
            query_budget_scale: default_budget_scale(),
            dpp_ground_set: GroundSet::default(),
            eta: default_eta(),
            exploration: default_exploration(),
        }
    }

    pub fn with_alpha_tilde(mut self, alpha_tilde: f64) -> Self {
        self.alpha_tilde = Some(alpha_tilde);
        self
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or(self.kind.as_str())
    }

    pub fn beta_params(&self) -> BetaParams {
        BetaParams {
            delta: self.delta,
            rkhs_bound: self.rkhs_bound,
            denominator: self.beta_denominator,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let field = |f: &str| format!("algorithms[{}].{f}", self.name());
        if self.kind.is_gp() {
            if !(self.delta > 0.0 && self.delta < 1.0) {
                return Err(Error::config(field("delta"), "must lie in (0, 1)"));
            }
            if !(self.rkhs_bound >= 0.0) {
                return Err(Error::config(field("rkhs_bound"), "must be non-negative"));
            }
        }
        if self.kind.is_windowed() {
            match self.alpha_tilde {
                Some(a) if a > 0.0 => {}
                _ => return Err(Error::config(field("alpha_tilde"), "windowed learners need alpha_tilde > 0")),
            }
            if !(self.query_budget_scale > 0.0) {
                return Err(Error::config(field("query_budget_scale"), "must be positive"));
            }
        }
        if let Some(a) = self.alpha {
            if !(a >= 0.0) {
                return Err(Error::config(field("alpha"), "must be non-negative"));
            }
        }
        if let Some(v) = self.noise_var {
            if !(v > 0.0) {
                return Err(Error::config(field("noise_var"), "must be positive"));
            }
        }
        if !(self.eta >= 0.0) {
            return Err(Error::config(field("eta"), "must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.exploration) {
            return Err(Error::config(field("exploration"), "must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// What a learner did at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub action: Vec<f64>,
    pub observation: Vec<f64>,
    pub beta: f64,
    /// Additional (re-)queries spent at this step.
    pub queries: u64,
    pub window_id: usize,
    pub theta: Option<Vec<f64>>,
}

pub trait Learner {
    fn step(&mut self, env: &Environment, t: u64, rng: &mut ChaCha8Rng) -> Result<StepOutcome>;
}

/// Instantiates the learner described by `config`.
pub fn build_learner(
    config: &AlgorithmConfig,
    env: &Environment,
    kernel: KernelSpec,
    grid: &DecisionGrid,
) -> Result<Box<dyn Learner + Send>> {
    config.validate()?;
    Ok(match config.kind {
        AlgorithmKind::Hedge => Box::new(Hedge::new(grid.clone(), env.reward(), config.eta)),
        AlgorithmKind::Exp3 => Box::new(Exp3::new(grid.clone(), env.reward(), config.eta, config.exploration)),
        _ => Box::new(GpLearner::new(config, env, kernel, grid)?),
    })
}
