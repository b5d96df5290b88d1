use rand_chacha::ChaCha8Rng;

use super::{AlgorithmConfig, AlgorithmKind, GroundSet, Learner, StepOutcome};
use crate::acquisition::{select_action, DecisionGrid, RewardSpec};
use crate::dpp::{greedy_dpp_select, query_budget};
use crate::environments::Environment;
use crate::error::{Error, Result};
use crate::gp::{beta_for_model, BetaParams, ObservationSet, PosteriorModel};
use crate::kernels::KernelSpec;
use crate::window::{variance_proxy, WindowSchedule};

#[derive(Debug, Clone)]
struct Windowing {
    schedule: WindowSchedule,
    alpha: f64,
    budget_scale: f64,
    ground_set: GroundSet,
}

/// GP-based optimistic learner.
///
/// Without windowing this is GP-UCB(L): every observation is kept with the
/// constant proxy `σ²`. With windowing, the fitting set is rebuilt at each
/// window start from fresh re-queries of a diverse subset of past inputs,
/// and proxies grow with the lag `σ²(1 + lag^α)`.
#[derive(Debug, Clone)]
pub struct GpLearner {
    kernel: KernelSpec,
    grid: DecisionGrid,
    reward: RewardSpec,
    beta_params: BetaParams,
    noise_var: f64,
    output_dim: usize,
    data: ObservationSet,
    /// Distinct inputs played so far, in first-play order.
    history: Vec<Vec<f64>>,
    windowing: Option<Windowing>,
    record_theta: bool,
}

impl GpLearner {
    pub fn new(config: &AlgorithmConfig, env: &Environment, kernel: KernelSpec, grid: &DecisionGrid) -> Result<Self> {
        config.validate()?;
        kernel.validate()?;
        let output_dim = env.output_dim();
        let reward = env.reward();
        reward.validate(output_dim)?;
        match config.kind {
            AlgorithmKind::GpUcb if output_dim != 1 => {
                return Err(Error::config(
                    format!("algorithms[{}].kind", config.name()),
                    "gp_ucb needs a scalar response; use gp_ucbl",
                ))
            }
            AlgorithmKind::WsparqSeqgame if !env.spec().is_sequential_game() => {
                return Err(Error::config(
                    format!("algorithms[{}].kind", config.name()),
                    "wsparq_seqgame needs an opponent_drift environment",
                ))
            }
            AlgorithmKind::Hedge | AlgorithmKind::Exp3 => {
                return Err(Error::config(
                    format!("algorithms[{}].kind", config.name()),
                    "not a GP learner",
                ))
            }
            _ => {}
        }
        let alpha = config.alpha.unwrap_or(env.alpha());
        let windowing = if config.kind.is_windowed() && alpha > 0.0 {
            let alpha_tilde = config.alpha_tilde.expect("validated");
            // surfaces 2ν ≤ d at construction rather than mid-run
            query_budget(1, &kernel, grid.dim(), config.query_budget_scale)?;
            Some(Windowing {
                schedule: WindowSchedule::new(alpha, alpha_tilde)?,
                alpha,
                budget_scale: config.query_budget_scale,
                ground_set: config.dpp_ground_set,
            })
        } else {
            None
        };
        Ok(GpLearner {
            kernel,
            grid: grid.clone(),
            reward,
            beta_params: config.beta_params(),
            noise_var: config.noise_var.unwrap_or(env.sigma2()),
            output_dim,
            data: ObservationSet::new(),
            history: Vec::new(),
            windowing,
            record_theta: config.kind == AlgorithmKind::WsparqSeqgame,
        })
    }

    /// Observations the next posterior will be fitted on.
    pub fn fitting_set(&self) -> &ObservationSet {
        &self.data
    }

    pub fn is_windowed(&self) -> bool {
        self.windowing.is_some()
    }

    fn refresh(&mut self, env: &Environment, t: u64, rng: &mut ChaCha8Rng) -> Result<u64> {
        let w = self.windowing.as_ref().expect("refresh needs windowing");
        let candidates: Vec<Vec<f64>> = match w.ground_set {
            GroundSet::Window => self.data.inputs().to_vec(),
            GroundSet::FullHistory => self.history.clone(),
        };
        if candidates.is_empty() {
            return Ok(0);
        }
        let budget = query_budget(t, &self.kernel, self.grid.dim(), w.budget_scale)?;
        let selection = greedy_dpp_select(&self.kernel, &candidates, budget);
        let mut fresh = ObservationSet::new();
        for &i in &selection.indices {
            let x = candidates[i].clone();
            let y = env.observe(&x, t, rng);
            fresh.push(x, y, t, self.noise_var);
        }
        self.data = fresh;
        Ok(selection.indices.len() as u64)
    }
}

impl Learner for GpLearner {
    fn step(&mut self, env: &Environment, t: u64, rng: &mut ChaCha8Rng) -> Result<StepOutcome> {
        let mut queries = 0;
        let mut window_id = 0;
        if let Some(w) = self.windowing.as_mut() {
            window_id = w.schedule.window_index(t);
            if w.schedule.is_window_start(t) {
                queries = self.refresh(env, t, rng)?;
            }
            let w = self.windowing.as_ref().unwrap();
            let (sigma2, alpha) = (self.noise_var, w.alpha);
            self.data.update_proxies(|acquired| variance_proxy(acquired, t, sigma2, alpha));
        }

        let model = PosteriorModel::fit(self.kernel, &self.data, self.output_dim)?;
        let beta = beta_for_model(&model, &self.data, &self.beta_params)?;
        let chosen = select_action(&model, beta, &self.reward, &self.grid);

        let observation = env.observe(&chosen.point, t, rng);
        self.data.push(chosen.point.clone(), observation.clone(), t, self.noise_var);
        if !self.history.contains(&chosen.point) {
            self.history.push(chosen.point.clone());
        }
        Ok(StepOutcome {
            action: chosen.point,
            observation,
            beta,
            queries,
            window_id,
            theta: if self.record_theta {
                env.theta(t).map(<[f64]>::to_vec)
            } else {
                None
            },
        })
    }
}

/// Cumulative re-query counts `N_1..N_T` when every window start (after the
/// first) spends its full budget; no posterior is fitted.
pub fn query_schedule(
    kernel: &KernelSpec,
    input_dim: usize,
    budget_scale: f64,
    alpha: f64,
    alpha_tilde: f64,
    horizon: u64,
) -> Result<Vec<u64>> {
    let mut schedule = WindowSchedule::new(alpha, alpha_tilde)?;
    let mut total = 0u64;
    let mut counts = Vec::with_capacity(horizon as usize);
    for t in 1..=horizon {
        if t > 1 && schedule.is_window_start(t) {
            total += query_budget(t, kernel, input_dim, budget_scale)? as u64;
        }
        counts.push(total);
    }
    Ok(counts)
}
