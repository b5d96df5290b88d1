//! Heteroscedastic multi-output Gaussian-process regression.
//!
//! Each output coordinate is an independent GP sharing the inputs, the kernel
//! and the per-observation noise variances, so one factorization of
//! `K + Σ` serves every output. `Σ` is diagonal and holds the current
//! variance proxy of each observation; for time-varying problems these grow
//! with the age of the observation.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::{jittered_cholesky, log_det};

/// Time-stamped observations with their current noise-variance proxies.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    inputs: Vec<Vec<f64>>,
    outputs: Vec<Vec<f64>>,
    acquired_at: Vec<u64>,
    variance_proxies: Vec<f64>,
}

impl ObservationSet {
    pub fn new() -> Self {
        ObservationSet {
            inputs: Vec::new(),
            outputs: Vec::new(),
            acquired_at: Vec::new(),
            variance_proxies: Vec::new(),
        }
    }

    /// Appends one observation. Panics on a non-positive proxy or on a
    /// dimension mismatch with earlier observations.
    pub fn push(&mut self, input: Vec<f64>, output: Vec<f64>, acquired_at: u64, variance_proxy: f64) {
        assert!(variance_proxy > 0.0, "variance proxy must be positive, got {variance_proxy}");
        if let Some(first) = self.inputs.first() {
            assert_eq!(first.len(), input.len(), "input dimension mismatch");
            assert_eq!(self.outputs[0].len(), output.len(), "output dimension mismatch");
        }
        self.inputs.push(input);
        self.outputs.push(output);
        self.acquired_at.push(acquired_at);
        self.variance_proxies.push(variance_proxy);
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn clear(&mut self) {
        self.inputs.clear();
        self.outputs.clear();
        self.acquired_at.clear();
        self.variance_proxies.clear();
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vec<f64>] {
        &self.outputs
    }

    pub fn acquired_at(&self) -> &[u64] {
        &self.acquired_at
    }

    pub fn variance_proxies(&self) -> &[f64] {
        &self.variance_proxies
    }

    /// Recomputes every proxy from its acquisition time.
    pub fn update_proxies(&mut self, mut proxy: impl FnMut(u64) -> f64) {
        for (p, &t) in self.variance_proxies.iter_mut().zip(&self.acquired_at) {
            let v = proxy(t);
            assert!(v > 0.0, "variance proxy must be positive, got {v}");
            *p = v;
        }
    }

    pub fn output_dim(&self) -> Option<usize> {
        self.outputs.first().map(Vec::len)
    }
}

impl Default for ObservationSet {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Axis-aligned box `[lcb, ucb]` around the posterior mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceBox {
    pub lcb: Vec<f64>,
    pub ucb: Vec<f64>,
}

impl ConfidenceBox {
    pub fn new(lcb: Vec<f64>, ucb: Vec<f64>) -> Self {
        assert_eq!(lcb.len(), ucb.len());
        debug_assert!(lcb.iter().zip(&ucb).all(|(l, u)| l <= u), "inverted box");
        ConfidenceBox { lcb, ucb }
    }

    pub fn degenerate(point: Vec<f64>) -> Self {
        ConfidenceBox {
            lcb: point.clone(),
            ucb: point,
        }
    }

    pub fn dim(&self) -> usize {
        self.lcb.len()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.iter()
            .zip(self.lcb.iter().zip(&self.ucb))
            .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    pub fn widths(&self) -> Vec<f64> {
        self.ucb.iter().zip(&self.lcb).map(|(u, l)| u - l).collect()
    }
}

/// Which determinant sits under `|Σ_t + K_t|` in the confidence scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaDenominator {
    /// `|K_t|` (jittered).
    K,
    /// `|Σ_t|`, the information-gain form.
    #[default]
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub delta: f64,
    /// RKHS norm bound `B`.
    pub rkhs_bound: f64,
    #[serde(default)]
    pub denominator: BetaDenominator,
}

/// Posterior of `m` independent GPs over shared inputs.
#[derive(Debug, Clone)]
pub struct PosteriorModel {
    kernel: KernelSpec,
    inputs: Vec<Vec<f64>>,
    chol: Option<Cholesky<f64, Dyn>>,
    weights: Vec<DVector<f64>>,
    output_dim: usize,
    log_det_noisy: f64,
}

impl PosteriorModel {
    /// Zero-mean prior with variance `output_scale` everywhere.
    pub fn prior(kernel: KernelSpec, output_dim: usize) -> Self {
        PosteriorModel {
            kernel,
            inputs: Vec::new(),
            chol: None,
            weights: vec![DVector::zeros(0); output_dim],
            output_dim,
            log_det_noisy: 0.0,
        }
    }

    pub fn fit(kernel: KernelSpec, obs: &ObservationSet, output_dim: usize) -> Result<Self> {
        if obs.is_empty() {
            return Ok(Self::prior(kernel, output_dim));
        }
        if obs.output_dim() != Some(output_dim) {
            return Err(Error::Numerical(format!(
                "observations have output dimension {:?}, model expects {output_dim}",
                obs.output_dim()
            )));
        }
        let n = obs.len();
        let mut gram = kernel.gram(obs.inputs());
        for (i, p) in obs.variance_proxies().iter().enumerate() {
            gram[(i, i)] += p;
        }
        let chol = jittered_cholesky(gram, "K + Σ")?;
        let log_det_noisy = log_det(&chol);
        let weights = (0..output_dim)
            .map(|j| {
                let y = DVector::from_iterator(n, obs.outputs().iter().map(|o| o[j]));
                chol.solve(&y)
            })
            .collect();
        Ok(PosteriorModel {
            kernel,
            inputs: obs.inputs().to_vec(),
            chol: Some(chol),
            weights,
            output_dim,
            log_det_noisy,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn num_observations(&self) -> usize {
        self.inputs.len()
    }

    /// `log |K + Σ|` of the training set (0 for the prior).
    pub fn log_det_noisy(&self) -> f64 {
        self.log_det_noisy
    }

    pub fn predict(&self, x: &[f64]) -> Prediction {
        self.predict_many(std::slice::from_ref(&x.to_vec())).pop().unwrap()
    }

    /// Batched prediction; shares one triangular solve across all query points.
    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Vec<Prediction> {
        let s2 = self.kernel.output_scale;
        let Some(chol) = &self.chol else {
            return xs
                .iter()
                .map(|_| Prediction {
                    mean: vec![0.0; self.output_dim],
                    std: vec![s2.sqrt(); self.output_dim],
                })
                .collect();
        };
        let n = self.inputs.len();
        let cross = DMatrix::from_fn(n, xs.len(), |i, j| self.kernel.eval(&self.inputs[i], &xs[j]));
        let means: Vec<DVector<f64>> = self.weights.iter().map(|w| cross.tr_mul(w)).collect();
        let v = chol
            .l_dirty()
            .solve_lower_triangular(&cross)
            .expect("Cholesky factor has a positive diagonal");
        (0..xs.len())
            .map(|j| {
                let reduction = v.column(j).norm_squared();
                let std = (s2 - reduction).max(0.0).sqrt();
                Prediction {
                    mean: means.iter().map(|m| m[j]).collect(),
                    std: vec![std; self.output_dim],
                }
            })
            .collect()
    }

    pub fn confidence_box(&self, x: &[f64], beta: f64) -> ConfidenceBox {
        confidence_box(&self.predict(x), beta)
    }
}

pub fn confidence_box(prediction: &Prediction, beta: f64) -> ConfidenceBox {
    assert!(beta >= 0.0, "beta must be non-negative");
    let lcb = prediction
        .mean
        .iter()
        .zip(&prediction.std)
        .map(|(m, s)| m - beta * s)
        .collect();
    let ucb = prediction
        .mean
        .iter()
        .zip(&prediction.std)
        .map(|(m, s)| m + beta * s)
        .collect();
    ConfidenceBox { lcb, ucb }
}

/// Confidence scaling
/// `β = sqrt(2 log((m/δ) · |Σ + K|^{1/2} / |D|^{1/2})) + B`
/// where `D` is `Σ` or `K` according to `params.denominator`.
pub fn beta(kernel: &KernelSpec, obs: &ObservationSet, params: &BetaParams, output_dim: usize) -> Result<f64> {
    let log_det_noisy = if obs.is_empty() {
        0.0
    } else {
        let mut gram = kernel.gram(obs.inputs());
        for (i, p) in obs.variance_proxies().iter().enumerate() {
            gram[(i, i)] += p;
        }
        log_det(&jittered_cholesky(gram, "K + Σ")?)
    };
    beta_from_log_det(kernel, obs, params, output_dim, log_det_noisy)
}

/// As [`beta`], reusing the `log |K + Σ|` already computed by `model`.
pub fn beta_for_model(model: &PosteriorModel, obs: &ObservationSet, params: &BetaParams) -> Result<f64> {
    debug_assert_eq!(model.num_observations(), obs.len());
    beta_from_log_det(model.kernel(), obs, params, model.output_dim(), model.log_det_noisy())
}

fn beta_from_log_det(
    kernel: &KernelSpec,
    obs: &ObservationSet,
    params: &BetaParams,
    output_dim: usize,
    log_det_noisy: f64,
) -> Result<f64> {
    if !(params.delta > 0.0 && params.delta < 1.0) {
        return Err(Error::config("delta", "must lie in (0, 1)"));
    }
    if !(params.rkhs_bound >= 0.0) {
        return Err(Error::config("rkhs_bound", "must be non-negative"));
    }
    let log_det_denominator = if obs.is_empty() {
        0.0
    } else {
        match params.denominator {
            BetaDenominator::Sigma => obs.variance_proxies().iter().map(|p| p.ln()).sum(),
            BetaDenominator::K => log_det(&jittered_cholesky(kernel.gram(obs.inputs()), "K")?),
        }
    };
    let radicand = 2.0 * (output_dim as f64 / params.delta).ln() + log_det_noisy - log_det_denominator;
    if !radicand.is_finite() {
        return Err(Error::Numerical(format!("non-finite log-determinant ratio ({radicand})")));
    }
    Ok(radicand.max(0.0).sqrt() + params.rkhs_bound)
}

/// `½ log det(I + K / noise_var)` over the given inputs.
pub fn information_gain(kernel: &KernelSpec, inputs: &[Vec<f64>], noise_var: f64) -> f64 {
    assert!(noise_var > 0.0, "noise variance must be positive");
    if inputs.is_empty() {
        return 0.0;
    }
    let n = inputs.len();
    let mut m = kernel.gram(inputs) / noise_var;
    for i in 0..n {
        m[(i, i)] += 1.0;
    }
    let chol = Cholesky::new(m).expect("I + K/σ² is positive definite");
    0.5 * log_det(&chol)
}
