//! Optimistic action selection.
//!
//! The leader picks the grid action whose confidence box admits the best
//! reward: `argmax_x max_{y ∈ box(x)} f(x, y)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gp::{confidence_box, ConfidenceBox, PosteriorModel};

/// Uniform grid over `[low, high]^dim`, row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionGrid {
    low: f64,
    high: f64,
    resolution: usize,
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl DecisionGrid {
    pub fn new(low: f64, high: f64, resolution: usize, dim: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::config("grid.resolution", "need at least 2 points per axis"));
        }
        if !(low < high) || !low.is_finite() || !high.is_finite() {
            return Err(Error::config("grid", "bounds must be finite with low < high"));
        }
        if dim == 0 {
            return Err(Error::config("grid.dim", "must be at least 1"));
        }
        let axis = axis_points(low, high, resolution);
        let mut points = vec![Vec::with_capacity(dim)];
        for _ in 0..dim {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        Ok(DecisionGrid {
            low,
            high,
            resolution,
            dim,
            points,
        })
    }

    /// `[0, 1]` with the given resolution.
    pub fn unit_interval(resolution: usize) -> Result<Self> {
        Self::new(0.0, 1.0, resolution, 1)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.low, self.high)
    }

    /// The same domain with `factor` times as many intervals per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.low, self.high, (self.resolution - 1) * factor + 1, self.dim)
    }
}

fn axis_points(low: f64, high: f64, resolution: usize) -> Vec<f64> {
    let step = (high - low) / (resolution - 1) as f64;
    (0..resolution)
        .map(|i| if i == resolution - 1 { high } else { low + step * i as f64 })
        .collect()
}

pub type RewardFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
/// Unconstrained maximizer of `f(x, ·)` along output coordinate `i`.
pub type CoordinateMaximizer = Arc<dyn Fn(&[f64], usize) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum RewardStructure {
    /// `f(x, y) = a(x) + Σ_i h_i(x, y_i)` with each `h_i` concave in `y_i`.
    SeparableConcaveInY { maximizer: CoordinateMaximizer },
    /// Anything else; inner problems are solved on a dense box grid (m ≤ 2).
    General { inner_resolution: usize },
}

/// Known upper-level reward `f(x, y)`.
#[derive(Clone)]
pub struct RewardSpec {
    evaluator: RewardFn,
    structure: RewardStructure,
    /// Lipschitz constant in `(x, y)` w.r.t. the ℓ1 norm (metadata).
    pub lipschitz: f64,
}

impl fmt::Debug for RewardSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let structure = match &self.structure {
            RewardStructure::SeparableConcaveInY { .. } => "SeparableConcaveInY".to_string(),
            RewardStructure::General { inner_resolution } => format!("General({inner_resolution})"),
        };
        f.debug_struct("RewardSpec")
            .field("structure", &structure)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl RewardSpec {
    pub fn new(evaluator: RewardFn, structure: RewardStructure, lipschitz: f64) -> Self {
        RewardSpec {
            evaluator,
            structure,
            lipschitz,
        }
    }

    /// Checks that the inner problems are solvable for `m` outputs.
    pub fn validate(&self, output_dim: usize) -> Result<()> {
        if let RewardStructure::General { inner_resolution } = self.structure {
            if output_dim > 2 {
                return Err(Error::config(
                    "reward.structure",
                    format!("grid inner maximization supports m ≤ 2, got m = {output_dim}"),
                ));
            }
            if inner_resolution < 2 {
                return Err(Error::config("reward.inner_resolution", "need at least 2 points"));
            }
        }
        Ok(())
    }

    pub fn structure(&self) -> &RewardStructure {
        &self.structure
    }

    /// Same evaluator, solved with the grid fallback.
    pub fn as_general(&self, inner_resolution: usize) -> Self {
        RewardSpec {
            evaluator: self.evaluator.clone(),
            structure: RewardStructure::General { inner_resolution },
            lipschitz: self.lipschitz,
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.evaluator)(x, y)
    }
}

/// `(argmax, max)` of `f(x, ·)` over the box.
pub fn inner_max_over_box(reward: &RewardSpec, x: &[f64], bx: &ConfidenceBox) -> (Vec<f64>, f64) {
    match &reward.structure {
        RewardStructure::SeparableConcaveInY { maximizer } => {
            let y: Vec<f64> = (0..bx.dim())
                .map(|i| maximizer(x, i).clamp(bx.lcb[i], bx.ucb[i]))
                .collect();
            let v = reward.eval(x, &y);
            (y, v)
        }
        RewardStructure::General { inner_resolution } => {
            grid_search(reward, x, bx, *inner_resolution, |a, b| a > b)
        }
    }
}

/// `(argmin, min)` of `f(x, ·)` over the box.
pub fn inner_min_over_box(reward: &RewardSpec, x: &[f64], bx: &ConfidenceBox) -> (Vec<f64>, f64) {
    match &reward.structure {
        RewardStructure::SeparableConcaveInY { .. } => {
            // A concave function attains its minimum over a box at a corner.
            let m = bx.dim();
            let mut best: Option<(Vec<f64>, f64)> = None;
            for mask in 0..(1usize << m) {
                let y: Vec<f64> = (0..m)
                    .map(|i| {
                        if mask >> (m - 1 - i) & 1 == 0 {
                            bx.lcb[i]
                        } else {
                            bx.ucb[i]
                        }
                    })
                    .collect();
                let v = reward.eval(x, &y);
                if best.as_ref().is_none_or(|(_, b)| v < *b) {
                    best = Some((y, v));
                }
            }
            best.expect("at least one corner")
        }
        RewardStructure::General { inner_resolution } => {
            grid_search(reward, x, bx, *inner_resolution, |a, b| a < b)
        }
    }
}

fn grid_search(
    reward: &RewardSpec,
    x: &[f64],
    bx: &ConfidenceBox,
    resolution: usize,
    better: impl Fn(f64, f64) -> bool,
) -> (Vec<f64>, f64) {
    let m = bx.dim();
    assert!(m <= 2, "grid inner search supports at most two outputs");
    let axes: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            if bx.lcb[i] == bx.ucb[i] {
                vec![bx.lcb[i]]
            } else {
                axis_points(bx.lcb[i], bx.ucb[i], resolution)
            }
        })
        .collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut visit = |y: Vec<f64>| {
        let v = reward.eval(x, &y);
        if best.as_ref().is_none_or(|(_, b)| better(v, *b)) {
            best = Some((y, v));
        }
    };
    match m {
        0 => visit(Vec::new()),
        1 => axes[0].iter().for_each(|&a| visit(vec![a])),
        _ => {
            for &a in &axes[0] {
                for &b in &axes[1] {
                    visit(vec![a, b]);
                }
            }
        }
    }
    best.expect("non-empty inner grid")
}

/// `max − min` of the reward over the box at `x`.
pub fn regret_width_diagnostic(reward: &RewardSpec, x: &[f64], bx: &ConfidenceBox) -> f64 {
    let (_, hi) = inner_max_over_box(reward, x, bx);
    let (_, lo) = inner_min_over_box(reward, x, bx);
    (hi - lo).max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selected {
    pub index: usize,
    pub point: Vec<f64>,
    pub value: f64,
    pub confidence_box: ConfidenceBox,
}

/// Grid argmax of the optimistic value; lowest index wins ties.
pub fn select_action(model: &PosteriorModel, beta: f64, reward: &RewardSpec, grid: &DecisionGrid) -> Selected {
    let predictions = model.predict_many(grid.points());
    let mut best: Option<Selected> = None;
    for (i, (x, p)) in grid.points().iter().zip(&predictions).enumerate() {
        let bx = confidence_box(p, beta);
        let (_, value) = inner_max_over_box(reward, x, &bx);
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(Selected {
                index: i,
                point: x.clone(),
                value,
                confidence_box: bx,
            });
        }
    }
    best.expect("grid is non-empty")
}
