//! Time-varying Bayesian optimization for bilevel problems and sequential games.
//!
//! The crate models an unknown (possibly drifting) lower-level response map
//! `x -> argmin_y g_t(x, y)` with independent per-output Gaussian processes
//! and selects leader actions optimistically over the resulting confidence
//! boxes. Drift is handled by treating stale observations as noisier ones and
//! by refreshing a sparse, diverse subset of past inputs at the start of each
//! time window.
//!
//! Module map:
//!
//! - [`kernels`]: squared exponential and half-integer Matérn covariances.
//! - [`gp`]: heteroscedastic multi-output posterior, confidence scaling and boxes.
//! - [`window`]: window partition of time and the lag-dependent noise schedule.
//! - [`dpp`]: greedy determinant maximization and per-window query budgets.
//! - [`acquisition`]: optimistic action selection over a decision grid.
//! - [`environments`]: benchmark response maps, rewards, noise and regret oracle.
//! - [`algorithms`]: step-wise learners and the episode driver.
//! - [`harness`]: experiment configs, batch execution and CSV/JSON output.

// `!(x > 0.0)` is how NaN gets rejected during validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acquisition;
pub mod algorithms;
pub mod dpp;
pub mod environments;
pub mod error;
pub mod gp;
pub mod harness;
pub mod kernels;
mod linalg;
pub mod window;

pub use error::{Error, Result};
