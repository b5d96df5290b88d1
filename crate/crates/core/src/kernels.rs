//! Stationary covariance functions.
//!
//! Only the squared exponential and the half-integer Matérn kernels
//! (ν ∈ {1/2, 3/2, 5/2}) are supported; all have closed forms in the
//! Euclidean distance `r = ‖x − x'‖₂`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Jitter added to Gram diagonals before any factorization.
pub const JITTER: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    SquaredExponential,
    Matern,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Matérn smoothness; ignored for the squared exponential.
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_lengthscale")]
    pub lengthscale: f64,
    /// Prior variance `k(x, x)`.
    #[serde(default = "default_output_scale")]
    pub output_scale: f64,
}

fn default_nu() -> f64 {
    1.5
}

fn default_lengthscale() -> f64 {
    0.2
}

fn default_output_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Smoothness {
    Half,
    ThreeHalves,
    FiveHalves,
}

impl KernelSpec {
    pub fn squared_exponential(lengthscale: f64) -> Self {
        KernelSpec {
            family: KernelFamily::SquaredExponential,
            nu: default_nu(),
            lengthscale,
            output_scale: 1.0,
        }
    }

    pub fn matern(nu: f64, lengthscale: f64) -> Self {
        KernelSpec {
            family: KernelFamily::Matern,
            nu,
            lengthscale,
            output_scale: 1.0,
        }
    }

    pub fn with_output_scale(mut self, output_scale: f64) -> Self {
        self.output_scale = output_scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lengthscale > 0.0 && self.lengthscale.is_finite()) {
            return Err(Error::config("kernel.lengthscale", "must be a positive finite number"));
        }
        if !(self.output_scale > 0.0 && self.output_scale.is_finite()) {
            return Err(Error::config("kernel.output_scale", "must be a positive finite number"));
        }
        if self.family == KernelFamily::Matern && self.smoothness().is_none() {
            return Err(Error::config(
                "kernel.nu",
                format!("Matérn smoothness must be 0.5, 1.5 or 2.5, got {}", self.nu),
            ));
        }
        Ok(())
    }

    fn smoothness(&self) -> Option<Smoothness> {
        match self.nu {
            0.5 => Some(Smoothness::Half),
            1.5 => Some(Smoothness::ThreeHalves),
            2.5 => Some(Smoothness::FiveHalves),
            _ => None,
        }
    }

    /// Kernel bound `sup_x k(x, x)`.
    pub fn max_variance(&self) -> f64 {
        self.output_scale
    }

    /// Covariance as a function of the distance `r ≥ 0`.
    pub fn eval_distance(&self, r: f64) -> f64 {
        let s2 = self.output_scale;
        let l = self.lengthscale;
        match self.family {
            KernelFamily::SquaredExponential => s2 * (-(r * r) / (2.0 * l * l)).exp(),
            KernelFamily::Matern => {
                let smoothness = self
                    .smoothness()
                    .expect("Matérn kernel with unsupported smoothness; call validate() first");
                match smoothness {
                    Smoothness::Half => s2 * (-r / l).exp(),
                    Smoothness::ThreeHalves => {
                        let a = 3f64.sqrt() * r / l;
                        s2 * (1.0 + a) * (-a).exp()
                    }
                    Smoothness::FiveHalves => {
                        let a = 5f64.sqrt() * r / l;
                        s2 * (1.0 + a + a * a / 3.0) * (-a).exp()
                    }
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64], x2: &[f64]) -> f64 {
        self.eval_distance(distance(x, x2))
    }

    pub fn gram(&self, points: &[Vec<f64>]) -> DMatrix<f64> {
        let n = points.len();
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            k[(i, i)] = self.output_scale;
            for j in 0..i {
                let v = self.eval(&points[i], &points[j]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        k
    }

    pub fn cross(&self, points: &[Vec<f64>], x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(points.len(), points.iter().map(|p| self.eval(p, x)))
    }

    /// Largest admissible window exponent `α̃` for this kernel in input dimension `d`.
    ///
    /// SE: `1/3`; Matérn: `(2ν − d(d+1)) / (4ν + 2d(d+1))`.
    pub fn alpha_tilde_threshold(&self, d: usize) -> f64 {
        match self.family {
            KernelFamily::SquaredExponential => 1.0 / 3.0,
            KernelFamily::Matern => {
                let dd = (d * (d + 1)) as f64;
                (2.0 * self.nu - dd) / (4.0 * self.nu + 2.0 * dd)
            }
        }
    }
}

pub(crate) fn distance(x: &[f64], x2: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), x2.len());
    x.iter()
        .zip(x2)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}
