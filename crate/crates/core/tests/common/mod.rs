#![allow(clippy::needless_range_loop)]

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wsparq::gp::ObservationSet;
use wsparq::kernels::KernelSpec;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Posterior mean (per output) and variance at `x`, written directly from
/// `μ = kᵀ(K+Σ)⁻¹Y`, `σ² = k(x,x) − kᵀ(K+Σ)⁻¹k`.
pub fn dense_posterior(kernel: &KernelSpec, obs: &ObservationSet, m: usize, x: &[f64]) -> (Vec<f64>, f64) {
    let n = obs.len();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut v = kernel.eval(&obs.inputs()[i], &obs.inputs()[j]);
                    if i == j {
                        v += obs.variance_proxies()[i];
                    }
                    v
                })
                .collect()
        })
        .collect();
    let k: Vec<f64> = obs.inputs().iter().map(|xi| kernel.eval(xi, x)).collect();
    let w = gauss_solve(a, k.clone());
    let mean = (0..m)
        .map(|o| w.iter().zip(obs.outputs()).map(|(wi, y)| wi * y[o]).sum())
        .collect();
    let var = kernel.eval(x, x) - w.iter().zip(&k).map(|(a, b)| a * b).sum::<f64>();
    (mean, var)
}

pub fn random_kernel(rng: &mut ChaCha8Rng) -> KernelSpec {
    let l = rng.random_range(0.1..1.0);
    let s2 = rng.random_range(0.5..2.0);
    match rng.random_range(0..4) {
        0 => KernelSpec::squared_exponential(l),
        1 => KernelSpec::matern(0.5, l),
        2 => KernelSpec::matern(1.5, l),
        _ => KernelSpec::matern(2.5, l),
    }
    .with_output_scale(s2)
}

/// `n` observations in `[0, 1]^d` with `m` outputs and heterogeneous proxies.
pub fn random_observations(rng: &mut ChaCha8Rng, n: usize, d: usize, m: usize) -> ObservationSet {
    let mut obs = ObservationSet::new();
    for t in 0..n {
        let x = (0..d).map(|_| rng.random::<f64>()).collect();
        let y = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
        obs.push(x, y, t as u64, rng.random_range(0.01..1.0));
    }
    obs
}

/// RKHS function `f = Σ aᵢ k(·, zᵢ)` scaled to norm `b`.
pub struct RkhsFunction {
    pub centers: Vec<Vec<f64>>,
    pub coefs: Vec<f64>,
    pub kernel: KernelSpec,
}

impl RkhsFunction {
    pub fn random(kernel: KernelSpec, centers: usize, norm: f64, rng: &mut ChaCha8Rng) -> Self {
        let centers: Vec<Vec<f64>> = (0..centers).map(|_| vec![rng.random::<f64>()]).collect();
        let mut coefs: Vec<f64> = centers.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut sq = 0.0;
        for (i, zi) in centers.iter().enumerate() {
            for (j, zj) in centers.iter().enumerate() {
                sq += coefs[i] * coefs[j] * kernel.eval(zi, zj);
            }
        }
        let scale = norm / sq.sqrt();
        coefs.iter_mut().for_each(|c| *c *= scale);
        RkhsFunction { centers, coefs, kernel }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.centers
            .iter()
            .zip(&self.coefs)
            .map(|(z, c)| c * self.kernel.eval(z, x))
            .sum()
    }
}
