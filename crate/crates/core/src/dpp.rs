//! Diverse re-query selection.
//!
//! The selected subset greedily maximizes `log det K_S`, the Gram determinant
//! of the chosen points. Each greedy gain equals the residual kernel variance
//! of a candidate given the points already chosen, which is tracked with an
//! incremental Cholesky update (O(n·k²) for `k` selections out of `n`).

use crate::error::{Error, Result};
use crate::kernels::{KernelFamily, KernelSpec};

/// Residual variances at or below this value are treated as zero gain.
pub const GAIN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub indices: Vec<usize>,
    /// Residual variance of each selected point at the moment it was added.
    pub gains: Vec<f64>,
}

/// Greedy MAP selection of at most `budget` indices; lowest index wins ties.
pub fn greedy_dpp_select(kernel: &KernelSpec, candidates: &[Vec<f64>], budget: usize) -> Selection {
    let n = candidates.len();
    let mut residual: Vec<f64> = vec![kernel.output_scale; n];
    // Row i holds the coordinates of candidate i in the basis of selected points.
    let mut coords: Vec<Vec<f64>> = vec![Vec::with_capacity(budget.min(n)); n];
    let mut chosen = vec![false; n];
    let mut selection = Selection {
        indices: Vec::new(),
        gains: Vec::new(),
    };

    while selection.indices.len() < budget {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if chosen[i] {
                continue;
            }
            if best.is_none_or(|(_, g)| residual[i] > g) {
                best = Some((i, residual[i]));
            }
        }
        let Some((j, gain)) = best else { break };
        if gain <= GAIN_FLOOR {
            break;
        }
        chosen[j] = true;
        selection.indices.push(j);
        selection.gains.push(gain);

        let pivot = gain.sqrt();
        let cj = coords[j].clone();
        for i in 0..n {
            if chosen[i] {
                continue;
            }
            let dot: f64 = coords[i].iter().zip(&cj).map(|(a, b)| a * b).sum();
            let e = (kernel.eval(&candidates[i], &candidates[j]) - dot) / pivot;
            coords[i].push(e);
            residual[i] = (residual[i] - e * e).max(0.0);
        }
    }
    selection
}

/// Number of re-queries at a window starting at `t`.
///
/// SE: `max(1, ceil(c_q · (ln t)^d))`; Matérn: `max(1, ceil(c_q · t^{2d/(2ν−d)}))`.
pub fn query_budget(t: u64, kernel: &KernelSpec, d: usize, scale: f64) -> Result<usize> {
    assert!(t >= 1, "time starts at 1");
    if !(scale > 0.0) {
        return Err(Error::config("query_budget_scale", "must be positive"));
    }
    let raw = match kernel.family {
        KernelFamily::SquaredExponential => scale * (t as f64).ln().powi(d as i32),
        KernelFamily::Matern => {
            let denom = 2.0 * kernel.nu - d as f64;
            if denom <= 0.0 {
                return Err(Error::config(
                    "kernel.nu",
                    format!("query budget needs 2ν > d (ν = {}, d = {d})", kernel.nu),
                ));
            }
            scale * (t as f64).powf(2.0 * d as f64 / denom)
        }
    };
    // Guard against ceil() rounding an exact integer up through float noise.
    let rounded = raw.round();
    let budget = if (raw - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        rounded
    } else {
        raw.ceil()
    };
    Ok((budget as usize).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kernels() -> Vec<KernelSpec> {
        vec![
            KernelSpec::matern(1.5, 0.2),
            KernelSpec::matern(0.5, 0.3),
            KernelSpec::squared_exponential(0.3),
        ]
    }

    #[test]
    fn single_candidate() {
        let k = KernelSpec::matern(1.5, 0.2);
        assert_eq!(greedy_dpp_select(&k, &[vec![0.4]], 3).indices, vec![0]);
    }

    #[test]
    fn duplicates_are_skipped() {
        let k = KernelSpec::matern(1.5, 0.2);
        let s = greedy_dpp_select(&k, &[vec![0.4], vec![0.4]], 2);
        assert_eq!(s.indices, vec![0]);
        let s = greedy_dpp_select(&k, &[vec![0.1], vec![0.7], vec![0.1], vec![0.7], vec![0.3]], 10);
        let mut idx = s.indices.clone();
        idx.sort();
        assert_eq!(idx, vec![0, 1, 4]);
    }

    #[test]
    fn large_budget_takes_all_distinct_points() {
        for k in kernels() {
            let pts: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 * 0.13]).collect();
            let s = greedy_dpp_select(&k, &pts, 50);
            assert_eq!(s.indices.len(), 8, "{k:?}");
        }
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let k = KernelSpec::matern(1.5, 0.2);
        let s = greedy_dpp_select(&k, &[vec![0.0], vec![1.0], vec![0.5]], 1);
        assert_eq!(s.indices, vec![0]);
        // 0 and 1 are symmetric about 0.5: after picking 0.5 both tie.
        let s = greedy_dpp_select(&k, &[vec![0.5], vec![1.0], vec![0.0]], 2);
        assert_eq!(s.indices, vec![0, 1]);
    }

    #[test]
    fn greedy_picks_the_log_det_maximizer_at_each_step() {
        let k = KernelSpec::matern(1.5, 0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<Vec<f64>> = (0..12).map(|_| vec![rng.random(), rng.random()]).collect();
        let s = greedy_dpp_select(&k, &pts, 5);
        let mut picked: Vec<Vec<f64>> = Vec::new();
        for &j in &s.indices {
            // brute force the best next point by full determinant
            let best = (0..pts.len())
                .filter(|i| !s.indices[..picked.len()].contains(i))
                .map(|i| {
                    let mut set = picked.clone();
                    set.push(pts[i].clone());
                    (i, k.gram(&set).determinant())
                })
                .fold((usize::MAX, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            assert_eq!(best.0, j);
            picked.push(pts[j].clone());
        }
    }

    #[test]
    fn gains_are_non_increasing_and_points_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..60 {
            let k = kernels()[trial % 3];
            let n = rng.random_range(1..=30);
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![(rng.random_range(0..40) as f64) / 39.0])
                .collect();
            let s = greedy_dpp_select(&k, &pts, rng.random_range(1..=30));
            for w in s.gains.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
            for (a, &i) in s.indices.iter().enumerate() {
                for &j in &s.indices[a + 1..] {
                    assert!((pts[i][0] - pts[j][0]).abs() > 1e-12);
                }
            }
        }
    }

    #[test]
    fn budgets() {
        let se = KernelSpec::squared_exponential(0.2);
        let m = KernelSpec::matern(1.5, 0.2);
        assert_eq!(query_budget(1, &se, 1, 1.0).unwrap(), 1);
        assert_eq!(query_budget(1, &m, 1, 1.0).unwrap(), 1);
        // integer times only: ln 7 ≈ 1.95 (7 ≈ e²), ln 8 ≈ 2.08
        assert_eq!(query_budget(7, &se, 1, 1.0).unwrap(), 2);
        assert_eq!(query_budget(8, &se, 1, 1.0).unwrap(), 3);
        assert_eq!(query_budget(9, &m, 1, 1.0).unwrap(), 9);
        assert!(query_budget(9, &KernelSpec::matern(0.5, 0.2), 1, 1.0).is_err());
        let mut last = 0;
        for t in 1..500 {
            let b = query_budget(t, &se, 2, 0.5).unwrap();
            assert!(b >= last && b >= 1);
            last = b;
        }
    }
}
