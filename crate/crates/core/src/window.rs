//! Window partition of time and the lag-dependent noise schedule.
//!
//! Windows `W_j = {t_j, …, t_{j+1} − 1}` start at `t_1 = 1` and satisfy
//! `t_j^r < t_{j+1} − t_j ≤ t_j^r + 1` with `r = α̃ / α`.

use crate::error::{Error, Result};

/// Length of the window starting at `start`: `floor(start^(α̃/α)) + 1`.
pub fn next_window_length(start: u64, alpha: f64, alpha_tilde: f64) -> Result<u64> {
    if !(alpha > 0.0) {
        return Err(Error::config("alpha", "drift exponent must be positive for windowing"));
    }
    if !(alpha_tilde > 0.0) {
        return Err(Error::config("alpha_tilde", "must be positive"));
    }
    assert!(start >= 1, "windows start at t = 1");
    Ok(window_length(start, alpha_tilde / alpha))
}

fn window_length(start: u64, ratio: f64) -> u64 {
    (start as f64).powf(ratio).floor() as u64 + 1
}

/// Noise variance of an observation taken at `t_obs` when used at `t_now`:
/// `σ²(1 + (t_now − t_obs)^α)`, with the lag-0 term equal to zero.
pub fn variance_proxy(t_obs: u64, t_now: u64, sigma2: f64, alpha: f64) -> f64 {
    assert!(t_obs <= t_now, "observation from the future ({t_obs} > {t_now})");
    let lag = t_now - t_obs;
    if lag == 0 {
        sigma2
    } else {
        sigma2 * (1.0 + (lag as f64).powf(alpha))
    }
}

/// Lazily extended sequence of window starts.
#[derive(Debug, Clone)]
pub struct WindowSchedule {
    alpha: f64,
    alpha_tilde: f64,
    starts: Vec<u64>,
}

impl WindowSchedule {
    pub fn new(alpha: f64, alpha_tilde: f64) -> Result<Self> {
        next_window_length(1, alpha, alpha_tilde)?;
        Ok(WindowSchedule {
            alpha,
            alpha_tilde,
            starts: vec![1],
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn alpha_tilde(&self) -> f64 {
        self.alpha_tilde
    }

    pub fn ratio(&self) -> f64 {
        self.alpha_tilde / self.alpha
    }

    fn extend_to(&mut self, t: u64) {
        let ratio = self.ratio();
        while *self.starts.last().unwrap() <= t {
            let last = *self.starts.last().unwrap();
            self.starts.push(last + window_length(last, ratio));
        }
    }

    pub fn is_window_start(&mut self, t: u64) -> bool {
        assert!(t >= 1, "time starts at 1");
        self.extend_to(t);
        self.starts.binary_search(&t).is_ok()
    }

    /// Zero-based index of the window containing `t`.
    pub fn window_index(&mut self, t: u64) -> usize {
        assert!(t >= 1, "time starts at 1");
        self.extend_to(t);
        match self.starts.binary_search(&t) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// All window starts `≤ t`.
    pub fn starts_up_to(&mut self, t: u64) -> &[u64] {
        self.extend_to(t);
        let end = self.starts.partition_point(|&s| s <= t);
        &self.starts[..end]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_lengths() {
        assert_eq!(next_window_length(1, 1.0, 0.3).unwrap(), 2);
        assert_eq!(next_window_length(1, 0.5, 2.0).unwrap(), 2);
        assert_eq!(next_window_length(16, 1.0, 0.5).unwrap(), 5);
        assert_eq!(next_window_length(2, 1.0, 1.0).unwrap(), 3);
        assert!(next_window_length(4, 0.0, 0.5).is_err());
        assert!(next_window_length(4, 1.0, 0.0).is_err());
    }

    #[test]
    fn proxies() {
        assert_eq!(variance_proxy(5, 5, 0.3, 1.0), 0.3);
        assert_eq!(variance_proxy(5, 5, 0.3, 0.0), 0.3);
        for alpha in [0.0, 0.25, 1.0, 3.0] {
            assert_eq!(variance_proxy(4, 5, 0.3, alpha), 0.6);
        }
        assert!((variance_proxy(1, 5, 0.25, 1.0) - 1.25).abs() < 1e-15);
        let mut last = 0.0;
        for now in 10..40 {
            let v = variance_proxy(10, now, 0.1, 0.7);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn unit_ratio_starts() {
        let mut s = WindowSchedule::new(0.5, 0.5).unwrap();
        assert_eq!(s.starts_up_to(40), &[1, 3, 7, 15, 31]);
        assert!(s.is_window_start(1));
        assert!(s.is_window_start(15));
        assert!(!s.is_window_start(16));
        assert!(!s.is_window_start(2));
        assert_eq!(s.window_index(1), 0);
        assert_eq!(s.window_index(2), 0);
        assert_eq!(s.window_index(3), 1);
        assert_eq!(s.window_index(30), 3);
    }

    #[test]
    fn windows_tile_time() {
        let mut s = WindowSchedule::new(1.0, 0.37).unwrap();
        let mut expected_index = 0;
        for t in 1..2000u64 {
            if t > 1 && s.is_window_start(t) {
                expected_index += 1;
            }
            assert_eq!(s.window_index(t), expected_index);
        }
    }
}
