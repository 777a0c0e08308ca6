//! Power-law vertex weights.
//!
//! The default distribution is the exact Pareto tail
//! `Pr[D >= w] = (w / w_min)^(1-beta)` for `w >= w_min`, i.e. a strong
//! power-law with both tail constants equal to 1. Weak power-laws are
//! supported diagnostically through [`validate_tail`] on user-supplied
//! samples.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightDist {
    beta: f64,
    w_min: f64,
}

impl WeightDist {
    pub fn new(beta: f64, w_min: f64) -> Result<Self> {
        if !(beta > 2.0 && beta < 3.0) {
            return Err(Error::invalid(format!(
                "weight exponent beta must lie strictly in (2, 3), got {beta}"
            )));
        }
        if !(w_min > 0.0) || !w_min.is_finite() {
            return Err(Error::invalid(format!(
                "minimum weight must be positive and finite, got {w_min}"
            )));
        }
        Ok(WeightDist { beta, w_min })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn w_min(&self) -> f64 {
        self.w_min
    }

    /// Finite for beta > 2: `w_min (beta-1) / (beta-2)`.
    pub fn mean(&self) -> f64 {
        self.w_min * (self.beta - 1.0) / (self.beta - 2.0)
    }

    /// Inverse-CDF sample: `w_min * u^(-1/(beta-1))` for `u` in `(0, 1]`.
    pub fn sample(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::invalid(format!(
                "uniform input must lie in (0, 1], got {u}"
            )));
        }
        Ok(self.sample_unchecked(u))
    }

    #[inline]
    pub(crate) fn sample_unchecked(&self, u: f64) -> f64 {
        self.w_min * u.powf(-1.0 / (self.beta - 1.0))
    }

    /// Survival function: 1 below `w_min`, else `(w / w_min)^(1-beta)`.
    pub fn tail_probability(&self, w: f64) -> f64 {
        if w <= self.w_min {
            1.0
        } else {
            (w / self.w_min).powf(1.0 - self.beta)
        }
    }
}

/// Outcome of the empirical tail-exponent fit.
#[derive(Clone, Debug)]
pub struct TailReport {
    /// Fitted log-log slope of the survival function, `None` when the tail
    /// is degenerate (no spread above `w_min`).
    pub slope: Option<f64>,
    /// Target slope `1 - beta`.
    pub expected_slope: f64,
    /// Slack used for the pass band `[1-beta-gamma, 1+beta+gamma]`.
    pub gamma: f64,
    pub degenerate: bool,
    pub thresholds_used: usize,
    pub pass: bool,
}

/// Fit the empirical tail exponent of `samples` against `dist`.
///
/// Least squares on log-survival at geometrically spaced thresholds between
/// `w_min` and the empirical 99.9th percentile. Passes when the slope lies
/// within `gamma` of `1 - beta`.
pub fn validate_tail(samples: &[f64], dist: &WeightDist, gamma: f64) -> Result<TailReport> {
    if samples.len() < 10_000 {
        return Err(Error::InsufficientData(format!(
            "tail fit needs at least 10^4 samples, got {}",
            samples.len()
        )));
    }
    if !(gamma > 0.0) {
        return Err(Error::invalid("gamma must be positive"));
    }
    let expected = 1.0 - dist.beta();

    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let idx999 = ((sorted.len() as f64) * 0.999) as usize;
    let p999 = sorted[idx999.min(sorted.len() - 1)];

    if p999 <= dist.w_min() * (1.0 + 1e-9) {
        return Ok(TailReport {
            slope: None,
            expected_slope: expected,
            gamma,
            degenerate: true,
            thresholds_used: 0,
            pass: false,
        });
    }

    let grid = 20usize;
    let lw0 = dist.w_min().ln();
    let lw1 = p999.ln();
    let mut points = Vec::with_capacity(grid);
    for j in 0..grid {
        let lw = lw0 + (lw1 - lw0) * j as f64 / (grid - 1) as f64;
        let w = lw.exp();
        // survival fraction via binary search on the sorted samples
        let below = sorted.partition_point(|&s| s < w);
        let surv = (sorted.len() - below) as f64 / sorted.len() as f64;
        if surv > 0.0 {
            points.push((lw, surv.ln()));
        }
    }
    let slope = crate::stats::linear_fit(&points)
        .map(|(m, _)| m)
        .ok_or_else(|| Error::InsufficientData("tail fit has no spread".into()))?;

    let pass = slope >= expected - gamma && slope <= expected + gamma;
    Ok(TailReport {
        slope: Some(slope),
        expected_slope: expected,
        gamma,
        degenerate: false,
        thresholds_used: points.len(),
        pass,
    })
}
