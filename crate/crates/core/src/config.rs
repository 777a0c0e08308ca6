//! Experiment configuration: a single JSON document.
//!
//! Exact keys: `n, d, alpha` (number or `"inf"`), `beta, w_min, kernel_c,
//! threshold_C, k, nu, rho | rho_multiplier, sweep_multipliers, seeds,
//! epsilon, eta, max_rounds`. The infection rate may be given absolutely
//! (`rho`) or as a multiple of the critical density (`rho_multiplier`);
//! giving both is an error. The starting ball is centred at the origin with
//! volume `min(nu / n, 1)`.

use serde::{Deserialize, Serialize};

use crate::bootstrap::BootstrapParams;
use crate::error::{Error, Result};
use crate::geometry::{ball_radius_for_volume, Ball, Point};
use crate::girg::{Alpha, GirgParams};
use crate::predictions::{critical_density, ModelConstants};

fn default_one() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_eta() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: f64,
    pub d: usize,
    pub alpha: Alpha,
    pub beta: f64,
    pub w_min: f64,
    #[serde(default = "default_one")]
    pub kernel_c: f64,
    #[serde(rename = "threshold_C", default = "default_one")]
    pub threshold_c: f64,
    pub k: u32,
    pub nu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_multiplier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_multipliers: Option<Vec<f64>>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<u32>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.girg_params()?;
        self.model_constants()?;
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.rho.is_some() && self.rho_multiplier.is_some() {
            return Err(Error::Config(
                "specify either rho or rho_multiplier, not both".into(),
            ));
        }
        if let Some(rho) = self.rho {
            if !(0.0..=1.0).contains(&rho) {
                return Err(Error::Config(format!("rho must lie in [0, 1], got {rho}")));
            }
        }
        if let Some(m) = self.rho_multiplier {
            if !(m >= 0.0) {
                return Err(Error::Config(format!(
                    "rho_multiplier must be non-negative, got {m}"
                )));
            }
        }
        if let Some(ms) = &self.sweep_multipliers {
            if ms.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
                return Err(Error::Config(
                    "sweep multipliers must be non-negative reals".into(),
                ));
            }
        }
        if self.k < 2 {
            return Err(Error::Config(format!("k must be at least 2, got {}", self.k)));
        }
        if !(self.nu > 1.0) {
            return Err(Error::Config(format!("nu must exceed 1, got {}", self.nu)));
        }
        if self.nu > self.n {
            return Err(Error::Config(format!(
                "nu = {} must not exceed n = {}",
                self.nu, self.n
            )));
        }
        Ok(())
    }

    pub fn girg_params(&self) -> Result<GirgParams> {
        GirgParams::new(
            self.n,
            self.d,
            self.alpha,
            self.beta,
            self.w_min,
            self.kernel_c,
            self.threshold_c,
        )
    }

    pub fn model_constants(&self) -> Result<ModelConstants> {
        ModelConstants::new(self.nu, self.n, self.beta, self.epsilon, self.eta)
    }

    pub fn rho_c(&self) -> Result<f64> {
        Ok(critical_density(&self.model_constants()?))
    }

    /// Resolve the infection rate; multiples of the critical density are
    /// clamped to 1.
    pub fn resolve_rho(&self) -> Result<f64> {
        match (self.rho, self.rho_multiplier) {
            (Some(r), None) => Ok(r),
            (None, Some(m)) => Ok((m * self.rho_c()?).min(1.0)),
            (None, None) => Err(Error::Config(
                "this command needs rho or rho_multiplier".into(),
            )),
            (Some(_), Some(_)) => Err(Error::Config(
                "specify either rho or rho_multiplier, not both".into(),
            )),
        }
    }

    /// Starting ball: centred at the origin, volume `min(nu / n, 1)`.
    pub fn start_ball(&self) -> Result<Ball> {
        let vol = (self.nu / self.n).min(1.0);
        let radius = ball_radius_for_volume(vol, self.d)?;
        Ball::new(Point::origin(self.d), radius)
    }

    pub fn bootstrap_params(&self) -> Result<BootstrapParams> {
        BootstrapParams::new(self.k, self.resolve_rho()?, self.start_ball()?, self.max_rounds)
    }

    /// Same configuration at a different infection rate.
    pub fn bootstrap_params_with_rho(&self, rho: f64) -> Result<BootstrapParams> {
        BootstrapParams::new(self.k, rho, self.start_ball()?, self.max_rounds)
    }
}
