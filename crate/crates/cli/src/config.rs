use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use shrubflow::flow::FlowOptions;

/// Step cap for unit-speed runs that set no `h_max`, so the tail is sampled
/// densely enough for coverage estimates.
pub const UNIT_SPEED_H_MAX: f64 = 5e-3;

/// Everything a `simulate` run depends on besides the bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// First seed; further seeds count up from it.
    pub seed: u64,
    pub seeds: usize,
    pub horizon: f64,
    /// Chart distance of the starting points from the south pole.
    pub radius: f64,
    /// Tail fraction of the run compared against Ω.
    pub window_fraction: f64,
    pub zero_samples: usize,
    pub plot: bool,
    pub flow: FlowOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            seeds: 1,
            horizon: 40.0,
            radius: 0.05,
            window_fraction: 0.5,
            zero_samples: 4000,
            plot: true,
            flow: FlowOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err("horizon must be positive".into());
        }
        if !(self.radius > 0.0 && self.radius < 0.1) {
            return Err("radius must lie in (0, 0.1)".into());
        }
        if !(self.window_fraction > 0.0 && self.window_fraction <= 1.0) {
            return Err("window_fraction must lie in (0, 1]".into());
        }
        if self.seeds == 0 || self.zero_samples < 2 {
            return Err("need at least one seed and two zero-set samples".into());
        }
        self.flow.validate().map_err(|e| e.to_string())
    }

    /// Fills in defaults that depend on other fields.
    pub fn resolved(mut self) -> RunConfig {
        if self.flow.unit_speed && self.flow.h_max.is_none() {
            self.flow.h_max = Some(UNIT_SPEED_H_MAX);
        }
        self
    }

    pub fn sha256(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
