//! Orbits of the synthesized field: adaptive integration on the sphere,
//! winding angle, first integrals and ω-limit estimates.

mod diagnostics;
mod integrate;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, SphereFunction};

pub use diagnostics::{
    check_meridian_integral, first_integral_drift, great_circle, hausdorff, omega_estimate, winding_summary,
    Hausdorff, MeridianFrame, MeridianReport, MeridianSegment, OmegaEstimate, MAX_HAUSDORFF_SAMPLES,
};
pub use integrate::{integrate, integrate_fixed};

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("step size underflow at t = {t} near {at:?}")]
    StepUnderflow { t: f64, at: [f64; 3] },
    #[error("orbit came within {distance:e} of exceptional point {point:?} at t = {t}")]
    NearExceptional { t: f64, point: [f64; 3], distance: f64 },
    #[error("planar angle jumped by {0} in one fixed step")]
    AngleJump(f64),
    #[error("first integral vanishes at the start")]
    ZeroFirstIntegral,
    #[error("trajectory has {0} samples, need at least 3")]
    TooShort(usize),
    #[error("bad options: {0}")]
    Options(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Minimum distance to Ω for samples used in first-integral checks.
    pub guard: f64,
    /// Integrate `f/‖f‖`, so time is arc length.
    pub unit_speed: bool,
    pub max_steps: usize,
    pub h0: f64,
    pub h_min: f64,
    pub h_max: Option<f64>,
    /// Orbits closer than this to an exceptional point stop with an error.
    pub exceptional_guard: f64,
    /// Stop once the normalized `|F|` falls below this: the orbit is then
    /// within rounding of Ω and the field direction is noise.
    pub resolution: Option<f64>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            rtol: 1e-10,
            atol: 1e-12,
            guard: 1e-2,
            unit_speed: false,
            max_steps: 2_000_000,
            h0: 1e-3,
            h_min: 1e-14,
            h_max: None,
            exceptional_guard: 1e-9,
            resolution: Some(1e-13),
        }
    }
}

impl FlowOptions {
    pub fn validate(&self) -> Result<(), FlowError> {
        let pos = [("rtol", self.rtol), ("atol", self.atol), ("h0", self.h0), ("h_min", self.h_min)];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FlowError::Options(format!("{name} must be positive")));
            }
        }
        if self.guard < 0.0 || self.h_max.is_some_and(|h| !(h > 0.0)) {
            return Err(FlowError::Options("guard and h_max must be nonnegative".into()));
        }
        Ok(())
    }
}

/// A sampled orbit. `log_w` holds `log ρ − 2θ`, the logarithm of the
/// first integral, which stays representable when `θ` runs far negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 3]>,
    pub theta: Vec<f64>,
    pub log_w: Vec<f64>,
    /// Step size that produced each sample (0 for the first).
    pub steps: Vec<f64>,
    /// Scaled local error estimate of that step.
    pub errs: Vec<f64>,
    pub unit_speed: bool,
    /// Stopped by `max_steps` before reaching the horizon.
    pub truncated: bool,
    /// Stopped early on reaching the resolution limit near Ω.
    pub stalled: bool,
    pub rejected: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn w(&self, i: usize) -> f64 {
        self.log_w[i].exp()
    }

    pub fn last(&self) -> [f64; 3] {
        *self.states.last().expect("trajectories are nonempty")
    }

    pub fn max_norm_error(&self) -> f64 {
        self.states.iter().map(|u| (norm(*u) - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,x,y,z,theta,w,step,err")?;
        for i in 0..self.len() {
            let u = self.states[i];
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                self.times[i],
                u[0],
                u[1],
                u[2],
                self.theta[i],
                self.w(i),
                self.steps[i],
                self.errs[i]
            )?;
        }
        Ok(())
    }
}

pub(crate) fn norm(u: [f64; 3]) -> f64 {
    (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt()
}

/// `n` points spread over Ω.
pub fn sample_zero_set(f: &SphereFunction, n: usize) -> Vec<[f64; 3]> {
    f.sample_zero_set(n)
}

/// A reproducible point at chart distance `radius` from the south pole.
pub fn seed_orbit(radius: f64, seed: u64) -> [f64; 3] {
    if radius == 0.0 {
        return [0.0, 0.0, -1.0];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let (x, y) = (radius * a.cos(), radius * a.sin());
    [x, y, -(1.0 - x * x - y * y).sqrt()]
}
