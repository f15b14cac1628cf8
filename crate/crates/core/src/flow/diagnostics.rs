use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::field::dist3;

use super::{FlowError, Trajectory};

pub const MAX_HAUSDORFF_SAMPLES: usize = 5000;

/// Great-circle distance between unit vectors.
pub fn great_circle(a: [f64; 3], b: [f64; 3]) -> f64 {
    2.0 * (dist3(a, b) / 2.0).min(1.0).asin()
}

fn thin(pts: &[[f64; 3]], max: usize) -> Vec<[f64; 3]> {
    if pts.len() <= max {
        return pts.to_vec();
    }
    (0..max).map(|i| pts[i * (pts.len() - 1) / (max - 1)]).collect()
}

/// Samples after `cut` at roughly even time spacing; steps cluster where the
/// orbit turns sharply, so thinning by index would skew coverage.
fn thin_by_time(traj: &Trajectory, cut: f64, max: usize) -> Vec<[f64; 3]> {
    let s: Vec<f64> = traj.times.iter().map(|t| t.abs()).collect();
    let (a, b) = (cut.abs(), *s.last().expect("nonempty trajectory"));
    let first = s.partition_point(|t| *t < a);
    let mut out = Vec::new();
    let mut next = first;
    for k in 0..max {
        let target = if max == 1 { a } else { a + (b - a) * k as f64 / (max - 1) as f64 };
        let i = next + s[next..].partition_point(|t| *t < target);
        if i >= s.len() {
            break;
        }
        out.push(traj.states[i]);
        next = i + 1;
        if next == s.len() {
            break;
        }
    }
    out
}

fn nearest(p: [f64; 3], set: &[[f64; 3]]) -> f64 {
    set.iter().map(|q| great_circle(p, *q)).fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hausdorff {
    /// `sup_{a∈A} d(a, B)`
    pub directed_ab: f64,
    pub directed_ba: f64,
    pub symmetric: f64,
}

/// Brute-force Hausdorff distances in the great-circle metric.
pub fn hausdorff(a: &[[f64; 3]], b: &[[f64; 3]]) -> Hausdorff {
    let ab = a.iter().map(|p| nearest(*p, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|p| nearest(*p, a)).fold(0.0, f64::max);
    Hausdorff { directed_ab: ab, directed_ba: ba, symmetric: ab.max(ba) }
}

/// Largest relative change of `w` from its initial value over samples farther
/// than `guard` from the zero samples.
pub fn first_integral_drift(traj: &Trajectory, zero_samples: &[[f64; 3]], guard: f64) -> Result<f64, FlowError> {
    let w0 = traj.log_w[0];
    if !w0.is_finite() {
        return Err(FlowError::ZeroFirstIntegral);
    }
    let mut drift: f64 = 0.0;
    for (u, lw) in traj.states.iter().zip(&traj.log_w) {
        if !zero_samples.is_empty() && nearest(*u, zero_samples) <= guard {
            continue;
        }
        drift = drift.max((lw - w0).exp_m1().abs());
    }
    Ok(drift)
}

/// The sphere cut along the half meridian at azimuth `phi0`, with the angle
/// branch `Θ_I ∈ [φ₀, φ₀ + 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeridianFrame {
    pub phi0: f64,
}

impl MeridianFrame {
    pub fn theta(&self, u: [f64; 3]) -> f64 {
        self.phi0 + (u[1].atan2(u[0]) - self.phi0).rem_euclid(TAU)
    }

    /// `log J_I = log ρ − 2Θ_I`, given `ρ`.
    pub fn log_j(&self, u: [f64; 3], rho: f64) -> f64 {
        rho.ln() - 2.0 * self.theta(u)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeridianSegment {
    pub start: usize,
    pub end: usize,
    /// `(θ − Θ_I)/2π` on this segment.
    pub branch: i64,
    pub log_j: f64,
    pub variation: f64,
    /// Largest `|θ − Θ_I − 2π·branch|`.
    pub consistency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeridianReport {
    pub segments: Vec<MeridianSegment>,
    /// Samples lying exactly on the cut.
    pub on_meridian: usize,
}

/// Splits the orbit where it crosses the cut and measures how far `J_I`
/// moves on each piece. `J_I = w·e^{4π·branch}`, so neighbouring pieces
/// differ by `e^{±4π}`.
pub fn check_meridian_integral(traj: &Trajectory, frame: &MeridianFrame) -> MeridianReport {
    let mut segments: Vec<MeridianSegment> = Vec::new();
    let mut on_meridian = 0;
    for i in 0..traj.len() {
        let u = traj.states[i];
        if u[0] == 0.0 && u[1] == 0.0 {
            continue;
        }
        let big = frame.theta(u);
        if big == frame.phi0 {
            on_meridian += 1;
            continue;
        }
        let off = traj.theta[i] - big;
        let branch = (off / TAU).round() as i64;
        let log_j = traj.log_w[i] + 2.0 * off;
        let gap = (off - TAU * branch as f64).abs();
        match segments.last_mut() {
            Some(s) if s.branch == branch && s.end + 1 == i => {
                s.end = i;
                s.variation = s.variation.max((log_j - s.log_j).exp_m1().abs());
                s.consistency = s.consistency.max(gap);
            }
            _ => segments.push(MeridianSegment { start: i, end: i, branch, log_j, variation: 0.0, consistency: gap }),
        }
    }
    MeridianReport { segments, on_meridian }
}

/// Net winding `θ(T) − θ(0)` and whether `θ` is nonincreasing over the last
/// half of the samples.
pub fn winding_summary(traj: &Trajectory) -> Result<(f64, bool), FlowError> {
    let n = traj.len();
    if n < 3 {
        return Err(FlowError::TooShort(n));
    }
    let net = traj.theta[n - 1] - traj.theta[0];
    let tail = &traj.theta[n / 2..];
    let monotone = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    Ok((net, monotone))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaEstimate {
    pub window: [f64; 2],
    pub tail_samples: usize,
    pub zero_samples: usize,
    /// tail → Ω: how close the orbit has come
    pub directed: f64,
    /// Ω → tail: how much of Ω the orbit visits
    pub coverage: f64,
    pub symmetric: f64,
    /// Whether the orbit came within 0.1 of Ω at all.
    pub approached: bool,
    /// `(t, d(u(t), Ω))` at sixteen evenly spaced samples.
    pub series: Vec<[f64; 2]>,
}

/// Hausdorff distances between the last `window_fraction` of the orbit (by
/// time) and samples of Ω, each thinned to at most 5000 points.
pub fn omega_estimate(traj: &Trajectory, zero_samples: &[[f64; 3]], window_fraction: f64) -> OmegaEstimate {
    let t0 = traj.times[0];
    let t1 = *traj.times.last().expect("nonempty trajectory");
    let cut = t1 - window_fraction.clamp(0.0, 1.0) * (t1 - t0);
    let tail = thin_by_time(traj, cut, MAX_HAUSDORFF_SAMPLES);
    let zs = thin(zero_samples, MAX_HAUSDORFF_SAMPLES);
    let h = hausdorff(&tail, &zs);
    let n = traj.len();
    let series: Vec<[f64; 2]> = (0..16.min(n))
        .map(|k| {
            let i = if n == 1 { 0 } else { k * (n - 1) / (16.min(n) - 1).max(1) };
            [traj.times[i], nearest(traj.states[i], &zs)]
        })
        .collect();
    let approached = traj.states.iter().any(|u| nearest(*u, &zs) < 0.1);
    OmegaEstimate {
        window: [cut, t1],
        tail_samples: tail.len(),
        zero_samples: zs.len(),
        directed: h.directed_ab,
        coverage: h.directed_ba,
        symmetric: h.symmetric,
        approached,
        series,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hausdorff_of_shifted_sets() {
        let a = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let b = [[1.0, 0.0, 0.0]];
        let h = hausdorff(&a, &b);
        assert!((h.directed_ab - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(h.directed_ba, 0.0);
    }

    #[test]
    fn meridian_branch() {
        let f = MeridianFrame { phi0: 0.5 };
        let t = f.theta([-1.0, 0.0, 0.0]);
        assert!((t - std::f64::consts::PI).abs() < 1e-15);
        let t = f.theta([0.5f64.cos(), 0.5f64.sin() - 1e-9, 0.0]);
        assert!(t > 0.5 + 6.28);
    }
}
