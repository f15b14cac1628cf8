use std::f64::consts::{FRAC_PI_2, PI};

use crate::field::{dist3, FieldError, SphereField};

use super::{norm, FlowError, FlowOptions, Trajectory};

// Dormand–Prince 5(4)
const A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Rhs<'a> {
    field: &'a SphereField,
    sign: f64,
    unit_speed: bool,
}

impl Rhs<'_> {
    fn eval(&self, u: [f64; 3]) -> Result<[f64; 3], FieldError> {
        let f = self.field.eval_unchecked(u)?;
        let s = if self.unit_speed {
            let n = norm(f);
            if n == 0.0 {
                return Ok([0.0; 3]);
            }
            self.sign / n
        } else {
            self.sign
        };
        Ok(f.map(|c| c * s))
    }

    /// One step: the fifth-order solution and the embedded error vector.
    fn step(&self, u: [f64; 3], h: f64) -> Result<([f64; 3], [f64; 3]), FieldError> {
        let mut k = [[0.0; 3]; 7];
        k[0] = self.eval(u)?;
        for (s, row) in A.iter().enumerate() {
            let mut y = u;
            for (j, a) in row.iter().enumerate() {
                for c in 0..3 {
                    y[c] += h * a * k[j][c];
                }
            }
            k[s + 1] = self.eval(y)?;
        }
        let mut y5 = u;
        let mut err = [0.0; 3];
        for c in 0..3 {
            for j in 0..6 {
                y5[c] += h * A[5][j] * k[j][c];
            }
            for j in 0..7 {
                err[c] += h * E[j] * k[j][c];
            }
        }
        Ok((y5, err))
    }
}

fn wrap(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a < -PI {
        a += 2.0 * PI;
    }
    a
}

fn unit(u: [f64; 3]) -> [f64; 3] {
    let n = norm(u);
    u.map(|c| c / n)
}

struct Recorder<'a> {
    field: &'a SphereField,
    traj: Trajectory,
}

impl Recorder<'_> {
    fn push(&mut self, t: f64, u: [f64; 3], h: f64, err: f64) -> Result<(), FieldError> {
        let theta = match self.traj.states.last() {
            None => u[1].atan2(u[0]),
            Some(p) => {
                let prev = *self.traj.theta.last().expect("theta per state");
                prev + planar_increment(*p, u)
            }
        };
        let log_w = self.field.rho(u)?.ln() - 2.0 * theta;
        let tr = &mut self.traj;
        tr.times.push(t);
        tr.states.push(u);
        tr.theta.push(theta);
        tr.log_w.push(log_w);
        tr.steps.push(h);
        tr.errs.push(err);
        Ok(())
    }
}

fn planar_increment(p: [f64; 3], u: [f64; 3]) -> f64 {
    if (p[0] == 0.0 && p[1] == 0.0) || (u[0] == 0.0 && u[1] == 0.0) {
        return 0.0;
    }
    wrap(u[1].atan2(u[0]) - p[1].atan2(p[0]))
}

fn start(field: &SphereField, p0: [f64; 3], unit_speed: bool) -> Result<(Recorder<'_>, [f64; 3]), FlowError> {
    let n = norm(p0);
    if (n - 1.0).abs() > 1e-10 {
        return Err(FieldError::OffSphere(n).into());
    }
    let p0 = unit(p0);
    if field.source.is_exceptional(p0) {
        return Err(FieldError::Exceptional(p0).into());
    }
    let traj = Trajectory {
        times: vec![],
        states: vec![],
        theta: vec![],
        log_w: vec![],
        steps: vec![],
        errs: vec![],
        unit_speed,
        truncated: false,
        stalled: false,
        rejected: 0,
    };
    let mut rec = Recorder { field, traj };
    rec.push(0.0, p0, 0.0, 0.0)?;
    Ok((rec, p0))
}

fn near_exceptional(field: &SphereField, u: [f64; 3], guard: f64, t: f64) -> Result<(), FlowError> {
    for e in &field.source.exceptional_points {
        let d = dist3(*e, u);
        if d < guard {
            return Err(FlowError::NearExceptional { t, point: *e, distance: d });
        }
    }
    Ok(())
}

/// Adaptive Dormand–Prince integration of `u′ = f(u)` for flow time `t_end`
/// (backward when negative), projecting back to the sphere after each step.
/// Steps that turn the planar angle by more than π/2 are retried smaller.
pub fn integrate(field: &SphereField, p0: [f64; 3], t_end: f64, opts: &FlowOptions) -> Result<Trajectory, FlowError> {
    opts.validate()?;
    let (mut rec, mut u) = start(field, p0, opts.unit_speed)?;
    let sign = if t_end < 0.0 { -1.0 } else { 1.0 };
    let span = t_end.abs();
    if norm(field.eval_unchecked(u)?) == 0.0 {
        if span > 0.0 {
            rec.push(t_end / 2.0, u, span / 2.0, 0.0)?;
            rec.push(t_end, u, span / 2.0, 0.0)?;
        }
        return Ok(rec.traj);
    }
    let rhs = Rhs { field, sign, unit_speed: opts.unit_speed };
    let h_max = opts.h_max.unwrap_or(f64::INFINITY);
    let mut s = 0.0;
    let mut h = opts.h0.min(h_max);
    let mut accepted = 0usize;
    while s < span {
        if accepted >= opts.max_steps {
            rec.traj.truncated = true;
            break;
        }
        let last = span - s <= h;
        let hs = if last { span - s } else { h };
        let h_floor = opts.h_min * s.max(1.0);
        let (y5, e) = match rhs.step(u, hs) {
            Ok(r) => r,
            Err(FieldError::Exceptional(_)) => {
                rec.traj.rejected += 1;
                h = hs * 0.25;
                if h < h_floor {
                    near_exceptional(field, u, f64::INFINITY, sign * s)?;
                }
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let mut en: f64 = 0.0;
        for c in 0..3 {
            en = en.max(e[c].abs() / (opts.atol + opts.rtol * u[c].abs().max(y5[c].abs())));
        }
        let grow = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        if en <= 1.0 {
            let un = unit(y5);
            if planar_increment(u, un).abs() > FRAC_PI_2 {
                rec.traj.rejected += 1;
                h = hs * 0.5;
                continue;
            }
            near_exceptional(field, un, opts.exceptional_guard, sign * (s + hs))?;
            s = if last { span } else { s + hs };
            u = un;
            rec.push(sign * s, u, hs, en)?;
            accepted += 1;
            h = (hs * grow).min(h_max);
            if opts.resolution.is_some_and(|r| field.source.normalized_value(u) < r) {
                rec.traj.stalled = true;
                break;
            }
        } else {
            rec.traj.rejected += 1;
            h = hs * grow;
            if h < h_floor {
                return Err(FlowError::StepUnderflow { t: sign * s, at: u });
            }
        }
    }
    Ok(rec.traj)
}

/// Fixed-step Dormand–Prince with the same projection, for order checks.
pub fn integrate_fixed(
    field: &SphereField,
    p0: [f64; 3],
    t_end: f64,
    h: f64,
    unit_speed: bool,
) -> Result<Trajectory, FlowError> {
    if !(h > 0.0) {
        return Err(FlowError::Options("step must be positive".into()));
    }
    let (mut rec, mut u) = start(field, p0, unit_speed)?;
    let sign = if t_end < 0.0 { -1.0 } else { 1.0 };
    let rhs = Rhs { field, sign, unit_speed };
    let n = (t_end.abs() / h).round().max(1.0) as usize;
    let hs = t_end.abs() / n as f64;
    for i in 1..=n {
        let (y5, e) = rhs.step(u, hs)?;
        let un = unit(y5);
        let d = planar_increment(u, un);
        if d.abs() > FRAC_PI_2 {
            return Err(FlowError::AngleJump(d));
        }
        u = un;
        rec.push(sign * hs * i as f64, u, hs, norm(e))?;
    }
    Ok(rec.traj)
}
