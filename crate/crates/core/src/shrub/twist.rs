use std::f64::consts::TAU;

use num_traits::Signed;

use crate::poly::{rational_to_f64, Coeff, Rational};

use super::ShrubError;

/// The plane map `g_δ(r·e^{2πiθ}) = r·e^{2πiτ_δ(θ)}`, where `τ_δ` fixes the
/// second and third quadrants, shifts `[−1/4+2|δ|, 1/4−2|δ|]` by `δ` and is
/// affine in between. Angles are measured in turns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistMap {
    delta: Rational,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Reduces a turn count to `[−1/2, 1/2)`.
fn reduce(t: &Rational) -> Rational {
    let half = q(1, 2);
    let shifted = t + &half;
    let fl = shifted.floor();
    shifted - fl - half
}

impl TwistMap {
    pub fn new(delta: Rational) -> Result<TwistMap, ShrubError> {
        if delta.abs() >= q(1, 8) {
            return Err(ShrubError::TwistRange(rational_to_f64(&delta)));
        }
        Ok(TwistMap { delta })
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    fn breakpoints(&self) -> (Rational, Rational, Rational) {
        (q(1, 4), Rational::from_i64(2) * self.delta.abs(), self.delta.clone())
    }

    /// `τ_δ` on turns, exactly.
    pub fn tau(&self, theta: &Rational) -> Rational {
        let t = reduce(theta);
        let (a, m, d) = self.breakpoints();
        if m.is_zero() || t <= -a.clone() || t >= a {
            return t;
        }
        if t < -a.clone() + &m {
            -a.clone() + (&t + &a) * (&m + &d) / &m
        } else if t <= &a - &m {
            t + d
        } else {
            a.clone() - (&a - &t) * (&m - &d) / &m
        }
    }

    /// Inverse of [`TwistMap::tau`].
    pub fn tau_inverse(&self, psi: &Rational) -> Rational {
        let t = reduce(psi);
        let (a, m, d) = self.breakpoints();
        if m.is_zero() || t <= -a.clone() || t >= a {
            return t;
        }
        if t < -a.clone() + &m + &d {
            -a.clone() + (&t + &a) * &m / (&m + &d)
        } else if t <= &a - &m + &d {
            t - d
        } else {
            a.clone() - (&a - &t) * &m / (&m - &d)
        }
    }

    fn turns_of(p: [f64; 2]) -> f64 {
        p[1].atan2(p[0]) / TAU
    }

    fn rotate_to(p: [f64; 2], turns: f64) -> [f64; 2] {
        let r = p[0].hypot(p[1]);
        [r * (TAU * turns).cos(), r * (TAU * turns).sin()]
    }

    pub fn tau_f64(&self, theta: f64) -> f64 {
        let t = crate::poly::rational_from_f64(theta).expect("finite angle");
        rational_to_f64(&self.tau(&t))
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        if p == [0.0, 0.0] {
            return p;
        }
        Self::rotate_to(p, self.tau_f64(Self::turns_of(p)))
    }

    pub fn apply_inverse(&self, p: [f64; 2]) -> [f64; 2] {
        if p == [0.0, 0.0] {
            return p;
        }
        let t = crate::poly::rational_from_f64(Self::turns_of(p)).expect("finite angle");
        Self::rotate_to(p, rational_to_f64(&self.tau_inverse(&t)))
    }
}

/// Constructor matching the operation name.
pub fn twist_map(delta: Rational) -> Result<TwistMap, ShrubError> {
    TwistMap::new(delta)
}
