use super::CurveError;

/// Points of the sphere where the segment function is not analytic.
pub const SEGMENT_EXCEPTIONAL: [[f64; 3]; 2] = [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]];

/// Closed-form nonnegative function `y² + (√(z²+y²) + z)²` whose zero set on
/// the sphere is the half great circle `{y = 0, z ≤ 0}` joining `(±1,0,0)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SegmentFunction;

/// Below this value of `√(y²+z²)` the gradient is reported as undefined.
const EXCEPTIONAL_RADIUS: f64 = 1e-300;

impl SegmentFunction {
    /// `s + z` with `s = √(y²+z²)`, without cancellation for `z < 0`.
    fn s_plus_z(y: f64, z: f64) -> (f64, f64) {
        let s = y.hypot(z);
        let a = if z >= 0.0 {
            s + z
        } else if s - z > 0.0 {
            y * y / (s - z)
        } else {
            0.0
        };
        (s, a)
    }

    pub fn value(&self, u: [f64; 3]) -> f64 {
        let (_, a) = Self::s_plus_z(u[1], u[2]);
        u[1] * u[1] + a * a
    }

    /// Value and gradient; errors at the exceptional points.
    pub fn value_grad(&self, u: [f64; 3]) -> Result<(f64, [f64; 3]), CurveError> {
        let (y, z) = (u[1], u[2]);
        let (s, a) = Self::s_plus_z(y, z);
        if s < EXCEPTIONAL_RADIUS {
            return Err(CurveError::ExceptionalPoint(u));
        }
        let v = y * y + a * a;
        Ok((v, [0.0, 2.0 * y + 2.0 * a * y / s, 2.0 * a * a / s]))
    }

    pub fn exceptional_points(&self) -> &'static [[f64; 3]] {
        &SEGMENT_EXCEPTIONAL
    }
}

/// [`SegmentFunction`] constructor.
pub fn segment_sphere_function() -> SegmentFunction {
    SegmentFunction
}
