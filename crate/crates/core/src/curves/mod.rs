//! Hypocycloids, segments and circles: parametric forms, exact implicit
//! equations and their lifts to the sphere.

mod affine;
mod hypocycloid;
mod lift;
mod segment;

pub use affine::{Affine2, AffineRecord};
pub use hypocycloid::{
    cusps, hypocycloid_pair, implicitize, implicitize_data, implicitize_uncached, param_derivative,
    param_point, HypocycloidImplicit,
};
pub use lift::{
    lift_poly, lift_to_sphere, stereo_north, stereo_north_inverse, stereo_north_inverse_exact,
    LiftedEval,
};
pub use segment::{segment_sphere_function, SegmentFunction, SEGMENT_EXCEPTIONAL};

use crate::poly::{PolyError, RatPoly};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error("a hypocycloid needs at least 3 cusps, got {0}")]
    TooFewCusps(u32),
    #[error("affine matrix is singular")]
    SingularAffine,
    #[error("non-finite number")]
    NonFinite,
    #[error("lift degree {n} is below the polynomial degree {degree}")]
    LiftDegree { n: u32, degree: u32 },
    #[error("operation needs a plane curve")]
    NotPlane,
    #[error("gradient undefined at exceptional point {0:?}")]
    ExceptionalPoint([f64; 3]),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Plane,
    Sphere,
}

/// Zero set of a polynomial in `(x, y)` (plane) or `(x, y, z)` (sphere).
///
/// When `squares` is nonempty the polynomial equals the sum of their squares,
/// and evaluation goes through the components, which is far better
/// conditioned near the zero set than the expanded form.
#[derive(Clone, Debug)]
pub struct ImplicitCurve {
    pub polynomial: RatPoly,
    pub squares: Vec<RatPoly>,
    pub domain: Domain,
    pub exceptional_points: Vec<Vec<f64>>,
}

impl ImplicitCurve {
    pub fn plane(polynomial: RatPoly) -> Self {
        ImplicitCurve { polynomial, squares: Vec::new(), domain: Domain::Plane, exceptional_points: Vec::new() }
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, CurveError> {
        if self.squares.is_empty() {
            return Ok(self.polynomial.eval_f64(point)?);
        }
        let mut acc = 0.0;
        for s in &self.squares {
            let v = s.eval_f64(point)?;
            acc += v * v;
        }
        Ok(acc)
    }

    /// Value and gradient of `F`.
    pub fn eval_grad(&self, point: &[f64]) -> Result<(f64, Vec<f64>), CurveError> {
        if self.squares.is_empty() {
            let c = self.polynomial.compile();
            c.eval(point)?;
            let (v, g) = c.eval_grad(point);
            return Ok((v, g.to_vec()));
        }
        let mut v = 0.0;
        let mut g = vec![0.0; point.len()];
        for s in &self.squares {
            let c = s.compile();
            c.eval(point)?;
            let (sv, sg) = c.eval_grad(point);
            v += sv * sv;
            for (gi, si) in g.iter_mut().zip(sg.iter()) {
                *gi += 2.0 * sv * si;
            }
        }
        Ok((v, g))
    }

    /// Scale used to normalize residuals: `1 + ‖coeffs(F)‖₁·max(1,r)^deg F`.
    pub fn residual_scale(&self, point: &[f64]) -> f64 {
        let r = point.iter().map(|v| v * v).sum::<f64>().sqrt();
        let deg = self.polynomial.degree().unwrap_or(0) as i32;
        1.0 + self.polynomial.coeff_l1() * r.max(1.0).powi(deg)
    }

    pub fn normalized_residual(&self, point: &[f64]) -> Result<f64, CurveError> {
        Ok(self.eval(point)?.abs() / self.residual_scale(point))
    }

    /// The curve's image under `a`: every polynomial is composed with `a⁻¹`.
    pub fn apply_affine(&self, a: &Affine2) -> Result<ImplicitCurve, CurveError> {
        if self.domain != Domain::Plane {
            return Err(CurveError::NotPlane);
        }
        let inv = a.inverse()?.as_polynomials();
        let squares = self
            .squares
            .iter()
            .map(|s| s.compose(&inv))
            .collect::<Result<Vec<_>, _>>()?;
        let polynomial = if squares.is_empty() {
            self.polynomial.compose(&inv)?
        } else {
            let mut acc = RatPoly::zero(&["x", "y"]);
            for s in &squares {
                acc = acc.add(&s.mul(s)?)?;
            }
            acc
        };
        let exceptional_points = self
            .exceptional_points
            .iter()
            .map(|p| {
                let q = a.apply([p[0], p[1]]);
                vec![q[0], q[1]]
            })
            .collect();
        Ok(ImplicitCurve { polynomial, squares, domain: Domain::Plane, exceptional_points })
    }
}

/// Free-function form of [`ImplicitCurve::apply_affine`].
pub fn apply_affine(curve: &ImplicitCurve, a: &Affine2) -> Result<ImplicitCurve, CurveError> {
    curve.apply_affine(a)
}
