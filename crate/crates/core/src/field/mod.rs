//! The vector field on the unit sphere built from a nonnegative function `F`
//! whose zero set is the prescribed limit set.

mod dual;
mod factor;
mod synth;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::CurveError;
use crate::shrub::ShrubError;

pub use factor::{Factor, FactorSpec};
pub use synth::{
    compose_shrub_function, hypocycloid_frame_function, reference_bundles, sample_shrubs, FieldBundle, PunctureRecord,
    Synthesis, SynthesisOptions, BUNDLE_FORMAT,
};

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("point {0:?} is exceptional for F")]
    Exceptional([f64; 3]),
    #[error("point is off the unit sphere (norm {0})")]
    OffSphere(f64),
    #[error("F vanishes at the south pole, which must lie in the orbit region")]
    SouthPoleInZeroSet,
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("bad factor: {0}")]
    Spec(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Shrub(#[from] ShrubError),
}

/// Product of factors; zero exactly on the union of their zero sets.
#[derive(Clone, Debug)]
pub struct SphereFunction {
    pub specs: Vec<FactorSpec>,
    factors: Vec<Factor>,
    pub exceptional_points: Vec<[f64; 3]>,
}

/// Points closer than this to an exceptional point are refused.
pub const EXCEPTIONAL_RADIUS: f64 = 1e-12;

impl SphereFunction {
    pub fn new(specs: Vec<FactorSpec>) -> Result<SphereFunction, FieldError> {
        let factors = specs.iter().map(Factor::new).collect::<Result<Vec<_>, _>>()?;
        let exceptional_points = factors.iter().flat_map(|f| f.exceptional_points().iter().copied()).collect();
        Ok(SphereFunction { specs, factors, exceptional_points })
    }

    /// `F = z`, whose zero set is the equator.
    pub fn equator() -> SphereFunction {
        SphereFunction::new(vec![FactorSpec::affine(0.0, 0.0, 1.0, 0.0)]).expect("affine factor")
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_exceptional(&self, u: [f64; 3]) -> bool {
        self.exceptional_points.iter().any(|e| dist3(*e, u) < EXCEPTIONAL_RADIUS)
    }

    pub fn value(&self, u: [f64; 3]) -> f64 {
        self.factors.iter().map(|f| f.value(u)).product()
    }

    /// Value and a gradient of some extension of `F` off the sphere; only its
    /// tangential part is meaningful.
    pub fn value_grad(&self, u: [f64; 3]) -> Result<(f64, [f64; 3]), FieldError> {
        if self.is_exceptional(u) {
            return Err(FieldError::Exceptional(u));
        }
        let vals = self.factors.iter().map(|f| f.value_grad(u)).collect::<Result<Vec<_>, _>>()?;
        let total: f64 = vals.iter().map(|(v, _)| v).product();
        let mut g = [0.0; 3];
        for (i, (_, gi)) in vals.iter().enumerate() {
            let others: f64 = vals.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, (v, _))| v).product();
            for c in 0..3 {
                g[c] += others * gi[c];
            }
        }
        Ok((total, g))
    }

    /// `|F|` relative to its rounding scale, with squared factors put back on
    /// a linear footing by a square root, so every factor shrinks like the
    /// distance to its zero set and bottoms out near machine epsilon.
    pub fn normalized_value(&self, u: [f64; 3]) -> f64 {
        let mut out = 1.0;
        for f in &self.factors {
            let (v, m) = f.value_with_magnitude(u);
            let m = m.max(v.abs());
            let r = if m == 0.0 { 0.0 } else { v.abs() / m };
            out *= if f.is_square() { r.sqrt() } else { r };
        }
        out
    }

    /// `n` points on the zero set split over the factors by arc length.
    pub fn sample_zero_set(&self, n: usize) -> Vec<[f64; 3]> {
        let probe: Vec<Vec<[f64; 3]>> = self.factors.iter().map(|f| f.sample_zero_set(400)).collect();
        let lens: Vec<f64> = probe.iter().map(|s| polyline_length(s)).collect();
        let total: f64 = lens.iter().sum();
        if total == 0.0 {
            return vec![];
        }
        let mut out = Vec::with_capacity(n);
        let mut given = 0usize;
        let nonempty = lens.iter().filter(|&&l| l > 0.0).count();
        let mut seen = 0usize;
        for (f, l) in self.factors.iter().zip(&lens) {
            if *l == 0.0 {
                continue;
            }
            seen += 1;
            let m = if seen == nonempty { n - given } else { ((n as f64) * l / total).round() as usize };
            let m = m.min(n - given);
            given += m;
            if m > 0 {
                out.extend(f.sample_zero_set(m));
            }
        }
        out
    }
}

fn polyline_length(s: &[[f64; 3]]) -> f64 {
    s.windows(2).map(|w| dist3(w[0], w[1])).sum()
}

pub(crate) fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// The field `f = (f₁, f₂, f₃)` built from `G(u) = F²(u/‖u‖)`.
#[derive(Clone, Debug)]
pub struct SphereField {
    pub source: SphereFunction,
}

/// `G` and its gradient at a point of `ℝ³ ∖ {0}`.
pub fn g_and_grad(f: &SphereFunction, u: [f64; 3]) -> Result<(f64, [f64; 3]), FieldError> {
    let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let v = u.map(|x| x / n);
    let (fv, fg) = f.value_grad(v)?;
    let dot = v[0] * fg[0] + v[1] * fg[1] + v[2] * fg[2];
    let k = 2.0 * fv / n;
    Ok((fv * fv, [0, 1, 2].map(|i| k * (fg[i] - dot * v[i]))))
}

pub fn build_field(f: SphereFunction) -> SphereField {
    SphereField { source: f }
}

impl SphereField {
    pub fn g(&self, u: [f64; 3]) -> Result<f64, FieldError> {
        Ok(g_and_grad(&self.source, u)?.0)
    }

    /// The three components, valid at any nonzero `u` off the exceptional set.
    pub fn eval_unchecked(&self, u: [f64; 3]) -> Result<[f64; 3], FieldError> {
        let [x, y, z] = u;
        let (g, [gx, gy, gz]) = g_and_grad(&self.source, u)?;
        let r2 = x * x + y * y;
        Ok([
            2.0 * z * (y - x) * g + r2 * (-y * gz + z * gy),
            -2.0 * z * (x + y) * g + r2 * (x * gz - z * gx),
            r2 * (2.0 * g + y * gx - x * gy),
        ])
    }

    /// `ρ = (x²+y²)·G`.
    pub fn rho(&self, u: [f64; 3]) -> Result<f64, FieldError> {
        Ok((u[0] * u[0] + u[1] * u[1]) * self.g(u)?)
    }
}

/// The field at a unit vector.
pub fn eval_field(field: &SphereField, u: [f64; 3]) -> Result<[f64; 3], FieldError> {
    let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if (n - 1.0).abs() > 1e-12 {
        return Err(FieldError::OffSphere(n));
    }
    field.eval_unchecked(u)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SouthPoleJacobian {
    pub matrix: [[f64; 2]; 2],
    /// `(re, im)` pairs
    pub eigenvalues: [[f64; 2]; 2],
    pub g_south: f64,
    pub predicted_matrix: [[f64; 2]; 2],
    pub predicted_eigenvalues: [[f64; 2]; 2],
    /// Largest eigenvalue mismatch relative to `|2G(1±i)|`.
    pub relative_error: f64,
}

fn eig2(m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [[tr / 2.0 + s, 0.0], [tr / 2.0 - s, 0.0]]
    } else {
        let s = (-disc).sqrt();
        [[tr / 2.0, s], [tr / 2.0, -s]]
    }
}

/// Jacobian of `g(x,y) = (f₁,f₂)(x, y, −√(1−x²−y²))` at the origin by central
/// differences with step `1e−5`, against `[[2G,−2G],[2G,2G]]`.
pub fn jacobian_at_south_pole(field: &SphereField) -> Result<SouthPoleJacobian, FieldError> {
    let s = [0.0, 0.0, -1.0];
    let g = field.g(s)?;
    if g == 0.0 {
        return Err(FieldError::SouthPoleInZeroSet);
    }
    let chart = |x: f64, y: f64| -> Result<[f64; 2], FieldError> {
        let f = field.eval_unchecked([x, y, -(1.0 - x * x - y * y).sqrt()])?;
        Ok([f[0], f[1]])
    };
    let h = 1e-5;
    let mut m = [[0.0; 2]; 2];
    for j in 0..2 {
        let (dx, dy) = if j == 0 { (h, 0.0) } else { (0.0, h) };
        let a = chart(dx, dy)?;
        let b = chart(-dx, -dy)?;
        for i in 0..2 {
            m[i][j] = (a[i] - b[i]) / (2.0 * h);
        }
    }
    let p = [[2.0 * g, -2.0 * g], [2.0 * g, 2.0 * g]];
    let eig = eig2(m);
    let pe = [[2.0 * g, 2.0 * g], [2.0 * g, -2.0 * g]];
    let scale = 2.0 * g * std::f64::consts::SQRT_2;
    // eigenvalues come as a conjugate pair with the positive imaginary part first
    let err = (0..2)
        .map(|i| (eig[i][0] - pe[i][0]).hypot(eig[i][1] - pe[i][1]) / scale)
        .fold(0.0, f64::max);
    Ok(SouthPoleJacobian { matrix: m, eigenvalues: eig, g_south: g, predicted_matrix: p, predicted_eigenvalues: pe, relative_error: err })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(a: [f64; 3]) -> [f64; 3] {
        let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        a.map(|x| x / n)
    }

    #[test]
    fn constant_function_is_tangent() {
        let f = build_field(SphereFunction::new(vec![FactorSpec::affine(0.0, 0.0, 0.0, 1.0)]).unwrap());
        for u in [[0.3, 0.4, 0.5], [-0.9, 0.1, 0.2], [0.0, 0.0, 1.0]] {
            let u = unit(u);
            let v = eval_field(&f, u).unwrap();
            assert!((v[0] * u[0] + v[1] * u[1] + v[2] * u[2]).abs() < 1e-15);
        }
    }

    #[test]
    fn equator_oracles() {
        let f = build_field(SphereFunction::equator());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = eval_field(&f, [h, 0.0, -h]).unwrap();
        assert!((v[2] - 0.5).abs() < 1e-15);
        assert_eq!(eval_field(&f, [0.6, 0.8, 0.0]).unwrap(), [0.0; 3]);
        assert_eq!(eval_field(&f, [0.0, 0.0, -1.0]).unwrap(), [0.0; 3]);
        // f₃ = 2z²(x²+y²) on the sphere
        let u = unit([0.2, -0.5, -0.4]);
        let v = eval_field(&f, u).unwrap();
        assert!((v[2] - 2.0 * u[2] * u[2] * (u[0] * u[0] + u[1] * u[1])).abs() < 1e-15);
        assert!(matches!(eval_field(&f, [1.0, 1.0, 0.0]), Err(FieldError::OffSphere(_))));
    }

    #[test]
    fn south_pole_prediction() {
        for (c, g) in [(1.0, 1.0), (2.0, 4.0)] {
            let f = build_field(SphereFunction::new(vec![FactorSpec::affine(0.0, 0.0, c, 0.0)]).unwrap());
            let j = jacobian_at_south_pole(&f).unwrap();
            assert_eq!(j.g_south, g);
            assert!(j.relative_error < 1e-4, "{j:?}");
            assert!((j.eigenvalues[0][1] - 2.0 * g).abs() < 1e-4 * g);
        }
        let f = build_field(SphereFunction::equator());
        assert!(jacobian_at_south_pole(&f).is_ok());
        let f = build_field(SphereFunction::new(vec![FactorSpec::affine(1.0, 0.0, 0.0, 0.0)]).unwrap());
        assert!(matches!(jacobian_at_south_pole(&f), Err(FieldError::SouthPoleInZeroSet)));
    }

    #[test]
    fn scaling_covariance() {
        let a = build_field(SphereFunction::new(vec![FactorSpec::circle([0.2, 0.1], 0.5)]).unwrap());
        let b = build_field(
            SphereFunction::new(vec![FactorSpec::circle([0.2, 0.1], 0.5), FactorSpec::affine(0.0, 0.0, 0.0, 3.0)]).unwrap(),
        );
        let u = unit([0.3, -0.2, 0.6]);
        let (fa, fb) = (eval_field(&a, u).unwrap(), eval_field(&b, u).unwrap());
        for i in 0..3 {
            assert!((fb[i] - 9.0 * fa[i]).abs() <= 1e-14 * fb[i].abs().max(1e-300));
        }
    }
}
