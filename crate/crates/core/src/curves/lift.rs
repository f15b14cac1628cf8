use crate::poly::{Coeff, RatPoly, Rational, RealCoeff};

use super::{CurveError, Domain, ImplicitCurve};

/// Stereographic projection from the north pole, `(x,y,z) ↦ (x,y)/(1−z)`.
pub fn stereo_north(u: [f64; 3]) -> [f64; 2] {
    let w = 1.0 - u[2];
    [u[0] / w, u[1] / w]
}

/// Inverse of [`stereo_north`].
pub fn stereo_north_inverse(p: [f64; 2]) -> [f64; 3] {
    let r2 = p[0] * p[0] + p[1] * p[1];
    let d = 1.0 + r2;
    [2.0 * p[0] / d, 2.0 * p[1] / d, (r2 - 1.0) / d]
}

/// Exact inverse stereographic projection of a rational point.
pub fn stereo_north_inverse_exact(p: &[Rational; 2]) -> [Rational; 3] {
    let one = Rational::from_i64(1);
    let two = Rational::from_i64(2);
    let r2 = &p[0] * &p[0] + &p[1] * &p[1];
    let d = &one + &r2;
    [&two * &p[0] / &d, &two * &p[1] / &d, (&r2 - &one) / &d]
}

/// `Q(x,y,z) = (1−z)ⁿ·p(x/(1−z), y/(1−z))` expanded in `(x, y, z)`.
pub fn lift_poly(p: &RatPoly, n: u32) -> Result<RatPoly, CurveError> {
    let deg = p.degree().unwrap_or(0);
    if n < deg {
        return Err(CurveError::LiftDegree { n, degree: deg });
    }
    let vars = ["x", "y", "z"];
    let w = RatPoly::parse("1+-1*z", &vars)?;
    let mut w_pows = vec![RatPoly::constant(&vars, Rational::from_i64(1))];
    for i in 0..n as usize {
        let next = w_pows[i].mul(&w)?;
        w_pows.push(next);
    }
    let mut out = RatPoly::zero(&vars);
    for (m, c) in p.terms() {
        let e = m.exps();
        let mono = RatPoly::from_terms(&vars, [(vec![e[0], e[1], 0], c.clone())])?;
        out = out.add(&mono.mul(&w_pows[(n - e[0] - e[1]) as usize])?)?;
    }
    Ok(out)
}

/// Sphere-domain curve given by the lift of a plane polynomial.
pub fn lift_to_sphere(p: &RatPoly, n: u32) -> Result<ImplicitCurve, CurveError> {
    Ok(ImplicitCurve {
        polynomial: lift_poly(p, n)?,
        squares: Vec::new(),
        domain: Domain::Sphere,
        exceptional_points: Vec::new(),
    })
}

/// Floating-point evaluator of the lift in homogeneous form
/// `Σ c·xᵃ·yᵇ·(1−z)^{n−a−b}`, which stays accurate near the north pole where
/// the expanded form suffers cancellation.
#[derive(Clone, Debug)]
pub struct LiftedEval {
    n: u32,
    terms: Vec<(u32, u32, f64)>,
}

impl LiftedEval {
    pub fn new(p: &RatPoly, n: u32) -> Result<Self, CurveError> {
        let deg = p.degree().unwrap_or(0);
        if n < deg {
            return Err(CurveError::LiftDegree { n, degree: deg });
        }
        Ok(LiftedEval {
            n,
            terms: p.terms().map(|(m, c)| (m.exps()[0], m.exps()[1], c.to_f64())).collect(),
        })
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    fn tables(&self, u: [f64; 3]) -> [Vec<f64>; 3] {
        let n = self.n as usize;
        let w = 1.0 - u[2];
        let pow = |b: f64| {
            let mut t = vec![1.0; n + 1];
            for i in 1..=n {
                t[i] = t[i - 1] * b;
            }
            t
        };
        [pow(u[0]), pow(u[1]), pow(w)]
    }

    pub fn value(&self, u: [f64; 3]) -> f64 {
        let [xp, yp, wp] = self.tables(u);
        self.terms
            .iter()
            .map(|&(a, b, c)| c * xp[a as usize] * yp[b as usize] * wp[(self.n - a - b) as usize])
            .sum()
    }

    /// Value and `Σ|terms|`, the rounding scale of the value.
    pub fn value_with_magnitude(&self, u: [f64; 3]) -> (f64, f64) {
        let [xp, yp, wp] = self.tables(u);
        let mut v = 0.0;
        let mut mag = 0.0;
        for &(a, b, c) in &self.terms {
            let t = c * xp[a as usize] * yp[b as usize] * wp[(self.n - a - b) as usize];
            v += t;
            mag += t.abs();
        }
        (v, mag)
    }

    /// Value and gradient with respect to `(x, y, z)`.
    pub fn value_grad(&self, u: [f64; 3]) -> (f64, [f64; 3]) {
        let [xp, yp, wp] = self.tables(u);
        let mut v = 0.0;
        let mut g = [0.0; 3];
        for &(a, b, c) in &self.terms {
            let (a, b) = (a as usize, b as usize);
            let m = self.n as usize - a - b;
            v += c * xp[a] * yp[b] * wp[m];
            if a > 0 {
                g[0] += c * a as f64 * xp[a - 1] * yp[b] * wp[m];
            }
            if b > 0 {
                g[1] += c * b as f64 * xp[a] * yp[b - 1] * wp[m];
            }
            if m > 0 {
                g[2] -= c * m as f64 * xp[a] * yp[b] * wp[m - 1];
            }
        }
        (v, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy(s: &str) -> RatPoly {
        RatPoly::parse(s, &["x", "y"]).unwrap()
    }

    fn xyz(s: &str) -> RatPoly {
        RatPoly::parse(s, &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn reference_lifts() {
        assert_eq!(lift_poly(&xy("1*x"), 1).unwrap(), xyz("1*x"));
        assert_eq!(lift_poly(&xy("3"), 1).unwrap(), xyz("3+-3*z"));
        assert_eq!(
            lift_poly(&xy("1*x^2+1*y^2+-1"), 2).unwrap(),
            xyz("1*x^2+1*y^2+-1*z^2+2*z+-1")
        );
        assert!(matches!(lift_poly(&xy("1*x^2"), 1), Err(CurveError::LiftDegree { .. })));
    }

    #[test]
    fn unit_circle_lift_is_equator_on_sphere() {
        let q = lift_poly(&xy("1*x^2+1*y^2+-1"), 2).unwrap().compile();
        for i in 0..50 {
            let t = i as f64 * 0.37;
            let z = (i as f64 / 50.0) * 1.8 - 0.9;
            let r = (1.0 - z * z).sqrt();
            let u = [r * t.cos(), r * t.sin(), z];
            let v = q.eval(&u).unwrap();
            // 2z(1−z) on the sphere
            assert!((v - 2.0 * z * (1.0 - z)).abs() < 1e-12);
        }
    }

    #[test]
    fn homogeneous_evaluator_matches_expansion() {
        let p = xy("3*x^3+-2*x*y+1*y^2+5*x+-7");
        let q = lift_poly(&p, 4).unwrap();
        let h = LiftedEval::new(&p, 4).unwrap();
        let c = q.compile();
        let u = [0.3, -0.4, 0.2];
        let (v, g) = h.value_grad(u);
        let (cv, cg) = c.eval_grad(&u);
        assert!((v - cv).abs() < 1e-12);
        for i in 0..3 {
            assert!((g[i] - cg[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn stereographic_round_trip() {
        let p = [0.7, -1.9];
        let q = stereo_north(stereo_north_inverse(p));
        assert!((p[0] - q[0]).abs() < 1e-14 && (p[1] - q[1]).abs() < 1e-14);
        let e = stereo_north_inverse_exact(&[Rational::new(1.into(), 2.into()), Rational::from_i64(2)]);
        let s = &e[0] * &e[0] + &e[1] * &e[1] + &e[2] * &e[2];
        assert_eq!(s, Rational::from_i64(1));
    }
}
