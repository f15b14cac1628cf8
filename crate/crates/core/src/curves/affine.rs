use serde::{Deserialize, Serialize};

use crate::poly::{rational_from_f64, rational_to_f64, Coeff, RatPoly, Rational};

use super::CurveError;

/// Plane affine map `v ↦ m·v + t` with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine2 {
    pub m: [[Rational; 2]; 2],
    pub t: [Rational; 2],
}

impl Affine2 {
    pub fn identity() -> Self {
        let one = Rational::from_i64(1);
        let zero = Rational::from_i64(0);
        Affine2 { m: [[one.clone(), zero.clone()], [zero.clone(), one]], t: [zero.clone(), zero] }
    }

    pub fn new(m: [[Rational; 2]; 2], t: [Rational; 2]) -> Result<Self, CurveError> {
        let a = Affine2 { m, t };
        if a.det().is_zero() {
            return Err(CurveError::SingularAffine);
        }
        Ok(a)
    }

    pub fn translation(tx: Rational, ty: Rational) -> Self {
        let mut a = Self::identity();
        a.t = [tx, ty];
        a
    }

    pub fn scaling(s: Rational) -> Result<Self, CurveError> {
        let zero = Rational::from_i64(0);
        Self::new([[s.clone(), zero.clone()], [zero.clone(), s]], [zero.clone(), zero])
    }

    /// Exact dyadic image of a floating-point map.
    pub fn from_f64(m: [[f64; 2]; 2], t: [f64; 2]) -> Result<Self, CurveError> {
        let q = |v: f64| rational_from_f64(v).ok_or(CurveError::NonFinite);
        Self::new([[q(m[0][0])?, q(m[0][1])?], [q(m[1][0])?, q(m[1][1])?]], [q(t[0])?, q(t[1])?])
    }

    pub fn det(&self) -> Rational {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn inverse(&self) -> Result<Self, CurveError> {
        let d = self.det();
        if d.is_zero() {
            return Err(CurveError::SingularAffine);
        }
        let [[a, b], [c, e]] = &self.m;
        let mi = [[e / &d, -b / &d], [-c / &d, a / &d]];
        let ti = [
            -(&mi[0][0] * &self.t[0] + &mi[0][1] * &self.t[1]),
            -(&mi[1][0] * &self.t[0] + &mi[1][1] * &self.t[1]),
        ];
        Ok(Affine2 { m: mi, t: ti })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Affine2) -> Affine2 {
        let mut m = self.m.clone();
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = &self.m[i][0] * &other.m[0][j] + &self.m[i][1] * &other.m[1][j];
            }
        }
        let t = [
            &self.m[0][0] * &other.t[0] + &self.m[0][1] * &other.t[1] + &self.t[0],
            &self.m[1][0] * &other.t[0] + &self.m[1][1] * &other.t[1] + &self.t[1],
        ];
        Affine2 { m, t }
    }

    pub fn apply_exact(&self, p: &[Rational; 2]) -> [Rational; 2] {
        [
            &self.m[0][0] * &p[0] + &self.m[0][1] * &p[1] + &self.t[0],
            &self.m[1][0] * &p[0] + &self.m[1][1] * &p[1] + &self.t[1],
        ]
    }

    pub fn to_f64(&self) -> ([[f64; 2]; 2], [f64; 2]) {
        let f = rational_to_f64;
        (
            [[f(&self.m[0][0]), f(&self.m[0][1])], [f(&self.m[1][0]), f(&self.m[1][1])]],
            [f(&self.t[0]), f(&self.t[1])],
        )
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let (m, t) = self.to_f64();
        [m[0][0] * p[0] + m[0][1] * p[1] + t[0], m[1][0] * p[0] + m[1][1] * p[1] + t[1]]
    }

    /// Linear polynomials `(x', y')` in `(x, y)` giving this map.
    pub fn as_polynomials(&self) -> [RatPoly; 2] {
        let vars = ["x", "y"];
        let row = |i: usize| {
            RatPoly::from_terms(
                &vars,
                [
                    (vec![1, 0], self.m[i][0].clone()),
                    (vec![0, 1], self.m[i][1].clone()),
                    (vec![0, 0], self.t[i].clone()),
                ],
            )
            .expect("two variables")
        };
        [row(0), row(1)]
    }
}

/// JSON form: `{"matrix": [[a,b],[c,d]], "translation": [e,f]}` with entries
/// as `"p/q"` strings or plain numbers.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AffineRecord {
    pub matrix: [[crate::io::Exact; 2]; 2],
    #[serde(default = "zero_translation")]
    pub translation: [crate::io::Exact; 2],
}

fn zero_translation() -> [crate::io::Exact; 2] {
    [crate::io::Exact(Rational::from_i64(0)), crate::io::Exact(Rational::from_i64(0))]
}

impl AffineRecord {
    pub fn to_affine(&self) -> Result<Affine2, CurveError> {
        let e = |i: usize, j: usize| self.matrix[i][j].0.clone();
        Affine2::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]], [self.translation[0].0.clone(), self.translation[1].0.clone()])
    }

    pub fn from_affine(a: &Affine2) -> Self {
        let x = |r: &Rational| crate::io::Exact(r.clone());
        AffineRecord {
            matrix: [[x(&a.m[0][0]), x(&a.m[0][1])], [x(&a.m[1][0]), x(&a.m[1][1])]],
            translation: [x(&a.t[0]), x(&a.t[1])],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn inverse_composes_to_identity() {
        let a = Affine2::new([[r(2, 1), r(1, 3)], [r(-1, 2), r(5, 7)]], [r(3, 1), r(-2, 5)]).unwrap();
        assert!(a.compose(&a.inverse().unwrap()).is_identity());
        assert!(a.inverse().unwrap().compose(&a).is_identity());
    }

    #[test]
    fn singular_matrix_rejected() {
        let z = r(0, 1);
        let err = Affine2::new([[r(1, 1), r(2, 1)], [r(2, 1), r(4, 1)]], [z.clone(), z]);
        assert!(matches!(err, Err(CurveError::SingularAffine)));
    }
}
