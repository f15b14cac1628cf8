use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;

use crate::poly::{
    sylvester_resultant, Coeff, GaussInt, GaussPoly, IntPoly, UniPolyOverRing,
};

use super::{CurveError, Domain, ImplicitCurve};

fn check_k(k: u32) -> Result<(), CurveError> {
    if k < 3 {
        return Err(CurveError::TooFewCusps(k));
    }
    Ok(())
}

/// Point of the standard k-cusped hypocycloid at parameter `theta`.
pub fn param_point(k: u32, theta: f64) -> Result<[f64; 2], CurveError> {
    check_k(k)?;
    let n = (k - 1) as f64;
    Ok([
        n * theta.cos() + (n * theta).cos(),
        n * theta.sin() - (n * theta).sin(),
    ])
}

/// Derivative of [`param_point`] with respect to `theta`.
pub fn param_derivative(k: u32, theta: f64) -> Result<[f64; 2], CurveError> {
    check_k(k)?;
    let n = (k - 1) as f64;
    Ok([
        -n * theta.sin() - n * (n * theta).sin(),
        n * theta.cos() - n * (n * theta).cos(),
    ])
}

/// The k cusps `k·e^{2πij/k}`; for even k, cusps j and j+k/2 are opposed.
pub fn cusps(k: u32) -> Result<Vec<[f64; 2]>, CurveError> {
    check_k(k)?;
    let kf = k as f64;
    Ok((0..k)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / kf;
            [kf * a.cos(), kf * a.sin()]
        })
        .collect())
}

/// Exact implicitization data for the standard hypocycloid.
#[derive(Clone, Debug)]
pub struct HypocycloidImplicit {
    pub k: u32,
    /// Raw determinant `P = P1 + i·P2` of the Sylvester matrix.
    pub resultant: GaussPoly,
    pub p1: IntPoly,
    pub p2: IntPoly,
    /// `F = P1² + P2²`.
    pub f: IntPoly,
    pub sylvester_size: usize,
}

impl HypocycloidImplicit {
    /// Nonzero real and imaginary components.
    pub fn components(&self) -> Vec<IntPoly> {
        [&self.p1, &self.p2].into_iter().filter(|p| !p.is_zero()).cloned().collect()
    }

    /// Integer content of `P1` and `P2` together.
    pub fn content(&self) -> BigInt {
        crate::poly::integer_gcd(
            self.p1.terms().map(|(_, c)| c).chain(self.p2.terms().map(|(_, c)| c)),
        )
    }

    pub fn to_curve(&self) -> ImplicitCurve {
        ImplicitCurve {
            polynomial: self.f.to_rational_poly(),
            squares: self.components().iter().map(|p| p.to_rational_poly()).collect(),
            domain: Domain::Plane,
            exceptional_points: Vec::new(),
        }
    }
}

/// `p_x(z)` and `q_y(z)` over the Gaussian integers in the ring variables `(x, y)`.
pub fn hypocycloid_pair(k: u32) -> Result<(UniPolyOverRing<GaussInt>, UniPolyOverRing<GaussInt>), CurveError> {
    check_k(k)?;
    let n = (k - 1) as usize;
    let vars = ["x", "y"];
    let c = |v: i64| GaussPoly::constant(&vars, GaussInt::from_i64(v));
    let zero = c(0);
    let mut p = vec![zero.clone(); 2 * n + 1];
    let mut q = vec![zero; 2 * n + 1];
    p[2 * n] = c(1);
    p[n + 1] = c(n as i64);
    p[n] = GaussPoly::from_terms(&vars, [(vec![1, 0], GaussInt::from_i64(-2))])?;
    p[n - 1] = c(n as i64);
    p[0] = c(1);
    q[2 * n] = c(1);
    q[n + 1] = c(-(n as i64));
    q[n] = GaussPoly::from_terms(&vars, [(vec![0, 1], GaussInt::new(0, 2))])?;
    q[n - 1] = c(n as i64);
    q[0] = c(-1);
    Ok((UniPolyOverRing::new("z", p)?, UniPolyOverRing::new("z", q)?))
}

/// Resultant-based implicitization, computed from scratch.
pub fn implicitize_uncached(k: u32) -> Result<HypocycloidImplicit, CurveError> {
    let (p, q) = hypocycloid_pair(k)?;
    let sylvester_size = p.degree() + q.degree();
    let resultant = sylvester_resultant(&p, &q)?;
    let (p1, p2) = resultant.split_re_im();
    let f = p1.mul(&p1)?.add(&p2.mul(&p2)?)?;
    Ok(HypocycloidImplicit { k, resultant, p1, p2, f, sylvester_size })
}

/// Memoized [`implicitize_uncached`]; results are immutable and shared.
pub fn implicitize_data(k: u32) -> Result<Arc<HypocycloidImplicit>, CurveError> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<HypocycloidImplicit>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("cache lock").get(&k) {
        return Ok(hit.clone());
    }
    let data = Arc::new(implicitize_uncached(k)?);
    cache.lock().expect("cache lock").insert(k, data.clone());
    Ok(data)
}

/// Implicit curve `F = P1² + P2²` whose real zero set is the standard H_k.
pub fn implicitize(k: u32) -> Result<ImplicitCurve, CurveError> {
    Ok(implicitize_data(k)?.to_curve())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_parameters() {
        let p = param_point(3, 0.0).unwrap();
        assert!((p[0] - 3.0).abs() < 1e-15 && p[1].abs() < 1e-15);
        let p = param_point(4, PI / 2.0).unwrap();
        assert!(p[0].abs() < 1e-14 && (p[1] - 4.0).abs() < 1e-14);
        let p = param_point(4, PI / 4.0).unwrap();
        let s = 2f64.sqrt();
        assert!((p[0] - s).abs() < 1e-14 && (p[1] - s).abs() < 1e-14);
        assert!(param_point(2, 0.0).is_err());
    }

    #[test]
    fn cusp_lists() {
        let c = cusps(4).unwrap();
        let want = [[4.0, 0.0], [0.0, 4.0], [-4.0, 0.0], [0.0, -4.0]];
        for (a, b) in c.iter().zip(want) {
            assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
        let c = cusps(3).unwrap();
        let h = 3.0 * 3f64.sqrt() / 2.0;
        assert!((c[1][0] + 1.5).abs() < 1e-14 && (c[1][1] - h).abs() < 1e-14);
        assert!((c[2][0] + 1.5).abs() < 1e-14 && (c[2][1] + h).abs() < 1e-14);
        let c = cusps(6).unwrap();
        assert!((c[0][0] + c[3][0]).abs() < 1e-14 && (c[0][1] + c[3][1]).abs() < 1e-14);
        assert!(cusps(1).is_err());
    }

    #[test]
    fn cusps_lie_on_the_parametrization() {
        for k in 3..9 {
            for (j, c) in cusps(k).unwrap().iter().enumerate() {
                let p = param_point(k, 2.0 * PI * j as f64 / k as f64).unwrap();
                assert!((p[0] - c[0]).abs() < 1e-12 && (p[1] - c[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn deltoid_resultant() {
        let d = implicitize_uncached(3).unwrap();
        assert_eq!(d.sylvester_size, 8);
        assert!(d.p2.is_zero());
        // 16·(x⁴ − 8x³ + 2x²y² + 18x² + 24xy² + y⁴ + 18y² − 27), from an
        // independent symbolic computation.
        let expected = IntPoly::parse(
            "16*x^4+-128*x^3+32*x^2*y^2+288*x^2+384*x*y^2+16*y^4+288*y^2+-432",
            &["x", "y"],
        )
        .unwrap();
        assert_eq!(d.p1, expected);
        assert_eq!(d.content(), BigInt::from(16));
    }
}
