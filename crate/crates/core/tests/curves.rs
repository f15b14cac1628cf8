use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shrubflow::curves::*;
use shrubflow::poly::*;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[test]
fn parametric_samples_satisfy_the_implicit_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 3..=8 {
        let c = implicitize(k).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let p = param_point(k, rng.gen_range(0.0..TAU)).unwrap();
            worst = worst.max(c.normalized_residual(&p).unwrap());
        }
        assert!(worst < 1e-12, "k={k}: {worst:e}");
        for q in cusps(k).unwrap() {
            let (_, g) = c.eval_grad(&q).unwrap();
            let n = g.iter().map(|v| v * v).sum::<f64>().sqrt() / c.residual_scale(&q);
            assert!(n < 1e-8, "k={k} cusp {q:?}: {n:e}");
        }
        assert!(c.eval(&[0.0, 0.0]).unwrap() > 0.0);
        for j in 0..16 {
            let a = TAU * j as f64 / 16.0 + 0.1;
            let r = (k + 1) as f64;
            assert!(c.eval(&[r * a.cos(), r * a.sin()]).unwrap() > 0.0);
        }
    }
}

/// The astroid `(x²+y²−16)³ + 432x²y²` and the computed `F` vanish at exactly
/// the same points of the 101×101 grid on [−5,5]², checked in exact
/// arithmetic, and agree in floating point away from the curve.
#[test]
fn astroid_grid_agreement() {
    let f = implicitize(4).unwrap();
    let classical = RatPoly::parse("1*x^2+1*y^2+-16", &["x", "y"]).unwrap().pow(3).add(
        &RatPoly::parse("432*x^2*y^2", &["x", "y"]).unwrap(),
    )
    .unwrap();
    let mut zeros = 0;
    for i in -50..=50 {
        for j in -50..=50 {
            let p = [rat(i, 10), rat(j, 10)];
            let a = classical.eval_exact(&p).unwrap();
            let b = f.polynomial.eval_exact(&p).unwrap();
            let zero = Rational::from_i64(0);
            assert_eq!(a == zero, b == zero, "at ({i}/10, {j}/10)");
            if a == zero {
                zeros += 1;
            }
            let pf = [i as f64 / 10.0, j as f64 / 10.0];
            assert_eq!(relative(&f.squares, &pf) < 1e-10, relative(&[classical.clone()], &pf) < 1e-10, "at {pf:?}");
        }
    }
    // the four cusps lie on the grid
    assert!(zeros >= 4);
}

/// Largest `|p(x)| / Σ|terms of p at x|` over the given polynomials.
fn relative(ps: &[RatPoly], x: &[f64]) -> f64 {
    ps.iter()
        .map(|p| {
            let (v, m) = p.compile().eval_with_magnitude(x);
            if m == 0.0 {
                0.0
            } else {
                v.abs() / m
            }
        })
        .fold(0.0, f64::max)
}

#[test]
fn lift_is_exact_on_rational_points() {
    let p = RatPoly::parse("3*x^2*y+-2*x*y+1/2*y^2+-5", &["x", "y"]).unwrap();
    let n = 4;
    let q = lift_poly(&p, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let pt = [rat(rng.gen_range(-40..40), rng.gen_range(1..9)), rat(rng.gen_range(-40..40), rng.gen_range(1..9))];
        let u = stereo_north_inverse_exact(&pt);
        let w = Rational::from_i64(1) - &u[2];
        let mut scale = Rational::from_i64(1);
        for _ in 0..n {
            scale = &scale * &w;
        }
        assert_eq!(q.eval_exact(&u).unwrap(), scale * p.eval_exact(&pt).unwrap());
    }
}

/// `‖γ′‖² = 2n²(1 − cos kθ)`, so the derivative vanishes exactly at the cusp
/// parameters; on a fine grid every local minimum of `‖γ′‖` sits there.
#[test]
fn derivative_vanishes_only_at_cusps() {
    for k in 3..=8 {
        let m = 20_000;
        let speed: Vec<f64> = (0..m)
            .map(|i| {
                let d = param_derivative(k, TAU * i as f64 / m as f64).unwrap();
                d[0].hypot(d[1])
            })
            .collect();
        let mut minima = Vec::new();
        for i in 0..m {
            let (a, b, c) = (speed[(i + m - 1) % m], speed[i], speed[(i + 1) % m]);
            if b <= a && b < c {
                minima.push(i);
            }
        }
        assert_eq!(minima.len(), k as usize, "k={k}");
        for (j, i) in minima.iter().enumerate() {
            let want = (j * m) as f64 / k as f64;
            assert!((*i as f64 - want).abs() <= 1.0, "k={k}: minimum at {i}, cusp at {want}");
        }
    }
}

#[test]
fn too_few_cusps() {
    assert_eq!(implicitize(2).unwrap_err(), CurveError::TooFewCusps(2));
    assert!(param_point(2, 0.0).is_err());
}
