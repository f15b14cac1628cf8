use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::curves::{implicitize_data, param_point, stereo_north_inverse, AffineRecord, LiftedEval};
use crate::io::Exact;
use crate::poly::RatPoly;

use super::dual::{CDual, Dual};
use super::FieldError;

/// Serialized form of one factor of `F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FactorSpec {
    /// `a·x + b·y + c·z + d`; a plane circle lifts to one of these.
    Affine { coeffs: [Exact; 4] },
    /// `(1−z)ⁿ·p(x/(1−z), y/(1−z))` for a plane polynomial `p` in `x, y`.
    Lifted { polynomial: String, degree: u32 },
    /// Sum of squares of the lifted components of the standard k-cusped
    /// hypocycloid, moved by `affine`.
    Hypocycloid { k: u32, affine: AffineRecord },
    /// Segment from `from` to `to` in the plane.
    Segment { from: [Exact; 2], to: [Exact; 2] },
    /// Half line from `from` along `direction`, closed at ∞.
    Ray { from: [Exact; 2], direction: [Exact; 2] },
}

impl FactorSpec {
    pub fn affine(a: f64, b: f64, c: f64, d: f64) -> FactorSpec {
        let e = |v: f64| Exact::from_f64(v).expect("finite");
        FactorSpec::Affine { coeffs: [e(a), e(b), e(c), e(d)] }
    }

    /// Lift of the circle `|p − center| = r`: `(1+z) − 2c·(x,y) + (|c|²−r²)(1−z)`,
    /// negative inside the disk.
    pub fn circle(center: [f64; 2], r: f64) -> FactorSpec {
        let k = center[0] * center[0] + center[1] * center[1] - r * r;
        FactorSpec::affine(-2.0 * center[0], -2.0 * center[1], 1.0 - k, 1.0 + k)
    }
}

fn c2(p: &[Exact; 2]) -> [f64; 2] {
    [p[0].to_f64(), p[1].to_f64()]
}

/// Möbius map `w ↦ (a·w + b)/(c·w + d)` sending `[−1, 1]` onto the piece.
#[derive(Clone, Debug)]
struct Mobius {
    m: [[f64; 2]; 4],
}

impl Mobius {
    fn segment(a: [f64; 2], b: [f64; 2]) -> Mobius {
        let h = |s: f64, x: [f64; 2], y: [f64; 2]| [(x[0] + s * y[0]) / 2.0, (x[1] + s * y[1]) / 2.0];
        Mobius { m: [h(-1.0, b, a), h(1.0, a, b), [0.0, 0.0], [1.0, 0.0]] }
    }

    fn ray(p: [f64; 2], e: [f64; 2]) -> Mobius {
        Mobius { m: [[e[0] - p[0], e[1] - p[1]], [e[0] + p[0], e[1] + p[1]], [-1.0, 0.0], [1.0, 0.0]] }
    }

    /// Sphere point of `M(w)` for real `w`.
    fn forward(&self, w: f64) -> [f64; 3] {
        let [a, b, c, d] = self.m;
        let n = [a[0] * w + b[0], a[1] * w + b[1]];
        let q = [c[0] * w + d[0], c[1] * w + d[1]];
        homogeneous_to_sphere(n, q)
    }
}

fn homogeneous_to_sphere(n: [f64; 2], d: [f64; 2]) -> [f64; 3] {
    let nn = n[0] * n[0] + n[1] * n[1];
    let dd = d[0] * d[0] + d[1] * d[1];
    let p = [n[0] * d[0] + n[1] * d[1], n[1] * d[0] - n[0] * d[1]];
    let s = nn + dd;
    [2.0 * p[0] / s, 2.0 * p[1] / s, (nn - dd) / s]
}

#[derive(Clone, Debug)]
enum Kind {
    Affine([f64; 4]),
    Lifted(LiftedEval),
    Hypocycloid {
        k: u32,
        components: Vec<LiftedEval>,
        /// inverse linear part and `M⁻¹t` of the placement
        inv: [[f64; 2]; 2],
        inv_t: [f64; 2],
        place: ([[f64; 2]; 2], [f64; 2]),
    },
    Mobius(Mobius),
}

/// A compiled factor. Hypocycloid and segment factors are rescaled so that
/// their value at the south pole is 1.
#[derive(Clone, Debug)]
pub struct Factor {
    kind: Kind,
    scale: f64,
    exceptional: Vec<[f64; 3]>,
}

const SOUTH: [f64; 3] = [0.0, 0.0, -1.0];

impl Factor {
    pub fn new(spec: &FactorSpec) -> Result<Factor, FieldError> {
        let (kind, exceptional) = match spec {
            FactorSpec::Affine { coeffs } => (Kind::Affine(coeffs.clone().map(|c| c.to_f64())), vec![]),
            FactorSpec::Lifted { polynomial, degree } => {
                let p = RatPoly::parse(polynomial, &["x", "y"]).map_err(|e| FieldError::Spec(e.to_string()))?;
                (Kind::Lifted(LiftedEval::new(&p, *degree)?), vec![])
            }
            FactorSpec::Hypocycloid { k, affine } => {
                let a = affine.to_affine()?;
                let data = implicitize_data(*k)?;
                let components = data
                    .components()
                    .iter()
                    .map(|c| {
                        let p = c.to_rational_poly();
                        let n = p.degree().unwrap_or(0);
                        LiftedEval::new(&p, n)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let (m, t) = a.to_f64();
                let (mi, _) = a.inverse()?.to_f64();
                let inv_t = [mi[0][0] * t[0] + mi[0][1] * t[1], mi[1][0] * t[0] + mi[1][1] * t[1]];
                (Kind::Hypocycloid { k: *k, components, inv: mi, inv_t, place: (m, t) }, vec![])
            }
            FactorSpec::Segment { from, to } => {
                let m = Mobius::segment(c2(from), c2(to));
                let ex = vec![m.forward(-1.0), m.forward(1.0)];
                (Kind::Mobius(m), ex)
            }
            FactorSpec::Ray { from, direction } => {
                let e = c2(direction);
                if e == [0.0, 0.0] {
                    return Err(FieldError::Spec("ray direction is zero".into()));
                }
                let m = Mobius::ray(c2(from), e);
                (Kind::Mobius(m), vec![stereo_north_inverse(c2(from)), [0.0, 0.0, 1.0]])
            }
        };
        let mut f = Factor { kind, scale: 1.0, exceptional };
        if matches!(f.kind, Kind::Hypocycloid { .. } | Kind::Mobius(_)) {
            let v = f.raw(SOUTH)?.0;
            if v.is_finite() && v > 0.0 {
                f.scale = 1.0 / v;
            }
        }
        Ok(f)
    }

    pub fn exceptional_points(&self) -> &[[f64; 3]] {
        &self.exceptional
    }

    fn raw(&self, u: [f64; 3]) -> Result<(f64, [f64; 3]), FieldError> {
        match &self.kind {
            Kind::Affine(c) => Ok((c[0] * u[0] + c[1] * u[1] + c[2] * u[2] + c[3], [c[0], c[1], c[2]])),
            Kind::Lifted(l) => Ok(l.value_grad(u)),
            Kind::Hypocycloid { components, inv, inv_t, .. } => {
                let w = 1.0 - u[2];
                let q = [
                    inv[0][0] * u[0] + inv[0][1] * u[1] - w * inv_t[0],
                    inv[1][0] * u[0] + inv[1][1] * u[1] - w * inv_t[1],
                ];
                let mut v = 0.0;
                let mut g = [0.0; 3];
                for c in components {
                    let (cv, cg) = c.value_grad([q[0], q[1], u[2]]);
                    let gx = cg[0] * inv[0][0] + cg[1] * inv[1][0];
                    let gy = cg[0] * inv[0][1] + cg[1] * inv[1][1];
                    let gz = cg[0] * inv_t[0] + cg[1] * inv_t[1] + cg[2];
                    v += cv * cv;
                    g[0] += 2.0 * cv * gx;
                    g[1] += 2.0 * cv * gy;
                    g[2] += 2.0 * cv * gz;
                }
                Ok((v, g))
            }
            Kind::Mobius(m) => mobius_segment_value(m, u),
        }
    }

    pub fn value_grad(&self, u: [f64; 3]) -> Result<(f64, [f64; 3]), FieldError> {
        let (v, g) = self.raw(u)?;
        Ok((v * self.scale, g.map(|x| x * self.scale)))
    }

    pub fn value(&self, u: [f64; 3]) -> f64 {
        match self.raw(u) {
            Ok((v, _)) => v * self.scale,
            Err(_) => 0.0,
        }
    }

    /// Value and the rounding scale of the value.
    pub fn value_with_magnitude(&self, u: [f64; 3]) -> (f64, f64) {
        match &self.kind {
            Kind::Hypocycloid { components, inv, inv_t, .. } => {
                let w = 1.0 - u[2];
                let q = [
                    inv[0][0] * u[0] + inv[0][1] * u[1] - w * inv_t[0],
                    inv[1][0] * u[0] + inv[1][1] * u[1] - w * inv_t[1],
                ];
                let mut v = 0.0;
                let mut mag = 0.0;
                for c in components {
                    let (cv, cm) = c.value_with_magnitude([q[0], q[1], u[2]]);
                    v += cv * cv;
                    mag += cm * cm;
                }
                (v * self.scale, mag * self.scale)
            }
            Kind::Lifted(l) => l.value_with_magnitude(u),
            Kind::Affine(c) => {
                let v = self.value(u);
                let m = (c[0] * u[0]).abs() + (c[1] * u[1]).abs() + (c[2] * u[2]).abs() + c[3].abs();
                (v, m * self.scale)
            }
            // both squared quantities are computed at unit scale
            Kind::Mobius(_) => (self.value(u), self.scale),
        }
    }

    /// Whether the value is a sum of squares, vanishing quadratically.
    pub fn is_square(&self) -> bool {
        matches!(self.kind, Kind::Hypocycloid { .. } | Kind::Mobius(_))
    }

    /// Points of the zero set on the sphere, roughly evenly spread.
    pub fn sample_zero_set(&self, n: usize) -> Vec<[f64; 3]> {
        let n = n.max(2);
        match &self.kind {
            Kind::Affine(c) => {
                let nv = [c[0], c[1], c[2]];
                let nn = nv.iter().map(|x| x * x).sum::<f64>();
                if nn == 0.0 || c[3] * c[3] > nn {
                    return vec![];
                }
                let centre = nv.map(|x| -c[3] * x / nn);
                let r = (1.0 - c[3] * c[3] / nn).sqrt();
                let l = nn.sqrt();
                let unit = nv.map(|x| x / l);
                let helper = if unit[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
                let e1 = normalize(cross(unit, helper));
                let e2 = cross(unit, e1);
                (0..n)
                    .map(|i| {
                        let t = TAU * i as f64 / n as f64;
                        [0, 1, 2].map(|j| centre[j] + r * (t.cos() * e1[j] + t.sin() * e2[j]))
                    })
                    .collect()
            }
            Kind::Lifted(_) => vec![],
            Kind::Hypocycloid { k, place, .. } => {
                let (m, t) = place;
                (0..n)
                    .map(|i| {
                        let p = param_point(*k, TAU * i as f64 / n as f64).expect("k ≥ 3");
                        let q = [m[0][0] * p[0] + m[0][1] * p[1] + t[0], m[1][0] * p[0] + m[1][1] * p[1] + t[1]];
                        stereo_north_inverse(q)
                    })
                    .collect()
            }
            Kind::Mobius(m) => {
                let fine: Vec<[f64; 3]> =
                    (0..16 * n).map(|i| m.forward(-(PI * i as f64 / (16 * n - 1) as f64).cos())).collect();
                resample(&fine, n)
            }
        }
    }
}

/// `n` points evenly spaced by chord length along a polyline.
fn resample(line: &[[f64; 3]], n: usize) -> Vec<[f64; 3]> {
    let mut acc = vec![0.0];
    for w in line.windows(2) {
        let d = ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2) + (w[1][2] - w[0][2]).powi(2)).sqrt();
        acc.push(acc.last().unwrap() + d);
    }
    let total = *acc.last().unwrap();
    let mut j = 0;
    (0..n)
        .map(|i| {
            let target = total * i as f64 / (n - 1) as f64;
            while j + 1 < line.len() - 1 && acc[j + 1] < target {
                j += 1;
            }
            let span = acc[j + 1] - acc[j];
            let t = if span > 0.0 { ((target - acc[j]) / span).clamp(0.0, 1.0) } else { 0.0 };
            let p = [0, 1, 2].map(|c| line[j][c] + t * (line[j + 1][c] - line[j][c]));
            normalize(p)
        })
        .collect()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    a.map(|x| x / n)
}

/// Segment function `y² + (√(y²+z²) + z)²` pulled back through `M⁻¹`.
fn mobius_segment_value(m: &Mobius, u: [f64; 3]) -> Result<(f64, [f64; 3]), FieldError> {
    let x = Dual::var(u[0], 0);
    let y = Dual::var(u[1], 1);
    let z = Dual::var(u[2], 2);
    let one = Dual::constant(1.0);
    let zero = Dual::constant(0.0);
    // stereographic coordinate as a homogeneous pair
    let (n, d) = if u[2] <= 0.0 {
        (CDual::new(x, y), CDual::new(one - z, zero))
    } else {
        (CDual::new(one + z, zero), CDual::new(x, -y))
    };
    let [a, b, c, dd] = m.m;
    let n2 = n.cmul(dd) - d.cmul(b);
    let d2 = d.cmul(a) - n.cmul(c);
    let p = n2.mul_conj(d2);
    let (nn, qq) = (n2.norm2(), d2.norm2());
    let s = nn + qq;
    let vy = (p.im + p.im) / s;
    let vz = (nn - qq) / s;
    let r2 = vy * vy + vz * vz;
    if r2.v < 1e-300 {
        return Err(FieldError::Exceptional(u));
    }
    let r = r2.sqrt();
    let a_ = if vz.v >= 0.0 { r + vz } else { vy * vy / (r - vz) };
    let f = vy * vy + a_ * a_;
    Ok((f.v, f.d))
}
