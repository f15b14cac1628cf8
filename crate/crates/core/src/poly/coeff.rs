use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::PolyError;

/// Arbitrary-precision integer coefficients.
pub type Integer = BigInt;
/// Arbitrary-precision rational coefficients.
pub type Rational = BigRational;

/// Coefficient ring of a [`Polynomial`](super::Polynomial).
///
/// Arithmetic takes references so big coefficients are not cloned on every
/// operation. `div_exact` returns `None` when the quotient leaves the ring.
pub trait Coeff: Clone + PartialEq + Eq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn div_exact(&self, o: &Self) -> Option<Self>;
    fn to_text(&self) -> String;
    fn parse_text(s: &str) -> Result<Self, PolyError>;

    fn add_assign_ref(&mut self, o: &Self) {
        *self = self.add_ref(o);
    }
}

/// Coefficients with a real floating-point image.
pub trait RealCoeff: Coeff {
    fn to_f64(&self) -> f64;
    fn to_rational(&self) -> Rational;
}

impl Coeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            return None;
        }
        let (q, r) = self.div_rem(o);
        Zero::is_zero(&r).then_some(q)
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn parse_text(s: &str) -> Result<Self, PolyError> {
        s.trim()
            .parse()
            .map_err(|_| PolyError::Parse(format!("bad integer `{s}`")))
    }
    fn add_assign_ref(&mut self, o: &Self) {
        *self += o;
    }
}

impl RealCoeff for BigInt {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_rational(&self) -> Rational {
        BigRational::from_integer(self.clone())
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        (!Zero::is_zero(o)).then(|| self / o)
    }
    fn to_text(&self) -> String {
        rational_to_text(self)
    }
    fn parse_text(s: &str) -> Result<Self, PolyError> {
        parse_rational(s)
    }
    fn add_assign_ref(&mut self, o: &Self) {
        *self += o;
    }
}

impl RealCoeff for BigRational {
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

/// `p/q` text, or just `p` for integers.
pub fn rational_to_text(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, PolyError> {
    let s = s.trim();
    let bad = || PolyError::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if Zero::is_zero(&d) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Correctly scaled conversion; the naive numer/denom division overflows for
/// large coefficients.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (ToPrimitive::to_f64(r.numer()), ToPrimitive::to_f64(r.denom())) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64;
    let prec = 64i64;
    let scaled = if shift > prec {
        r.numer() / (r.denom() << ((shift - prec) as usize))
    } else {
        (r.numer() << ((prec - shift) as usize)) / r.denom()
    };
    let m = ToPrimitive::to_f64(&scaled).unwrap_or(f64::NAN);
    m * 2f64.powi((shift - prec) as i32)
}

/// Exact rational from a finite double.
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    BigRational::from_float(v)
}

/// Gaussian integer `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussInt { re: re.into(), im: im.into() }
    }

    pub fn i() -> Self {
        GaussInt::new(0, 1)
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Debug for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.re, self.im)
    }
}

impl Coeff for GaussInt {
    fn zero() -> Self {
        GaussInt::new(0, 0)
    }
    fn one() -> Self {
        GaussInt::new(1, 0)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn from_i64(v: i64) -> Self {
        GaussInt::new(v, 0)
    }
    fn add_ref(&self, o: &Self) -> Self {
        GaussInt { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub_ref(&self, o: &Self) -> Self {
        GaussInt { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul_ref(&self, o: &Self) -> Self {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn neg_ref(&self) -> Self {
        GaussInt { re: -&self.re, im: -&self.im }
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        let n = o.norm();
        if Zero::is_zero(&n) {
            return None;
        }
        // (a+bi)(c-di) / (c^2+d^2)
        let re = &self.re * &o.re + &self.im * &o.im;
        let im = &self.im * &o.re - &self.re * &o.im;
        let (qr, rr) = re.div_rem(&n);
        let (qi, ri) = im.div_rem(&n);
        (Zero::is_zero(&rr) && Zero::is_zero(&ri)).then_some(GaussInt { re: qr, im: qi })
    }
    fn to_text(&self) -> String {
        format!("({},{})", self.re, self.im)
    }
    fn parse_text(s: &str) -> Result<Self, PolyError> {
        let s = s.trim();
        let bad = || PolyError::Parse(format!("bad gaussian integer `{s}`"));
        let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')'));
        match inner {
            Some(body) => {
                let (re, im) = body.split_once(',').ok_or_else(bad)?;
                Ok(GaussInt {
                    re: re.trim().parse().map_err(|_| bad())?,
                    im: im.trim().parse().map_err(|_| bad())?,
                })
            }
            None => Ok(GaussInt { re: s.parse().map_err(|_| bad())?, im: Zero::zero() }),
        }
    }
    fn add_assign_ref(&mut self, o: &Self) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

/// Greatest common divisor of a list of integers, nonnegative.
pub fn integer_gcd<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::from(0), |g, v| g.gcd(v))
        .abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_unit_squares_to_minus_one() {
        let i = GaussInt::i();
        assert_eq!(i.mul_ref(&i), GaussInt::from_i64(-1));
    }

    #[test]
    fn gaussian_exact_division() {
        let a = GaussInt::new(3, 4);
        let b = GaussInt::new(1, 2);
        let p = a.mul_ref(&b);
        assert_eq!(p.div_exact(&b), Some(a));
        assert_eq!(GaussInt::new(1, 0).div_exact(&GaussInt::new(1, 1)), None);
    }

    #[test]
    fn rational_text_round_trip() {
        let r = parse_rational("-6/4").unwrap();
        assert_eq!(rational_to_text(&r), "-3/2");
        assert_eq!(parse_rational(&rational_to_text(&r)).unwrap(), r);
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = BigInt::from(10).pow(400u32);
        let r = BigRational::new(big.clone() * 3, big);
        assert!((rational_to_f64(&r) - 3.0).abs() < 1e-15);
    }
}
