//! Forward-mode derivatives in three directions.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dual {
    pub v: f64,
    pub d: [f64; 3],
}

impl Dual {
    pub fn constant(v: f64) -> Dual {
        Dual { v, d: [0.0; 3] }
    }

    pub fn var(v: f64, i: usize) -> Dual {
        let mut d = [0.0; 3];
        d[i] = 1.0;
        Dual { v, d }
    }

    pub fn sqrt(self) -> Dual {
        let s = self.v.sqrt();
        let k = 0.5 / s;
        Dual { v: s, d: self.d.map(|x| x * k) }
    }

    pub fn scale(self, c: f64) -> Dual {
        Dual { v: self.v * c, d: self.d.map(|x| x * c) }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2]] }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: [self.d[0] - o.d[0], self.d[1] - o.d[1], self.d[2] - o.d[2]] }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        let d = [0, 1, 2].map(|i| self.d[i] * o.v + self.v * o.d[i]);
        Dual { v: self.v * o.v, d }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = self.v / o.v;
        let d = [0, 1, 2].map(|i| (self.d[i] - q * o.d[i]) / o.v);
        Dual { v: q, d }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { v: -self.v, d: self.d.map(|x| -x) }
    }
}

/// Complex number with dual parts.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CDual {
    pub re: Dual,
    pub im: Dual,
}

impl CDual {
    pub fn new(re: Dual, im: Dual) -> CDual {
        CDual { re, im }
    }

    pub fn norm2(self) -> Dual {
        self.re * self.re + self.im * self.im
    }

    /// `self · conj(o)`
    pub fn mul_conj(self, o: CDual) -> CDual {
        CDual { re: self.re * o.re + self.im * o.im, im: self.im * o.re - self.re * o.im }
    }

    /// Multiplication by a constant complex number.
    pub fn cmul(self, c: [f64; 2]) -> CDual {
        CDual { re: self.re.scale(c[0]) - self.im.scale(c[1]), im: self.re.scale(c[1]) + self.im.scale(c[0]) }
    }
}

impl Add for CDual {
    type Output = CDual;
    fn add(self, o: CDual) -> CDual {
        CDual { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for CDual {
    type Output = CDual;
    fn sub(self, o: CDual) -> CDual {
        CDual { re: self.re - o.re, im: self.im - o.im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_rule() {
        let x = Dual::var(2.0, 0);
        let y = Dual::var(3.0, 1);
        let q = (x * x) / (y + Dual::constant(1.0));
        assert_eq!(q.v, 1.0);
        assert_eq!(q.d, [1.0, -0.25, 0.0]);
        let s = (x * y).sqrt();
        assert!((s.d[0] - 3.0 / (2.0 * 6f64.sqrt())).abs() < 1e-15);
    }
}
