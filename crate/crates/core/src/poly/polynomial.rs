use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use smallvec::SmallVec;

use super::coeff::{integer_gcd, Coeff, GaussInt, Integer, Rational, RealCoeff};
use super::PolyError;

/// Exponent vector ordered by graded lexicographic order: total degree
/// first, then lexicographically with the first variable most significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn new(exps: impl IntoIterator<Item = u32>) -> Self {
        Monomial(exps.into_iter().collect())
    }

    pub fn one(arity: usize) -> Self {
        Monomial(SmallVec::from_elem(0, arity))
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&o.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial in canonical form: no zero coefficients
/// are stored and every exponent vector has the arity of `vars`.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial<C> {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, C>,
}

pub type IntPoly = Polynomial<Integer>;
pub type RatPoly = Polynomial<Rational>;
pub type GaussPoly = Polynomial<GaussInt>;

impl<C: Coeff> Polynomial<C> {
    pub fn zero(vars: &[&str]) -> Self {
        Polynomial { vars: vars.iter().map(|v| v.to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn zero_in(vars: Vec<String>) -> Self {
        Polynomial { vars, terms: BTreeMap::new() }
    }

    pub fn constant_in(vars: Vec<String>, c: C) -> Self {
        let mut p = Self::zero_in(vars);
        if !c.is_zero() {
            let arity = p.vars.len();
            p.terms.insert(Monomial::one(arity), c);
        }
        p
    }

    pub fn constant(vars: &[&str], c: C) -> Self {
        Self::constant_in(vars.iter().map(|v| v.to_string()).collect(), c)
    }

    /// The polynomial consisting of a single variable.
    pub fn var(vars: &[&str], name: &str) -> Result<Self, PolyError> {
        let mut p = Self::zero(vars);
        let idx = p.var_index(name)?;
        let mut e = Monomial::one(vars.len());
        e.0[idx] = 1;
        p.terms.insert(e, C::one());
        Ok(p)
    }

    pub fn from_terms(
        vars: &[&str],
        terms: impl IntoIterator<Item = (Vec<u32>, C)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            if e.len() != vars.len() {
                return Err(PolyError::ArityMismatch { expected: vars.len(), got: e.len() });
            }
            p.add_term(Monomial::new(e), &c);
        }
        Ok(p)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Result<usize, PolyError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    /// Terms in ascending graded lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Option<&C> {
        self.terms.get(&Monomial::new(exps.iter().copied()))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn is_constant(&self) -> bool {
        self.degree().is_none_or(|d| d == 0)
    }

    pub fn constant_term(&self) -> C {
        self.terms
            .get(&Monomial::one(self.vars.len()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, o: &Self) -> Result<(), PolyError> {
        if self.vars != o.vars {
            return Err(PolyError::VariableMismatch {
                left: self.vars.clone(),
                right: o.vars.clone(),
            });
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, PolyError> {
        self.check_vars(o)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, PolyError> {
        self.check_vars(o)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), &c.neg_ref());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg_ref())).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, PolyError> {
        self.check_vars(o)?;
        let mut out = Self::zero_in(self.vars.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.mul(mb), &ca.mul_ref(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero_in(self.vars.clone());
        if c.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            out.add_term(m.clone(), &a.mul_ref(c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant_in(self.vars.clone(), C::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same variables");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same variables");
            }
        }
        acc
    }

    /// Formal partial derivative.
    pub fn diff(&self, var: &str) -> Result<Self, PolyError> {
        let idx = self.var_index(var)?;
        let mut out = Self::zero_in(self.vars.clone());
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[idx] -= 1;
            out.add_term(dm, &c.mul_ref(&C::from_i64(e as i64)));
        }
        Ok(out)
    }

    /// Exact quotient `self / d` when `d` divides `self` in the polynomial
    /// ring, `None` otherwise.
    pub fn div_exact(&self, d: &Self) -> Result<Option<Self>, PolyError> {
        self.check_vars(d)?;
        let (dm, dc) = match d.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(PolyError::ZeroPolynomial),
        };
        let mut rem = self.clone();
        let mut quot = Self::zero_in(self.vars.clone());
        while let Some((rm, rc)) = rem.leading_term() {
            let Some(qm) = rm.div(&dm) else { return Ok(None) };
            let Some(qc) = rc.div_exact(&dc) else { return Ok(None) };
            for (m, c) in &d.terms {
                rem.add_term(m.mul(&qm), &c.mul_ref(&qc).neg_ref());
            }
            quot.add_term(qm, &qc);
        }
        Ok(Some(quot))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::<D>::zero_in(self.vars.clone());
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    /// Rename or reorder into a new variable list; every variable that occurs
    /// with positive degree must be present in `vars`.
    pub fn with_vars(&self, vars: &[&str]) -> Result<Self, PolyError> {
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            let target = vars.iter().position(|w| w == v);
            if target.is_none() && self.degree_in(i) > 0 {
                return Err(PolyError::UnknownVariable(v.clone()));
            }
            map.push(target);
        }
        let mut out = Self::zero(vars);
        for (m, c) in &self.terms {
            let mut e = Monomial::one(vars.len());
            for (i, t) in map.iter().enumerate() {
                if let Some(t) = t {
                    e.0[*t] += m.0[i];
                }
            }
            out.add_term(e, c);
        }
        Ok(out)
    }

    /// Substitute `images[i]` for the i-th variable. The images share a
    /// variable list that becomes the variable list of the result.
    pub fn compose(&self, images: &[Polynomial<C>]) -> Result<Polynomial<C>, PolyError> {
        if images.len() != self.vars.len() {
            return Err(PolyError::ArityMismatch { expected: self.vars.len(), got: images.len() });
        }
        let target = images
            .first()
            .map(|p| p.vars.clone())
            .unwrap_or_default();
        for im in images {
            if im.vars != target {
                return Err(PolyError::VariableMismatch { left: target, right: im.vars.clone() });
            }
        }
        let mut powers: Vec<Vec<Polynomial<C>>> = images
            .iter()
            .map(|p| vec![Polynomial::constant_in(target.clone(), C::one()), p.clone()])
            .collect();
        for (i, _) in self.vars.iter().enumerate() {
            let need = self.degree_in(i) as usize;
            while powers[i].len() <= need {
                let next = powers[i].last().unwrap().mul(&images[i])?;
                powers[i].push(next);
            }
        }
        let mut out = Polynomial::zero_in(target.clone());
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant_in(target.clone(), c.clone());
            for (i, e) in m.0.iter().enumerate() {
                if *e > 0 {
                    t = t.mul(&powers[i][*e as usize])?;
                }
            }
            for (tm, tc) in t.terms {
                out.add_term(tm, &tc);
            }
        }
        Ok(out)
    }

    /// Text form: `coeff*x^a*y^b` terms in descending order joined by `+`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms.iter().rev() {
            let mut s = c.to_text();
            for (v, e) in self.vars.iter().zip(m.0.iter()) {
                match e {
                    0 => {}
                    1 => {
                        s.push('*');
                        s.push_str(v);
                    }
                    _ => s.push_str(&format!("*{v}^{e}")),
                }
            }
            parts.push(s);
        }
        parts.join("+")
    }

    pub fn parse(text: &str, vars: &[&str]) -> Result<Self, PolyError> {
        let mut p = Self::zero(vars);
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if text == "0" || text.is_empty() {
            return Ok(p);
        }
        for term in text.split('+') {
            let mut factors = term.split('*');
            let coeff = C::parse_text(factors.next().unwrap_or(""))?;
            let mut e = Monomial::one(vars.len());
            for f in factors {
                let (name, exp) = match f.split_once('^') {
                    Some((n, x)) => (
                        n,
                        x.parse::<u32>()
                            .map_err(|_| PolyError::Parse(format!("bad exponent in `{f}`")))?,
                    ),
                    None => (f, 1),
                };
                let idx = p.var_index(name)?;
                e.0[idx] += exp;
            }
            p.add_term(e, &coeff);
        }
        Ok(p)
    }
}

impl<C: RealCoeff> Polynomial<C> {
    /// Floating-point evaluation by power tables; each term costs one product
    /// per variable, so the rounding error is bounded by roughly
    /// `(deg + 2)·ε·Σ|c·x^e|`.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64, PolyError> {
        Ok(self.compile().eval(point)?)
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.vars.len() {
            return Err(PolyError::ArityMismatch { expected: self.vars.len(), got: point.len() });
        }
        let mut tables: Vec<Vec<Rational>> = Vec::with_capacity(point.len());
        for (i, x) in point.iter().enumerate() {
            let mut t = vec![Rational::from_i64(1)];
            for _ in 0..self.degree_in(i) {
                let next = t.last().unwrap() * x;
                t.push(next);
            }
            tables.push(t);
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.to_rational();
            for (i, e) in m.0.iter().enumerate() {
                if *e > 0 {
                    t *= &tables[i][*e as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            arity: self.vars.len(),
            max_exp: (0..self.vars.len()).map(|i| self.degree_in(i) as usize).collect(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.0.iter().map(|e| *e as usize).collect(), c.to_f64()))
                .collect(),
        }
    }

    /// Sum of absolute values of the coefficients, in floating point.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).sum()
    }

    pub fn to_rational_poly(&self) -> RatPoly {
        self.map_coeffs(|c| c.to_rational())
    }
}

impl IntPoly {
    /// Nonnegative gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        integer_gcd(self.terms.values())
    }

    /// Divide out the integer content; the sign of the leading coefficient is kept.
    pub fn primitive_part(&self) -> IntPoly {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        self.map_coeffs(|c| c / &g)
    }
}

impl RatPoly {
    /// Integer polynomial obtained by clearing denominators, together with
    /// the positive multiplier used.
    pub fn clear_denominators(&self) -> (IntPoly, BigInt) {
        let mut l = BigInt::from(1);
        for c in self.terms.values() {
            l = num_integer::lcm(l, c.denom().clone());
        }
        let ip = self.map_coeffs(|c| (c * Rational::from_integer(l.clone())).to_integer());
        (ip, l)
    }
}

impl GaussPoly {
    /// `P = P1 + i·P2` with integer polynomials `P1`, `P2`.
    pub fn split_re_im(&self) -> (IntPoly, IntPoly) {
        (self.map_coeffs(|c| c.re.clone()), self.map_coeffs(|c| c.im.clone()))
    }

    pub fn from_re_im(re: &IntPoly, im: &IntPoly) -> Result<GaussPoly, PolyError> {
        let a = re.map_coeffs(|c| GaussInt { re: c.clone(), im: BigInt::zero() });
        let b = im.map_coeffs(|c| GaussInt { re: BigInt::zero(), im: c.clone() });
        a.add(&b)
    }
}

impl<C: Coeff> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl<C: Coeff> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.vars.join(","), self.to_text())
    }
}

/// Floating-point copy of a polynomial for hot evaluation loops.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    arity: usize,
    max_exp: Vec<usize>,
    terms: Vec<(SmallVec<[usize; 4]>, f64)>,
}

impl CompiledPoly {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, PolyError> {
        if point.len() != self.arity {
            return Err(PolyError::ArityMismatch { expected: self.arity, got: point.len() });
        }
        let tables = self.power_tables(point);
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| e.iter().enumerate().fold(*c, |acc, (i, k)| acc * tables[i][*k]))
            .sum())
    }

    /// Value and `Σ |c·x^e|`, the scale against which rounding is measured.
    pub fn eval_with_magnitude(&self, point: &[f64]) -> (f64, f64) {
        let tables = self.power_tables(point);
        let mut v = 0.0;
        let mut mag = 0.0;
        for (e, c) in &self.terms {
            let t = e.iter().enumerate().fold(*c, |acc, (i, k)| acc * tables[i][*k]);
            v += t;
            mag += t.abs();
        }
        (v, mag)
    }

    /// Value and gradient.
    pub fn eval_grad(&self, point: &[f64]) -> (f64, SmallVec<[f64; 4]>) {
        let tables = self.power_tables(point);
        let mut v = 0.0;
        let mut g: SmallVec<[f64; 4]> = SmallVec::from_elem(0.0, self.arity);
        for (e, c) in &self.terms {
            v += e.iter().enumerate().fold(*c, |acc, (i, k)| acc * tables[i][*k]);
            for j in 0..self.arity {
                if e[j] == 0 {
                    continue;
                }
                let mut t = c * e[j] as f64;
                for (i, k) in e.iter().enumerate() {
                    let k = if i == j { k - 1 } else { *k };
                    t *= tables[i][k];
                }
                g[j] += t;
            }
        }
        (v, g)
    }

    fn power_tables(&self, point: &[f64]) -> SmallVec<[Vec<f64>; 4]> {
        point
            .iter()
            .zip(&self.max_exp)
            .map(|(x, m)| {
                let mut t = Vec::with_capacity(m + 1);
                t.push(1.0);
                for k in 0..*m {
                    t.push(t[k] * x);
                }
                t
            })
            .collect()
    }
}
