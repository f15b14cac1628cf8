use super::coeff::Coeff;
use super::polynomial::Polynomial;
use super::PolyError;

/// Univariate polynomial in `main_variable` whose coefficients are
/// polynomials in the remaining variables. `coefficients[i]` multiplies
/// `main_variable^i`.
#[derive(Clone, PartialEq)]
pub struct UniPolyOverRing<C> {
    main_variable: String,
    coefficients: Vec<Polynomial<C>>,
}

impl<C: Coeff> UniPolyOverRing<C> {
    /// Trailing zero coefficients are dropped; an all-zero list is rejected.
    pub fn new(main_variable: &str, mut coefficients: Vec<Polynomial<C>>) -> Result<Self, PolyError> {
        while coefficients.last().is_some_and(Polynomial::is_zero) {
            coefficients.pop();
        }
        let Some(first) = coefficients.first() else {
            return Err(PolyError::ZeroPolynomial);
        };
        let vars = first.vars().to_vec();
        if let Some(bad) = coefficients.iter().find(|c| c.vars() != vars.as_slice()) {
            return Err(PolyError::VariableMismatch { left: vars, right: bad.vars().to_vec() });
        }
        Ok(UniPolyOverRing { main_variable: main_variable.to_string(), coefficients })
    }

    /// View `p` as a polynomial in `var` over the ring of the other variables.
    pub fn from_poly(p: &Polynomial<C>, var: &str) -> Result<Self, PolyError> {
        let idx = p.var_index(var)?;
        let rest: Vec<String> = p.vars().iter().filter(|v| *v != var).cloned().collect();
        let rest_refs: Vec<&str> = rest.iter().map(String::as_str).collect();
        let deg = p.degree_in(idx) as usize;
        let mut coeffs: Vec<Vec<(Vec<u32>, C)>> = vec![Vec::new(); deg + 1];
        for (m, c) in p.terms() {
            let e = m.exps();
            let other: Vec<u32> = e
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, x)| *x)
                .collect();
            coeffs[e[idx] as usize].push((other, c.clone()));
        }
        let coefficients = coeffs
            .into_iter()
            .map(|ts| Polynomial::from_terms(&rest_refs, ts))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(var, coefficients)
    }

    pub fn main_variable(&self) -> &str {
        &self.main_variable
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Polynomial<C>] {
        &self.coefficients
    }

    pub fn leading_coefficient(&self) -> &Polynomial<C> {
        self.coefficients.last().expect("nonzero by construction")
    }

    pub fn ring_vars(&self) -> &[String] {
        self.coefficients[0].vars()
    }
}

/// Sylvester matrix with the `deg q` shifted rows of `p` first, coefficients
/// listed from the leading one down.
pub fn sylvester_matrix<C: Coeff>(
    p: &UniPolyOverRing<C>,
    q: &UniPolyOverRing<C>,
) -> Result<Vec<Vec<Polynomial<C>>>, PolyError> {
    if p.main_variable != q.main_variable {
        return Err(PolyError::UnknownVariable(q.main_variable.clone()));
    }
    if p.ring_vars() != q.ring_vars() {
        return Err(PolyError::VariableMismatch {
            left: p.ring_vars().to_vec(),
            right: q.ring_vars().to_vec(),
        });
    }
    let (m, n) = (p.degree(), q.degree());
    if m == 0 || n == 0 {
        return Err(PolyError::DegreeTooLow);
    }
    let size = m + n;
    let zero = Polynomial::zero_in(p.ring_vars().to_vec());
    let mut rows = Vec::with_capacity(size);
    for (src, shifts) in [(p, n), (q, m)] {
        let d = src.degree();
        for s in 0..shifts {
            let mut row = vec![zero.clone(); size];
            for j in 0..=d {
                row[s + j] = src.coefficients[d - j].clone();
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Resultant of `p` and `q` with respect to their common main variable.
pub fn sylvester_resultant<C: Coeff>(
    p: &UniPolyOverRing<C>,
    q: &UniPolyOverRing<C>,
) -> Result<Polynomial<C>, PolyError> {
    let m = sylvester_matrix(p, q)?;
    bareiss_determinant(m)
}

/// Determinant by fraction-free Bareiss elimination. Every division is exact
/// in an integral domain; a failed division means the input is not over one.
pub fn bareiss_determinant<C: Coeff>(mut a: Vec<Vec<Polynomial<C>>>) -> Result<Polynomial<C>, PolyError> {
    let n = a.len();
    if n == 0 {
        return Err(PolyError::DegreeTooLow);
    }
    if a.iter().any(|r| r.len() != n) {
        return Err(PolyError::ArityMismatch { expected: n, got: a[0].len() });
    }
    let vars = a[0][0].vars().to_vec();
    let mut prev = Polynomial::constant_in(vars.clone(), C::one());
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            // Sparsest nonzero pivot keeps intermediate products small.
            let swap = (k + 1..n)
                .filter(|&i| !a[i][k].is_zero())
                .min_by_key(|&i| a[i][k].num_terms());
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(Polynomial::zero_in(vars)),
            }
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = &pivot_row[k];
        for row in bottom.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..n {
                let mut v = row[j].mul(pivot)?;
                if !lead.is_zero() && !pivot_row[j].is_zero() {
                    v = v.sub(&lead.mul(&pivot_row[j])?)?;
                }
                row[j] = if prev.is_constant() && prev.constant_term() == C::one() {
                    v
                } else {
                    v.div_exact(&prev)?.ok_or(PolyError::InexactDivision)?
                };
            }
            row[k] = Polynomial::zero_in(vars.clone());
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}
