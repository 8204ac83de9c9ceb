use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{check_dim, Result};
use crate::scalar::{format_rational, Rational, Scalar};

/// Exponent vector of a monomial in `u^1, …, u^N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// The unit order `e_axis` (first derivative along one axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self(e)
    }

    /// Order of the mixed partial `∂/∂u^{axes[0]} ∂/∂u^{axes[1]} …`.
    pub fn from_axes(dim: usize, axes: &[usize]) -> Self {
        let mut e = vec![0; dim];
        for &a in axes {
            e[a] += 1;
        }
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is equality of
/// polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialPotential {
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl PolynomialPotential {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial, summing repeated monomials and dropping zeros.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            check_dim("monomial exponent vector", dim, m.len())?;
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn monomial(exponents: Vec<u32>, coeff: Rational) -> Self {
        let dim = exponents.len();
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex(exponents), coeff);
        p
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::total_degree).max()
    }

    pub fn coefficient(&self, m: &MultiIndex) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim("polynomial sum", self.dim, other.dim)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * s))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim("polynomial product", self.dim, other.dim)?;
        let mut out = Self::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(MultiIndex(m), ca * cb);
            }
        }
        Ok(out)
    }

    /// `∂p/∂u^axis` as an exact polynomial.
    pub fn derivative(&self, axis: usize) -> Self {
        assert!(axis < self.dim, "derivative axis out of range");
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[axis];
            if e == 0 {
                continue;
            }
            let mut dm = m.0.clone();
            dm[axis] = e - 1;
            out.add_term(MultiIndex(dm), c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Mixed partial derivative of the given order.
    pub fn partial(&self, order: &MultiIndex) -> Result<Self> {
        check_dim("derivative order", self.dim, order.len())?;
        let mut out = Self::zero(self.dim);
        'terms: for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut dm = Vec::with_capacity(self.dim);
            for (&e, &k) in m.0.iter().zip(&order.0) {
                if k > e {
                    continue 'terms;
                }
                // falling factorial e (e-1) … (e-k+1)
                for f in (e - k + 1)..=e {
                    coeff *= Rational::from_integer(f.into());
                }
                dm.push(e - k);
            }
            out.add_term(MultiIndex(dm), coeff);
        }
        Ok(out)
    }

    /// Evaluates the polynomial at a point in any scalar field.
    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S> {
        check_dim("evaluation point", self.dim, point.len())?;
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = S::from_rational(c);
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Float view used by the numerical integrators.
    pub fn to_float(&self) -> FloatPolynomial {
        FloatPolynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.0.clone(), c.to_f64()))
                .collect(),
        }
    }
}

impl fmt::Display for PolynomialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", format_rational(c))?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*u{}", i + 1)?,
                    _ => write!(f, "*u{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

/// Floating-point copy of a [`PolynomialPotential`] for hot evaluation loops.
#[derive(Clone, Debug)]
pub struct FloatPolynomial {
    dim: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPolynomial {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.dim);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter()
                    .zip(point)
                    .fold(*c, |t, (&e, &x)| t * x.powi(e as i32))
            })
            .sum()
    }
}

/// Precomputed second partials of a family of potentials, evaluated in `f64`.
///
/// `hessians(x)[α]` is the Hessian of the α-th potential at `x`.
#[derive(Clone, Debug)]
pub struct HessianField {
    dim: usize,
    // [alpha][i][j] for j >= i
    second: Vec<Vec<Vec<FloatPolynomial>>>,
}

impl HessianField {
    pub fn new(potentials: &[PolynomialPotential], dim: usize) -> Result<Self> {
        let mut second = Vec::with_capacity(potentials.len());
        for p in potentials {
            check_dim("potential dimension", dim, p.dim())?;
            let mut rows = Vec::with_capacity(dim);
            for i in 0..dim {
                let di = p.derivative(i);
                rows.push((i..dim).map(|j| di.derivative(j).to_float()).collect());
            }
            second.push(rows);
        }
        Ok(Self { dim, second })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.second.len()
    }

    pub fn hessian(&self, alpha: usize, point: &[f64]) -> Vec<Vec<f64>> {
        let n = self.dim;
        let mut h = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = self.second[alpha][i][j - i].eval(point);
                h[i][j] = v;
                h[j][i] = v;
            }
        }
        h
    }

    pub fn hessians(&self, point: &[f64]) -> Vec<Vec<Vec<f64>>> {
        (0..self.count()).map(|a| self.hessian(a, point)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn p(terms: &[(&[u32], i64, i64)]) -> PolynomialPotential {
        let dim = terms[0].0.len();
        PolynomialPotential::from_terms(
            dim,
            terms
                .iter()
                .map(|(e, a, b)| (MultiIndex::new(e.to_vec()), rational(*a, *b))),
        )
        .unwrap()
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let a = p(&[(&[1, 0], 1, 1), (&[0, 2], 1, 2)]);
        let b = p(&[(&[1, 0], -1, 1)]);
        let s = a.add(&b).unwrap();
        assert_eq!(s.num_terms(), 1);
        assert_eq!(s, p(&[(&[0, 2], 1, 2)]));
        assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn partial_matches_repeated_derivative() {
        let q = p(&[(&[3, 2, 1], 5, 7), (&[1, 4, 0], -2, 3), (&[0, 0, 5], 1, 60)]);
        let order = MultiIndex::new(vec![1, 2, 1]);
        let direct = q.partial(&order).unwrap();
        let chained = q.derivative(0).derivative(1).derivative(1).derivative(2);
        assert_eq!(direct, chained);
    }

    #[test]
    fn product_and_display() {
        let x = p(&[(&[1, 0], 1, 1)]);
        let y = p(&[(&[0, 1], 1, 1), (&[0, 0], 1, 1)]);
        let xy = x.mul(&y).unwrap();
        assert_eq!(xy, p(&[(&[1, 1], 1, 1), (&[1, 0], 1, 1)]));
        assert_eq!(PolynomialPotential::zero(2).to_string(), "0");
        assert!(xy.to_string().contains("u1*u2") || xy.to_string().contains("*u1*u2"));
    }

    #[test]
    fn float_view_agrees_with_exact_evaluation() {
        let q = p(&[(&[2, 1], 1, 3), (&[0, 3], -5, 4), (&[0, 0], 2, 1)]);
        let x = [rational(1, 4), rational(-3, 2)];
        let exact = q.eval(&x).unwrap().to_f64();
        let float = q.to_float().eval(&[0.25, -1.5]);
        assert!((exact - float).abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let q = p(&[(&[1, 1], 1, 1)]);
        assert!(q.eval(&[1.0]).is_err());
        assert!(q.partial(&MultiIndex::new(vec![1])).is_err());
        assert!(PolynomialPotential::from_terms(2, [(MultiIndex::new(vec![1]), rational(1, 1))]).is_err());
    }
}
