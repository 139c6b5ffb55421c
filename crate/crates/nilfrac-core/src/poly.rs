//! Truncated bivariate polynomials and planar vector fields.
//!
//! A [`BiPoly`] stores monomials `c * x^i * y^j` with `i + j <= trunc_degree`
//! in a sorted map; products that spill over the truncation degree are
//! dropped and recorded in the `truncated` flag. This is the carrier for
//! vector-field components, Picard jets and blow-up transforms.

use crate::coeff::Coeff;
use crate::error::PolyError;
use std::collections::BTreeMap;
use std::fmt;

/// Default truncation degree; covers every worked example in the crate.
pub const DEFAULT_TRUNC: u32 = 12;

/// Truncated bivariate polynomial over a coefficient field `C`.
#[derive(Clone, PartialEq)]
pub struct BiPoly<C: Coeff> {
    coeffs: BTreeMap<(u32, u32), C>,
    trunc_degree: u32,
    truncated: bool,
}

impl<C: Coeff> BiPoly<C> {
    pub fn zero(trunc_degree: u32) -> Self {
        BiPoly {
            coeffs: BTreeMap::new(),
            trunc_degree,
            truncated: false,
        }
    }

    pub fn monomial(i: u32, j: u32, c: C, trunc_degree: u32) -> Self {
        let mut p = BiPoly::zero(trunc_degree);
        p.add_term(i, j, c);
        p
    }

    pub fn constant(c: C, trunc_degree: u32) -> Self {
        BiPoly::monomial(0, 0, c, trunc_degree)
    }

    /// The variable `x`.
    pub fn x(trunc_degree: u32) -> Self {
        BiPoly::monomial(1, 0, C::one(), trunc_degree)
    }

    /// The variable `y`.
    pub fn y(trunc_degree: u32) -> Self {
        BiPoly::monomial(0, 1, C::one(), trunc_degree)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, C)>, trunc_degree: u32) -> Self {
        let mut p = BiPoly::zero(trunc_degree);
        for (i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn trunc_degree(&self) -> u32 {
        self.trunc_degree
    }

    /// True when some term was dropped by the truncation.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &C)> {
        self.coeffs.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> C {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(C::zero)
    }

    /// Total degree of the lowest-order term, if any.
    pub fn min_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|&(i, j)| i + j).min()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|&(i, j)| i + j).max()
    }

    /// Add `c * x^i y^j`, respecting the truncation degree.
    pub fn add_term(&mut self, i: u32, j: u32, c: C) {
        if c.is_zero() {
            return;
        }
        if i + j > self.trunc_degree {
            self.truncated = true;
            return;
        }
        let entry = self.coeffs.entry((i, j)).or_insert_with(C::zero);
        let new = entry.clone() + c;
        if new.is_zero() {
            self.coeffs.remove(&(i, j));
        } else {
            *entry = new;
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compat(other)?;
        let mut out = self.clone();
        out.truncated |= other.truncated;
        for (i, j, c) in other.terms() {
            out.add_term(i, j, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, factor: &C) -> Self {
        if factor.is_zero() {
            let mut z = BiPoly::zero(self.trunc_degree);
            z.truncated = self.truncated;
            return z;
        }
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.clone() * factor.clone();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compat(other)?;
        let mut out = BiPoly::zero(self.trunc_degree);
        out.truncated = self.truncated || other.truncated;
        for (i1, j1, c1) in self.terms() {
            for (i2, j2, c2) in other.terms() {
                out.add_term(i1 + i2, j1 + j2, c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self, PolyError> {
        let mut out = BiPoly::constant(C::one(), self.trunc_degree);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Partial derivative with respect to `x`.
    pub fn dx(&self) -> Self {
        let mut out = BiPoly::zero(self.trunc_degree);
        for (i, j, c) in self.terms() {
            if i > 0 {
                out.add_term(i - 1, j, c.clone() * C::from_i64(i as i64));
            }
        }
        out
    }

    /// Partial derivative with respect to `y`.
    pub fn dy(&self) -> Self {
        let mut out = BiPoly::zero(self.trunc_degree);
        for (i, j, c) in self.terms() {
            if j > 0 {
                out.add_term(i, j - 1, c.clone() * C::from_i64(j as i64));
            }
        }
        out
    }

    /// Substitute `x -> x + a` (used for chart translations).
    pub fn shift_x(&self, a: &C) -> Self {
        let max_i = self.terms().map(|(i, _, _)| i).max().unwrap_or(0) as usize;
        let mut a_pow = vec![C::one()];
        for _ in 0..max_i {
            a_pow.push(a_pow.last().unwrap().clone() * a.clone());
        }
        // Pascal's triangle up to max_i
        let mut binom = vec![vec![C::one()]];
        for i in 1..=max_i {
            let prev = &binom[i - 1];
            let mut row = vec![C::one()];
            for k in 1..i {
                row.push(prev[k - 1].clone() + prev[k].clone());
            }
            row.push(C::one());
            binom.push(row);
        }
        let mut out = BiPoly::zero(self.trunc_degree);
        out.truncated = self.truncated;
        for (i, j, c) in self.terms() {
            for k in 0..=i {
                let coeff = binom[i as usize][k as usize].clone()
                    * a_pow[(i - k) as usize].clone()
                    * c.clone();
                out.add_term(k, j, coeff);
            }
        }
        out
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for (i, j, c) in self.terms() {
            acc += c.to_f64() * x.powi(i as i32) * y.powi(j as i32);
        }
        acc
    }

    /// Evaluate exactly in the coefficient field.
    pub fn eval(&self, x: &C, y: &C) -> C {
        let mut acc = C::zero();
        for (i, j, c) in self.terms() {
            let mut term = c.clone();
            for _ in 0..i {
                term = term * x.clone();
            }
            for _ in 0..j {
                term = term * y.clone();
            }
            acc = acc + term;
        }
        acc
    }

    /// Map coefficients into another field.
    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> BiPoly<D> {
        let mut out = BiPoly::zero(self.trunc_degree);
        out.truncated = self.truncated;
        for (i, j, c) in self.terms() {
            out.add_term(i, j, f(c));
        }
        out
    }

    pub fn with_trunc(&self, trunc_degree: u32) -> Self {
        let mut out = BiPoly::zero(trunc_degree);
        out.truncated = self.truncated;
        for (i, j, c) in self.terms() {
            if i + j > trunc_degree {
                out.truncated = true;
            } else {
                out.add_term(i, j, c.clone());
            }
        }
        out
    }

    fn check_compat(&self, other: &Self) -> Result<(), PolyError> {
        if self.trunc_degree != other.trunc_degree {
            return Err(PolyError::TruncationMismatch(
                self.trunc_degree,
                other.trunc_degree,
            ));
        }
        Ok(())
    }

    /// Greatest monomial `x^i y^j` dividing every term. Zero polynomials
    /// yield the trivial divisor.
    pub fn common_monomial(&self) -> (u32, u32) {
        let mut gi = u32::MAX;
        let mut gj = u32::MAX;
        for (i, j, _) in self.terms() {
            gi = gi.min(i);
            gj = gj.min(j);
        }
        if gi == u32::MAX {
            (0, 0)
        } else {
            (gi, gj)
        }
    }

    /// Divide by `x^i y^j`; terms must all be divisible.
    pub fn div_monomial(&self, i: u32, j: u32) -> Self {
        let mut out = BiPoly::zero(self.trunc_degree);
        out.truncated = self.truncated;
        for (a, b, c) in self.terms() {
            assert!(a >= i && b >= j, "monomial does not divide polynomial");
            out.add_term(a - i, b - j, c.clone());
        }
        out
    }
}

impl<C: Coeff> fmt::Debug for BiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, j, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?})", c)?;
            if i > 0 {
                write!(f, "*x^{i}")?;
            }
            if j > 0 {
                write!(f, "*y^{j}")?;
            }
        }
        if self.truncated {
            write!(f, " [trunc]")?;
        }
        Ok(())
    }
}

/// A planar polynomial vector field `(x', y') = (P, Q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarVectorField<C: Coeff> {
    pub p: BiPoly<C>,
    pub q: BiPoly<C>,
}

impl<C: Coeff> PlanarVectorField<C> {
    pub fn new(p: BiPoly<C>, q: BiPoly<C>) -> Result<Self, PolyError> {
        if p.trunc_degree() != q.trunc_degree() {
            return Err(PolyError::TruncationMismatch(
                p.trunc_degree(),
                q.trunc_degree(),
            ));
        }
        Ok(PlanarVectorField { p, q })
    }

    pub fn trunc_degree(&self) -> u32 {
        self.p.trunc_degree()
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> (f64, f64) {
        (self.p.eval_f64(x, y), self.q.eval_f64(x, y))
    }

    /// Jacobian matrix at the origin, row-major `[p_x, p_y, q_x, q_y]`.
    pub fn jacobian_origin(&self) -> [C; 4] {
        [
            self.p.coeff(1, 0),
            self.p.coeff(0, 1),
            self.q.coeff(1, 0),
            self.q.coeff(0, 1),
        ]
    }

    pub fn is_singular_origin(&self) -> bool {
        self.p.coeff(0, 0).is_zero() && self.q.coeff(0, 0).is_zero()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> PlanarVectorField<D> {
        PlanarVectorField {
            p: self.p.map_coeffs(f),
            q: self.q.map_coeffs(f),
        }
    }

    /// Pull out the greatest common monomial factor of both components.
    ///
    /// Returns the divided field and the divisor exponents `(i, j)`; the
    /// trivial divisor `(0, 0)` is allowed.
    pub fn divide_common_monomial(&self) -> (PlanarVectorField<C>, (u32, u32)) {
        if self.p.is_zero() && self.q.is_zero() {
            return (self.clone(), (0, 0));
        }
        let (pi, pj) = if self.p.is_zero() {
            (u32::MAX, u32::MAX)
        } else {
            self.p.common_monomial()
        };
        let (qi, qj) = if self.q.is_zero() {
            (u32::MAX, u32::MAX)
        } else {
            self.q.common_monomial()
        };
        let (i, j) = (pi.min(qi), pj.min(qj));
        let out = PlanarVectorField {
            p: self.p.div_monomial(i, j),
            q: self.q.div_monomial(i, j),
        };
        (out, (i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    type P = BiPoly<BigRational>;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn monomial_product() {
        let x = P::x(4);
        let y = P::y(4);
        let xy = x.mul(&y).unwrap();
        assert_eq!(xy.coeff(1, 1), r(1));
        assert_eq!(xy.num_terms(), 1);
    }

    #[test]
    fn difference_of_squares() {
        let one = P::constant(r(1), 2);
        let x = P::x(2);
        let p = one.add(&x).unwrap();
        let q = one.sub(&x).unwrap();
        let prod = p.mul(&q).unwrap();
        assert_eq!(prod.coeff(0, 0), r(1));
        assert_eq!(prod.coeff(2, 0), r(-1));
        assert_eq!(prod.coeff(1, 0), r(0));
        assert!(!prod.is_truncated());
    }

    #[test]
    fn truncation_flag_set_when_all_terms_spill() {
        let x = P::x(1);
        let y = P::y(1);
        let s = x.add(&y).unwrap();
        let sq = s.mul(&s).unwrap();
        assert!(sq.is_zero());
        assert!(sq.is_truncated());
    }

    #[test]
    fn truncation_mismatch_rejected() {
        let a = P::x(3);
        let b = P::y(4);
        assert_eq!(a.mul(&b), Err(PolyError::TruncationMismatch(3, 4)));
    }

    #[test]
    fn common_monomial_division() {
        // (u v^2, u^2 v^2) -> ((u, u^2 v), divisor v... ) exponents: gcd is (1,2)
        let p = P::monomial(1, 2, r(1), 6);
        let q = P::monomial(2, 2, r(1), 6);
        let f = PlanarVectorField::new(p, q).unwrap();
        let (g, div) = f.divide_common_monomial();
        assert_eq!(div, (1, 2));
        assert_eq!(g.p.coeff(0, 0), r(1));
        assert_eq!(g.q.coeff(1, 0), r(1));

        // coprime components keep the trivial divisor
        let f2 = PlanarVectorField::new(P::y(6), P::monomial(2, 0, r(1), 6)).unwrap();
        let (g2, div2) = f2.divide_common_monomial();
        assert_eq!(div2, (0, 0));
        assert_eq!(g2, f2);
    }

    #[test]
    fn shift_x_binomial() {
        // x^3 under x -> x + 2: 8 + 12x + 6x^2 + x^3
        let p = P::monomial(3, 0, r(1), 5);
        let s = p.shift_x(&r(2));
        assert_eq!(s.coeff(0, 0), r(8));
        assert_eq!(s.coeff(1, 0), r(12));
        assert_eq!(s.coeff(2, 0), r(6));
        assert_eq!(s.coeff(3, 0), r(1));
        // evaluation oracle at a non-lattice point
        let q = P::from_terms(vec![(2, 1, r(3)), (1, 0, r(-5)), (0, 2, r(7))], 5);
        let sh = q.shift_x(&r(-3));
        assert_eq!(sh.eval_f64(1.25, 0.5), q.eval_f64(1.25 - 3.0, 0.5));
    }

    #[test]
    fn derivative_and_eval() {
        // d/dx (x^2 y) = 2xy at (2,3) = 12
        let p = P::monomial(2, 1, r(1), 5);
        assert_eq!(p.dx().eval_f64(2.0, 3.0), 12.0);
        assert_eq!(p.dy().eval_f64(2.0, 3.0), 4.0);
    }
}
