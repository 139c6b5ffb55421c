//! The nilpotent normal-form model `x' = y, y' = a x^m + b x^n y (+ tail)`.

use crate::coeff::{big_rational_string, Coeff};
use crate::error::PolyError;
use crate::poly::{BiPoly, PlanarVectorField, DEFAULT_TRUNC};
use num_rational::BigRational;
use num_traits::Zero;

/// Normal-form data `(a, m, b, n)` plus an optional higher-order tail.
///
/// `b = 0` encodes a flat damping term; `n` is then unused. The tail may
/// only contain terms of order `o(x^m) + y o(x^n) + y^2 (anything)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentModel {
    a: BigRational,
    m: u32,
    b: BigRational,
    n: u32,
    tail: Option<BiPoly<BigRational>>,
    trunc: u32,
}

impl NilpotentModel {
    pub fn new(a: BigRational, m: u32, b: BigRational, n: u32) -> Result<Self, PolyError> {
        if a.is_zero() {
            return Err(PolyError::NotRepresentable("a must be nonzero".into()));
        }
        if m < 2 {
            return Err(PolyError::NotRepresentable("m must be at least 2".into()));
        }
        if n < 1 {
            return Err(PolyError::NotRepresentable("n must be at least 1".into()));
        }
        Ok(NilpotentModel {
            a,
            m,
            b,
            n,
            tail: None,
            trunc: DEFAULT_TRUNC.max(m + 2).max(n + 3),
        })
    }

    pub fn from_i64(a: i64, m: u32, b: i64, n: u32) -> Result<Self, PolyError> {
        NilpotentModel::new(
            BigRational::from_integer(a.into()),
            m,
            BigRational::from_integer(b.into()),
            n,
        )
    }

    /// Attach higher-order terms. Each tail term `x^i y^j` must satisfy
    /// `j >= 2`, or `j = 1 && i > n`, or `j = 0 && i > m`.
    pub fn with_tail(mut self, tail: BiPoly<BigRational>) -> Result<Self, PolyError> {
        for (i, j, _) in tail.terms() {
            let ok = j >= 2 || (j == 1 && i > self.n) || (j == 0 && i > self.m);
            if !ok {
                return Err(PolyError::NotRepresentable(format!(
                    "tail term x^{i} y^{j} is not higher order than the model"
                )));
            }
        }
        self.tail = Some(tail.with_trunc(self.trunc));
        Ok(self)
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn tail(&self) -> Option<&BiPoly<BigRational>> {
        self.tail.as_ref()
    }

    /// Effective `n`: when `b = 0` the damping term is absent and every
    /// `m < 2n+1`-style comparison treats `n` as infinite.
    pub fn has_damping(&self) -> bool {
        !self.b.is_zero()
    }

    /// The vector field `x' = y, y' = a x^m + b x^n y + tail`.
    pub fn field(&self) -> PlanarVectorField<BigRational> {
        let t = self.trunc;
        let mut q = BiPoly::monomial(self.m, 0, self.a.clone(), t);
        if !self.b.is_zero() {
            q.add_term(self.n, 1, self.b.clone());
        }
        if let Some(tail) = &self.tail {
            q = q.add(tail).expect("tail shares truncation");
        }
        PlanarVectorField::new(BiPoly::y(t), q).expect("components share truncation")
    }

    pub fn field_f64(&self) -> PlanarVectorField<f64> {
        self.field().map_coeffs(|c| c.to_f64())
    }

    pub fn describe(&self) -> String {
        let mut s = format!(
            "x' = y, y' = {}*x^{}",
            big_rational_string(&self.a),
            self.m
        );
        if !self.b.is_zero() {
            s.push_str(&format!(" + {}*x^{}*y", big_rational_string(&self.b), self.n));
        }
        if self.tail.is_some() {
            s.push_str(" + tail");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn model_field_layout() {
        let m = NilpotentModel::from_i64(-1, 5, -4, 2).unwrap();
        let f = m.field();
        assert_eq!(f.p.coeff(0, 1), BigRational::from_integer(BigInt::from(1)));
        assert_eq!(f.q.coeff(5, 0), BigRational::from_integer(BigInt::from(-1)));
        assert_eq!(f.q.coeff(2, 1), BigRational::from_integer(BigInt::from(-4)));
        assert!(f.is_singular_origin());
    }

    #[test]
    fn zero_a_rejected() {
        assert!(NilpotentModel::from_i64(0, 2, 1, 1).is_err());
    }

    #[test]
    fn tail_order_enforced() {
        let m = NilpotentModel::from_i64(1, 2, 1, 1).unwrap();
        let bad = BiPoly::monomial(2, 0, BigRational::from_integer(BigInt::from(1)), 14);
        assert!(m.clone().with_tail(bad).is_err());
        let good = BiPoly::monomial(3, 0, BigRational::from_integer(BigInt::from(1)), 14);
        assert!(m.with_tail(good).is_ok());
    }
}
