//! Coefficient fields for the polynomial and series algebra.
//!
//! Three scalar types are supported: exact rationals (`BigRational`), the
//! quadratic extension `Q(sqrt(d))` used to carry separatrix radicals
//! exactly, and `f64` for orbit integration. All algebra in the crate is
//! generic over the [`Coeff`] trait so that every computation can run in
//! exact or float mode with the same code path.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Small rational type used for exponents and closed-form dimension values.
pub type Rat = Ratio<i64>;

/// Build a `Rat` from numerator and denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Ratio::new(num, den)
}

/// Convert a small rational to `f64`.
pub fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Parse a rational from `"n"` or `"n/d"` strings.
pub fn parse_big_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Ok(r) = BigRational::from_str(s) {
        return Some(r);
    }
    if let Ok(i) = BigInt::from_str(s) {
        return Some(BigRational::from_integer(i));
    }
    None
}

/// Render a rational as `"n"` or `"n/d"`.
pub fn big_rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Scalar operations required by the polynomial and series algebra.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for inexact (floating-point) coefficient fields.
    const FLOAT: bool = false;

    fn from_rational(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;

    /// Square root of a nonnegative value, when representable in the field.
    fn sqrt_checked(&self) -> Option<Self>;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    fn from_rat(r: Rat) -> Self {
        Self::from_rational(&BigRational::new(
            BigInt::from(*r.numer()),
            BigInt::from(*r.denom()),
        ))
    }
}

impl Coeff for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        big_rational_to_f64(self)
    }
    fn sqrt_checked(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &n * &n == *self.numer() && &d * &d == *self.denom() {
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }
}

impl Coeff for f64 {
    const FLOAT: bool = true;

    fn from_rational(r: &BigRational) -> Self {
        big_rational_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt_checked(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }
}

/// Convert a `BigRational` to `f64` without overflowing on large numerators.
pub fn big_rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // fall back through a scaled integer division
    let digits = 30u32;
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (r * BigRational::from_integer(scale)).to_integer();
    scaled.to_f64().unwrap_or(f64::NAN) / 10f64.powi(digits as i32)
}

/// Element of the quadratic extension `Q(sqrt(d))`: `r + s*sqrt(d)`.
///
/// The radicand `d` is fixed per value; values with `s = 0` are plain
/// rationals and combine with any radicand. Mixing two distinct radicands
/// is a logic error in this crate and panics.
#[derive(Clone, PartialEq)]
pub struct QuadExt {
    r: BigRational,
    s: BigRational,
    d: BigRational,
}

impl QuadExt {
    pub fn rational(r: BigRational) -> Self {
        QuadExt {
            r,
            s: BigRational::zero(),
            d: BigRational::zero(),
        }
    }

    /// `sqrt(d)` for a nonnegative rational `d`, kept symbolic unless `d`
    /// is a perfect square.
    pub fn sqrt_rational(d: &BigRational) -> Option<Self> {
        if d.is_negative() {
            return None;
        }
        if let Some(root) = Coeff::sqrt_checked(d) {
            return Some(QuadExt::rational(root));
        }
        Some(QuadExt {
            r: BigRational::zero(),
            s: BigRational::one(),
            d: d.clone(),
        })
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.r
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.s
    }

    pub fn radicand(&self) -> &BigRational {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.s.is_zero()
    }

    /// Panics if the two operands carry different nonzero radicands.
    fn joint_radicand(&self, other: &Self) -> BigRational {
        if self.s.is_zero() {
            return other.d.clone();
        }
        if other.s.is_zero() {
            return self.d.clone();
        }
        assert_eq!(
            self.d, other.d,
            "cannot combine values from different quadratic extensions"
        );
        self.d.clone()
    }

    fn normalized(mut self) -> Self {
        if self.s.is_zero() {
            self.d = BigRational::zero();
        }
        self
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", quad_string(self))
    }
}

/// Render a quadratic-extension value as e.g. `"1/2 + 3*sqrt(2/3)"`.
pub fn quad_string(q: &QuadExt) -> String {
    if q.is_rational() {
        return big_rational_string(&q.r);
    }
    let rad = format!("sqrt({})", big_rational_string(&q.d));
    let radical = if q.s.is_one() {
        rad
    } else if q.s == -BigRational::one() {
        format!("-{rad}")
    } else {
        format!("{}*{}", big_rational_string(&q.s), rad)
    };
    if q.r.is_zero() {
        radical
    } else if q.s.is_negative() {
        format!("{} - {}", big_rational_string(&q.r), radical.trim_start_matches('-'))
    } else {
        format!("{} + {}", big_rational_string(&q.r), radical)
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, other: QuadExt) -> QuadExt {
        let d = self.joint_radicand(&other);
        QuadExt {
            r: self.r + other.r,
            s: self.s + other.s,
            d,
        }
        .normalized()
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, other: QuadExt) -> QuadExt {
        self + (-other)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            r: -self.r,
            s: -self.s,
            d: self.d,
        }
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, other: QuadExt) -> QuadExt {
        let d = self.joint_radicand(&other);
        // (r1 + s1*sqrt(d))(r2 + s2*sqrt(d)) = r1 r2 + s1 s2 d + (r1 s2 + s1 r2) sqrt(d)
        QuadExt {
            r: &self.r * &other.r + &self.s * &other.s * &d,
            s: &self.r * &other.s + &self.s * &other.r,
            d,
        }
        .normalized()
    }
}

impl Div for QuadExt {
    type Output = QuadExt;
    fn div(self, other: QuadExt) -> QuadExt {
        assert!(!other.is_zero(), "division by zero in Q(sqrt(d))");
        if other.s.is_zero() {
            return QuadExt {
                r: self.r / &other.r,
                s: self.s / &other.r,
                d: self.d,
            }
            .normalized();
        }
        let d = self.joint_radicand(&other);
        // multiply by the conjugate
        let norm = &other.r * &other.r - &other.s * &other.s * &d;
        assert!(!norm.is_zero(), "zero norm in Q(sqrt(d)) division");
        let conj = QuadExt {
            r: other.r.clone(),
            s: -other.s.clone(),
            d: d.clone(),
        };
        let num = self * conj;
        QuadExt {
            r: num.r / &norm,
            s: num.s / &norm,
            d,
        }
        .normalized()
    }
}

impl Zero for QuadExt {
    fn zero() -> Self {
        QuadExt::rational(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }
}

impl One for QuadExt {
    fn one() -> Self {
        QuadExt::rational(BigRational::one())
    }
}

impl Coeff for QuadExt {
    fn from_rational(r: &BigRational) -> Self {
        QuadExt::rational(r.clone())
    }
    fn to_f64(&self) -> f64 {
        big_rational_to_f64(&self.r) + big_rational_to_f64(&self.s) * big_rational_to_f64(&self.d).sqrt()
    }
    fn sqrt_checked(&self) -> Option<Self> {
        if !self.is_rational() {
            return None;
        }
        if self.r.is_negative() {
            return None;
        }
        QuadExt::sqrt_rational(&self.r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn quad_field_arithmetic() {
        // sqrt(2/3)^2 = 2/3
        let root = QuadExt::sqrt_rational(&q(2, 3)).unwrap();
        let sq = root.clone() * root.clone();
        assert!(sq.is_rational());
        assert_eq!(sq.rational_part(), &q(2, 3));

        // (1 + sqrt(2/3)) / (1 + sqrt(2/3)) = 1
        let v = QuadExt::rational(q(1, 1)) + root.clone();
        let one = v.clone() / v;
        assert_eq!(one, <QuadExt as num_traits::One>::one());

        // perfect squares collapse to rationals
        let r = QuadExt::sqrt_rational(&q(9, 4)).unwrap();
        assert!(r.is_rational());
        assert_eq!(r.rational_part(), &q(3, 2));
    }

    #[test]
    fn quad_to_f64_matches_float_route() {
        let root = QuadExt::sqrt_rational(&q(2, 3)).unwrap();
        let v = QuadExt::rational(q(1, 7)) + root * QuadExt::rational(q(-5, 2));
        let expect = 1.0 / 7.0 - 2.5 * (2.0f64 / 3.0).sqrt();
        assert!((v.to_f64() - expect).abs() < 1e-15);
    }

    #[test]
    fn rational_string_roundtrip() {
        let r = parse_big_rational("-7/12").unwrap();
        assert_eq!(big_rational_string(&r), "-7/12");
        assert_eq!(parse_big_rational("5").unwrap(), q(5, 1));
        assert!(parse_big_rational("x").is_none());
    }
}
