//! Fractional-power (Puiseux) series in one variable.
//!
//! A series is a ladder `sum_k c_k x^(gamma + k*step)` with a fixed rational
//! step, truncated at a big-O order. Separatrix asymptotics, blow-up
//! manifolds and chart center manifolds are all carried in this form.

use crate::coeff::{rat, rat_to_f64, Coeff, Rat};
use crate::error::PolyError;
use crate::poly::BiPoly;
use num_traits::Zero;

/// Which variable of a bivariate polynomial a series is substituted for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// gcd of two nonnegative rationals.
pub fn rat_gcd(a: Rat, b: Rat) -> Rat {
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    fn gcd_i64(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a.abs()
    }
    fn lcm_i64(a: i64, b: i64) -> i64 {
        a / gcd_i64(a, b) * b
    }
    let den = lcm_i64(*a.denom(), *b.denom());
    let na = *a.numer() * (den / *a.denom());
    let nb = *b.numer() * (den / *b.denom());
    rat(gcd_i64(na, nb), den)
}

/// Truncated Puiseux series `c_0 x^gamma + c_1 x^(gamma+step) + ... + O(x^order)`.
///
/// Interior coefficients may be zero; the leading one is nonzero after
/// normalization. The zero series is represented with an empty ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries<C: Coeff> {
    gamma: Rat,
    step: Rat,
    coeffs: Vec<C>,
    order: Rat,
}

impl<C: Coeff> PuiseuxSeries<C> {
    pub fn new(gamma: Rat, step: Rat, coeffs: Vec<C>, order: Rat) -> Result<Self, PolyError> {
        if step <= Rat::zero() {
            return Err(PolyError::NonPositiveStep(step.to_string()));
        }
        let mut s = PuiseuxSeries {
            gamma,
            step,
            coeffs,
            order,
        };
        s.normalize();
        if !s.is_zero() && s.coeffs[0].is_zero() {
            return Err(PolyError::ZeroLeadingCoefficient);
        }
        Ok(s)
    }

    /// Single-term series `c x^gamma` known up to `O(x^order)`.
    pub fn monomial(c: C, gamma: Rat, step: Rat, order: Rat) -> Result<Self, PolyError> {
        PuiseuxSeries::new(gamma, step, vec![c], order)
    }

    pub fn zero(step: Rat, order: Rat) -> Self {
        PuiseuxSeries {
            gamma: order,
            step,
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn gamma(&self) -> Rat {
        self.gamma
    }

    pub fn step(&self) -> Rat {
        self.step
    }

    pub fn order(&self) -> Rat {
        self.order
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<(&C, Rat)> {
        self.coeffs.first().map(|c| (c, self.gamma))
    }

    /// Coefficient at exponent `e`, zero when `e` is off the stored ladder.
    pub fn coeff_at(&self, e: Rat) -> C {
        if self.is_zero() || e < self.gamma || e >= self.order {
            return C::zero();
        }
        let k = (e - self.gamma) / self.step;
        if !k.is_integer() {
            return C::zero();
        }
        let k = *k.numer() as usize;
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    fn normalize(&mut self) {
        // drop stored terms at or above the truncation order
        while !self.coeffs.is_empty() {
            let last_exp = self.gamma + self.step * rat(self.coeffs.len() as i64 - 1, 1);
            if last_exp >= self.order {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        // trim leading zeros, bumping gamma
        while let Some(first) = self.coeffs.first() {
            if first.is_zero() {
                self.coeffs.remove(0);
                self.gamma = self.gamma + self.step;
            } else {
                break;
            }
        }
        // trim trailing zeros (the order cap still records accuracy)
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.gamma = self.order;
        }
    }

    /// Re-grid onto a finer step and/or earlier base exponent.
    fn regrid(&self, base: Rat, step: Rat) -> Vec<C> {
        let span = (self.order - base) / step;
        let len = if span <= Rat::zero() {
            0
        } else {
            *span.ceil().numer() as usize
        };
        let mut out = vec![C::zero(); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = self.gamma + self.step * rat(k as i64, 1);
            if e >= self.order {
                break;
            }
            let idx = (e - base) / step;
            assert!(idx.is_integer(), "incompatible series ladders");
            out[*idx.numer() as usize] = c.clone();
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        if self.is_zero() && other.is_zero() {
            return PuiseuxSeries::zero(self.step, order);
        }
        let step = rat_gcd(self.step, other.step);
        let base = if self.is_zero() {
            other.gamma
        } else if other.is_zero() {
            self.gamma
        } else {
            self.gamma.min(other.gamma)
        };
        let a = self.regrid(base, step);
        let b = other.regrid(base, step);
        let len = a.len().max(b.len());
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            let x = a.get(k).cloned().unwrap_or_else(C::zero);
            let y = b.get(k).cloned().unwrap_or_else(C::zero);
            coeffs.push(x + y);
        }
        let mut s = PuiseuxSeries {
            gamma: base,
            step,
            coeffs,
            order,
        };
        s.normalize();
        s
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, f: &C) -> Self {
        if f.is_zero() {
            return PuiseuxSeries::zero(self.step, self.order);
        }
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = c.clone() * f.clone();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            let order = (self.order + other.gamma).min(other.order + self.gamma);
            let step = rat_gcd(self.step, other.step);
            return PuiseuxSeries::zero(step, order);
        }
        let step = rat_gcd(self.step, other.step);
        let order = (self.order + other.gamma).min(other.order + self.gamma);
        let base = self.gamma + other.gamma;
        let span = (order - base) / step;
        let len = if span <= Rat::zero() {
            0
        } else {
            *span.ceil().numer() as usize
        };
        let mut coeffs = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ea = self.gamma + self.step * rat(i as i64, 1);
            for (j, b) in other.coeffs.iter().enumerate() {
                let eb = other.gamma + other.step * rat(j as i64, 1);
                let e = ea + eb;
                if e >= order {
                    break;
                }
                let idx = (e - base) / step;
                debug_assert!(idx.is_integer());
                let idx = *idx.numer() as usize;
                coeffs[idx] = coeffs[idx].clone() + a.clone() * b.clone();
            }
        }
        let mut s = PuiseuxSeries {
            gamma: base,
            step,
            coeffs,
            order,
        };
        s.normalize();
        s
    }

    pub fn pow(&self, k: u32, order_cap: Rat) -> Self {
        let mut out = PuiseuxSeries {
            gamma: Rat::zero(),
            step: self.step,
            coeffs: vec![C::one()],
            order: order_cap,
        };
        for _ in 0..k {
            out = out.mul(self);
            out.order = out.order.min(order_cap);
            out.normalize();
        }
        out
    }

    /// Term-by-term derivative.
    pub fn derivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = self.gamma + self.step * rat(k as i64, 1);
            coeffs.push(c.clone() * C::from_rat(e));
        }
        let mut s = PuiseuxSeries {
            gamma: self.gamma - rat(1, 1),
            step: self.step,
            coeffs,
            order: self.order - rat(1, 1),
        };
        s.normalize();
        s
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = self.gamma + self.step * rat(k as i64, 1);
            acc += c.to_f64() * x.powf(rat_to_f64(e));
        }
        acc
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> PuiseuxSeries<D> {
        PuiseuxSeries {
            gamma: self.gamma,
            step: self.step,
            coeffs: self.coeffs.iter().map(f).collect(),
            order: self.order,
        }
    }

    /// Restrict the truncation order.
    pub fn truncate(&self, order: Rat) -> Self {
        let mut s = self.clone();
        s.order = s.order.min(order);
        s.normalize();
        s
    }
}

/// Substitute a Puiseux series for one variable of a bivariate polynomial.
///
/// With `Axis::Y` this computes `p(x, s(x))`; with `Axis::X` it computes
/// `p(s(y), y)`. The substituted series must have a positive leading
/// exponent. The result is truncated at `order_cap`.
pub fn poly_compose_series<C: Coeff>(
    p: &BiPoly<C>,
    s: &PuiseuxSeries<C>,
    var: Axis,
    order_cap: Rat,
) -> Result<PuiseuxSeries<C>, PolyError> {
    if !s.is_zero() && s.gamma() <= Rat::zero() {
        return Err(PolyError::NonPositiveLeadingExponent(s.gamma().to_string()));
    }
    let step = rat_gcd(rat(1, 1), rat_gcd(s.step(), rat_gcd(s.gamma().max(Rat::zero()), rat(1, 1))));
    if *step.denom() > 1_000_000 {
        return Err(PolyError::ExponentOverflow(step.to_string()));
    }
    let mut acc = PuiseuxSeries::zero(step, order_cap);
    // powers of the substituted series, computed once per exponent
    let max_pow = p
        .terms()
        .map(|(i, j, _)| match var {
            Axis::Y => j,
            Axis::X => i,
        })
        .max()
        .unwrap_or(0);
    let mut powers: Vec<PuiseuxSeries<C>> = Vec::with_capacity(max_pow as usize + 1);
    for k in 0..=max_pow {
        powers.push(s.pow(k, order_cap));
    }
    for (i, j, c) in p.terms() {
        let (plain, subbed) = match var {
            Axis::Y => (i, j),
            Axis::X => (j, i),
        };
        let base = powers[subbed as usize].clone();
        // multiply by c * x^plain
        let shifted = PuiseuxSeries {
            gamma: base.gamma + rat(plain as i64, 1),
            step: base.step,
            coeffs: base.coeffs.iter().map(|b| b.clone() * c.clone()).collect(),
            order: (base.order + rat(plain as i64, 1)).min(order_cap),
        };
        let mut shifted = shifted;
        shifted.normalize();
        acc = acc.add(&shifted);
    }
    acc = acc.truncate(order_cap);
    Ok(acc)
}
