//! Scalar plumbing shared by the exact and floating-point layers.
//!
//! Two families of scalars live here. [`ExactAcc`] covers the signed integer
//! accumulators the Ryser sweep can run in (`i64`, `i128`, `BigInt`); the
//! engine picks the narrowest one whose range provably holds every partial
//! sum. [`DirectedSum`] is a compensated accumulator over any
//! [`num_traits::Float`] that biases its result in a chosen direction so that
//! upper bounds stay upper bounds after rounding.

use std::ops::{AddAssign, MulAssign, SubAssign};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

/// Signed accumulator for inclusion-exclusion sums.
pub trait ExactAcc: Clone + Zero + One + Signed + AddAssign + SubAssign + MulAssign + Send + Sync {
    /// Largest number of magnitude bits an intermediate may occupy.
    const CAPACITY_BITS: u32;

    fn from_small(v: i64) -> Self;

    fn into_biguint(self) -> Option<BigUint>;
}

impl ExactAcc for i64 {
    const CAPACITY_BITS: u32 = 62;

    fn from_small(v: i64) -> Self {
        v
    }

    fn into_biguint(self) -> Option<BigUint> {
        u64::try_from(self).ok().map(BigUint::from)
    }
}

impl ExactAcc for i128 {
    const CAPACITY_BITS: u32 = 126;

    fn from_small(v: i64) -> Self {
        v as i128
    }

    fn into_biguint(self) -> Option<BigUint> {
        u128::try_from(self).ok().map(BigUint::from)
    }
}

impl ExactAcc for BigInt {
    const CAPACITY_BITS: u32 = u32::MAX;

    fn from_small(v: i64) -> Self {
        BigInt::from(v)
    }

    fn into_biguint(self) -> Option<BigUint> {
        self.to_biguint()
    }
}

/// Natural log of a big integer, from its bit length and top 64 bits.
///
/// Returns `-inf` for zero.
pub fn ln_big<F: Float>(x: &BigUint) -> F {
    let bits = x.bits();
    if bits == 0 {
        return F::neg_infinity();
    }
    if bits <= 64 {
        return F::from(x.to_u64().unwrap()).unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap();
    let ln2 = F::from(std::f64::consts::LN_2).unwrap();
    F::from(top).unwrap().ln() + F::from(shift).unwrap() * ln2
}

/// `ln(num / den)` for positive big integers.
pub fn ln_ratio<F: Float>(num: &BigUint, den: &BigUint) -> F {
    ln_big::<F>(num) - ln_big::<F>(den)
}

/// Nearest-float conversion of an exact rational.
pub fn ratio_to_float<F: Float>(r: &BigRational) -> F {
    if r.is_zero() {
        return F::zero();
    }
    let negative = r.numer().sign() == Sign::Minus;
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    // Scale so the integer quotient carries 64 significant bits.
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let mant = F::from(q.to_f64().unwrap()).unwrap();
    let two = F::from(2.0).unwrap();
    let v = mant * two.powi(-(shift as i32));
    if negative {
        -v
    } else {
        v
    }
}

/// Rounding direction of a [`DirectedSum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    /// The result is never below the exact sum of the exact terms.
    Up,
    /// The result is never above the exact sum of the exact terms.
    Down,
    Nearest,
}

/// Neumaier-compensated sum with a directional error allowance.
///
/// Each term is assumed to carry a few ulps of evaluation error (a `log`
/// and a division); `add` widens it by that allowance in the chosen
/// direction and `value` widens the final rounding the same way.
#[derive(Debug, Clone, Copy)]
pub struct DirectedSum<F> {
    sum: F,
    comp: F,
    magnitude: F,
    rounding: Rounding,
}

impl<F: Float> DirectedSum<F> {
    /// Relative error allowed for a single term, in ulps.
    const TERM_ULPS: f64 = 4.0;

    pub fn new(rounding: Rounding) -> Self {
        Self {
            sum: F::zero(),
            comp: F::zero(),
            magnitude: F::zero(),
            rounding,
        }
    }

    pub fn rounding(&self) -> Rounding {
        self.rounding
    }

    /// Moves a single computed value a few ulps in the sum's direction.
    pub fn nudge(rounding: Rounding, x: F, ulps: f64) -> F {
        Self::new(rounding).widen(x, ulps)
    }

    fn widen(&self, x: F, ulps: f64) -> F {
        let slack = x.abs() * F::epsilon() * F::from(ulps).unwrap();
        match self.rounding {
            Rounding::Up => x + slack,
            Rounding::Down => x - slack,
            Rounding::Nearest => x,
        }
    }

    pub fn add(&mut self, term: F) {
        self.add_with_ulps(term, Self::TERM_ULPS);
    }

    /// Adds a term whose evaluation may be off by up to `ulps` ulps.
    pub fn add_with_ulps(&mut self, term: F, ulps: f64) {
        let x = self.widen(term, ulps);
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
        self.magnitude = self.magnitude + x.abs();
    }

    /// Folds another partial sum in; merge order must be fixed by the caller.
    pub fn merge(&mut self, other: &DirectedSum<F>) {
        self.add_raw(other.sum);
        self.add_raw(other.comp);
        self.magnitude = self.magnitude + other.magnitude;
    }

    fn add_raw(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    /// The accumulated value, widened by the worst-case accumulation error.
    pub fn value(&self) -> F {
        let s = self.sum + self.comp;
        // Neumaier: |err| <= 2 eps |s| + O(n eps^2) sum|x|; take the second
        // term as eps * sum|x| which dominates for any realistic n.
        let slack = F::epsilon() * (F::from(2.0).unwrap() * s.abs() + self.magnitude * F::epsilon());
        match self.rounding {
            Rounding::Up => s + slack,
            Rounding::Down => s - slack,
            Rounding::Nearest => s,
        }
    }
}

impl<F: Float> Extend<F> for DirectedSum<F> {
    fn extend<I: IntoIterator<Item = F>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}
