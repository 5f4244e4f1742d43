//! Scalar abstraction over exact rationals and binary floats.
//!
//! Identity checks (closed forms, stochastic-matrix row sums, moment
//! coefficient identities) run over `BigRational`, where equality is
//! meaningful. Monte Carlo experiments and large-n evaluations run over
//! `f64`. Code that is generic over [`Scalar`] runs both ways without
//! duplicating the arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    /// True when arithmetic is exact (no rounding), as for rationals.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    /// The fraction `num/den`. Panics if `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_bigint(v: &BigInt) -> Self;

    /// Closest representable value to `v`; exact for rationals since
    /// every finite float is a dyadic rational.
    fn from_f64_lossy(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// `self^e` by binary exponentiation; `e = 0` gives one.
    fn powu(&self, e: u64) -> Self {
        let mut base = self.clone();
        let mut e = e;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::INFINITY)
    }

    fn from_f64_lossy(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }

    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_f64(v).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        // Correct even for numerators and denominators far beyond the
        // f64 range: the conversion works on bit lengths, not on the
        // component values.
        ToPrimitive::to_f64(self).expect("reduced rational is never 0/0")
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}
