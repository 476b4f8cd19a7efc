use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field of scalars the tensor and polynomial code is written against.
///
/// Implemented for `f64` and for exact [`BigRational`].
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for fields where equality is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_u64(v: u64) -> Self;

    fn from_biguint(v: &BigUint) -> Self;

    /// Lossy projection used for thresholds and reporting.
    fn to_f64(&self) -> f64;

    fn is_finite(&self) -> bool;

    /// Symmetry test for a matrix pair `(a, b) = (S_ij, S_ji)`.
    fn symmetric_pair(a: &Self, b: &Self) -> bool;

    fn magnitude(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powu(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

/// Relative tolerance for float symmetry checks.
pub(crate) const SYMMETRY_RTOL: f64 = 1e-12;

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn from_biguint(v: &BigUint) -> Self {
        ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn symmetric_pair(a: &Self, b: &Self) -> bool {
        (a - b).abs() <= SYMMETRY_RTOL * f64::max(1.0, a.abs())
    }

    fn magnitude(&self) -> Self {
        f64::abs(*self)
    }

    fn powu(&self, e: u32) -> Self {
        num_traits::Float::powi(*self, e as i32)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_biguint(v: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(v.clone()))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn symmetric_pair(a: &Self, b: &Self) -> bool {
        a == b
    }

    fn magnitude(&self) -> Self {
        Signed::abs(self)
    }

    fn powu(&self, e: u32) -> Self {
        num_traits::pow(self.clone(), e as usize)
    }
}
