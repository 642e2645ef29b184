//! Scalar abstractions.
//!
//! The symmetric-function algebra only needs ring operations and an order, so
//! it runs over [`Scalar`], which covers `f32`, `f64` and exact rationals. The
//! geometry and time stepping need transcendental functions and work over
//! [`Real`], i.e. the IEEE float types.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// An ordered ring/field element usable by the symmetric-function algebra.
pub trait Scalar: Num + Clone + PartialOrd + Debug {
    /// `false` for NaN or infinite floats; always `true` for exact types.
    fn is_finite_value(&self) -> bool {
        true
    }

    /// Absolute slack allowed when testing membership of a cone closure,
    /// given the natural magnitude `scale` of the quantity being tested.
    fn closure_slack(scale: &Self) -> Self {
        let _ = scale;
        Self::zero()
    }

    fn abs_value(&self) -> Self {
        if *self < Self::zero() {
            Self::zero() - self.clone()
        } else {
            self.clone()
        }
    }

    fn from_count(v: usize) -> Self {
        let mut acc = Self::zero();
        for _ in 0..v {
            acc = acc + Self::one();
        }
        acc
    }
}

impl Scalar for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn closure_slack(scale: &Self) -> Self {
        1e-14 * scale
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn from_count(v: usize) -> Self {
        v as f64
    }
}

impl Scalar for f32 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn closure_slack(scale: &Self) -> Self {
        1e-6 * scale
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn from_count(v: usize) -> Self {
        v as f32
    }
}

impl Scalar for BigRational {
    fn from_count(v: usize) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl Scalar for Ratio<i64> {
    fn from_count(v: usize) -> Self {
        Ratio::from_integer(v as i64)
    }
}

/// Floating point scalar for the geometric and dynamical modules.
pub trait Real:
    Scalar + Float + FloatConst + FromPrimitive + ToPrimitive + Display + Copy + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Scalar + Float + FloatConst + FromPrimitive + ToPrimitive + Display + Copy + Send + Sync + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
