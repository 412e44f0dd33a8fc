//! Scalar abstractions.
//!
//! Structural code (matrix assembly, Kronecker products, the linearized
//! operator, subspace coordinates) only needs exact field arithmetic and runs
//! over [`Field`], which covers `f32`, `f64` and `BigRational`. Anything
//! iterative (eigenvalues, SVD, integration, fitting) needs [`Real`].

use std::fmt::{Debug, Display, LowerExp};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// An ordered field with lossy conversion to and from `f64`.
pub trait Field:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Absolute value as an `f64`, used for tolerance checks on exact types.
    fn magnitude(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl<T> Field for T where
    T: Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = T> + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

/// A machine floating-point type.
pub trait Real: Field + Float + Copy + Display + LowerExp {
    fn c(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 constant representable")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Field + Float + Copy + Display + LowerExp {}

/// Exact rational from any finite scalar (every finite float is dyadic).
pub fn to_rational<S: Field>(x: &S) -> Option<BigRational> {
    let v = x.to_f64()?;
    BigRational::from_float(v)
}

/// Smallest common multiple of the denominators of a slice of rationals.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()))
}
