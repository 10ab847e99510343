//! Scalar fields the band-matrix code is generic over.
//!
//! Three kinds are provided: exact rationals (`Rational`), doubles (`f64`)
//! and exact real surds (`Surd`, sums of rational multiples of square roots).
//! Square roots of rational metric entries land in `Surd`, so Dyson maps built
//! from exact metrics stay exact.

use core::fmt::Debug;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::surd::Surd;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Runtime tag for the scalar field of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    Rational,
    Float,
    Surd,
}

impl ScalarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarKind::Rational => "rational",
            ScalarKind::Float => "float",
            ScalarKind::Surd => "surd",
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, ScalarKind::Float)
    }
}

/// Why a reciprocal could not be formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecipError {
    Zero,
    /// The value is nonzero but its inverse is outside what the field type can express.
    Unsupported,
}

/// A real scalar field.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const KIND: ScalarKind;

    /// Field holding square roots of nonnegative elements of `Self`.
    type Sqrt: Scalar + From<Self>;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn try_recip(&self) -> Result<Self, RecipError>;
    /// Square root, `None` for negative input.
    fn sqrt(&self) -> Option<Self::Sqrt>;

    /// Magnitude used to rank pivot candidates.
    fn pivot_score(&self) -> f64 {
        self.to_f64().abs()
    }

    fn try_div(&self, rhs: &Self) -> Result<Self, RecipError> {
        Ok(self.clone() * rhs.try_recip()?)
    }
}

/// An ordered scalar field (rationals and floats).
pub trait Real: Scalar + PartialOrd {
    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Zero test relative to `scale`; exact fields ignore the scale.
    fn is_negligible(&self, scale: &Self) -> bool;

    /// Cholesky pivot acceptance. Exact: strictly positive. Float: above
    /// `1e-13 * max_diag`.
    fn is_admissible_pivot(&self, max_diag: &Self) -> bool;

    fn from_f64(v: f64) -> Option<Self>;
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::Rational;
    type Sqrt = Surd;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn try_recip(&self) -> Result<Self, RecipError> {
        if Zero::is_zero(self) {
            Err(RecipError::Zero)
        } else {
            Ok(self.recip())
        }
    }
    fn sqrt(&self) -> Option<Surd> {
        Surd::sqrt_rational(self)
    }
}

impl Real for Rational {
    fn is_negligible(&self, _scale: &Self) -> bool {
        Zero::is_zero(self)
    }
    fn is_admissible_pivot(&self, _max_diag: &Self) -> bool {
        self.is_positive()
    }
    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;
    type Sqrt = f64;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn try_recip(&self) -> Result<Self, RecipError> {
        if *self == 0.0 {
            Err(RecipError::Zero)
        } else {
            Ok(1.0 / *self)
        }
    }
    fn sqrt(&self) -> Option<f64> {
        if *self < 0.0 {
            None
        } else {
            Some(Float::sqrt(*self))
        }
    }
}

impl Real for f64 {
    fn is_negligible(&self, scale: &Self) -> bool {
        Float::abs(*self) <= 1e-12 * Float::max(*scale, 1.0)
    }
    fn is_admissible_pivot(&self, max_diag: &Self) -> bool {
        *self > 1e-13 * *max_diag
    }
    fn from_f64(v: f64) -> Option<Self> {
        Some(v)
    }
}

/// Converts a big rational to the nearest double without overflowing on
/// large numerators/denominators.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to shifting both parts into range.
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = n >> shift;
    let d = d >> shift;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

/// Builds `p/q` as a `Rational`. Panics on `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
