//! Runtime-tagged band matrices, for callers that pick the scalar field at run time.

use super::BandMatrix;
use crate::error::BandError;
use crate::scalar::{Rational, ScalarKind};
use crate::surd::Surd;

#[derive(Clone, Debug, PartialEq)]
pub enum AnyBandMatrix {
    Rational(BandMatrix<Rational>),
    Float(BandMatrix<f64>),
    Surd(BandMatrix<Surd>),
}

impl AnyBandMatrix {
    pub fn kind(&self) -> ScalarKind {
        match self {
            AnyBandMatrix::Rational(_) => ScalarKind::Rational,
            AnyBandMatrix::Float(_) => ScalarKind::Float,
            AnyBandMatrix::Surd(_) => ScalarKind::Surd,
        }
    }

    pub fn window(&self) -> usize {
        match self {
            AnyBandMatrix::Rational(m) => m.window(),
            AnyBandMatrix::Float(m) => m.window(),
            AnyBandMatrix::Surd(m) => m.window(),
        }
    }

    pub fn bandwidth(&self) -> usize {
        match self {
            AnyBandMatrix::Rational(m) => m.bandwidth(),
            AnyBandMatrix::Float(m) => m.bandwidth(),
            AnyBandMatrix::Surd(m) => m.bandwidth(),
        }
    }

    pub fn to_f64(&self) -> BandMatrix<f64> {
        match self {
            AnyBandMatrix::Rational(m) => m.to_f64(),
            AnyBandMatrix::Float(m) => m.clone(),
            AnyBandMatrix::Surd(m) => m.to_f64(),
        }
    }

    /// Product of two matrices over the same field. Mixing fields is an
    /// error rather than a silent conversion.
    pub fn multiply(&self, rhs: &Self) -> Result<Self, BandError> {
        match (self, rhs) {
            (AnyBandMatrix::Rational(a), AnyBandMatrix::Rational(b)) => {
                a.multiply(b).map(AnyBandMatrix::Rational)
            }
            (AnyBandMatrix::Float(a), AnyBandMatrix::Float(b)) => {
                a.multiply(b).map(AnyBandMatrix::Float)
            }
            (AnyBandMatrix::Surd(a), AnyBandMatrix::Surd(b)) => {
                a.multiply(b).map(AnyBandMatrix::Surd)
            }
            _ => Err(BandError::ScalarKindMismatch {
                left: self.kind(),
                right: rhs.kind(),
            }),
        }
    }
}

impl From<BandMatrix<Rational>> for AnyBandMatrix {
    fn from(m: BandMatrix<Rational>) -> Self {
        AnyBandMatrix::Rational(m)
    }
}

impl From<BandMatrix<f64>> for AnyBandMatrix {
    fn from(m: BandMatrix<f64>) -> Self {
        AnyBandMatrix::Float(m)
    }
}

impl From<BandMatrix<Surd>> for AnyBandMatrix {
    fn from(m: BandMatrix<Surd>) -> Self {
        AnyBandMatrix::Surd(m)
    }
}
