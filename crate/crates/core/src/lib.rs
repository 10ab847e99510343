//! Quasilocal metrics for non-Hermitian tridiagonal lattice Hamiltonians.
//!
//! Everything here works on banded matrices over a symmetric truncation
//! window `−N..=N`, in exact rational (or surd) arithmetic or in `f64`.
//!
//! - [`band`]: storage, products, the residual `H†Θ − ΘH`, banded factorizations
//! - [`lattice`]: `−Δ` plus defect potentials
//! - [`metric`]: closed-form, solved, superposed and diagonal metrics
//! - [`dyson`]: maps `Ω` with `Ω†Ω = Θ` and partners `𝔥 = ΩHΩ⁻¹`
//! - [`scattering`]: reflection and transmission amplitudes
#![no_std]
extern crate alloc;

pub mod band;
pub mod dyson;
pub mod error;
pub mod lattice;
pub mod metric;
pub mod scalar;
pub mod scattering;
pub mod surd;

pub use band::{AnyBandMatrix, BandMatrix};
pub use error::{BandError, CholeskyError, DysonError, MetricError, ModelError, ScatteringError};
pub use scalar::{ratio, Rational, Real, Scalar, ScalarKind};
pub use surd::Surd;
