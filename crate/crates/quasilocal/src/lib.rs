//! Std companion to `quasilocal-core`: JSON interchange, exact reference
//! fixtures, dense spectral checks and the `quasilocal` command line.

pub mod cli;
pub mod fixtures;
pub mod json;
pub mod spectrum;

pub use quasilocal_core as core;
