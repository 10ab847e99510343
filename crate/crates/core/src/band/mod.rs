//! Banded matrices on a symmetric truncation window `-N..=N`.
//!
//! Storage is by diagonals: offset `d = j - i` maps to the `2N + 1 - |d|`
//! entries of that diagonal, ordered by `min(i, j)`. Offsets that are not
//! stored are identically zero.

mod dynamic;
mod factor;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

pub use dynamic::AnyBandMatrix;
pub use factor::{
    banded_cholesky, ldlt, solve_band, upper_triangular_inverse, BandLu, CholeskyFactor, Ldlt,
};

use crate::error::BandError;
use crate::scalar::{Real, Scalar};

/// A square banded matrix indexed by lattice sites `-N..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandMatrix<T> {
    window: usize,
    diagonals: BTreeMap<isize, Vec<T>>,
}

impl<T: Scalar> BandMatrix<T> {
    /// The all-zero matrix on window `N`.
    pub fn zeros(window: usize) -> Self {
        BandMatrix {
            window,
            diagonals: BTreeMap::new(),
        }
    }

    pub fn identity(window: usize) -> Self {
        let mut m = Self::zeros(window);
        m.diagonals.insert(0, vec![T::one(); 2 * window + 1]);
        m
    }

    /// Toeplitz band: `value_at(d)` on every offset in `offsets`.
    pub fn toeplitz(window: usize, entries: &[(isize, T)]) -> Self {
        let mut m = Self::zeros(window);
        for (d, v) in entries {
            if v.is_zero() || d.unsigned_abs() > 2 * window {
                continue;
            }
            m.diagonals
                .insert(*d, vec![v.clone(); 2 * window + 1 - d.unsigned_abs()]);
        }
        m
    }

    /// Builds from a dense row-major `(2N+1)²` array, dropping zero diagonals.
    pub fn from_dense(window: usize, dense: &[Vec<T>]) -> Result<Self, BandError> {
        let dim = 2 * window + 1;
        if dense.len() != dim || dense.iter().any(|r| r.len() != dim) {
            return Err(BandError::Shape {
                expected: dim,
                found: dense.len(),
            });
        }
        let mut m = Self::zeros(window);
        let n = window as isize;
        for i in -n..=n {
            for j in -n..=n {
                let v = &dense[(i + n) as usize][(j + n) as usize];
                if !v.is_zero() {
                    m.set(i, j, v.clone());
                }
            }
        }
        Ok(m)
    }

    /// Builds from explicit diagonals. Each diagonal must have `2N+1-|d|` entries.
    pub fn from_diagonals(
        window: usize,
        diagonals: impl IntoIterator<Item = (isize, Vec<T>)>,
    ) -> Result<Self, BandError> {
        let mut m = Self::zeros(window);
        for (d, values) in diagonals {
            let expected = (2 * window + 1)
                .checked_sub(d.unsigned_abs())
                .ok_or(BandError::OffsetOutOfWindow { offset: d, window })?;
            if d.unsigned_abs() > 2 * window {
                return Err(BandError::OffsetOutOfWindow { offset: d, window });
            }
            if values.len() != expected {
                return Err(BandError::DiagonalLength {
                    offset: d,
                    expected,
                    found: values.len(),
                });
            }
            if values.iter().all(Scalar::is_zero) {
                continue;
            }
            m.diagonals.insert(d, values);
        }
        Ok(m)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Number of rows, `2N + 1`.
    pub fn dim(&self) -> usize {
        2 * self.window + 1
    }

    /// Largest stored `|offset|` (0 for the zero matrix).
    pub fn bandwidth(&self) -> usize {
        self.diagonals
            .keys()
            .map(|d| d.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Stored offsets in ascending order.
    pub fn offsets(&self) -> impl Iterator<Item = isize> + '_ {
        self.diagonals.keys().copied()
    }

    pub fn diagonal(&self, offset: isize) -> Option<&[T]> {
        self.diagonals.get(&offset).map(Vec::as_slice)
    }

    pub fn diagonals(&self) -> impl Iterator<Item = (isize, &[T])> + '_ {
        self.diagonals.iter().map(|(d, v)| (*d, v.as_slice()))
    }

    pub fn in_window(&self, i: isize) -> bool {
        i.unsigned_abs() <= self.window
    }

    fn slot(&self, i: isize, j: isize) -> Option<(isize, usize)> {
        if !self.in_window(i) || !self.in_window(j) {
            return None;
        }
        Some((j - i, (i.min(j) + self.window as isize) as usize))
    }

    /// Entry `(i, j)`; zero off the band and outside the window.
    pub fn get(&self, i: isize, j: isize) -> T {
        self.get_ref(i, j).cloned().unwrap_or_else(T::zero)
    }

    /// Reference to a stored entry, `None` when it is implicitly zero.
    pub fn get_ref(&self, i: isize, j: isize) -> Option<&T> {
        let (d, k) = self.slot(i, j)?;
        self.diagonals.get(&d).map(|diag| &diag[k])
    }

    /// Sets entry `(i, j)`, allocating its diagonal on first use.
    ///
    /// Panics when `(i, j)` lies outside the window.
    pub fn set(&mut self, i: isize, j: isize, value: T) {
        let (d, k) = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside window {}", self.window));
        let len = self.dim() - d.unsigned_abs();
        if value.is_zero() && !self.diagonals.contains_key(&d) {
            return;
        }
        self.diagonals
            .entry(d)
            .or_insert_with(|| vec![T::zero(); len])[k] = value;
    }

    /// Drops diagonals that became identically zero.
    pub fn prune(&mut self) {
        self.diagonals.retain(|_, v| v.iter().any(|x| !x.is_zero()));
    }

    /// Iterates the stored entries `(i, j, value)` row by row within each diagonal.
    pub fn entries(&self) -> impl Iterator<Item = (isize, isize, &T)> + '_ {
        let n = self.window as isize;
        self.diagonals.iter().flat_map(move |(&d, diag)| {
            diag.iter().enumerate().map(move |(k, v)| {
                let lo = k as isize - n;
                if d >= 0 {
                    (lo, lo + d, v)
                } else {
                    (lo - d, lo, v)
                }
            })
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let dim = self.dim();
        let n = self.window as isize;
        let mut out = vec![vec![T::zero(); dim]; dim];
        for (i, j, v) in self.entries() {
            out[(i + n) as usize][(j + n) as usize] = v.clone();
        }
        out
    }

    /// Entrywise conversion into another scalar field.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BandMatrix<U> {
        let mut out = BandMatrix::<U>::zeros(self.window);
        for (d, diag) in &self.diagonals {
            let mapped: Vec<U> = diag.iter().map(&f).collect();
            if mapped.iter().any(|x| !x.is_zero()) {
                out.diagonals.insert(*d, mapped);
            }
        }
        out
    }

    pub fn to_f64(&self) -> BandMatrix<f64> {
        self.map(Scalar::to_f64)
    }

    /// Lifts entries into the square-root field of `T`.
    pub fn lift(&self) -> BandMatrix<T::Sqrt> {
        self.map(|x| T::Sqrt::from(x.clone()))
    }

    fn check_window(&self, other: &Self) -> Result<(), BandError> {
        if self.window != other.window {
            Err(BandError::WindowMismatch {
                left: self.window,
                right: other.window,
            })
        } else {
            Ok(())
        }
    }

    /// Matrix product restricted to the window; bandwidth is at most the sum
    /// of the factor bandwidths, capped at `2N`.
    pub fn multiply(&self, rhs: &Self) -> Result<Self, BandError> {
        self.check_window(rhs)?;
        let n = self.window as isize;
        let mut out = Self::zeros(self.window);
        for (&da, diag_a) in &self.diagonals {
            for (&db, diag_b) in &rhs.diagonals {
                let dc = da + db;
                if dc.unsigned_abs() > 2 * self.window {
                    continue;
                }
                // C(i, i+dc) += A(i, i+da) B(i+da, i+dc)
                let lo = (-n).max(-n - da).max(-n - dc);
                let hi = n.min(n - da).min(n - dc);
                for i in lo..=hi {
                    let a = &diag_a[(i.min(i + da) + n) as usize];
                    let k = i + da;
                    let b = &diag_b[(k.min(k + db) + n) as usize];
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let prod = a.clone() * b.clone();
                    let len = self.dim() - dc.unsigned_abs();
                    let slot = &mut out
                        .diagonals
                        .entry(dc)
                        .or_insert_with(|| vec![T::zero(); len])
                        [(i.min(i + dc) + n) as usize];
                    *slot = slot.clone() + prod;
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Conjugate transpose. Every supported field is real, so this is the transpose.
    pub fn adjoint(&self) -> Self {
        let diagonals = self
            .diagonals
            .iter()
            .map(|(d, v)| (-*d, v.clone()))
            .collect();
        BandMatrix {
            window: self.window,
            diagonals,
        }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(T, T) -> T) -> Result<Self, BandError> {
        self.check_window(rhs)?;
        let len = |d: isize| self.dim() - d.unsigned_abs();
        let mut out = Self::zeros(self.window);
        let keys: alloc::collections::BTreeSet<isize> = self
            .diagonals
            .keys()
            .chain(rhs.diagonals.keys())
            .copied()
            .collect();
        for d in keys {
            let a = self.diagonals.get(&d);
            let b = rhs.diagonals.get(&d);
            let vals: Vec<T> = (0..len(d))
                .map(|k| {
                    let x = a.map(|v| v[k].clone()).unwrap_or_else(T::zero);
                    let y = b.map(|v| v[k].clone()).unwrap_or_else(T::zero);
                    f(x, y)
                })
                .collect();
            out.diagonals.insert(d, vals);
        }
        out.prune();
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, BandError> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, BandError> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = self.map(|x| s.clone() * x.clone());
        out.prune();
        out
    }

    /// Applies the matrix to a vector indexed `0..2N+1` (site `i` at `i + N`).
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>, BandError> {
        if x.len() != self.dim() {
            return Err(BandError::Shape {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let n = self.window as isize;
        let mut y = vec![T::zero(); self.dim()];
        for (i, j, v) in self.entries() {
            let xi = &x[(j + n) as usize];
            if xi.is_zero() {
                continue;
            }
            let slot = &mut y[(i + n) as usize];
            *slot = slot.clone() + v.clone() * xi.clone();
        }
        Ok(y)
    }

    pub fn is_symmetric(&self) -> bool {
        self.diagonals
            .iter()
            .all(|(d, v)| self.diagonals.get(&-d).is_some_and(|w| w == v))
    }

    /// `entry(-i, -j) == entry(i, j)` everywhere in the window.
    pub fn is_persymmetric(&self) -> bool {
        // (i, j) -> (-i, -j) maps diagonal d onto diagonal -d, reversed
        self.diagonals.iter().all(|(d, v)| {
            self.diagonals
                .get(&-d)
                .is_some_and(|w| w.iter().eq(v.iter().rev()))
        })
    }

    /// Entries `(i, j)` with `|i|, |j| <= radius`.
    pub fn interior(&self, radius: usize) -> impl Iterator<Item = (isize, isize, &T)> + '_ {
        let r = radius as isize;
        self.entries()
            .filter(move |(i, j, _)| i.abs() <= r && j.abs() <= r)
    }

    /// Window radius untouched by truncation for a product of factors with
    /// the given total bandwidth.
    pub fn interior_radius(&self, edge_bandwidth: usize) -> usize {
        self.window.saturating_sub(edge_bandwidth)
    }
}

/// Result of [`quasi_hermiticity_residual`].
#[derive(Clone, Debug, PartialEq)]
pub struct Residual<T> {
    /// `H†Θ − ΘH` on the full window, edge rows included.
    pub matrix: BandMatrix<T>,
    /// Radius `N − bw(H) − bw(Θ)` of the interior the checks below cover.
    pub interior_radius: usize,
    /// Largest `|entry|` over the interior.
    pub interior_max_abs: T,
}

impl<T: Real> Residual<T> {
    pub fn interior_is_zero(&self) -> bool {
        self.matrix
            .interior(self.interior_radius)
            .all(|(_, _, v)| v.is_zero())
    }
}

/// The quasi-Hermiticity residual `H†Θ − ΘH` and its interior maximum.
pub fn quasi_hermiticity_residual<T: Real>(
    h: &BandMatrix<T>,
    theta: &BandMatrix<T>,
) -> Result<Residual<T>, BandError> {
    let lhs = h.adjoint().multiply(theta)?;
    let rhs = theta.multiply(h)?;
    let matrix = lhs.sub(&rhs)?;
    let interior_radius = h.interior_radius(h.bandwidth() + theta.bandwidth());
    let interior_max_abs = max_abs_interior(&matrix, interior_radius);
    Ok(Residual {
        matrix,
        interior_radius,
        interior_max_abs,
    })
}

/// Largest `|entry|` with both indices within `radius`.
pub fn max_abs_interior<T: Real>(m: &BandMatrix<T>, radius: usize) -> T {
    m.interior(radius)
        .map(|(_, _, v)| v.abs())
        .fold(T::zero(), |acc, v| if v > acc { v } else { acc })
}
