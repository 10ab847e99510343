//! Banded factorizations: root-free `LDLᵀ`, Cholesky `Θ = UᵀU`, and LU with
//! partial pivoting for general band solves.

use alloc::vec;
use alloc::vec::Vec;

use super::BandMatrix;
use crate::error::{BandError, CholeskyError};
use crate::scalar::{Real, RecipError, Scalar};

/// `Θ = L D Lᵀ` with unit lower-triangular `L` of the same bandwidth.
#[derive(Clone, Debug, PartialEq)]
pub struct Ldlt<T> {
    /// Strictly lower part of `L` (the unit diagonal is implicit).
    pub lower: BandMatrix<T>,
    /// Pivots `D`, indexed by dense row `0..2N+1`.
    pub pivots: Vec<T>,
}

/// Root-free Cholesky of a symmetric band matrix. Fails at the first pivot
/// that is not admissible (see [`Real::is_admissible_pivot`]).
pub fn ldlt<T: Real>(theta: &BandMatrix<T>) -> Result<Ldlt<T>, CholeskyError> {
    if !theta.is_symmetric() {
        return Err(BandError::NotSymmetric.into());
    }
    let n = theta.window() as isize;
    let w = theta.bandwidth() as isize;
    let max_diag = (-n..=n)
        .map(|i| theta.get(i, i).abs())
        .fold(T::zero(), |acc, v| if v > acc { v } else { acc });

    let mut lower = BandMatrix::<T>::zeros(theta.window());
    let mut pivots: Vec<T> = Vec::with_capacity(theta.dim());
    let piv = |pivots: &Vec<T>, k: isize| pivots[(k + n) as usize].clone();

    for i in -n..=n {
        let mut d = theta.get(i, i);
        for k in (i - w).max(-n)..i {
            let lik = lower.get(i, k);
            if !lik.is_zero() {
                d = d - lik.clone() * lik * piv(&pivots, k);
            }
        }
        if !d.is_admissible_pivot(&max_diag) {
            return Err(CholeskyError::NotPositiveDefinite { site: i });
        }
        let d_inv = d
            .try_recip()
            .map_err(|_| CholeskyError::NotPositiveDefinite { site: i })?;
        for j in (i + 1)..=(i + w).min(n) {
            let mut v = theta.get(j, i);
            for k in (j - w).max(-n)..i {
                let ljk = lower.get(j, k);
                if ljk.is_zero() {
                    continue;
                }
                let lik = lower.get(i, k);
                if !lik.is_zero() {
                    v = v - ljk * lik * piv(&pivots, k);
                }
            }
            if !v.is_zero() {
                lower.set(j, i, v * d_inv.clone());
            }
        }
        pivots.push(d);
    }
    Ok(Ldlt { lower, pivots })
}

/// Upper-triangular band factor `U` with `UᵀU = Θ` and positive diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CholeskyFactor<S> {
    pub upper: BandMatrix<S>,
}

/// Banded Cholesky `Θ = UᵀU`. Entries of `U` live in the square-root field
/// of `T` (`U(i, j) = √D_i · L(j, i)`), so exact input yields an exact factor.
pub fn banded_cholesky<T: Real>(
    theta: &BandMatrix<T>,
) -> Result<CholeskyFactor<T::Sqrt>, CholeskyError> {
    let f = ldlt(theta)?;
    let n = theta.window() as isize;
    let mut upper = BandMatrix::<T::Sqrt>::zeros(theta.window());
    for i in -n..=n {
        let root = f.pivots[(i + n) as usize]
            .sqrt()
            .ok_or(CholeskyError::NotPositiveDefinite { site: i })?;
        upper.set(i, i, root.clone());
        for (j, k, v) in f.lower.entries() {
            if k == i {
                upper.set(i, j, root.clone() * T::Sqrt::from(v.clone()));
            }
        }
    }
    Ok(CholeskyFactor { upper })
}

/// Inverse of an upper-triangular band matrix by back-substitution. Only the
/// diagonal entries are inverted, so monomial surd pivots stay exact.
pub fn upper_triangular_inverse<T: Scalar>(u: &BandMatrix<T>) -> Result<BandMatrix<T>, BandError> {
    let n = u.window() as isize;
    let w = u.bandwidth() as isize;
    let recips = (-n..=n)
        .map(|i| {
            u.get(i, i).try_recip().map_err(|e| match e {
                RecipError::Zero => BandError::Singular { site: i },
                RecipError::Unsupported => BandError::UnsupportedPivot { site: i },
            })
        })
        .collect::<Result<Vec<T>, _>>()?;
    let mut inv = BandMatrix::zeros(u.window());
    for j in -n..=n {
        let mut col: Vec<T> = vec![T::zero(); (j + n + 1) as usize];
        col[(j + n) as usize] = recips[(j + n) as usize].clone();
        for i in (-n..j).rev() {
            let mut acc = T::zero();
            for k in (i + 1)..=(i + w).min(j) {
                let x = &col[(k + n) as usize];
                if x.is_zero() {
                    continue;
                }
                let uik = u.get(i, k);
                if !uik.is_zero() {
                    acc = acc + uik * x.clone();
                }
            }
            if !acc.is_zero() {
                col[(i + n) as usize] = -(acc * recips[(i + n) as usize].clone());
            }
        }
        for (idx, v) in col.into_iter().enumerate() {
            if !v.is_zero() {
                inv.set(idx as isize - n, j, v);
            }
        }
    }
    Ok(inv)
}

#[derive(Clone, Debug)]
struct Row<T> {
    start: usize,
    vals: Vec<T>,
}

impl<T: Scalar> Row<T> {
    fn get(&self, col: usize) -> T {
        if col < self.start {
            return T::zero();
        }
        self.vals
            .get(col - self.start)
            .cloned()
            .unwrap_or_else(T::zero)
    }

    fn end(&self) -> usize {
        self.start + self.vals.len()
    }

    /// Slot for `col`, widening the stored range when pivoting has moved
    /// the row away from its original position.
    fn slot(&mut self, col: usize) -> &mut T {
        if col < self.start {
            let pad = self.start - col;
            self.vals.splice(0..0, core::iter::repeat_n(T::zero(), pad));
            self.start = col;
        }
        if col >= self.end() {
            let len = col + 1 - self.start;
            self.vals.resize(len, T::zero());
        }
        &mut self.vals[col - self.start]
    }
}

/// LU factorization with partial pivoting of a band matrix.
#[derive(Clone, Debug)]
pub struct BandLu<T> {
    window: usize,
    /// Upper-triangular rows after elimination (in pivoted order).
    rows: Vec<Row<T>>,
    /// Per column: row swapped into the pivot position, and multipliers for
    /// the rows below it.
    steps: Vec<(usize, Vec<T>)>,
}

impl<T: Scalar> BandLu<T> {
    pub fn factor(a: &BandMatrix<T>) -> Result<Self, BandError> {
        let dim = a.dim();
        let n = a.window() as isize;
        let kl = a
            .offsets()
            .filter(|d| *d < 0)
            .map(|d| d.unsigned_abs())
            .max()
            .unwrap_or(0);
        let ku = a
            .offsets()
            .filter(|d| *d > 0)
            .map(|d| d as usize)
            .max()
            .unwrap_or(0);

        let mut rows: Vec<Row<T>> = (0..dim)
            .map(|r| {
                let start = r.saturating_sub(kl);
                let end = (r + ku + kl + 1).min(dim);
                let vals = (start..end)
                    .map(|c| a.get(r as isize - n, c as isize - n))
                    .collect();
                Row { start, vals }
            })
            .collect();
        let mut steps = Vec::with_capacity(dim);

        for c in 0..dim {
            let last = (c + kl).min(dim - 1);
            let mut best: Option<(usize, f64)> = None;
            let mut saw_unsupported = false;
            for r in c..=last {
                let v = rows[r].get(c);
                if v.is_zero() {
                    continue;
                }
                if let Err(RecipError::Unsupported) = v.try_recip() {
                    saw_unsupported = true;
                    continue;
                }
                let score = v.pivot_score();
                if best.is_none_or(|(_, s)| score > s) {
                    best = Some((r, score));
                }
            }
            let site = c as isize - n;
            let p = match best {
                Some((p, _)) => p,
                None if saw_unsupported => return Err(BandError::UnsupportedPivot { site }),
                None => return Err(BandError::Singular { site }),
            };
            rows.swap(c, p);
            let pivot_inv = rows[c]
                .get(c)
                .try_recip()
                .map_err(|_| BandError::Singular { site })?;
            let mut mults = Vec::with_capacity(last - c);
            let pivot_row = rows[c].clone();
            for r in (c + 1)..=last {
                let v = rows[r].get(c);
                if v.is_zero() {
                    mults.push(T::zero());
                    continue;
                }
                let m = v * pivot_inv.clone();
                let row = &mut rows[r];
                for col in c..pivot_row.end() {
                    let pv = pivot_row.get(col);
                    if pv.is_zero() {
                        continue;
                    }
                    let slot = row.slot(col);
                    *slot = slot.clone() - m.clone() * pv;
                }
                mults.push(m);
            }
            steps.push((p, mults));
        }
        Ok(BandLu {
            window: a.window(),
            rows,
            steps,
        })
    }

    /// Solves `A x = rhs` for a vector indexed by dense row.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>, BandError> {
        let dim = 2 * self.window + 1;
        if rhs.len() != dim {
            return Err(BandError::Shape {
                expected: dim,
                found: rhs.len(),
            });
        }
        let mut b = rhs.to_vec();
        for (c, (p, mults)) in self.steps.iter().enumerate() {
            b.swap(c, *p);
            let bc = b[c].clone();
            if bc.is_zero() {
                continue;
            }
            for (t, m) in mults.iter().enumerate() {
                if !m.is_zero() {
                    let r = c + 1 + t;
                    b[r] = b[r].clone() - m.clone() * bc.clone();
                }
            }
        }
        let mut x = vec![T::zero(); dim];
        for r in (0..dim).rev() {
            let row = &self.rows[r];
            let mut acc = b[r].clone();
            for col in (r + 1)..row.end() {
                let v = row.get(col);
                if !v.is_zero() && !x[col].is_zero() {
                    acc = acc - v * x[col].clone();
                }
            }
            let site = r as isize - self.window as isize;
            let d = row.get(r);
            x[r] = acc.try_div(&d).map_err(|e| match e {
                RecipError::Zero => BandError::Singular { site },
                RecipError::Unsupported => BandError::UnsupportedPivot { site },
            })?;
        }
        Ok(x)
    }
}

/// Solves `A x = rhs` (vector indexed by dense row `0..2N+1`). Exact for
/// exact scalar fields.
pub fn solve_band<T: Scalar>(a: &BandMatrix<T>, rhs: &[T]) -> Result<Vec<T>, BandError> {
    BandLu::factor(a)?.solve(rhs)
}
