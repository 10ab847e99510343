//! Tridiagonal lattice Hamiltonians `H = −Δ + V` in units `ħ²/2m = h = 1`.

use alloc::vec::Vec;

use crate::band::BandMatrix;
use crate::error::ModelError;
use crate::scalar::Scalar;

/// Which Hamiltonian a matrix was built from.
#[derive(Clone, Debug, PartialEq)]
pub enum Model<T> {
    FreeLaplacian,
    PointDefect {
        g: T,
    },
    /// Two antisymmetric defect bonds, on `(−M, −M+1)` and `(M−1, M)`.
    TwoCenter {
        g: T,
        separation: usize,
    },
    /// Couplings `p₁, p₂, …` outward from the central bond.
    MultiParam {
        params: Vec<T>,
    },
}

/// How contiguous matrix indices `k ∈ −N..=N` map to physical site labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteLabels {
    /// Label equals index; parity is `k ↦ −k`.
    Integer,
    /// Label `2k − 1` (odd integers, no site 0); parity is `k ↦ 1 − k`.
    OddIntegers,
}

impl SiteLabels {
    pub fn label(self, index: isize) -> isize {
        match self {
            SiteLabels::Integer => index,
            SiteLabels::OddIntegers => 2 * index - 1,
        }
    }

    /// Inverse of [`SiteLabels::label`]; `None` for labels that name no site.
    pub fn index(self, label: isize) -> Option<isize> {
        match self {
            SiteLabels::Integer => Some(label),
            SiteLabels::OddIntegers if label.rem_euclid(2) == 1 => Some((label + 1) / 2),
            SiteLabels::OddIntegers => None,
        }
    }

    /// Parity image of an index.
    pub fn parity(self, index: isize) -> isize {
        match self {
            SiteLabels::Integer => -index,
            SiteLabels::OddIntegers => 1 - index,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeHamiltonian<T> {
    pub matrix: BandMatrix<T>,
    pub model: Model<T>,
    pub labels: SiteLabels,
}

/// `−Δ`: diagonal 2, off-diagonals −1.
pub fn free_laplacian_matrix<T: Scalar>(window: usize) -> BandMatrix<T> {
    BandMatrix::toeplitz(
        window,
        &[
            (-1, T::from_i64(-1)),
            (0, T::from_i64(2)),
            (1, T::from_i64(-1)),
        ],
    )
}

fn check_window(window: usize, required: usize) -> Result<(), ModelError> {
    if window < required {
        Err(ModelError::WindowTooSmall { window, required })
    } else {
        Ok(())
    }
}

/// Adds an antisymmetric bond `V(i, i+1) = −p`, `V(i+1, i) = +p`.
fn add_bond<T: Scalar>(m: &mut BandMatrix<T>, i: isize, p: &T) {
    m.set(i, i + 1, m.get(i, i + 1) - p.clone());
    m.set(i + 1, i, m.get(i + 1, i) + p.clone());
}

pub fn free_laplacian<T: Scalar>(window: usize) -> Result<LatticeHamiltonian<T>, ModelError> {
    check_window(window, 1)?;
    Ok(LatticeHamiltonian {
        matrix: free_laplacian_matrix(window),
        model: Model::FreeLaplacian,
        labels: SiteLabels::Integer,
    })
}

/// Single defect at site 0: `H(±1, 0) = −1−g`, `H(0, ±1) = −1+g`.
pub fn point_defect<T: Scalar>(g: T, window: usize) -> Result<LatticeHamiltonian<T>, ModelError> {
    check_window(window, 2)?;
    let mut matrix = free_laplacian_matrix(window);
    add_bond(&mut matrix, -1, &g);
    add_bond(&mut matrix, 0, &-g.clone());
    matrix.prune();
    Ok(LatticeHamiltonian {
        matrix,
        model: Model::PointDefect { g },
        labels: SiteLabels::Integer,
    })
}

/// Two defect bonds with `2M − 3` free columns between them. `M = 1` is the
/// formal limit that collapses onto [`point_defect`].
pub fn two_center<T: Scalar>(
    g: T,
    separation: usize,
    window: usize,
) -> Result<LatticeHamiltonian<T>, ModelError> {
    if separation == 0 {
        return Err(ModelError::BadSeparation(separation));
    }
    check_window(window, separation + 1)?;
    let m = separation as isize;
    let mut matrix = free_laplacian_matrix(window);
    add_bond(&mut matrix, -m, &g);
    add_bond(&mut matrix, m - 1, &-g.clone());
    matrix.prune();
    Ok(LatticeHamiltonian {
        matrix,
        model: Model::TwoCenter { g, separation },
        labels: SiteLabels::Integer,
    })
}

/// Bidiagonal multiparameter defect on odd-labelled sites. `p₁` sits on the
/// central bond `(−1, 1)`; `p_j` on `(2j−3, 2j−1)` and its mirror.
pub fn multiparam<T: Scalar>(
    params: Vec<T>,
    window: usize,
) -> Result<LatticeHamiltonian<T>, ModelError> {
    if params.is_empty() {
        return Err(ModelError::NoParameters);
    }
    check_window(window, params.len() + 1)?;
    let mut matrix = free_laplacian_matrix(window);
    for (j0, p) in params.iter().enumerate() {
        let j = j0 as isize + 1;
        if j == 1 {
            add_bond(&mut matrix, 0, p);
        } else {
            add_bond(&mut matrix, j - 1, p);
            add_bond(&mut matrix, 1 - j, p);
        }
    }
    matrix.prune();
    Ok(LatticeHamiltonian {
        matrix,
        model: Model::MultiParam { params },
        labels: SiteLabels::OddIntegers,
    })
}

impl<T: Scalar> LatticeHamiltonian<T> {
    pub fn window(&self) -> usize {
        self.matrix.window()
    }

    /// Entry by physical site labels.
    pub fn entry(&self, row_label: isize, col_label: isize) -> Option<T> {
        let i = self.labels.index(row_label)?;
        let j = self.labels.index(col_label)?;
        (self.matrix.in_window(i) && self.matrix.in_window(j)).then(|| self.matrix.get(i, j))
    }

    /// Parity check: `entry(Pi, Pj) = entry(i, j)` for integer labels and
    /// `entry(Pi, Pj) = entry(j, i)` for the multiparameter chain, over all
    /// pairs whose images stay in the window.
    pub fn is_parity_symmetric(&self) -> bool {
        let n = self.window() as isize;
        let p = |k| self.labels.parity(k);
        (-n..=n).all(|i| {
            (i - 1..=i + 1).filter(|j| j.abs() <= n).all(|j| {
                let (pi, pj) = (p(i), p(j));
                if !self.matrix.in_window(pi) || !self.matrix.in_window(pj) {
                    return true;
                }
                let image = self.matrix.get(pi, pj);
                match self.labels {
                    SiteLabels::Integer => image == self.matrix.get(i, j),
                    SiteLabels::OddIntegers => image == self.matrix.get(j, i),
                }
            })
        })
    }

    /// Number of nonzero entries of `H − H†`.
    pub fn non_hermitian_entries(&self) -> usize {
        self.matrix
            .sub(&self.matrix.adjoint())
            .map(|d| d.entries().filter(|(_, _, v)| !v.is_zero()).count())
            .unwrap_or(0)
    }

    /// Smallest and largest row in which `H` differs from `−Δ`, if any.
    pub fn defect_rows(&self) -> Option<(isize, isize)> {
        let free = free_laplacian_matrix::<T>(self.window());
        let diff = self.matrix.sub(&free).ok()?;
        let rows = diff
            .entries()
            .filter(|(_, _, v)| !v.is_zero())
            .map(|(i, _, _)| i);
        rows.fold(None, |acc, i| match acc {
            None => Some((i, i)),
            Some((lo, hi)) => Some((lo.min(i), hi.max(i))),
        })
    }

    /// Couplings, in model order (empty for the free Laplacian).
    pub fn couplings(&self) -> Vec<T> {
        match &self.model {
            Model::FreeLaplacian => Vec::new(),
            Model::PointDefect { g } | Model::TwoCenter { g, .. } => alloc::vec![g.clone()],
            Model::MultiParam { params } => params.clone(),
        }
    }
}

impl<T: crate::scalar::Real> LatticeHamiltonian<T> {
    /// True when some coupling has `|p| ≥ 1`, where positivity of the known
    /// metrics is lost.
    pub fn has_strong_coupling(&self) -> bool {
        self.couplings().iter().any(|p| p.abs() >= T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use alloc::vec;

    fn q(p: i64, d: i64) -> Rational {
        ratio(p, d)
    }

    #[test]
    fn laplacian_n1() {
        let h = free_laplacian::<Rational>(1).unwrap();
        let dense = h.matrix.to_dense();
        let expect = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]];
        for (r, row) in expect.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert_eq!(dense[r][c], q(*v, 1));
            }
        }
    }

    #[test]
    fn point_defect_central_rows() {
        let h = point_defect(q(1, 2), 4).unwrap();
        let m = &h.matrix;
        assert_eq!(m.get(-1, 0), q(-3, 2));
        assert_eq!(m.get(1, 0), q(-3, 2));
        assert_eq!(m.get(0, -1), q(-1, 2));
        assert_eq!(m.get(0, 1), q(-1, 2));
        assert_eq!(m.get(-1, -2), q(-1, 1));
        assert_eq!(m.get(0, 0), q(2, 1));
        assert!(h.is_parity_symmetric());
        assert_eq!(h.non_hermitian_entries(), 4);
        assert_eq!(h.defect_rows(), Some((-1, 1)));
    }

    #[test]
    fn zero_coupling_is_free() {
        let free = free_laplacian_matrix::<Rational>(5);
        assert_eq!(point_defect(q(0, 1), 5).unwrap().matrix, free);
        assert_eq!(two_center(q(0, 1), 3, 5).unwrap().matrix, free);
        assert_eq!(multiparam(vec![q(0, 1); 3], 5).unwrap().matrix, free);
    }

    #[test]
    fn two_center_collapses_to_point_defect() {
        for g in [q(1, 2), q(-2, 7)] {
            assert_eq!(
                two_center(g.clone(), 1, 6).unwrap().matrix,
                point_defect(g, 6).unwrap().matrix
            );
        }
    }

    #[test]
    fn two_center_bonds() {
        let h = two_center(q(1, 2), 2, 6).unwrap();
        let diff = h.matrix.sub(&free_laplacian_matrix(6)).unwrap();
        let mut nz: Vec<_> = diff
            .entries()
            .filter(|(_, _, v)| !v.is_zero())
            .map(|(i, j, v)| (i, j, v.clone()))
            .collect();
        nz.sort_by_key(|(i, j, _)| (*i, *j));
        assert_eq!(
            nz,
            vec![
                (-2, -1, q(-1, 2)),
                (-1, -2, q(1, 2)),
                (1, 2, q(1, 2)),
                (2, 1, q(-1, 2)),
            ]
        );
        assert!(h.is_parity_symmetric());
        assert_eq!(h.non_hermitian_entries(), 4);
    }

    #[test]
    fn two_center_needs_room() {
        assert_eq!(
            two_center(q(1, 2), 5, 4).unwrap_err(),
            ModelError::WindowTooSmall {
                window: 4,
                required: 6
            }
        );
        assert_eq!(
            two_center(q(1, 2), 0, 4).unwrap_err(),
            ModelError::BadSeparation(0)
        );
    }

    #[test]
    fn multiparam_central_bond_by_label() {
        let h = multiparam(vec![q(1, 2)], 4).unwrap();
        assert_eq!(h.entry(-1, 1), Some(q(-3, 2)));
        assert_eq!(h.entry(1, -1), Some(q(-1, 2)));
        assert_eq!(h.entry(0, 1), None);
        assert!(h.is_parity_symmetric());
    }

    #[test]
    fn multiparam_two_params_touch_six_entries() {
        let h = multiparam(vec![q(1, 3), q(1, 4)], 5).unwrap();
        let diff = h.matrix.sub(&free_laplacian_matrix(5)).unwrap();
        assert_eq!(diff.entries().filter(|(_, _, v)| !v.is_zero()).count(), 6);
        // b on the bond (1, 3) and its mirror (−3, −1)
        assert_eq!(h.entry(1, 3), Some(q(-5, 4)));
        assert_eq!(h.entry(3, 1), Some(q(-3, 4)));
        assert_eq!(h.entry(-3, -1), Some(q(-5, 4)));
        assert_eq!(h.entry(-1, -3), Some(q(-3, 4)));
        assert!(h.is_parity_symmetric());
    }

    #[test]
    fn sign_flip_is_transpose() {
        let a = point_defect(q(2, 5), 4).unwrap().matrix;
        let b = point_defect(q(-2, 5), 4).unwrap().matrix;
        assert_eq!(a.adjoint(), b);
    }

    #[test]
    fn odd_labels_round_trip() {
        let l = SiteLabels::OddIntegers;
        for k in -4..=4 {
            assert_eq!(l.index(l.label(k)), Some(k));
            assert_eq!(l.label(l.parity(k)), -l.label(k));
        }
        assert_eq!(l.index(2), None);
    }
}
