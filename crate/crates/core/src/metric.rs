//! Band metrics `Θ` with `H†Θ = ΘH`.
//!
//! The closed-form family `Θ_R` has `R` nonzero diagonals on offsets
//! `R−1, R−3, …`. Inside the diamond `|i| + |j| ≤ R + 1` entries follow the
//! table `A_k = (1+g)(1−2g²)^{k−1}`, `B_k = (1−g²)(1−2g²)^{k−1}`; outside it
//! every entry on a valid offset is 1.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::band::{ldlt, quasi_hermiticity_residual, BandMatrix, Residual};
use crate::error::{BandError, CholeskyError, MetricError};
use crate::lattice::SiteLabels;
use crate::scalar::{Real, Scalar};

/// One row of the metric table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableOneRow<T> {
    pub k: usize,
    /// Corner entry `A_k`.
    pub corner: T,
    /// Wedge entry `B_k`.
    pub wedge: T,
    /// Central entry `z_{2k+1} = A_{k+1}/(1−g)`.
    pub central: T,
}

fn pow<T: Scalar>(x: &T, e: usize) -> T {
    (0..e).fold(T::one(), |acc, _| acc * x.clone())
}

fn one_minus_two_g2<T: Scalar>(g: &T) -> T {
    T::one() - T::from_i64(2) * g.clone() * g.clone()
}

fn corner<T: Scalar>(k: usize, g: &T) -> T {
    (T::one() + g.clone()) * pow(&one_minus_two_g2(g), k - 1)
}

fn wedge<T: Scalar>(k: usize, g: &T) -> T {
    (T::one() - g.clone() * g.clone()) * pow(&one_minus_two_g2(g), k - 1)
}

pub fn table_one<T: Scalar>(k: usize, g: &T) -> Result<TableOneRow<T>, MetricError> {
    if k == 0 {
        return Err(MetricError::ZeroIndex);
    }
    let central = corner(k + 1, g)
        .try_div(&(T::one() - g.clone()))
        .map_err(|_| MetricError::SpectralSingularity)?;
    Ok(TableOneRow {
        k,
        corner: corner(k, g),
        wedge: wedge(k, g),
        central,
    })
}

/// How a metric was obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricKind<T> {
    ClosedForm {
        range: usize,
        g: T,
    },
    Solved {
        range: usize,
        diamond: usize,
    },
    Superposition {
        alphas: Vec<T>,
        g: Option<T>,
    },
    DiagonalMultiparam {
        params: Vec<T>,
    },
    /// Long-range cross pattern; never a valid metric for the models here.
    CrossDemo {
        k: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpec<T> {
    pub kind: MetricKind<T>,
    pub matrix: BandMatrix<T>,
}

impl<T: Scalar> MetricSpec<T> {
    pub fn is_demo_only(&self) -> bool {
        matches!(self.kind, MetricKind::CrossDemo { .. })
    }

    pub fn window(&self) -> usize {
        self.matrix.window()
    }
}

impl<T: Real> MetricSpec<T> {
    pub fn residual(&self, h: &BandMatrix<T>) -> Result<Residual<T>, BandError> {
        quasi_hermiticity_residual(h, &self.matrix)
    }
}

fn on_ansatz(range: usize, i: isize, j: isize) -> bool {
    let d = (i - j).unsigned_abs();
    d < range && (range - 1 - d).is_multiple_of(2)
}

fn check_coupling<T: Real>(g: &T) -> Result<(), MetricError> {
    if g.abs() >= T::one() {
        Err(MetricError::SpectralSingularity)
    } else {
        Ok(())
    }
}

/// `Θ_R` for the point defect, by the diamond rule.
pub fn closed_form_theta<T: Real>(
    range: usize,
    g: T,
    window: usize,
) -> Result<MetricSpec<T>, MetricError> {
    if range == 0 {
        return Err(MetricError::ZeroRange);
    }
    check_coupling(&g)?;
    if window < 2 * range {
        return Err(MetricError::WindowTooSmall {
            window,
            range,
            required: 2 * range,
        });
    }
    let smax = range.div_ceil(2) + 1;
    let a: Vec<T> = (1..=smax).map(|k| corner(k, &g)).collect();
    let b: Vec<T> = (1..=smax).map(|k| wedge(k, &g)).collect();
    // z_R = A_{(R+1)/2} / (1 − g), odd R only
    let central = (range % 2 == 1)
        .then(|| {
            corner(range.div_ceil(2), &g)
                .try_div(&(T::one() - g.clone()))
                .ok()
        })
        .flatten();

    let n = window as isize;
    let r = range as isize;
    let mut matrix = BandMatrix::zeros(window);
    for i in -n..=n {
        for j in (i - r + 1).max(-n)..=(i + r - 1).min(n) {
            if !on_ansatz(range, i, j) {
                continue;
            }
            let s = (r + 1 - i.abs() - j.abs()) / 2;
            let v = if s <= 0 {
                T::one()
            } else if i == 0 && j == 0 {
                central.clone().ok_or(MetricError::SpectralSingularity)?
            } else if i == 0 || j == 0 {
                a[s as usize - 1].clone()
            } else {
                b[s as usize - 1].clone()
            };
            matrix.set(i, j, v);
        }
    }
    matrix.prune();
    Ok(MetricSpec {
        kind: MetricKind::ClosedForm { range, g },
        matrix,
    })
}

/// Minimum window for [`solve_band_metric`] with the given range and diamond.
pub fn solver_window(range: usize, diamond: usize) -> usize {
    range + (diamond + range).div_ceil(2) + 1
}

/// Solves `H†Θ − ΘH = 0` on the interior for a `Θ` supported on offsets
/// `R−1, R−3, …`. Entries with `|i| + |j| ≤ diamond` are unknown; every other
/// entry on those offsets is pinned to 1. No symmetry is imposed.
pub fn solve_band_metric<T: Real>(
    h: &BandMatrix<T>,
    range: usize,
    diamond: usize,
) -> Result<MetricSpec<T>, MetricError> {
    if range == 0 {
        return Err(MetricError::ZeroRange);
    }
    if h.bandwidth() > 1 {
        return Err(MetricError::NotTridiagonal(h.bandwidth()));
    }
    let window = h.window();
    let required = solver_window(range, diamond);
    if window < required {
        return Err(MetricError::WindowTooSmall {
            window,
            range,
            required,
        });
    }
    let n = window as isize;
    let r = range as isize;
    let rho = diamond as isize;

    // number the unknowns
    let mut unknowns: BTreeMap<(isize, isize), usize> = BTreeMap::new();
    let mut order = Vec::new();
    for p in -n..=n {
        for q in (p - r + 1).max(-n)..=(p + r - 1).min(n) {
            if on_ansatz(range, p, q) && p.abs() + q.abs() <= rho {
                unknowns.insert((p, q), order.len());
                order.push((p, q));
            }
        }
    }
    let pinned = |p: isize, q: isize| p.abs() <= n && q.abs() <= n && on_ansatz(range, p, q);

    // E(m, n) = Σ_p H(p, m) Θ(p, n) − Σ_q Θ(m, q) H(q, n)
    let interior = n - r;
    let u = order.len();
    let mut rows: Vec<(Vec<T>, T, (isize, isize))> = Vec::new();
    for m in -interior..=interior {
        for c in (m - r).max(-interior)..=(m + r).min(interior) {
            let mut coefs: Vec<(usize, T)> = Vec::new();
            let mut known = T::zero();
            let mut add = |p: isize, q: isize, w: T| {
                if w.is_zero() {
                    return;
                }
                if let Some(&idx) = unknowns.get(&(p, q)) {
                    coefs.push((idx, w));
                } else if pinned(p, q) {
                    known = known.clone() + w;
                }
            };
            for p in m - 1..=m + 1 {
                add(p, c, h.get(p, m));
            }
            for q in c - 1..=c + 1 {
                add(m, q, -h.get(q, c));
            }
            if coefs.is_empty() {
                if !known.is_zero() {
                    return Err(MetricError::Inconsistent { row: m, col: c });
                }
                continue;
            }
            let mut dense = vec![T::zero(); u];
            for (idx, w) in coefs {
                dense[idx] = dense[idx].clone() + w;
            }
            rows.push((dense, -known, (m, c)));
        }
    }

    let solution = gauss_solve(rows, u)?;
    let mut matrix = BandMatrix::zeros(window);
    for p in -n..=n {
        for q in (p - r + 1).max(-n)..=(p + r - 1).min(n) {
            if !on_ansatz(range, p, q) {
                continue;
            }
            let v = match unknowns.get(&(p, q)) {
                Some(&idx) => solution[idx].clone(),
                None => T::one(),
            };
            matrix.set(p, q, v);
        }
    }
    matrix.prune();
    Ok(MetricSpec {
        kind: MetricKind::Solved { range, diamond },
        matrix,
    })
}

/// Row reduction of an overdetermined system; every unknown must be pinned
/// down and all leftover equations must vanish.
fn gauss_solve<T: Real>(
    mut rows: Vec<(Vec<T>, T, (isize, isize))>,
    unknowns: usize,
) -> Result<Vec<T>, MetricError> {
    let scale = rows
        .iter()
        .flat_map(|(r, b, _)| r.iter().chain(core::iter::once(b)))
        .map(Real::abs)
        .fold(T::zero(), |acc, v| if v > acc { v } else { acc });
    let negligible = |v: &T| v.is_zero() || v.is_negligible(&scale);

    let mut rank = 0;
    for col in 0..unknowns {
        let mut best: Option<(usize, f64)> = None;
        for (k, row) in rows.iter().enumerate().skip(rank) {
            let v = &row.0[col];
            if negligible(v) {
                continue;
            }
            let score = v.pivot_score();
            if T::KIND.is_exact() {
                best = Some((k, score));
                break;
            }
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((k, score));
            }
        }
        let Some((k, _)) = best else {
            continue;
        };
        rows.swap(rank, k);
        let inv = rows[rank].0[col]
            .try_recip()
            .map_err(|_| MetricError::RankDeficient { rank, unknowns })?;
        let (prow, prhs, pos) =
            core::mem::replace(&mut rows[rank], (Vec::new(), T::zero(), (0, 0)));
        let prow: Vec<T> = prow.into_iter().map(|x| x * inv.clone()).collect();
        let prhs = prhs * inv;
        for (k, (row, rhs, _)) in rows.iter_mut().enumerate() {
            if k == rank {
                continue;
            }
            let f = row[col].clone();
            if f.is_zero() {
                continue;
            }
            for (c, pv) in prow.iter().enumerate().skip(col) {
                if !pv.is_zero() {
                    row[c] = row[c].clone() - f.clone() * pv.clone();
                }
            }
            *rhs = rhs.clone() - f * prhs.clone();
        }
        rows[rank] = (prow, prhs, pos);
        rank += 1;
    }
    if rank < unknowns {
        return Err(MetricError::RankDeficient { rank, unknowns });
    }
    for (_, rhs, (m, c)) in rows.iter().skip(rank) {
        if !negligible(rhs) {
            return Err(MetricError::Inconsistent { row: *m, col: *c });
        }
    }
    // reduced form: pivot of unknown `col` sits in row `col`
    Ok(rows
        .into_iter()
        .take(unknowns)
        .map(|(_, rhs, _)| rhs)
        .collect())
}

/// `Σ α_j Θ_j`.
pub fn superpose<T: Scalar>(terms: &[(T, MetricSpec<T>)]) -> Result<MetricSpec<T>, MetricError> {
    let ((_, first), rest) = terms.split_first().ok_or(MetricError::EmptySuperposition)?;
    let mut matrix = BandMatrix::zeros(first.window());
    for (alpha, spec) in terms {
        matrix = matrix.add(&spec.matrix.scale(alpha))?;
    }
    let g_of = |s: &MetricSpec<T>| match &s.kind {
        MetricKind::ClosedForm { g, .. } => Some(g.clone()),
        MetricKind::Superposition { g, .. } => g.clone(),
        _ => None,
    };
    let g = g_of(first).filter(|g0| rest.iter().all(|(_, s)| g_of(s).as_ref() == Some(g0)));
    Ok(MetricSpec {
        kind: MetricKind::Superposition {
            alphas: terms.iter().map(|(a, _)| a.clone()).collect(),
            g,
        },
        matrix,
    })
}

/// `Θ(γ) = 2Θ₁ + γΘ₂`.
pub fn gamma_family<T: Real>(g: T, gamma: T, window: usize) -> Result<MetricSpec<T>, MetricError> {
    let t1 = closed_form_theta(1, g.clone(), window)?;
    let t2 = closed_form_theta(2, g, window)?;
    superpose(&[(T::from_i64(2), t1), (gamma, t2)])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Positivity {
    Positive,
    /// First failing pivot of the banded factorization.
    NotPositive {
        site: isize,
    },
}

impl Positivity {
    pub fn is_positive(&self) -> bool {
        matches!(self, Positivity::Positive)
    }
}

pub fn positivity_check<T: Real>(theta: &MetricSpec<T>) -> Result<Positivity, MetricError> {
    match ldlt(&theta.matrix) {
        Ok(_) => Ok(Positivity::Positive),
        Err(CholeskyError::NotPositiveDefinite { site }) => Ok(Positivity::NotPositive { site }),
        Err(CholeskyError::Band(e)) => Err(e.into()),
    }
}

/// Bisects for the boundary between `inside` (where `pred` holds) and
/// `outside` (where it fails), to width `tol`. Returns the bracket.
pub fn bisect_boundary(
    pred: impl Fn(f64) -> bool,
    mut inside: f64,
    mut outside: f64,
    tol: f64,
) -> (f64, f64) {
    while (outside - inside).abs() > tol {
        let mid = 0.5 * (inside + outside);
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    (inside, outside)
}

/// Bracket of the positivity boundary of `2Θ₁ + γΘ₂` on `γ ∈ [inside, outside]`.
pub fn gamma_transition(
    g: f64,
    window: usize,
    inside: f64,
    outside: f64,
    tol: f64,
) -> Result<(f64, f64), MetricError> {
    let positive = |gamma: f64| -> Result<bool, MetricError> {
        Ok(positivity_check(&gamma_family(g, gamma, window)?)?.is_positive())
    };
    if !positive(inside)? || positive(outside)? {
        return Ok((f64::NAN, f64::NAN));
    }
    Ok(bisect_boundary(
        |gamma| positive(gamma).unwrap_or(false),
        inside,
        outside,
        tol,
    ))
}

/// Diagonal metric of the multiparameter chain, with
/// `θ_{±(2m+1)} = (1±p₁) · Π_{j=2}^{m+1} (1±p_j)² · Π_{j>m+1} (1−p_j²)`.
pub fn diagonal_multiparam_metric<T: Scalar>(
    params: Vec<T>,
    window: usize,
) -> Result<MetricSpec<T>, MetricError> {
    if params.is_empty() {
        return Err(crate::error::ModelError::NoParameters.into());
    }
    let labels = SiteLabels::OddIntegers;
    let n = window as isize;
    let mut diag = Vec::with_capacity(2 * window + 1);
    for k in -n..=n {
        let label = labels.label(k);
        let m = ((label.abs() - 1) / 2) as usize;
        let signed = |p: &T| {
            if label > 0 {
                T::one() + p.clone()
            } else {
                T::one() - p.clone()
            }
        };
        let mut theta = signed(&params[0]);
        for (j0, p) in params.iter().enumerate().skip(1) {
            let j = j0 + 1;
            theta = theta
                * if j <= m + 1 {
                    let s = signed(p);
                    s.clone() * s
                } else {
                    T::one() - p.clone() * p.clone()
                };
        }
        diag.push(theta);
    }
    let matrix = BandMatrix::from_diagonals(window, [(0, diag)])?;
    Ok(MetricSpec {
        kind: MetricKind::DiagonalMultiparam { params },
        matrix,
    })
}

/// Cross-shaped pattern: 1 where `|i−j| = k−1`, or where `|i+j+1| = k−1`
/// off the main diagonal.
pub fn cross_demo<T: Scalar>(k: usize, window: usize) -> Result<MetricSpec<T>, MetricError> {
    if k == 0 {
        return Err(MetricError::ZeroIndex);
    }
    let n = window as isize;
    let km = k as isize - 1;
    let mut matrix = BandMatrix::zeros(window);
    for i in -n..=n {
        for j in -n..=n {
            if (i - j).abs() == km || ((i + j + 1).abs() == km && i != j) {
                matrix.set(i, j, T::one());
            }
        }
    }
    Ok(MetricSpec {
        kind: MetricKind::CrossDemo { k },
        matrix,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalityReport {
    /// Smallest `ρ` with every entry at `|i| + |j| > ρ` equal to 0 or 1.
    pub diamond_radius: usize,
    /// Largest `|i − j|` of a nonzero entry outside the diamond.
    pub far_bandwidth: usize,
    /// Outside the diamond the nonzero entries are all 1 and mirror-symmetric.
    pub unit_tail: bool,
    /// Unit tail and a far-field bandwidth well below the inspected window.
    pub local: bool,
}

/// Inspects `Θ` on `|i|, |j| ≤ N − margin` for asymptotic locality.
pub fn asymptotic_locality_report<T: Real>(theta: &MetricSpec<T>, margin: usize) -> LocalityReport {
    let m = &theta.matrix;
    let radius = m.window().saturating_sub(margin);
    let is_unit = |v: &T| (v.clone() - T::one()).is_negligible(&T::one());
    let is_trivial = |v: &T| v.is_zero() || v.is_negligible(&T::one()) || is_unit(v);
    let entries: Vec<(isize, isize, &T)> = m.interior(radius).collect();

    let diamond_radius = entries
        .iter()
        .filter(|(_, _, v)| !is_trivial(v))
        .map(|(i, j, _)| i.unsigned_abs() + j.unsigned_abs())
        .max()
        .unwrap_or(0);
    let far: Vec<_> = entries
        .iter()
        .filter(|(i, j, v)| {
            i.unsigned_abs() + j.unsigned_abs() > diamond_radius && !v.is_negligible(&T::one())
        })
        .collect();
    let far_bandwidth = far
        .iter()
        .map(|(i, j, _)| (i - j).unsigned_abs())
        .max()
        .unwrap_or(0);
    let r = radius as isize;
    let unit_tail = !far.is_empty()
        && far.iter().all(|(i, j, v)| {
            is_unit(v) && (-i).abs() <= r && (-j).abs() <= r && is_unit(&m.get(-i, -j))
        });
    let local = unit_tail && far_bandwidth <= radius / 2;
    LocalityReport {
        diamond_radius,
        far_bandwidth,
        unit_tail,
        local,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{free_laplacian_matrix, multiparam, point_defect};
    use crate::scalar::{ratio, Rational};

    fn q(p: i64, d: i64) -> Rational {
        ratio(p, d)
    }

    #[test]
    fn table_rows() {
        let row = table_one(2, &q(1, 2)).unwrap();
        assert_eq!(row.corner, q(3, 4));
        assert_eq!(row.wedge, q(3, 8));
        let row = table_one(1, &q(1, 3)).unwrap();
        assert_eq!(row.corner, q(4, 3));
        assert_eq!(row.wedge, q(8, 9));
        // z₃ = A₂/(1−g) = (4/3)(7/9)/(2/3)
        assert_eq!(row.central, q(14, 9));
        for k in 1..5 {
            let r = table_one(k, &q(0, 1)).unwrap();
            assert_eq!((r.corner, r.wedge, r.central), (q(1, 1), q(1, 1), q(1, 1)));
        }
        assert_eq!(
            table_one(1, &q(1, 1)),
            Err(MetricError::SpectralSingularity)
        );
        assert_eq!(table_one(0, &q(1, 2)), Err(MetricError::ZeroIndex));
    }

    #[test]
    fn theta_one_is_identity_but_centre() {
        let t = closed_form_theta(1, q(1, 2), 4).unwrap().matrix;
        assert_eq!(t.offsets().collect::<Vec<_>>(), vec![0]);
        assert_eq!(t.get(0, 0), q(3, 1));
        assert_eq!(t.get(1, 1), q(1, 1));
        assert_eq!(t.multiply(&t).unwrap().get(0, 0), q(9, 1));
    }

    #[test]
    fn theta_two_superdiagonal() {
        let t = closed_form_theta(2, q(1, 2), 5).unwrap().matrix;
        assert_eq!(t.offsets().collect::<Vec<_>>(), vec![-1, 1]);
        let sup: Vec<_> = (-3..=2).map(|i| t.get(i, i + 1)).collect();
        let expect = [q(1, 1), q(1, 1), q(3, 2), q(3, 2), q(1, 1), q(1, 1)];
        assert_eq!(sup, expect);
    }

    #[test]
    fn theta_seven_centre_row() {
        let g = q(1, 3);
        let t = closed_form_theta(7, g.clone(), 14).unwrap().matrix;
        let one_m = q(1, 1) - q(2, 1) * g.clone() * g.clone();
        let a = q(1, 1) + g.clone();
        let c = a.clone() * one_m.clone();
        let e = c.clone() * one_m.clone();
        let z = e.clone() * one_m.clone() / (q(1, 1) - g);
        let row: Vec<_> = (-6..=6).step_by(2).map(|j| t.get(0, j)).collect();
        assert_eq!(row, vec![a.clone(), c.clone(), e.clone(), z, e, c, a]);
        assert_eq!(
            t.offsets().collect::<Vec<_>>(),
            vec![-6, -4, -2, 0, 2, 4, 6]
        );
    }

    #[test]
    fn closed_form_guards() {
        assert_eq!(
            closed_form_theta(1, q(1, 1), 4).unwrap_err(),
            MetricError::SpectralSingularity
        );
        assert_eq!(
            closed_form_theta(1, q(-3, 2), 4).unwrap_err(),
            MetricError::SpectralSingularity
        );
        assert!(matches!(
            closed_form_theta(5, q(1, 2), 6),
            Err(MetricError::WindowTooSmall { .. })
        ));
        assert_eq!(
            closed_form_theta(0, q(1, 2), 6).unwrap_err(),
            MetricError::ZeroRange
        );
    }

    #[test]
    fn closed_form_is_exact_metric() {
        for r in 1..=6 {
            let n = 2 * r + 4;
            let h = point_defect(q(1, 2), n).unwrap().matrix;
            let t = closed_form_theta(r, q(1, 2), n).unwrap();
            assert!(t.matrix.is_symmetric() && t.matrix.is_persymmetric());
            assert!(t.residual(&h).unwrap().interior_is_zero(), "R = {r}");
        }
    }

    #[test]
    fn solver_matches_closed_form() {
        for r in 1..=4 {
            let n = solver_window(r, r + 1) + 1;
            let h = point_defect(q(1, 3), n).unwrap().matrix;
            let solved = solve_band_metric(&h, r, r + 1).unwrap();
            let closed = closed_form_theta(r, q(1, 3), n).unwrap();
            assert_eq!(solved.matrix, closed.matrix, "R = {r}");
        }
    }

    #[test]
    fn solver_on_free_laplacian_gives_identity() {
        let h = free_laplacian_matrix::<Rational>(6);
        let t = solve_band_metric(&h, 1, 2).unwrap();
        assert_eq!(t.matrix, BandMatrix::identity(6));
    }

    #[test]
    fn solver_in_float_mode() {
        let n = 10;
        let h = point_defect(0.5, n).unwrap().matrix;
        let t = solve_band_metric(&h, 3, 4).unwrap().matrix;
        let exact = closed_form_theta(3, q(1, 2), n).unwrap().matrix.to_f64();
        for (i, j, v) in exact.entries() {
            assert!((t.get(i, j) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn undersized_diamond_is_rejected() {
        // Θ₃ needs free entries out to |i| + |j| = 2; a lone central unknown cannot fit
        let n = 8;
        let h = point_defect(q(1, 2), n).unwrap().matrix;
        let err = solve_band_metric(&h, 3, 0).unwrap_err();
        assert!(matches!(
            err,
            MetricError::Inconsistent { .. } | MetricError::RankDeficient { .. }
        ));
    }

    #[test]
    fn gamma_family_display() {
        let t = gamma_family(q(1, 2), q(-1, 1), 5).unwrap().matrix;
        assert_eq!(t.get(0, 0), q(6, 1));
        assert_eq!(t.get(2, 2), q(2, 1));
        assert_eq!(t.get(0, 1), q(-3, 2));
        assert_eq!(t.get(-1, 0), q(-3, 2));
        assert_eq!(t.get(2, 3), q(-1, 1));
    }

    #[test]
    fn superposition_is_linear_in_residual() {
        let n = 10;
        let h = point_defect(q(1, 2), n).unwrap().matrix;
        let terms: Vec<_> = (1..=3)
            .map(|r| (q(r as i64, 7), closed_form_theta(r, q(1, 2), n).unwrap()))
            .collect();
        let s = superpose(&terms).unwrap();
        assert!(s.residual(&h).unwrap().interior_is_zero());
        assert!(matches!(
            s.kind,
            MetricKind::Superposition { g: Some(_), .. }
        ));
        assert_eq!(
            superpose::<Rational>(&[]).unwrap_err(),
            MetricError::EmptySuperposition
        );
    }

    #[test]
    fn positivity_of_gamma_family() {
        for (gamma, expect) in [
            (0.0, true),
            (0.9, true),
            (-0.9, true),
            (1.5, false),
            (-1.5, false),
        ] {
            let t = gamma_family(0.5, gamma, 20).unwrap();
            assert_eq!(
                positivity_check(&t).unwrap().is_positive(),
                expect,
                "γ = {gamma}"
            );
        }
        let (lo, hi) = gamma_transition(0.5, 20, 0.9, 1.5, 1e-6).unwrap();
        assert!(lo < hi && (lo - 1.0).abs() < 0.05);
    }

    #[test]
    fn multiparam_diagonal_metric() {
        let t = diagonal_multiparam_metric(vec![q(1, 2)], 4).unwrap();
        let labels = SiteLabels::OddIntegers;
        let at = |label| {
            t.matrix
                .get(labels.index(label).unwrap(), labels.index(label).unwrap())
        };
        assert_eq!(at(1), q(3, 2));
        assert_eq!(at(-1), q(1, 2));
        let t = diagonal_multiparam_metric(vec![q(1, 2), q(1, 3)], 4).unwrap();
        let at = |label| {
            t.matrix
                .get(labels.index(label).unwrap(), labels.index(label).unwrap())
        };
        assert_eq!(at(3), q(8, 3));
        let t = diagonal_multiparam_metric(vec![q(0, 1); 3], 4).unwrap();
        assert_eq!(t.matrix, BandMatrix::identity(4));
    }

    #[test]
    fn multiparam_metric_residual_vanishes() {
        let params = vec![q(3, 10), q(1, 5), q(1, 10)];
        let h = multiparam(params.clone(), 8).unwrap().matrix;
        let t = diagonal_multiparam_metric(params, 8).unwrap();
        assert!(t.residual(&h).unwrap().interior_is_zero());
    }

    #[test]
    fn cross_pattern() {
        let t = cross_demo::<Rational>(1, 5).unwrap();
        assert!(t.is_demo_only());
        for i in -5..=4 {
            assert_eq!(t.matrix.get(i, -1 - i), q(1, 1));
        }
        assert_eq!(t.matrix.get(3, 3), q(1, 1));
        assert!(t.matrix.is_symmetric());
    }

    #[test]
    fn locality() {
        let t = closed_form_theta(7, q(1, 2), 30).unwrap();
        let rep = asymptotic_locality_report(&t, 2);
        assert_eq!(rep.diamond_radius, 6);
        assert_eq!(rep.far_bandwidth, 6);
        assert!(rep.local);
        let t = closed_form_theta(1, q(1, 2), 10).unwrap();
        let rep = asymptotic_locality_report(&t, 1);
        assert_eq!(rep.diamond_radius, 0);
        assert!(rep.local);
        let rep = asymptotic_locality_report(&cross_demo::<Rational>(1, 20).unwrap(), 2);
        assert!(!rep.local);
    }
}
