//! Plane-wave scattering on the tridiagonal lattice, `E = 2 − 2cos κ`.
//!
//! Two independent routes to the amplitudes: a dense matching system over the
//! defect region, and a product of 2×2 transfer steps expressed in the
//! plane-wave basis. Phases use absolute site indices, so results do not
//! depend on where the matching sites sit.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::band::BandMatrix;
use crate::error::ScatteringError;

/// Free-lattice dispersion on the open band `0 < κ < π`.
pub fn dispersion(kappa: f64) -> Result<f64, ScatteringError> {
    if !(kappa > 0.0 && kappa < PI) {
        return Err(ScatteringError::BandEdge(kappa));
    }
    Ok(2.0 - 2.0 * Float::cos(kappa))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Incidence {
    #[default]
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScatteringOptions {
    pub incidence: Incidence,
    /// Extra free sites between the defect and each matching site.
    pub padding: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringResult {
    pub kappa: f64,
    pub energy: f64,
    pub reflection: Complex64,
    pub transmission: Complex64,
    /// `| |R|² + |T|² − 1 |`.
    pub unitarity_deficit: f64,
    /// `‖A‖₁ ‖A⁻¹‖₁` of the matching system.
    pub condition_number: f64,
}

fn phase(kappa: f64, n: isize) -> Complex64 {
    let x = kappa * n as f64;
    Complex64::new(Float::cos(x), Float::sin(x))
}

fn deficit(r: Complex64, t: Complex64) -> f64 {
    Float::abs(r.norm_sqr() + t.norm_sqr() - 1.0)
}

/// Rows in which `H` differs from `−Δ`; `(0, 0)` for the free lattice.
pub fn defect_support(h: &BandMatrix<f64>) -> (isize, isize) {
    let n = h.window() as isize;
    let free = |i: isize, j: isize| match (j - i).abs() {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    };
    let mut support: Option<(isize, isize)> = None;
    for i in -n..=n {
        for j in (i - 1).max(-n)..=(i + 1).min(n) {
            if h.get(i, j) != free(i, j) {
                support = Some(match support {
                    None => (i, i),
                    Some((lo, hi)) => (lo.min(i), hi.max(i)),
                });
            }
        }
    }
    support.unwrap_or((0, 0))
}

fn check_tridiagonal(h: &BandMatrix<f64>) -> Result<(), ScatteringError> {
    if h.bandwidth() > 1 {
        Err(ScatteringError::NotTridiagonal(h.bandwidth()))
    } else {
        Ok(())
    }
}

/// Matching sites `(a, b)`: two free rows outside the defect support plus padding.
fn matching_sites(h: &BandMatrix<f64>, padding: usize) -> Result<(isize, isize), ScatteringError> {
    let (lo, hi) = defect_support(h);
    let pad = padding as isize;
    let (a, b) = (lo - 2 - pad, hi + 2 + pad);
    let required = (a.unsigned_abs() + 1).max(b.unsigned_abs() + 1);
    if required > h.window() {
        return Err(ScatteringError::WindowTooSmall {
            window: h.window(),
            required,
        });
    }
    Ok((a, b))
}

/// Solves the matching system for `(ψ_a … ψ_b, R, T)`.
///
/// Left incidence: `ψ_n = e^{iκn} + R e^{−iκn}` for `n ≤ a`, `ψ_n = T e^{iκn}`
/// for `n ≥ b`. Right incidence mirrors this.
pub fn solve_scattering(
    h: &BandMatrix<f64>,
    kappa: f64,
    options: ScatteringOptions,
) -> Result<ScatteringResult, ScatteringError> {
    check_tridiagonal(h)?;
    let energy = dispersion(kappa)?;
    let (a, b) = matching_sites(h, options.padding)?;
    let m = (b - a + 1) as usize;
    let (ir, it) = (m, m + 1);
    let size = m + 2;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    // incoming, reflected and transmitted waves at site n, on their own sides
    let (inc, refl, trans): (
        fn(f64, isize) -> Complex64,
        fn(f64, isize) -> Complex64,
        fn(f64, isize) -> Complex64,
    ) = match options.incidence {
        Incidence::Left => (|k, n| phase(k, n), |k, n| phase(k, -n), |k, n| phase(k, n)),
        Incidence::Right => (|k, n| phase(k, -n), |k, n| phase(k, n), |k, n| phase(k, -n)),
    };
    // the side carrying incident + reflected waves, and the transmitted side
    let (near, far) = match options.incidence {
        Incidence::Left => (a, b),
        Incidence::Right => (b, a),
    };
    let near_col = (near - a) as usize;
    let far_col = (far - a) as usize;

    let mut mat = vec![vec![zero; size]; size];
    let mut rhs = vec![zero; size];
    mat[0][near_col] = one;
    mat[0][ir] = -refl(kappa, near);
    rhs[0] = inc(kappa, near);
    mat[1][far_col] = one;
    mat[1][it] = -trans(kappa, far);

    let outside_near = |j: isize| match options.incidence {
        Incidence::Left => j < a,
        Incidence::Right => j > b,
    };
    for (t, n) in (a..=b).enumerate() {
        let row = 2 + t;
        for j in n - 1..=n + 1 {
            let mut c = Complex64::new(h.get(n, j), 0.0);
            if j == n {
                c -= energy;
            }
            if c == zero {
                continue;
            }
            if (a..=b).contains(&j) {
                mat[row][(j - a) as usize] += c;
            } else if outside_near(j) {
                mat[row][ir] += c * refl(kappa, j);
                rhs[row] -= c * inc(kappa, j);
            } else {
                mat[row][it] += c * trans(kappa, j);
            }
        }
    }

    let (x, condition_number) = dense_solve(mat, &rhs).ok_or(ScatteringError::Singular)?;
    let (reflection, transmission) = (x[ir], x[it]);
    Ok(ScatteringResult {
        kappa,
        energy,
        reflection,
        transmission,
        unitarity_deficit: deficit(reflection, transmission),
        condition_number,
    })
}

/// Gaussian elimination with partial pivoting; returns the solution and the
/// 1-norm condition number, or `None` for a numerically singular matrix.
fn dense_solve(a: Vec<Vec<Complex64>>, rhs: &[Complex64]) -> Option<(Vec<Complex64>, f64)> {
    let n = a.len();
    let norm1 = (0..n)
        .map(|c| a.iter().map(|r| r[c].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut lu = a;
    let mut perm: Vec<usize> = (0..n).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| lu[x][c].norm().total_cmp(&lu[y][c].norm()))?;
        if lu[p][c].norm() <= 1e-14 * norm1 {
            return None;
        }
        lu.swap(c, p);
        perm.swap(c, p);
        let inv = lu[c][c].inv();
        for r in c + 1..n {
            let f = lu[r][c] * inv;
            if f.norm() == 0.0 {
                continue;
            }
            lu[r][c] = f;
            for k in c + 1..n {
                let v = lu[c][k];
                lu[r][k] -= f * v;
            }
        }
    }
    let solve = |b: &[Complex64]| -> Vec<Complex64> {
        let mut y: Vec<Complex64> = perm.iter().map(|&i| b[i]).collect();
        for r in 0..n {
            for k in 0..r {
                let v = lu[r][k] * y[k];
                y[r] -= v;
            }
        }
        for r in (0..n).rev() {
            for k in r + 1..n {
                let v = lu[r][k] * y[k];
                y[r] -= v;
            }
            y[r] /= lu[r][r];
        }
        y
    };
    let x = solve(rhs);
    let mut inv_norm1 = 0.0_f64;
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        e[c] = Complex64::new(1.0, 0.0);
        let col = solve(&e);
        inv_norm1 = inv_norm1.max(col.iter().map(|v| v.norm()).sum());
        e[c] = Complex64::new(0.0, 0.0);
    }
    Some((x, norm1 * inv_norm1))
}

/// 2×2 complex matrix, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

fn mul2(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

fn det2(x: &Mat2) -> Complex64 {
    x[0][0] * x[1][1] - x[0][1] * x[1][0]
}

fn inv2(x: &Mat2) -> Mat2 {
    let d = det2(x).inv();
    [[x[1][1] * d, -x[0][1] * d], [-x[1][0] * d, x[0][0] * d]]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferResult {
    /// Transfer from `(ψ_{a−1}, ψ_a)` to `(ψ_b, ψ_{b+1})` in the basis of
    /// `e^{iκn}` and `e^{−iκn}` coefficients.
    pub matrix: Mat2,
    /// Left-incidence amplitudes `R = −t₂₁/t₂₂`, `T = det t / t₂₂`.
    pub reflection: Complex64,
    pub transmission: Complex64,
    /// Right-incidence amplitudes `R' = t₁₂/t₂₂`, `T' = 1/t₂₂`.
    pub reflection_right: Complex64,
    pub transmission_right: Complex64,
}

/// Columns `(e^{iκ(n−1)}, e^{iκn})` and `(e^{−iκ(n−1)}, e^{−iκn})`.
fn plane_wave_basis(kappa: f64, n: isize) -> Mat2 {
    [
        [phase(kappa, n - 1), phase(kappa, 1 - n)],
        [phase(kappa, n), phase(kappa, -n)],
    ]
}

pub fn transfer_matrix(h: &BandMatrix<f64>, kappa: f64) -> Result<TransferResult, ScatteringError> {
    check_tridiagonal(h)?;
    let energy = dispersion(kappa)?;
    let (a, b) = matching_sites(h, 0)?;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut m: Mat2 = [[one, zero], [zero, one]];
    for n in a..=b {
        let up = h.get(n, n + 1);
        if up == 0.0 {
            return Err(ScatteringError::ZeroHopping { row: n, col: n + 1 });
        }
        let step: Mat2 = [
            [zero, one],
            [
                Complex64::new(-h.get(n, n - 1) / up, 0.0),
                Complex64::new(-(h.get(n, n) - energy) / up, 0.0),
            ],
        ];
        m = mul2(&step, &m);
    }
    let t = mul2(
        &inv2(&plane_wave_basis(kappa, b + 1)),
        &mul2(&m, &plane_wave_basis(kappa, a)),
    );
    if t.iter()
        .flatten()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(ScatteringError::Overflow);
    }
    let t22 = t[1][1];
    if t22.norm() == 0.0 {
        return Err(ScatteringError::Singular);
    }
    Ok(TransferResult {
        matrix: t,
        reflection: -t[1][0] / t22,
        transmission: det2(&t) / t22,
        reflection_right: t[0][1] / t22,
        transmission_right: one / t22,
    })
}

/// `n` evenly spaced wavenumbers on `[lo, hi]`.
pub fn kappa_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub g: f64,
    pub max_deficit: f64,
    pub max_condition: f64,
    /// Grid points where the matching system was singular.
    pub singular_points: usize,
}

/// Unitarity deficit and conditioning of the matching system across couplings.
pub fn singularity_scan(
    build: impl Fn(f64) -> BandMatrix<f64>,
    couplings: &[f64],
    kappas: &[f64],
) -> Vec<ScanRow> {
    couplings
        .iter()
        .map(|&g| {
            let h = build(g);
            let mut row = ScanRow {
                g,
                max_deficit: 0.0,
                max_condition: 0.0,
                singular_points: 0,
            };
            for &k in kappas {
                match solve_scattering(&h, k, ScatteringOptions::default()) {
                    Ok(r) => {
                        row.max_deficit = row.max_deficit.max(r.unitarity_deficit);
                        row.max_condition = row.max_condition.max(r.condition_number);
                    }
                    Err(_) => row.singular_points += 1,
                }
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{free_laplacian_matrix, point_defect, two_center};

    fn close(x: Complex64, y: Complex64, tol: f64) -> bool {
        (x - y).norm() <= tol
    }

    #[test]
    fn dispersion_values() {
        assert!((dispersion(PI / 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((dispersion(PI / 3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(dispersion(1e-6).unwrap() < 1e-11);
        assert_eq!(dispersion(0.0), Err(ScatteringError::BandEdge(0.0)));
        assert_eq!(dispersion(PI), Err(ScatteringError::BandEdge(PI)));
    }

    #[test]
    fn free_lattice_is_transparent() {
        let h = free_laplacian_matrix::<f64>(10);
        for k in kappa_grid(0.1, PI - 0.1, 7) {
            let r = solve_scattering(&h, k, ScatteringOptions::default()).unwrap();
            assert!(r.reflection.norm() < 1e-13);
            assert!(close(r.transmission, Complex64::new(1.0, 0.0), 1e-13));
            let t = transfer_matrix(&h, k).unwrap();
            assert!(close(t.matrix[0][0], Complex64::new(1.0, 0.0), 1e-13));
            assert!(t.matrix[1][0].norm() < 1e-13);
        }
    }

    #[test]
    fn point_defect_unitary_and_methods_agree() {
        let h = point_defect(0.5, 12).unwrap().matrix;
        for k in kappa_grid(0.1, PI - 0.1, 20) {
            let r = solve_scattering(&h, k, ScatteringOptions::default()).unwrap();
            assert!(r.unitarity_deficit < 1e-12);
            let t = transfer_matrix(&h, k).unwrap();
            assert!(close(r.reflection, t.reflection, 1e-10));
            assert!(close(r.transmission, t.transmission, 1e-10));
            assert!(close(det2(&t.matrix), Complex64::new(1.0, 0.0), 1e-12));
        }
    }

    #[test]
    fn right_incidence_matches_transfer() {
        let h = two_center(0.5, 3, 12).unwrap().matrix;
        let opts = ScatteringOptions {
            incidence: Incidence::Right,
            padding: 1,
        };
        for k in kappa_grid(0.2, 3.0, 9) {
            let r = solve_scattering(&h, k, opts).unwrap();
            let t = transfer_matrix(&h, k).unwrap();
            assert!(close(r.reflection, t.reflection_right, 1e-10));
            assert!(close(r.transmission, t.transmission_right, 1e-10));
            assert!(close(t.transmission, t.transmission_right, 1e-10));
        }
    }

    #[test]
    fn window_and_padding_do_not_matter() {
        let k = 1.1;
        let base = solve_scattering(
            &point_defect(0.9, 10).unwrap().matrix,
            k,
            ScatteringOptions::default(),
        )
        .unwrap();
        let wide = solve_scattering(
            &point_defect(0.9, 20).unwrap().matrix,
            k,
            ScatteringOptions {
                padding: 10,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(close(base.reflection, wide.reflection, 1e-12));
        assert!(close(base.transmission, wide.transmission, 1e-12));
    }

    #[test]
    fn window_too_small() {
        let h = two_center(0.5, 4, 5).unwrap().matrix;
        assert!(matches!(
            solve_scattering(&h, 1.0, ScatteringOptions::default()),
            Err(ScatteringError::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn transfer_step_undefined_at_singularity() {
        let h = point_defect(1.0, 8).unwrap().matrix;
        assert_eq!(
            transfer_matrix(&h, 1.0).unwrap_err(),
            ScatteringError::ZeroHopping { row: 0, col: 1 }
        );
    }

    #[test]
    fn scan_conditioning_grows() {
        let rows = singularity_scan(
            |g| point_defect(g, 12).unwrap().matrix,
            &[0.5, 0.9, 0.99],
            &kappa_grid(0.1, PI - 0.1, 50),
        );
        assert!(rows
            .windows(2)
            .all(|w| w[1].max_condition > w[0].max_condition));
        assert!(rows
            .iter()
            .all(|r| r.max_deficit < 1e-10 && r.singular_points == 0));
    }
}
