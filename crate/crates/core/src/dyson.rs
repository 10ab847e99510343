//! Dyson maps `Ω` with `Ω†Ω = Θ` and the Hermitian partner `𝔥 = ΩHΩ⁻¹`.

use crate::band::{banded_cholesky, upper_triangular_inverse, BandMatrix};
use crate::error::{CholeskyError, DysonError};
use crate::scalar::{Real, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance<S> {
    /// Entrywise square root of a diagonal metric.
    DiagonalSqrt,
    /// The asymmetric tridiagonal map of the `γ = −1` metric, at coupling `g`.
    Tridiagonal { g: S },
    /// Upper-triangular banded Cholesky factor.
    TriangularFactor,
}

impl<S> Provenance<S> {
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::DiagonalSqrt => "diagonal_sqrt",
            Provenance::Tridiagonal { .. } => "tridiagonal",
            Provenance::TriangularFactor => "triangular_factor",
        }
    }
}

/// An invertible map together with its inverse on the window.
#[derive(Clone, Debug, PartialEq)]
pub struct DysonMap<S> {
    pub omega: BandMatrix<S>,
    pub inverse: BandMatrix<S>,
    pub provenance: Provenance<S>,
    pub warning: Option<&'static str>,
}

pub const BOUNDARY_WARNING: &str =
    "metric 2Θ₁ − Θ₂ sits on the boundary |γ| = 1 of the positivity interval";

impl<S: Scalar> DysonMap<S> {
    pub fn window(&self) -> usize {
        self.omega.window()
    }

    /// `Ω†Ω`.
    pub fn gram(&self) -> BandMatrix<S> {
        self.omega
            .adjoint()
            .multiply(&self.omega)
            .expect("factors share a window")
    }

    /// `ΩΩ⁻¹`.
    pub fn product_with_inverse(&self) -> BandMatrix<S> {
        self.omega
            .multiply(&self.inverse)
            .expect("factors share a window")
    }
}

/// `Ω₁ = √Θ₁` for a diagonal metric with positive entries.
pub fn factor_diagonal<T: Real>(theta: &BandMatrix<T>) -> Result<DysonMap<T::Sqrt>, DysonError> {
    if theta.offsets().any(|d| d != 0) {
        return Err(DysonError::NotDiagonal);
    }
    let n = theta.window() as isize;
    let mut omega = BandMatrix::zeros(theta.window());
    let mut inverse = BandMatrix::zeros(theta.window());
    for i in -n..=n {
        let v = theta.get(i, i);
        if v <= T::zero() {
            return Err(DysonError::NonPositiveEntry { site: i });
        }
        let root = v.sqrt().ok_or(DysonError::NonPositiveEntry { site: i })?;
        let inv = root
            .try_recip()
            .map_err(|_| DysonError::NonPositiveEntry { site: i })?;
        omega.set(i, i, root);
        inverse.set(i, i, inv);
    }
    Ok(DysonMap {
        omega,
        inverse,
        provenance: Provenance::DiagonalSqrt,
        warning: None,
    })
}

/// The tridiagonal map with `Ω†Ω = 2Θ₁ − Θ₂` (up to the two corner entries
/// of the truncated window), and its closed-form inverse.
///
/// Left half: rows `(1, −1)` with junction `Ω(−1, 0) = −1−g`. Centre:
/// `√(2g²(1+g)/(1−g))`. Right half mirrors the left.
pub fn tridiagonal_omega<T: Real>(g: T, window: usize) -> Result<DysonMap<T::Sqrt>, DysonError> {
    if g.is_zero() {
        return Err(DysonError::DegenerateCoupling);
    }
    if g.abs() >= T::one() {
        return Err(DysonError::SpectralSingularity);
    }
    let one = T::one();
    let two = T::from_i64(2);
    let g2 = g.clone() * g.clone();
    let s2 = (two.clone() * g2.clone() * (one.clone() + g.clone()))
        .try_div(&(one.clone() - g.clone()))
        .map_err(|_| DysonError::SpectralSingularity)?;
    let t2 = (one.clone() - g2.clone())
        .try_div(&(two * g2))
        .map_err(|_| DysonError::DegenerateCoupling)?;
    let centre = s2.sqrt().ok_or(DysonError::SpectralSingularity)?;
    let column = t2.sqrt().ok_or(DysonError::SpectralSingularity)?;
    let centre_inv = centre
        .try_recip()
        .map_err(|_| DysonError::DegenerateCoupling)?;

    let lift = |v: T| T::Sqrt::from(v);
    let n = window as isize;
    let junction = lift(-(one.clone() + g.clone()));
    let mut omega = BandMatrix::zeros(window);
    for i in -n..=n {
        match i {
            0 => omega.set(0, 0, centre.clone()),
            _ => {
                omega.set(i, i, lift(one.clone()));
                let j = if i < 0 { i + 1 } else { i - 1 };
                let v = if j == 0 {
                    junction.clone()
                } else {
                    lift(-one.clone())
                };
                omega.set(i, j, v);
            }
        }
    }

    // left block: upper-triangular ones; right block: lower-triangular ones;
    // centre column constant
    let mut inverse = BandMatrix::zeros(window);
    for i in -n..=n {
        if i == 0 {
            inverse.set(0, 0, centre_inv.clone());
            continue;
        }
        inverse.set(i, 0, column.clone());
        let block = if i < 0 { i..=-1 } else { 1..=i };
        for j in block {
            inverse.set(i, j, lift(one.clone()));
        }
    }

    Ok(DysonMap {
        omega,
        inverse,
        provenance: Provenance::Tridiagonal { g: lift(g) },
        warning: Some(BOUNDARY_WARNING),
    })
}

/// Upper-triangular Cholesky factor as a Dyson map (float mode: the exact
/// inverse of a surd triangular factor grows combinatorially).
pub fn cholesky_dyson(theta: &BandMatrix<f64>) -> Result<DysonMap<f64>, DysonError> {
    let upper = banded_cholesky(theta)?.upper;
    let inverse = upper_triangular_inverse(&upper).map_err(CholeskyError::from)?;
    Ok(DysonMap {
        omega: upper,
        inverse,
        provenance: Provenance::TriangularFactor,
        warning: None,
    })
}

/// Result of [`hermitize`].
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitized<S> {
    pub matrix: BandMatrix<S>,
    /// Radius of the window on which Hermiticity was checked.
    pub interior_radius: usize,
    /// `max |𝔥 − 𝔥†|` over that window.
    pub deficit: f64,
    /// `𝔥 − 𝔥†` vanishes identically there (exact fields only).
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitizeOptions {
    /// Check radius; `None` picks a default from the map's provenance.
    pub radius: Option<usize>,
    /// Allowed deficit relative to `max |𝔥|` in float mode.
    pub tolerance: f64,
}

impl Default for HermitizeOptions {
    fn default() -> Self {
        HermitizeOptions {
            radius: None,
            tolerance: 1e-12,
        }
    }
}

/// `𝔥 = ΩHΩ⁻¹`, checked for Hermiticity on the interior.
///
/// Closed-form maps give an exactly Hermitian interior of radius
/// `N − bw(Ω) − bw(H)`. A triangular factor leaks truncation effects from
/// the left edge through `Ω⁻¹`; these decay exponentially, so its default
/// check radius is `N/2`.
pub fn hermitize<S: Scalar>(
    h: &BandMatrix<S>,
    map: &DysonMap<S>,
    options: HermitizeOptions,
) -> Result<Hermitized<S>, DysonError> {
    let matrix = map.omega.multiply(h)?.multiply(&map.inverse)?;
    let window = matrix.window();
    let radius = options.radius.unwrap_or(match map.provenance {
        Provenance::TriangularFactor => window / 2,
        _ => window.saturating_sub(map.omega.bandwidth() + h.bandwidth()),
    });
    let skew = matrix.sub(&matrix.adjoint())?;
    let mut exact = true;
    let mut deficit = 0.0_f64;
    for (_, _, v) in skew.interior(radius) {
        if !v.is_zero() {
            exact = false;
            deficit = deficit.max(v.to_f64().abs());
        }
    }
    let scale = matrix
        .entries()
        .map(|(_, _, v)| v.to_f64().abs())
        .fold(1.0_f64, f64::max);
    let ok = if S::KIND.is_exact() {
        exact
    } else {
        deficit <= options.tolerance * scale
    };
    if !ok {
        return Err(DysonError::HermiticityViolation { deficit });
    }
    Ok(Hermitized {
        matrix,
        interior_radius: radius,
        deficit,
        exact,
    })
}
