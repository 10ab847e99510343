//! Dense spectral comparison of `H` and its partner `𝔥` on small windows.

use nalgebra::{Complex, DMatrix};
use quasilocal_core::BandMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsospectralOptions {
    /// Largest tolerated imaginary part in the spectrum of `H`.
    pub imaginary_tolerance: f64,
    /// Symmetrizer condition above which the comparison is flagged as ill-conditioned.
    pub condition_limit: f64,
}

impl Default for IsospectralOptions {
    fn default() -> Self {
        IsospectralOptions {
            imaginary_tolerance: 1e-8,
            condition_limit: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumWarning {
    /// `H` is close to a spectral singularity: its eigenvalues are
    /// sensitive to perturbations of relative size `1/condition`.
    IllConditioned { condition: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsospectralReport {
    pub dimension: usize,
    /// Sorted spectrum of `H`.
    pub spectrum: Vec<f64>,
    /// Sorted spectrum of `𝔥`.
    pub partner_spectrum: Vec<f64>,
    /// `max |λ_k(H) − λ_k(𝔥)|` over the sorted lists.
    pub max_deviation: f64,
    pub max_imaginary: f64,
    /// `max d / min d` for the diagonal `D` with `DHD⁻¹` symmetric; infinite
    /// if some hopping pair has nonpositive product.
    pub symmetrizer_condition: f64,
    pub warnings: Vec<SpectrumWarning>,
}

impl IsospectralReport {
    pub fn agrees(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error("windows differ: {0} vs {1}")]
    WindowMismatch(usize, usize),
    #[error("spectrum of H has imaginary parts up to {0:e}")]
    ComplexSpectrum(f64),
}

fn dense(m: &BandMatrix<f64>) -> DMatrix<f64> {
    let rows = m.to_dense();
    DMatrix::from_fn(m.dim(), m.dim(), |i, j| rows[i][j])
}

fn sorted_eigenvalues(m: &BandMatrix<f64>) -> Vec<Complex<f64>> {
    let mut ev: Vec<Complex<f64>> = dense(m).complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// Condition of the diagonal similarity that symmetrizes a tridiagonal `H`.
pub fn symmetrizer_condition(h: &BandMatrix<f64>) -> f64 {
    let n = h.window() as isize;
    let mut log_d = 0.0_f64;
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    for i in -n..n {
        let (up, down) = (h.get(i, i + 1), h.get(i + 1, i));
        if up == 0.0 && down == 0.0 {
            continue;
        }
        if up * down <= 0.0 {
            return f64::INFINITY;
        }
        log_d += 0.5 * (down / up).ln();
        lo = lo.min(log_d);
        hi = hi.max(log_d);
    }
    (hi - lo).exp()
}

/// Compares the truncated spectra of `H` and `𝔥 = ΩHΩ⁻¹`.
///
/// Both matrices live on the same finite window, where `𝔥` is an exact
/// similarity transform of the truncated `H`, so the spectra agree up to
/// rounding amplified by the conditioning of `H`.
pub fn isospectrality_check(
    h: &BandMatrix<f64>,
    partner: &BandMatrix<f64>,
    options: IsospectralOptions,
) -> Result<IsospectralReport, SpectrumError> {
    if h.window() != partner.window() {
        return Err(SpectrumError::WindowMismatch(h.window(), partner.window()));
    }
    let ev_h = sorted_eigenvalues(h);
    let ev_p = sorted_eigenvalues(partner);
    let max_imaginary = ev_h.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_imaginary > options.imaginary_tolerance {
        return Err(SpectrumError::ComplexSpectrum(max_imaginary));
    }
    let max_deviation = ev_h
        .iter()
        .zip(&ev_p)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let condition = if h.bandwidth() <= 1 {
        symmetrizer_condition(h)
    } else {
        f64::INFINITY
    };
    let mut warnings = Vec::new();
    if condition > options.condition_limit {
        warnings.push(SpectrumWarning::IllConditioned { condition });
    }
    Ok(IsospectralReport {
        dimension: h.dim(),
        spectrum: ev_h.iter().map(|z| z.re).collect(),
        partner_spectrum: ev_p.iter().map(|z| z.re).collect(),
        max_deviation,
        max_imaginary,
        symmetrizer_condition: condition,
        warnings,
    })
}
