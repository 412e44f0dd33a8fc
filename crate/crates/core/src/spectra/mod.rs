//! Spectra of the Laplacian and of the linearized error operator.
//!
//! The linearization of the error dynamics at consensus is the map
//!
//! ```text
//! 𝒯(X) = LX + XLᵀ − L̂·vec(X)·𝟙ᵀ − 𝟙·(L̂·vec(X))ᵀ
//! ```
//!
//! with matrix `T = L⊗I + I⊗L − 𝟙⊗L̂ − L̂⊗𝟙` acting on `vec(X)`. When `L` has
//! rank `m − 1` its characteristic polynomial is predicted from the Laplacian
//! eigenvalues alone; the verifiers here compare prediction and computation
//! as multisets.

mod operator;
mod predict;
mod report;
mod verify;

pub use operator::{
    apply_lyapunov, apply_t, build_operator_t, hat_l, project_onto_k, subspace_bases, verify_block_structure,
    BlockStructure, OperatorT, SubspaceBases, BLOCK_TOL,
};
pub use predict::{pairwise_sums, predicted_spectrum_full, predicted_spectrum_k, predicted_spectrum_s0};
pub use report::{match_spectra, SpectralReport};
pub use verify::{
    lemma3_construction, lyapunov_on_k, verify_lemma1, verify_lemma1_with, verify_lemma3,
    verify_lemma3_construction, verify_prop2, verify_prop2_with, verify_restricted_spectra,
    Lemma3ConstructionReport, Lemma3Report, RestrictedSpectraReport,
};

use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

use crate::graph::Laplacian;
use crate::linalg::{eigenvalues, exact, LinalgError, Matrix};
use crate::scalar::{to_rational, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("expected exactly one zero Laplacian eigenvalue, found {zeros} (rank condition violated)")]
    RankCondition { zeros: usize },
    #[error("no eigenvalue with real part above {zero_tol:e}")]
    NoNonzeroEigenvalue { zero_tol: f64 },
    #[error("graph has no directed spanning tree")]
    NoSpanningTree,
    #[error("spectra have different sizes: {computed} vs {predicted}")]
    CardinalityMismatch { computed: usize, predicted: usize },
    #[error("block {block} should vanish but has entry of size {max_abs:e}")]
    PatternViolation { block: &'static str, max_abs: f64 },
    #[error("precondition {what} fails: residual {residual:e} > {tol:e}")]
    Precondition { what: &'static str, residual: f64, tol: f64 },
    #[error("matrix entry cannot be represented exactly")]
    NotRepresentable,
}

/// How eigenvalues are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumMethod {
    /// Balanced Hessenberg QR in the working precision.
    Float,
    /// Exact characteristic polynomial and square-free factorization over ℚ.
    Exact,
    /// `Float`, escalating to `Exact` when a comparison misses its tolerance.
    Auto,
}

impl SpectrumMethod {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumMethod::Float => "float",
            SpectrumMethod::Exact => "exact",
            SpectrumMethod::Auto => "auto",
        }
    }
}

/// Eigenvalue multiset of a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<S> {
    values: Vec<Complex<S>>,
}

impl<S: Real> Spectrum<S> {
    pub fn new(values: Vec<Complex<S>>) -> Self {
        Self { values }
    }

    pub fn of_matrix(a: &Matrix<S>, method: SpectrumMethod) -> Result<Self, SpectraError> {
        match method {
            SpectrumMethod::Float | SpectrumMethod::Auto => Ok(Self::new(eigenvalues(a)?)),
            SpectrumMethod::Exact => {
                let q = a
                    .as_slice()
                    .iter()
                    .map(to_rational)
                    .collect::<Option<Vec<_>>>()
                    .ok_or(SpectraError::NotRepresentable)?;
                let q = Matrix::from_row_major(a.rows(), a.cols(), q)?;
                let values = exact::eigenvalues_exact(&q)?
                    .into_iter()
                    .map(|z| Complex::new(S::c(z.re), S::c(z.im)))
                    .collect();
                Ok(Self::new(values))
            }
        }
    }

    pub fn values(&self) -> &[Complex<S>] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    /// Sorted by real part, then imaginary part.
    pub fn sorted(&self) -> Vec<Complex<S>> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
        });
        v
    }

    /// Largest distance between the multiset and its complex conjugate under
    /// optimal pairing. Zero for an exactly conjugate-closed multiset.
    pub fn conjugate_mismatch(&self) -> f64 {
        let conj = Spectrum::new(self.values.iter().map(|z| z.conj()).collect());
        match_spectra(self, &conj).map(|(_, r)| r).unwrap_or(f64::INFINITY)
    }

    pub fn to_f64(&self) -> Spectrum<f64> {
        Spectrum::new(
            self.values
                .iter()
                .map(|z| Complex::new(z.re.as_f64(), z.im.as_f64()))
                .collect(),
        )
    }
}

/// Default threshold for identifying the zero Laplacian eigenvalue:
/// `1e−8 · ‖L‖∞`.
pub fn default_zero_tol<S: Real>(l: &Laplacian<S>) -> f64 {
    (1e-8 * l.matrix().norm_inf()).max(f64::MIN_POSITIVE)
}

pub fn laplacian_spectrum<S: Real>(l: &Laplacian<S>, method: SpectrumMethod) -> Result<Spectrum<S>, SpectraError> {
    Spectrum::of_matrix(l.matrix(), method)
}

/// The eigenvalue with the smallest real part above `zero_tol`.
///
/// Real parts within `zero_tol` of the minimum count as tied; ties go to the
/// smallest `|Im|`, then to the non-negative imaginary part.
pub fn lambda2<S: Real>(spec: &Spectrum<S>, zero_tol: f64) -> Result<Complex<S>, SpectraError> {
    let candidates: Vec<Complex<S>> = spec
        .values()
        .iter()
        .copied()
        .filter(|z| z.re.as_f64() > zero_tol)
        .collect();
    let min_re = candidates
        .iter()
        .map(|z| z.re.as_f64())
        .fold(f64::INFINITY, f64::min);
    if !min_re.is_finite() {
        return Err(SpectraError::NoNonzeroEigenvalue { zero_tol });
    }
    let tied: Vec<Complex<S>> = candidates
        .into_iter()
        .filter(|z| z.re.as_f64() <= min_re + zero_tol)
        .collect();
    let min_im = tied.iter().map(|z| z.im.as_f64().abs()).fold(f64::INFINITY, f64::min);
    let best = tied
        .iter()
        .filter(|z| z.im.as_f64().abs() <= min_im + zero_tol)
        .max_by(|a, b| {
            // prefer Im ≥ 0, then smaller real part
            (a.im >= S::zero())
                .cmp(&(b.im >= S::zero()))
                .then(b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal))
        })
        .copied()
        .unwrap_or_else(Complex::zero);
    Ok(best)
}
