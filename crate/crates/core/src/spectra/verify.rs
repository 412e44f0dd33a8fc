use num_complex::Complex;
use num_rational::BigRational;

use super::operator::{lemma3_split, rational_laplacian};
use super::{
    apply_lyapunov, build_operator_t, default_zero_tol, hat_l, lambda2, pairwise_sums, predicted_spectrum_full,
    predicted_spectrum_k, predicted_spectrum_s0, subspace_bases, verify_block_structure, SpectraError, SpectralReport,
    Spectrum, SpectrumMethod, BLOCK_TOL,
};
use crate::graph::{has_spanning_tree, laplacian, Digraph, Laplacian, DEFAULT_RANK_TOL};
use crate::linalg::{exact::eigenvalues_exact, kron, Matrix};
use crate::scalar::{to_rational, Field, Real};

type Pair = (Spectrum<f64>, Spectrum<f64>);

fn float_spectrum<S: Real>(a: &Matrix<S>) -> Result<Spectrum<f64>, SpectraError> {
    Ok(Spectrum::of_matrix(a, SpectrumMethod::Float)?.to_f64())
}

fn exact_spectrum(a: &Matrix<BigRational>) -> Result<Spectrum<f64>, SpectraError> {
    Ok(Spectrum::new(eigenvalues_exact(a)?))
}

fn rationalize<S: Field>(a: &Matrix<S>) -> Result<Matrix<BigRational>, SpectraError> {
    let data = a
        .as_slice()
        .iter()
        .map(to_rational)
        .collect::<Option<Vec<_>>>()
        .ok_or(SpectraError::NotRepresentable)?;
    Ok(Matrix::from_row_major(a.rows(), a.cols(), data)?)
}

/// Runs a computed-vs-predicted comparison with the requested method.
///
/// `Auto` tries floating point first and redoes the comparison exactly if the
/// float attempt errors or misses `tol`. Heavily defective matrices (long
/// Jordan chains) perturb float eigenvalues by `O(ε^{1/k})`, so this is what
/// keeps e.g. path graphs verifiable.
fn compare(
    tol: f64,
    method: SpectrumMethod,
    float: impl FnOnce() -> Result<Pair, SpectraError>,
    exact: impl FnOnce() -> Result<Pair, SpectraError>,
) -> Result<SpectralReport, SpectraError> {
    let report = |(c, p): Pair, m| SpectralReport::new(c, p, m);
    match method {
        SpectrumMethod::Float => report(float()?, SpectrumMethod::Float),
        SpectrumMethod::Exact => report(exact()?, SpectrumMethod::Exact),
        SpectrumMethod::Auto => {
            let first = float().and_then(|p| report(p, SpectrumMethod::Float));
            match first {
                Ok(r) if r.passed(tol) => Ok(r),
                other => {
                    let mut r = report(exact()?, SpectrumMethod::Exact)?;
                    r.float_residual = Some(other.map(|r| r.max_residual).unwrap_or(f64::INFINITY));
                    Ok(r)
                }
            }
        }
    }
}

fn require_spanning_tree<S: Real>(g: &Digraph<S>) -> Result<(), SpectraError> {
    if has_spanning_tree(g, S::c(DEFAULT_RANK_TOL)) {
        Ok(())
    } else {
        Err(SpectraError::NoSpanningTree)
    }
}

/// Eigenvalues of `T` against the prediction from the Laplacian spectrum.
pub fn verify_prop2<S: Real>(g: &Digraph<S>, tol: f64) -> Result<SpectralReport, SpectraError> {
    verify_prop2_with(g, tol, SpectrumMethod::Auto)
}

pub fn verify_prop2_with<S: Real>(
    g: &Digraph<S>,
    tol: f64,
    method: SpectrumMethod,
) -> Result<SpectralReport, SpectraError> {
    require_spanning_tree(g)?;
    let l = laplacian(g);
    let zero_tol = default_zero_tol(&l);
    compare(
        tol,
        method,
        || {
            let predicted = predicted_spectrum_full(&float_spectrum(l.matrix())?, zero_tol)?;
            Ok((float_spectrum(&build_operator_t(&l).matrix)?, predicted))
        },
        || {
            let lq = rational_laplacian(&l);
            let predicted = predicted_spectrum_full(&exact_spectrum(lq.matrix())?, zero_tol)?;
            Ok((exact_spectrum(&build_operator_t(&lq).matrix)?, predicted))
        },
    )
}

/// Matrix of `X ↦ LX + XLᵀ` restricted to the skew-symmetric subspace.
pub fn lyapunov_on_k<S: Field>(l: &Laplacian<S>) -> Matrix<S> {
    let m = l.m();
    let bases = subspace_bases::<S>(m);
    let (n1, n2, n3) = bases.dims();
    let mut out = Matrix::zeros(n3, n3);
    for (k, b) in bases.b3.iter().enumerate() {
        let y = apply_lyapunov(l, b).expect("m × m");
        for (r, v) in bases.coordinates(&y).into_iter().skip(n1 + n2).enumerate() {
            out[(r, k)] = v;
        }
    }
    out
}

/// Eigenvalues of the Lyapunov map on the skew-symmetric subspace against
/// all pairwise sums `λᵢ + λⱼ`, `i < j`.
pub fn verify_lemma1<S: Real>(l: &Laplacian<S>, tol: f64) -> Result<SpectralReport, SpectraError> {
    verify_lemma1_with(l, tol, SpectrumMethod::Auto)
}

pub fn verify_lemma1_with<S: Real>(
    l: &Laplacian<S>,
    tol: f64,
    method: SpectrumMethod,
) -> Result<SpectralReport, SpectraError> {
    compare(
        tol,
        method,
        || {
            let predicted = pairwise_sums(&float_spectrum(l.matrix())?);
            Ok((float_spectrum(&lyapunov_on_k(l))?, predicted))
        },
        || {
            let lq = rational_laplacian(l);
            let predicted = pairwise_sums(&exact_spectrum(lq.matrix())?);
            Ok((exact_spectrum(&lyapunov_on_k(&lq))?, predicted))
        },
    )
}

/// Restricted-spectrum checks on the symmetric-hollow and skew blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedSpectraReport {
    /// `eig(T₁₁)` against `{2λⱼ} ∪ {λₚ + λ_q}`.
    pub s0: SpectralReport,
    /// `eig(T₃₃)` against `{λᵢ} ∪ {λₚ + λ_q}`.
    pub k: SpectralReport,
    pub lambda2: Complex<f64>,
    /// Smallest real part in the symmetric-hollow prediction.
    pub min_re_s0: f64,
}

pub fn verify_restricted_spectra<S: Real>(
    l: &Laplacian<S>,
    tol: f64,
    method: SpectrumMethod,
) -> Result<RestrictedSpectraReport, SpectraError> {
    require_spanning_tree(l.source())?;
    let zero_tol = default_zero_tol(l);
    let float_blocks = || verify_block_structure(l, BLOCK_TOL);
    let exact_blocks = || verify_block_structure(&rational_laplacian(l), 0.0);
    let lq = || rational_laplacian(l);

    let s0 = compare(
        tol,
        method,
        || {
            let p = predicted_spectrum_s0(&float_spectrum(l.matrix())?, zero_tol)?;
            Ok((float_spectrum(&float_blocks()?.t11)?, p))
        },
        || {
            let p = predicted_spectrum_s0(&exact_spectrum(lq().matrix())?, zero_tol)?;
            Ok((exact_spectrum(&exact_blocks()?.t11)?, p))
        },
    )?;
    let k = compare(
        tol,
        method,
        || {
            let p = predicted_spectrum_k(&float_spectrum(l.matrix())?, zero_tol)?;
            Ok((float_spectrum(&float_blocks()?.t33)?, p))
        },
        || {
            let p = predicted_spectrum_k(&exact_spectrum(lq().matrix())?, zero_tol)?;
            Ok((exact_spectrum(&exact_blocks()?.t33)?, p))
        },
    )?;
    let lambda2 = lambda2(&float_spectrum(l.matrix())?, zero_tol)?;
    let min_re_s0 = s0.predicted.values().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    Ok(RestrictedSpectraReport {
        s0,
        k,
        lambda2,
        min_re_s0,
    })
}

/// Spectrum invariance `eig(A ± B) = eig(A)` for a nilpotent `B` with
/// `AB = BC`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma3Report {
    /// `max |AB − BC|`.
    pub commutation_residual: f64,
    /// `max |B²|`.
    pub nilpotency_residual: f64,
    /// `eig(A + B)` against `eig(A)`.
    pub plus: SpectralReport,
    /// `eig(A − B)` against `eig(A)`; `(A, −B, C)` satisfies the same hypotheses.
    pub minus: SpectralReport,
}

impl Lemma3Report {
    pub fn max_residual(&self) -> f64 {
        self.plus.max_residual.max(self.minus.max_residual)
    }
}

fn sum_or_diff<S: Field>(a: &Matrix<S>, b: &Matrix<S>, plus: bool) -> Result<Matrix<S>, SpectraError> {
    Ok(if plus { a.add(b)? } else { a.sub(b)? })
}

fn invariance_report<S: Real>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    plus: bool,
    tol: f64,
    exact: Option<(&Matrix<BigRational>, &Matrix<BigRational>)>,
) -> Result<SpectralReport, SpectraError> {
    compare(
        tol,
        SpectrumMethod::Auto,
        || Ok((float_spectrum(&sum_or_diff(a, b, plus)?)?, float_spectrum(a)?)),
        || {
            let (aq, bq) = match exact {
                Some((aq, bq)) => (aq.clone(), bq.clone()),
                None => (rationalize(a)?, rationalize(b)?),
            };
            Ok((exact_spectrum(&sum_or_diff(&aq, &bq, plus)?)?, exact_spectrum(&aq)?))
        },
    )
}

pub fn verify_lemma3<S: Real>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    c: &Matrix<S>,
    tol: f64,
) -> Result<Lemma3Report, SpectraError> {
    let commutation_residual = a.matmul(b)?.max_abs_diff(&b.matmul(c)?)?;
    if commutation_residual > tol {
        return Err(SpectraError::Precondition {
            what: "AB = BC",
            residual: commutation_residual,
            tol,
        });
    }
    let nilpotency_residual = b.matmul(b)?.max_abs();
    if nilpotency_residual > tol {
        return Err(SpectraError::Precondition {
            what: "B² = 0",
            residual: nilpotency_residual,
            tol,
        });
    }
    Ok(Lemma3Report {
        commutation_residual,
        nilpotency_residual,
        plus: invariance_report(a, b, true, tol, None)?,
        minus: invariance_report(a, b, false, tol, None)?,
    })
}

/// Spectrum invariance on the splitting `T = A − B` with
/// `A = L⊗I + I⊗L − 𝟙⊗L̂` and `B = L̂⊗𝟙`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma3ConstructionReport {
    /// `B² = 0`, checked in exact arithmetic.
    pub b_squared_zero: bool,
    /// `(I⊗L)·B = 0`, exact.
    pub identity_kron_l_annihilates: bool,
    /// `(𝟙⊗L̂)·B = 0`, exact.
    pub ones_kron_hat_annihilates: bool,
    /// `eig(A − B)` against `eig(A)`.
    pub minus: SpectralReport,
    /// `eig(A + B)` against `eig(A)`.
    pub plus: SpectralReport,
}

impl Lemma3ConstructionReport {
    pub fn max_residual(&self) -> f64 {
        self.plus.max_residual.max(self.minus.max_residual)
    }
}

/// `(A, B)` of the splitting, in the Laplacian's own scalar type.
pub fn lemma3_construction<S: Field>(l: &Laplacian<S>) -> (Matrix<S>, Matrix<S>) {
    lemma3_split(l)
}

pub fn verify_lemma3_construction<S: Real>(
    l: &Laplacian<S>,
    tol: f64,
) -> Result<Lemma3ConstructionReport, SpectraError> {
    let lq = rational_laplacian(l);
    let (aq, bq) = lemma3_split(&lq);
    let m = l.m();
    let b_squared_zero = bq.matmul(&bq)?.is_zero();
    if !b_squared_zero {
        let residual = bq.matmul(&bq)?.max_abs();
        return Err(SpectraError::Precondition {
            what: "B² = 0",
            residual,
            tol: 0.0,
        });
    }
    let identity_kron_l_annihilates = kron(&Matrix::identity(m), lq.matrix()).matmul(&bq)?.is_zero();
    let ones_kron_hat_annihilates = kron(&Matrix::ones_column(m), &hat_l(&lq)).matmul(&bq)?.is_zero();

    let (a, b) = lemma3_split(l);
    Ok(Lemma3ConstructionReport {
        b_squared_zero,
        identity_kron_l_annihilates,
        ones_kron_hat_annihilates,
        minus: invariance_report(&a, &b, false, tol, Some((&aq, &bq)))?,
        plus: invariance_report(&a, &b, true, tol, Some((&aq, &bq)))?,
    })
}
