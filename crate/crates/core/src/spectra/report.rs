use num_complex::Complex;

use super::{SpectraError, Spectrum, SpectrumMethod};
use crate::assignment::min_cost_assignment;
use crate::scalar::Real;

/// Optimal bijection between two equally sized multisets under `|λ − μ|`.
///
/// Returns `pairing[i]` (index into `b` matched to `a[i]`) and the largest
/// paired distance.
pub fn match_spectra<S: Real>(a: &Spectrum<S>, b: &Spectrum<S>) -> Result<(Vec<usize>, f64), SpectraError> {
    if a.dimension() != b.dimension() {
        return Err(SpectraError::CardinalityMismatch {
            computed: a.dimension(),
            predicted: b.dimension(),
        });
    }
    let dist = |x: &Complex<S>, y: &Complex<S>| (x - y).norm().as_f64();
    let cost: Vec<Vec<f64>> = a
        .values()
        .iter()
        .map(|x| b.values().iter().map(|y| dist(x, y)).collect())
        .collect();
    let pairing = min_cost_assignment(&cost);
    let max = pairing
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .fold(0.0, f64::max);
    Ok((pairing, max))
}

/// Computed against predicted eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub computed: Spectrum<f64>,
    pub predicted: Spectrum<f64>,
    /// `pairing[i]` is the predicted index matched to computed value `i`.
    pub pairing: Vec<usize>,
    pub max_residual: f64,
    /// Method that produced `computed` (never `Auto`).
    pub method: SpectrumMethod,
    /// Residual of the floating-point attempt when it was superseded by the
    /// exact one.
    pub float_residual: Option<f64>,
}

impl SpectralReport {
    pub fn new(computed: Spectrum<f64>, predicted: Spectrum<f64>, method: SpectrumMethod) -> Result<Self, SpectraError> {
        let (pairing, max_residual) = match_spectra(&computed, &predicted)?;
        Ok(Self {
            computed,
            predicted,
            pairing,
            max_residual,
            method,
            float_residual: None,
        })
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }

    /// `(computed, predicted)` in pairing order.
    pub fn pairs(&self) -> impl Iterator<Item = (Complex<f64>, Complex<f64>)> + '_ {
        self.pairing
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.computed.values()[i], self.predicted.values()[j]))
    }
}
