use num_complex::Complex;

use super::{SpectraError, Spectrum};
use crate::scalar::Real;

/// Splits off the single zero eigenvalue and returns `λ₂, …, λₘ`.
fn nonzero<S: Real>(spec: &Spectrum<S>, zero_tol: f64) -> Result<Vec<Complex<S>>, SpectraError> {
    let (zeros, rest): (Vec<_>, Vec<_>) = spec
        .values()
        .iter()
        .copied()
        .partition(|z| z.norm().as_f64() <= zero_tol);
    if zeros.len() != 1 {
        return Err(SpectraError::RankCondition { zeros: zeros.len() });
    }
    Ok(rest)
}

/// `λₚ + λ_q` for `q < p` among the nonzero eigenvalues, each once.
fn pair_sums<S: Real>(rest: &[Complex<S>]) -> impl Iterator<Item = Complex<S>> + '_ {
    (0..rest.len()).flat_map(move |p| (0..p).map(move |q| rest[p] + rest[q]))
}

/// Eigenvalues of `T`: zero `m` times, every `λᵢ`, every `2λⱼ`, and every
/// sum `λₚ + λ_q` twice (`i, j, p, q ≥ 2`).
pub fn predicted_spectrum_full<S: Real>(spec: &Spectrum<S>, zero_tol: f64) -> Result<Spectrum<S>, SpectraError> {
    let rest = nonzero(spec, zero_tol)?;
    let m = spec.dimension();
    let two = S::c(2.0);
    let mut out = vec![Complex::new(S::zero(), S::zero()); m];
    out.extend(rest.iter().copied());
    out.extend(rest.iter().map(|z| z * two));
    for s in pair_sums(&rest) {
        out.extend([s, s]);
    }
    debug_assert_eq!(out.len(), m * m);
    Ok(Spectrum::new(out))
}

/// Eigenvalues on the symmetric-hollow block: `2λⱼ` and each pairwise sum once.
pub fn predicted_spectrum_s0<S: Real>(spec: &Spectrum<S>, zero_tol: f64) -> Result<Spectrum<S>, SpectraError> {
    let rest = nonzero(spec, zero_tol)?;
    let two = S::c(2.0);
    let mut out: Vec<_> = rest.iter().map(|z| z * two).collect();
    out.extend(pair_sums(&rest));
    Ok(Spectrum::new(out))
}

/// Eigenvalues on the skew-symmetric block: `λᵢ` and each pairwise sum once.
pub fn predicted_spectrum_k<S: Real>(spec: &Spectrum<S>, zero_tol: f64) -> Result<Spectrum<S>, SpectraError> {
    let rest = nonzero(spec, zero_tol)?;
    let mut out = rest.clone();
    out.extend(pair_sums(&rest));
    Ok(Spectrum::new(out))
}

/// All pairwise sums `λᵢ + λⱼ`, `i < j`, including `λ₁ = 0`. No rank
/// requirement.
pub fn pairwise_sums<S: Real>(spec: &Spectrum<S>) -> Spectrum<S> {
    Spectrum::new(pair_sums(spec.values()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn sorted(s: &Spectrum<f64>) -> Vec<(f64, f64)> {
        s.sorted().iter().map(|z| (z.re, z.im)).collect()
    }

    #[test]
    fn two_node_edge() {
        let spec = Spectrum::new(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(sorted(&predicted_spectrum_full(&spec, 1e-8).unwrap()), vec![(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        assert_eq!(sorted(&predicted_spectrum_s0(&spec, 1e-8).unwrap()), vec![(2.0, 0.0)]);
        assert_eq!(sorted(&predicted_spectrum_k(&spec, 1e-8).unwrap()), vec![(1.0, 0.0)]);
    }

    #[test]
    fn three_cycle_full_and_s0() {
        let h = 3f64.sqrt() / 2.0;
        let spec = Spectrum::new(vec![c(0.0, 0.0), c(1.5, h), c(1.5, -h)]);
        let full = sorted(&predicted_spectrum_full(&spec, 1e-8).unwrap());
        let want = [
            (0.0, 0.0),
            (0.0, 0.0),
            (0.0, 0.0),
            (1.5, -h),
            (1.5, h),
            (3.0, -2.0 * h),
            (3.0, 0.0),
            (3.0, 0.0),
            (3.0, 2.0 * h),
        ];
        assert_eq!(full.len(), 9);
        for (a, b) in full.iter().zip(want) {
            assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15, "{a:?} vs {b:?}");
        }
        let s0 = sorted(&predicted_spectrum_s0(&spec, 1e-8).unwrap());
        assert_eq!(s0.len(), 3);
        assert!((s0[0].1 + 2.0 * h).abs() < 1e-15 && s0[1] == (3.0, 0.0));
    }

    #[test]
    fn counting_identity() {
        for m in 2..=8usize {
            let spec = Spectrum::new((0..m).map(|k| c(k as f64, 0.5 * k as f64)).collect());
            assert_eq!(predicted_spectrum_full(&spec, 1e-8).unwrap().dimension(), m * m);
            assert_eq!(predicted_spectrum_s0(&spec, 1e-8).unwrap().dimension(), m * (m - 1) / 2);
            assert_eq!(predicted_spectrum_k(&spec, 1e-8).unwrap().dimension(), m * (m - 1) / 2);
            assert_eq!(pairwise_sums(&spec).dimension(), m * (m - 1) / 2);
        }
    }

    #[test]
    fn rank_deficiency_is_rejected() {
        let spec = Spectrum::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(
            predicted_spectrum_full(&spec, 1e-8).unwrap_err(),
            SpectraError::RankCondition { zeros: 2 }
        );
    }
}
