//! Exponential decay-rate estimation from simulated trajectories.

use std::fmt;

use num_complex::Complex;
use thiserror::Error;

use crate::dynamics::{initial_near_consensus, integrate_sphere, DynamicsError, IntegratorOptions, SphereConfiguration, Trajectory};
use crate::graph::{has_spanning_tree, laplacian, Digraph, DEFAULT_RANK_TOL};
use crate::scalar::Real;
use crate::spectra::{default_zero_tol, lambda2, laplacian_spectrum, SpectraError, SpectrumMethod};

/// Minimum number of samples inside a fit window.
pub const MIN_FIT_SAMPLES: usize = 10;
/// Observables below this are treated as round-off.
pub const DEFAULT_FLOOR: f64 = 1e-10;
/// Raw fits with `r²` below this are replaced by an upper-envelope fit.
pub const ENVELOPE_R2_THRESHOLD: f64 = 0.98;
/// Eigenvalue gap below which `λ₂` is flagged as possibly repeated.
pub const SIMPLE_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("fit window [{lo}, {hi}] is empty or inverted")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("only {found} usable samples in the fit window, need {needed}")]
    TooFewSamples { found: usize, needed: usize },
    #[error("observable is below the floor {floor:e} throughout the fit window; shorten t_end")]
    BelowFloor { floor: f64 },
    #[error("graph has no directed spanning tree")]
    NoSpanningTree,
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Ordinary least-squares fit of `ln y = intercept − μ t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub mu_hat: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

fn ols(points: &[(f64, f64)]) -> LogFit {
    let n = points.len() as f64;
    let (st, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(t, y)| (a + t, b + y));
    let (mt, my) = (st / n, sy / n);
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in points {
        let (dt, dy) = (t - mt, y - my);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    let slope = sty / stt;
    let intercept = my - slope * mt;
    let ss_res: f64 = points
        .iter()
        .map(|&(t, y)| {
            let r = y - (intercept + slope * t);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    LogFit {
        mu_hat: -slope,
        intercept,
        r_squared,
        n_points: points.len(),
    }
}

/// Samples of `(t, ln y)` with `t` in the window and `y` above `floor`.
fn log_points(samples: &[(f64, f64)], window: (f64, f64), floor: f64) -> Result<Vec<(f64, f64)>, RateError> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(RateError::EmptyWindow { lo, hi });
    }
    let inside: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(t, _)| t >= lo && t <= hi)
        .collect();
    let usable: Vec<(f64, f64)> = inside
        .iter()
        .filter(|&&(_, y)| y > floor && y.is_finite())
        .map(|&(t, y)| (t, y.ln()))
        .collect();
    if usable.is_empty() && !inside.is_empty() {
        return Err(RateError::BelowFloor { floor });
    }
    if usable.len() < MIN_FIT_SAMPLES {
        return Err(RateError::TooFewSamples {
            found: usable.len(),
            needed: MIN_FIT_SAMPLES,
        });
    }
    Ok(usable)
}

/// Least-squares fit of `ln y` against `t` over `window`, ignoring samples at
/// or below [`DEFAULT_FLOOR`].
pub fn fit_decay(samples: &[(f64, f64)], window: (f64, f64)) -> Result<LogFit, RateError> {
    fit_decay_with_floor(samples, window, DEFAULT_FLOOR)
}

pub fn fit_decay_with_floor(samples: &[(f64, f64)], window: (f64, f64), floor: f64) -> Result<LogFit, RateError> {
    Ok(ols(&log_points(samples, window, floor)?))
}

/// Fit through the local maxima of `ln y` only. Bounds oscillatory decay from
/// above; needs at least three maxima.
pub fn fit_envelope(samples: &[(f64, f64)], window: (f64, f64), floor: f64) -> Result<LogFit, RateError> {
    let pts = log_points(samples, window, floor)?;
    let peaks: Vec<(f64, f64)> = pts
        .windows(3)
        .filter(|w| w[1].1 >= w[0].1 && w[1].1 >= w[2].1)
        .map(|w| w[1])
        .collect();
    if peaks.len() < 3 {
        return Err(RateError::TooFewSamples {
            found: peaks.len(),
            needed: 3,
        });
    }
    Ok(ols(&peaks))
}

/// Number of harmonics of the ringing frequency used by [`fit_decay_harmonic`].
pub const RINGING_HARMONICS: usize = 3;

/// Solves the least-squares problem `min ‖X β − y‖` through the normal
/// equations; `X` is given row by row. Returns `None` if singular.
fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = rows.first()?.len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for (x, &yi) in rows.iter().zip(y) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += x[i] * x[j];
            }
            a[i][p] += x[i] * yi;
        }
    }
    for col in 0..p {
        let piv = (col..p).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..p {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=p {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..p).map(|i| a[i][p] / a[i][i]).collect())
}

/// Log-linear fit with periodic terms `cos(kωt)`, `sin(kωt)`, `k = 1..K`.
///
/// A complex slowest mode makes `ln y` a linear trend plus a periodic
/// function of period `2π/ω`; when the window holds too few periods for an
/// envelope fit, regressing the periodic part out removes the ringing bias
/// from the slope.
pub fn fit_decay_harmonic(
    samples: &[(f64, f64)],
    window: (f64, f64),
    floor: f64,
    omega: f64,
    harmonics: usize,
) -> Result<LogFit, RateError> {
    let pts = log_points(samples, window, floor)?;
    let needed = 2 + 2 * harmonics + MIN_FIT_SAMPLES;
    if pts.len() < needed {
        return Err(RateError::TooFewSamples { found: pts.len(), needed });
    }
    let t_mid = 0.5 * (window.0 + window.1);
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|&(t, _)| {
            let mut r = vec![1.0, t - t_mid];
            for k in 1..=harmonics {
                let (s, c) = (k as f64 * omega * t).sin_cos();
                r.extend([c, s]);
            }
            r
        })
        .collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let beta = least_squares(&rows, &y).ok_or(RateError::TooFewSamples { found: pts.len(), needed })?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for (x, &yi) in rows.iter().zip(&y) {
        let fit: f64 = x.iter().zip(&beta).map(|(a, b)| a * b).sum();
        ss_res += (yi - fit) * (yi - fit);
        ss_tot += (yi - mean) * (yi - mean);
    }
    Ok(LogFit {
        mu_hat: -beta[1],
        intercept: beta[0] - beta[1] * t_mid,
        r_squared: if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 },
        n_points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// `max_{i<j} ‖rᵢ − rⱼ‖`, predicted rate `Re λ₂`.
    StateError,
    /// `max_{i<j} eᵢⱼ`, predicted rate `2 Re λ₂`.
    ErrorEntry,
    /// Mean of `‖rᵢ − rⱼ‖` over pairs; diagnostic only.
    MeanStateError,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::StateError => "state_error",
            Observable::ErrorEntry => "error_entry",
            Observable::MeanStateError => "mean_state_error",
        }
    }

    /// Multiple of `Re λ₂` the observable is expected to decay at.
    pub fn rate_factor(self) -> f64 {
        match self {
            Observable::ErrorEntry => 2.0,
            _ => 1.0,
        }
    }

    pub fn eval<S: Real>(self, cfg: &SphereConfiguration<S>) -> f64 {
        match self {
            Observable::StateError => cfg.max_pairwise_distance().as_f64(),
            Observable::ErrorEntry => {
                let d = cfg.max_pairwise_distance().as_f64();
                0.5 * d * d
            }
            Observable::MeanStateError => cfg.mean_pairwise_distance().as_f64(),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    LeastSquares,
    Envelope,
    /// Least squares with periodic regressors at the ringing frequency.
    Harmonic,
}

impl FitKind {
    pub fn name(self) -> &'static str {
        match self {
            FitKind::LeastSquares => "least_squares",
            FitKind::Envelope => "envelope",
            FitKind::Harmonic => "harmonic",
        }
    }
}

/// A fitted decay exponent compared to its prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub mu_hat: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    /// Predicted rate for this observable (`Re λ₂` or `2 Re λ₂`).
    pub predicted: f64,
    pub relative_error: f64,
    pub quantity: Observable,
    pub fit: FitKind,
    pub n_points: usize,
    /// `r²` of the plain least-squares fit when another fit replaced it.
    pub raw_r_squared: Option<f64>,
    /// Angular frequency of the ringing removed by a harmonic fit.
    pub ringing_frequency: Option<f64>,
}

/// Fits one observable.
///
/// With `ringing = Some(ω)` the harmonic fit is used. Otherwise a plain
/// least-squares fit is tried and replaced by the upper-envelope fit when its
/// `r²` is below [`ENVELOPE_R2_THRESHOLD`].
pub fn estimate_rate(
    samples: &[(f64, f64)],
    window: (f64, f64),
    floor: f64,
    predicted: f64,
    quantity: Observable,
    ringing: Option<f64>,
) -> Result<RateEstimate, RateError> {
    let raw = fit_decay_with_floor(samples, window, floor)?;
    let (fit, kind, raw_r2) = match ringing {
        Some(omega) => (
            fit_decay_harmonic(samples, window, floor, omega, RINGING_HARMONICS)?,
            FitKind::Harmonic,
            Some(raw.r_squared),
        ),
        None if raw.r_squared < ENVELOPE_R2_THRESHOLD => match fit_envelope(samples, window, floor) {
            Ok(env) => (env, FitKind::Envelope, Some(raw.r_squared)),
            Err(_) => (raw, FitKind::LeastSquares, None),
        },
        None => (raw, FitKind::LeastSquares, None),
    };
    Ok(RateEstimate {
        mu_hat: fit.mu_hat,
        intercept: fit.intercept,
        window,
        r_squared: fit.r_squared,
        predicted,
        relative_error: (fit.mu_hat - predicted).abs() / predicted.abs(),
        quantity,
        fit: kind,
        n_points: fit.n_points,
        raw_r_squared: raw_r2,
        ringing_frequency: ringing,
    })
}

/// Settings for [`measure_sync_rate`]; `None` fields use the automatic
/// choices documented on each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    /// Initial geodesic spread around a random base point.
    pub spread: f64,
    /// Step size; default `1e−3 · min(1, 1/‖L‖∞)`.
    pub h: Option<f64>,
    /// Integration horizon; default `15 / Re λ₂`.
    pub t_end: Option<f64>,
    /// Fit window; default `[3 / Re λ₂, t_end]`, cut where the observable
    /// first drops below `floor`.
    pub window: Option<(f64, f64)>,
    pub floor: f64,
    pub max_samples: usize,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            spread: 0.05,
            h: None,
            t_end: None,
            window: None,
            floor: DEFAULT_FLOOR,
            max_samples: crate::dynamics::DEFAULT_MAX_SAMPLES,
        }
    }
}

/// Outcome of a full simulate-and-fit run.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncRateReport {
    pub lambda2: Complex<f64>,
    /// `false` when another Laplacian eigenvalue lies within [`SIMPLE_GAP`] of
    /// `λ₂`; fits may then be biased by polynomial prefactors.
    pub lambda2_simple: bool,
    pub state: RateEstimate,
    pub error: RateEstimate,
    /// Mean-over-pairs diagnostic; `None` if its fit failed.
    pub mean_state: Option<RateEstimate>,
    pub h: f64,
    pub t_end: f64,
    pub seed: u64,
}

/// Predicted `λ₂` and whether it is isolated from the rest of the spectrum.
pub fn predicted_lambda2<S: Real>(g: &Digraph<S>) -> Result<(Complex<f64>, bool), RateError> {
    let l = laplacian(g);
    let spec = laplacian_spectrum(&l, SpectrumMethod::Float)?.to_f64();
    let l2 = lambda2(&spec, default_zero_tol(&l))?;
    let close = spec.values().iter().filter(|z| (*z - l2).norm() <= SIMPLE_GAP).count();
    Ok((l2, close == 1))
}

/// Series `(t, observable)` along a trajectory.
pub fn observable_series<S: Real>(tr: &Trajectory<SphereConfiguration<S>>, q: Observable) -> Vec<(f64, f64)> {
    tr.iter().map(|(t, c)| (t, q.eval(c))).collect()
}

fn auto_window(series: &[(f64, f64)], lo: f64, hi: f64, floor: f64) -> (f64, f64) {
    let cut = series
        .iter()
        .find(|&&(t, y)| t >= lo && y <= floor)
        .map_or(hi, |&(t, _)| t);
    (lo, hi.min(cut))
}

/// Simulates from a near-consensus start and fits the decay of the
/// pairwise state distance and of the error entries.
pub fn measure_sync_rate<S: Real>(
    g: &Digraph<S>,
    n: usize,
    seed: u64,
    opts: &RateOptions,
) -> Result<SyncRateReport, RateError> {
    if !has_spanning_tree(g, S::c(DEFAULT_RANK_TOL)) {
        return Err(RateError::NoSpanningTree);
    }
    let (l2, simple) = predicted_lambda2(g)?;
    let re = l2.re;
    let h = opts.h.unwrap_or_else(|| IntegratorOptions::default_step(g));
    let t_end = opts.t_end.unwrap_or(15.0 / re);
    let cfg0 = initial_near_consensus::<S>(g.m(), n, opts.spread, seed)?;
    let mut io = IntegratorOptions::new(h, t_end);
    io.max_samples = opts.max_samples;
    let tr = integrate_sphere(g, &cfg0, &io)?;

    // The floor applies to the state distance; error entries are computed as
    // ½‖rᵢ − rⱼ‖² without cancellation, so their floor is ½·floor².
    let distance = observable_series(&tr, Observable::StateError);
    let window = opts
        .window
        .unwrap_or_else(|| auto_window(&distance, 3.0 / re, t_end, opts.floor));
    // A complex λ₂ = μ ± iω makes squared distances ring at 2ω.
    let ringing = (l2.im.abs() > SIMPLE_GAP).then_some(2.0 * l2.im.abs());
    let fit = |q: Observable| {
        let floor = match q {
            Observable::ErrorEntry => 0.5 * opts.floor * opts.floor,
            _ => opts.floor,
        };
        estimate_rate(&observable_series(&tr, q), window, floor, q.rate_factor() * re, q, ringing)
    };
    Ok(SyncRateReport {
        lambda2: l2,
        lambda2_simple: simple,
        state: fit(Observable::StateError)?,
        error: fit(Observable::ErrorEntry)?,
        mean_state: fit(Observable::MeanStateError).ok(),
        h: tr.meta.h,
        t_end,
        seed,
    })
}
