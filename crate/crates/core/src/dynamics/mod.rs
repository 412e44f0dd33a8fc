//! Sphere-constrained consensus flow and its pairwise error dynamics.
//!
//! Agents are unit vectors `rᵢ ∈ 𝐒ⁿ⁻¹` moving by
//!
//! ```text
//! ṙᵢ = Σⱼ aᵢⱼ (rⱼ − (rᵢᵀrⱼ) rᵢ)
//! ```
//!
//! and the errors `eᵢⱼ = 1 − rᵢᵀrⱼ = ½‖rᵢ − rⱼ‖²` obey a closed matrix
//! Riccati equation (see [`riccati_rhs`]).

mod init;
mod integrate;

pub use init::{initial_in_clusters, initial_near_consensus};
pub use integrate::{
    integrate_phases, integrate_riccati, integrate_sphere, phase_rhs, IntegratorOptions, Trajectory, TrajectoryMeta,
    DEFAULT_MAX_SAMPLES,
};

use thiserror::Error;

use crate::graph::{laplacian, Digraph};
use crate::linalg::{LinalgError, Matrix};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("step size must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("end time must be positive and finite, got {0}")]
    BadEndTime(f64),
    #[error("spread must lie in [0, π/2), got {0}")]
    BadSpread(f64),
    #[error("ambient dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("graph has {graph} nodes but state has {state}")]
    SizeMismatch { graph: usize, state: usize },
    #[error("state {index} has norm {norm}, not on the unit sphere")]
    OffSphere { index: usize, norm: f64 },
    #[error("not a valid error matrix: {0}")]
    BadErrorMatrix(&'static str),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `m` unit vectors in `ℝⁿ`, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereConfiguration<S> {
    states: Matrix<S>,
    pub time: f64,
}

/// Largest allowed `|‖rᵢ‖ − 1|` when constructing a configuration.
pub const SPHERE_TOL: f64 = 1e-9;

impl<S: Real> SphereConfiguration<S> {
    pub fn new(states: Matrix<S>, time: f64) -> Result<Self, DynamicsError> {
        if states.cols() < 2 {
            return Err(DynamicsError::BadDimension(states.cols()));
        }
        for i in 0..states.rows() {
            let norm = norm(states.row(i)).as_f64();
            if (norm - 1.0).abs() > SPHERE_TOL || !norm.is_finite() {
                return Err(DynamicsError::OffSphere { index: i, norm });
            }
        }
        Ok(Self { states, time })
    }

    /// Normalizes each row instead of rejecting it.
    pub fn projected(mut states: Matrix<S>, time: f64) -> Result<Self, DynamicsError> {
        renormalize(&mut states);
        Self::new(states, time)
    }

    pub fn m(&self) -> usize {
        self.states.rows()
    }

    pub fn n(&self) -> usize {
        self.states.cols()
    }

    pub fn states(&self) -> &Matrix<S> {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[S] {
        self.states.row(i)
    }

    /// `max_{i<j} ‖rᵢ − rⱼ‖`.
    pub fn max_pairwise_distance(&self) -> S {
        self.pair_distances().fold(S::zero(), S::max)
    }

    pub fn mean_pairwise_distance(&self) -> S {
        let (sum, count) = self.pair_distances().fold((S::zero(), 0usize), |(s, c), d| (s + d, c + 1));
        if count == 0 {
            S::zero()
        } else {
            sum / S::c(count as f64)
        }
    }

    fn pair_distances(&self) -> impl Iterator<Item = S> + '_ {
        let m = self.m();
        (0..m).flat_map(move |i| (i + 1..m).map(move |j| distance(self.state(i), self.state(j))))
    }

    /// Angle of each state in the plane; only meaningful for `n = 2`.
    pub fn phases(&self) -> Vec<S> {
        (0..self.m()).map(|i| self.state(i)[1].atan2(self.state(i)[0])).collect()
    }

    /// States `(cos θᵢ, sin θᵢ)`.
    pub fn from_phases(theta: &[S], time: f64) -> Self {
        let states = Matrix::from_fn(theta.len(), 2, |i, k| if k == 0 { theta[i].cos() } else { theta[i].sin() });
        Self { states, time }
    }
}

pub(crate) fn dot<S: Real>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm<S: Real>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

fn distance_sq<S: Real>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

fn distance<S: Real>(a: &[S], b: &[S]) -> S {
    distance_sq(a, b).sqrt()
}

/// Normalizes every row; returns the largest `|‖rᵢ‖ − 1|` before the fix.
pub(crate) fn renormalize<S: Real>(states: &mut Matrix<S>) -> f64 {
    let (m, n) = states.shape();
    let mut worst = 0.0f64;
    for i in 0..m {
        let nrm = norm(states.row(i));
        worst = worst.max((nrm.as_f64() - 1.0).abs());
        for k in 0..n {
            states[(i, k)] = states[(i, k)] / nrm;
        }
    }
    worst
}

/// Symmetric hollow matrix with entries in `[0, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMatrix<S> {
    entries: Matrix<S>,
    pub time: f64,
}

impl<S: Real> ErrorMatrix<S> {
    /// Validates symmetry, zero diagonal and the range `[0, 2]`, each to `tol`.
    pub fn new(entries: Matrix<S>, time: f64, tol: f64) -> Result<Self, DynamicsError> {
        if !entries.is_square() {
            return Err(DynamicsError::BadErrorMatrix("not square"));
        }
        if !entries.is_finite() {
            return Err(DynamicsError::BadErrorMatrix("non-finite entry"));
        }
        let m = entries.rows();
        for i in 0..m {
            if entries[(i, i)].as_f64().abs() > tol {
                return Err(DynamicsError::BadErrorMatrix("nonzero diagonal"));
            }
            for j in 0..m {
                let e = entries[(i, j)].as_f64();
                if (e - entries[(j, i)].as_f64()).abs() > tol {
                    return Err(DynamicsError::BadErrorMatrix("not symmetric"));
                }
                if e < -tol || e > 2.0 + tol {
                    return Err(DynamicsError::BadErrorMatrix("entry outside [0, 2]"));
                }
            }
        }
        Ok(Self { entries, time })
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            entries: Matrix::zeros(m, m),
            time: 0.0,
        }
    }

    pub fn entries(&self) -> &Matrix<S> {
        &self.entries
    }

    pub fn m(&self) -> usize {
        self.entries.rows()
    }

    pub fn max_entry(&self) -> S {
        self.entries.as_slice().iter().copied().fold(S::zero(), S::max)
    }

    /// Upper-triangle entries `e_{0,1}, e_{0,2}, …` in lexicographic order.
    pub fn upper(&self) -> Vec<S> {
        let m = self.m();
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .map(|(i, j)| self.entries[(i, j)])
            .collect()
    }
}

/// Right-hand side of the sphere flow; every output row is tangent to the
/// sphere at the corresponding state.
pub fn sphere_rhs<S: Real>(g: &Digraph<S>, cfg: &SphereConfiguration<S>) -> Result<Matrix<S>, DynamicsError> {
    check_size(g, cfg.m())?;
    Ok(sphere_field(g.weights(), cfg.states()))
}

fn sphere_field<S: Real>(a: &Matrix<S>, r: &Matrix<S>) -> Matrix<S> {
    let (m, n) = r.shape();
    let mut v = Matrix::zeros(m, n);
    for i in 0..m {
        let ri = r.row(i);
        for j in 0..m {
            let w = a[(i, j)];
            if w.is_zero() {
                continue;
            }
            let rj = r.row(j);
            let c = dot(ri, rj);
            for k in 0..n {
                v[(i, k)] = v[(i, k)] + w * (rj[k] - c * ri[k]);
            }
        }
    }
    v
}

fn check_size<S: Real>(g: &Digraph<S>, m: usize) -> Result<(), DynamicsError> {
    if g.m() != m {
        return Err(DynamicsError::SizeMismatch { graph: g.m(), state: m });
    }
    Ok(())
}

/// `eᵢⱼ = ½‖rᵢ − rⱼ‖²`, equal to `1 − rᵢᵀrⱼ` on the sphere but free of
/// cancellation near consensus.
pub fn error_from_states<S: Real>(cfg: &SphereConfiguration<S>) -> ErrorMatrix<S> {
    let m = cfg.m();
    let half = S::c(0.5);
    let entries = Matrix::from_fn(m, m, |i, j| {
        if i == j {
            S::zero()
        } else {
            half * distance_sq(cfg.state(i), cfg.state(j))
        }
    });
    ErrorMatrix {
        entries,
        time: cfg.time,
    }
}

/// `1 − rᵢᵀrⱼ` evaluated literally.
pub fn error_from_inner_products<S: Real>(cfg: &SphereConfiguration<S>) -> Matrix<S> {
    let m = cfg.m();
    Matrix::from_fn(m, m, |i, j| S::one() - dot(cfg.state(i), cfg.state(j)))
}

/// Riccati right-hand side
///
/// ```text
/// Ė = −LE − ELᵀ − α𝟙ᵀ − 𝟙αᵀ + ΛE + EΛ,   αᵢ = Σₗ aᵢₗ eᵢₗ,   Λ = diag(α).
/// ```
pub fn riccati_rhs<S: Real>(g: &Digraph<S>, e: &ErrorMatrix<S>) -> Result<Matrix<S>, DynamicsError> {
    check_size(g, e.m())?;
    let l = laplacian(g);
    Ok(riccati_field(g.weights(), l.matrix(), e.entries()))
}

fn riccati_field<S: Real>(a: &Matrix<S>, l: &Matrix<S>, e: &Matrix<S>) -> Matrix<S> {
    let m = e.rows();
    let alpha: Vec<S> = (0..m)
        .map(|i| (0..m).fold(S::zero(), |acc, k| acc + a[(i, k)] * e[(i, k)]))
        .collect();
    let le = l.matmul(e).expect("m × m");
    let elt = e.matmul(&l.transpose()).expect("m × m");
    Matrix::from_fn(m, m, |i, j| {
        -le[(i, j)] - elt[(i, j)] - alpha[i] - alpha[j] + (alpha[i] + alpha[j]) * e[(i, j)]
    })
}
