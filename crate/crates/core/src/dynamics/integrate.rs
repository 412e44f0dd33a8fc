use super::{check_size, renormalize, riccati_field, sphere_field, DynamicsError, ErrorMatrix, SphereConfiguration};
use crate::graph::{laplacian, Digraph};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Default cap on the number of stored samples.
pub const DEFAULT_MAX_SAMPLES: usize = 2000;

/// Fixed-step classical RK4 settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub h: f64,
    pub t_end: f64,
    /// Record every `k`-th step; `None` picks `⌈steps / max_samples⌉`.
    pub sample_every: Option<usize>,
    pub max_samples: usize,
}

impl IntegratorOptions {
    pub fn new(h: f64, t_end: f64) -> Self {
        Self {
            h,
            t_end,
            sample_every: None,
            max_samples: DEFAULT_MAX_SAMPLES,
        }
    }

    pub fn every(mut self, k: usize) -> Self {
        self.sample_every = Some(k.max(1));
        self
    }

    /// `1e−3 · min(1, 1/‖L‖∞)`.
    pub fn default_step<S: Real>(g: &Digraph<S>) -> f64 {
        let norm = laplacian(g).matrix().norm_inf();
        1e-3 * if norm > 1.0 { 1.0 / norm } else { 1.0 }
    }

    /// Number of steps; the step is shrunk slightly so the grid ends exactly
    /// at `t_end`.
    fn grid(&self) -> Result<(usize, f64), DynamicsError> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(DynamicsError::BadStep(self.h));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(DynamicsError::BadEndTime(self.t_end));
        }
        let steps = ((self.t_end / self.h) - 1e-9).ceil().max(1.0) as usize;
        Ok((steps, self.t_end / steps as f64))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub h: f64,
    pub steps: usize,
    pub sample_every: usize,
    /// Largest per-step projection correction: norm drift for sphere runs,
    /// asymmetry/diagonal drift for Riccati runs.
    pub max_correction: f64,
    pub seed: Option<u64>,
}

/// Samples on a uniform time grid (the final time is always included).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<f64>,
    pub samples: Vec<T>,
    pub meta: TrajectoryMeta,
}

impl<T> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&T> {
        self.samples.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &T)> {
        self.times.iter().copied().zip(&self.samples)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.meta.seed = Some(seed);
        self
    }
}

fn lincomb<S: Real>(x: &Matrix<S>, c: S, k: &Matrix<S>) -> Matrix<S> {
    let mut out = x.clone();
    for (o, &kv) in out.as_mut_slice().iter_mut().zip(k.as_slice()) {
        *o = *o + c * kv;
    }
    out
}

fn rk4_step<S: Real>(x: &Matrix<S>, h: S, f: &impl Fn(&Matrix<S>) -> Matrix<S>) -> Matrix<S> {
    let half = h * S::c(0.5);
    let k1 = f(x);
    let k2 = f(&lincomb(x, half, &k1));
    let k3 = f(&lincomb(x, half, &k2));
    let k4 = f(&lincomb(x, h, &k3));
    let sixth = h / S::c(6.0);
    let mut out = x.clone();
    for (i, o) in out.as_mut_slice().iter_mut().enumerate() {
        let (a, b, c, d) = (k1.as_slice()[i], k2.as_slice()[i], k3.as_slice()[i], k4.as_slice()[i]);
        *o = *o + sixth * (a + S::c(2.0) * (b + c) + d);
    }
    out
}

fn drive<S: Real, T>(
    x0: Matrix<S>,
    opts: &IntegratorOptions,
    rhs: impl Fn(&Matrix<S>) -> Matrix<S>,
    mut project: impl FnMut(&mut Matrix<S>) -> f64,
    wrap: impl Fn(&Matrix<S>, f64) -> T,
) -> Result<Trajectory<T>, DynamicsError> {
    let (steps, h) = opts.grid()?;
    let every = opts
        .sample_every
        .unwrap_or_else(|| steps.div_ceil(opts.max_samples.max(1)))
        .max(1);
    let mut times = vec![0.0];
    let mut samples = vec![wrap(&x0, 0.0)];
    let mut x = x0;
    let mut max_correction = 0.0f64;
    let hs = S::c(h);
    for k in 1..=steps {
        x = rk4_step(&x, hs, &rhs);
        let t = k as f64 * h;
        if !x.is_finite() {
            return Err(DynamicsError::NonFinite { t });
        }
        max_correction = max_correction.max(project(&mut x));
        if k % every == 0 || k == steps {
            times.push(t);
            samples.push(wrap(&x, t));
        }
    }
    Ok(Trajectory {
        times,
        samples,
        meta: TrajectoryMeta {
            h,
            steps,
            sample_every: every,
            max_correction,
            seed: None,
        },
    })
}

/// RK4 on the sphere flow, renormalizing every state after each step.
pub fn integrate_sphere<S: Real>(
    g: &Digraph<S>,
    cfg0: &SphereConfiguration<S>,
    opts: &IntegratorOptions,
) -> Result<Trajectory<SphereConfiguration<S>>, DynamicsError> {
    check_size(g, cfg0.m())?;
    let a = g.weights();
    let t0 = cfg0.time;
    drive(
        cfg0.states().clone(),
        opts,
        |r| sphere_field(a, r),
        renormalize,
        |r, t| SphereConfiguration {
            states: r.clone(),
            time: t0 + t,
        },
    )
}

/// Restores exact symmetry and a zero diagonal; returns the size of the fix.
fn symmetrize<S: Real>(e: &mut Matrix<S>) -> f64 {
    let m = e.rows();
    let mut worst = 0.0f64;
    let half = S::c(0.5);
    for i in 0..m {
        worst = worst.max(e[(i, i)].as_f64().abs());
        e[(i, i)] = S::zero();
        for j in i + 1..m {
            let avg = half * (e[(i, j)] + e[(j, i)]);
            worst = worst.max((e[(i, j)] - avg).as_f64().abs());
            e[(i, j)] = avg;
            e[(j, i)] = avg;
        }
    }
    worst
}

/// RK4 on the Riccati error flow, re-symmetrizing after each step.
pub fn integrate_riccati<S: Real>(
    g: &Digraph<S>,
    e0: &ErrorMatrix<S>,
    opts: &IntegratorOptions,
) -> Result<Trajectory<ErrorMatrix<S>>, DynamicsError> {
    check_size(g, e0.m())?;
    let a = g.weights();
    let l = laplacian(g);
    let t0 = e0.time;
    drive(
        e0.entries().clone(),
        opts,
        |e| riccati_field(a, l.matrix(), e),
        symmetrize,
        |e, t| ErrorMatrix {
            entries: e.clone(),
            time: t0 + t,
        },
    )
}

/// `θ̇ᵢ = Σⱼ aᵢⱼ sin(θⱼ − θᵢ)`.
pub fn phase_rhs<S: Real>(g: &Digraph<S>, theta: &[S]) -> Vec<S> {
    let m = g.m();
    (0..m)
        .map(|i| {
            (0..m).fold(S::zero(), |acc, j| {
                let w = *g.weight(i, j);
                if w.is_zero() {
                    acc
                } else {
                    acc + w * (theta[j] - theta[i]).sin()
                }
            })
        })
        .collect()
}

/// RK4 on the scalar phase model (identical oscillators, unit coupling).
pub fn integrate_phases<S: Real>(
    g: &Digraph<S>,
    theta0: &[S],
    opts: &IntegratorOptions,
) -> Result<Trajectory<Vec<S>>, DynamicsError> {
    check_size(g, theta0.len())?;
    let m = theta0.len();
    let x0 = Matrix::from_row_major(m, 1, theta0.to_vec())?;
    drive(
        x0,
        opts,
        |x| Matrix::from_row_major(m, 1, phase_rhs(g, x.as_slice())).expect("m × 1"),
        |_| 0.0,
        |x, _| x.as_slice().to_vec(),
    )
}
