use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{DynamicsError, SphereConfiguration};
use crate::linalg::Matrix;
use crate::scalar::Real;

fn gaussian_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn tangent_unit(rng: &mut ChaCha8Rng, base: &[f64]) -> Vec<f64> {
    loop {
        let v = gaussian_unit(rng, base.len());
        let c: f64 = v.iter().zip(base).map(|(x, y)| x * y).sum();
        let t: Vec<f64> = v.iter().zip(base).map(|(x, y)| x - c * y).collect();
        let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return t.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn check_args(n: usize, spread: f64) -> Result<(), DynamicsError> {
    if n < 2 {
        return Err(DynamicsError::BadDimension(n));
    }
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&spread) {
        return Err(DynamicsError::BadSpread(spread));
    }
    Ok(())
}

/// Points scattered around per-cluster base points drawn uniformly on the
/// sphere; `labels[i]` is the cluster of agent `i`.
fn scatter<S: Real>(
    rng: &mut ChaCha8Rng,
    labels: &[usize],
    n: usize,
    spread: f64,
) -> Result<SphereConfiguration<S>, DynamicsError> {
    let clusters = labels.iter().copied().max().map_or(0, |k| k + 1);
    let bases: Vec<Vec<f64>> = (0..clusters).map(|_| gaussian_unit(rng, n)).collect();
    let mut rows = Vec::with_capacity(labels.len() * n);
    for &k in labels {
        let base = &bases[k];
        let dir = tangent_unit(rng, base);
        let theta = if spread > 0.0 { rng.random_range(0.0..=spread) } else { 0.0 };
        let (s, c) = theta.sin_cos();
        rows.extend(base.iter().zip(&dir).map(|(b, d)| S::c(c * b + s * d)));
    }
    SphereConfiguration::projected(Matrix::from_row_major(labels.len(), n, rows)?, 0.0)
}

/// `m` points within geodesic distance `spread` of a random base point.
///
/// Each point is `cos θ · b + sin θ · d` with `θ ~ U[0, spread]` and `d` a
/// random unit tangent at `b`. `spread = 0` gives exact consensus.
pub fn initial_near_consensus<S: Real>(
    m: usize,
    n: usize,
    spread: f64,
    seed: u64,
) -> Result<SphereConfiguration<S>, DynamicsError> {
    check_args(n, spread)?;
    scatter(&mut ChaCha8Rng::seed_from_u64(seed), &vec![0; m], n, spread)
}

/// Like [`initial_near_consensus`], but each cluster label gets its own
/// independent base point.
pub fn initial_in_clusters<S: Real>(
    labels: &[usize],
    n: usize,
    spread: f64,
    seed: u64,
) -> Result<SphereConfiguration<S>, DynamicsError> {
    check_args(n, spread)?;
    scatter(&mut ChaCha8Rng::seed_from_u64(seed), labels, n, spread)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_within_spread() {
        let a = initial_near_consensus::<f64>(6, 3, 0.2, 11).unwrap();
        let b = initial_near_consensus::<f64>(6, 3, 0.2, 11).unwrap();
        assert_eq!(a, b);
        for i in 0..6 {
            for j in 0..6 {
                let c: f64 = a.state(i).iter().zip(a.state(j)).map(|(x, y)| x * y).sum();
                assert!(c.clamp(-1.0, 1.0).acos() <= 0.4 + 1e-12);
            }
        }
        assert_ne!(a, initial_near_consensus::<f64>(6, 3, 0.2, 12).unwrap());
    }

    #[test]
    fn zero_spread_is_consensus() {
        let a = initial_near_consensus::<f64>(4, 5, 0.0, 3).unwrap();
        assert!(a.max_pairwise_distance() == 0.0);
    }

    #[test]
    fn one_cluster_is_near_consensus() {
        let a = initial_near_consensus::<f64>(5, 3, 0.2, 8).unwrap();
        let b = initial_in_clusters::<f64>(&[0; 5], 3, 0.2, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn clusters_are_tight_and_separate() {
        let labels = [0, 0, 1, 1, 1];
        let c = initial_in_clusters::<f64>(&labels, 3, 0.0, 5).unwrap();
        assert_eq!(c.state(0), c.state(1));
        assert_eq!(c.state(2), c.state(4));
        assert_ne!(c.state(0), c.state(2));
    }

    #[test]
    fn bad_arguments() {
        assert!(initial_near_consensus::<f64>(3, 1, 0.1, 0).is_err());
        assert!(initial_near_consensus::<f64>(3, 3, 1.6, 0).is_err());
        assert!(initial_near_consensus::<f64>(3, 3, -0.1, 0).is_err());
    }
}
