use crate::linalg::Matrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 60;

/// Singular values in descending order (one-sided Jacobi).
pub fn singular_values<S: Real>(a: &Matrix<S>) -> Vec<S> {
    // Work on the orientation with fewer columns.
    let work = if a.cols() > a.rows() { a.transpose() } else { a.clone() };
    let (rows, cols) = work.shape();
    let mut cols_data: Vec<Vec<S>> = (0..cols)
        .map(|j| (0..rows).map(|i| work[(i, j)]).collect())
        .collect();
    let eps = S::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (alpha, beta, gamma) = cols_data[p].iter().zip(&cols_data[q]).fold(
                    (S::zero(), S::zero(), S::zero()),
                    |(a, b, g), (&x, &y)| (a + x * x, b + y * y, g + x * y),
                );
                if gamma.is_zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (S::c(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (S::one() + zeta * zeta).sqrt());
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols_data.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<S> = cols_data
        .iter()
        .map(|c| c.iter().fold(S::zero(), |acc, &x| acc + x * x).sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Numerical rank: singular values above `rel_tol · σ_max`.
pub fn rank<S: Real>(a: &Matrix<S>, rel_tol: S) -> usize {
    let sv = singular_values(a);
    let Some(&smax) = sv.first() else { return 0 };
    if smax.is_zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_singular_values() {
        let a = Matrix::from_rows(&[vec![3.0f64, 0.0], vec![0.0, -4.0]]).unwrap();
        let sv = singular_values(&a);
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rank_of_outer_product() {
        let a = Matrix::from_fn(4, 3, |i, j| (i as f64 + 1.0) * (j as f64 - 0.5));
        assert_eq!(rank(&a, 1e-9), 1);
        assert_eq!(rank(&Matrix::<f64>::zeros(3, 3), 1e-9), 0);
        assert_eq!(rank(&Matrix::<f64>::identity(5), 1e-9), 5);
    }

    #[test]
    fn wide_matrix_matches_transpose() {
        let a = Matrix::from_fn(2, 5, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let s1 = singular_values(&a);
        let s2 = singular_values(&a.transpose());
        for (x, y) in s1.iter().zip(&s2) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
