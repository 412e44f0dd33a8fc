//! Eigenvalues of general real matrices.
//!
//! Permutation and diagonal balancing, Householder reduction to upper
//! Hessenberg form, then Francis double-shift QR. Only eigenvalues are
//! computed.

use num_complex::Complex;

use crate::linalg::{LinalgError, Matrix};
use crate::scalar::Real;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 100;

/// All eigenvalues of a square real matrix, with algebraic multiplicity.
pub fn eigenvalues<S: Real>(a: &Matrix<S>) -> Result<Vec<Complex<S>>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.shape()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let mut h = a.clone();
    let active = balance(&mut h);

    let mut out = Vec::with_capacity(n);
    let (low, high) = active.unwrap_or((n, n - 1));
    for i in (0..low).chain(high + 1..n) {
        out.push(Complex::new(h[(i, i)], S::zero()));
    }
    if active.is_some() {
        let mut core = h.submatrix(low, high + 1, low, high + 1);
        hessenberg_in_place(&mut core);
        out.extend(hessenberg_qr(&mut core)?);
    }
    Ok(out)
}

/// Isolates eigenvalues by permutation and equilibrates row and column norms
/// of the remaining block with powers of two. Returns the active range
/// `[low, high]`, or `None` when the whole matrix was permuted to triangular
/// form.
fn balance<S: Real>(a: &mut Matrix<S>) -> Option<(usize, usize)> {
    let n = a.rows();
    let mut low = 0usize;
    let mut high = n - 1;

    // Rows with no off-diagonal entries in the active columns go to the bottom.
    'rows: loop {
        for j in (0..=high).rev() {
            let isolated = (0..=high).all(|i| i == j || a[(j, i)].is_zero());
            if isolated {
                swap_symmetric(a, j, high);
                if high == 0 {
                    return None;
                }
                high -= 1;
                continue 'rows;
            }
        }
        break;
    }

    // Columns with no off-diagonal entries in the active rows go to the left.
    'cols: loop {
        for j in low..=high {
            let isolated = (low..=high).all(|i| i == j || a[(i, j)].is_zero());
            if isolated {
                swap_symmetric(a, j, low);
                low += 1;
                if low > high {
                    return None;
                }
                continue 'cols;
            }
        }
        break;
    }

    let radix = S::c(2.0);
    let sqr = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in low..=high {
            let mut c = S::zero();
            let mut r = S::zero();
            for j in low..=high {
                if j != i {
                    c = c + a[(j, i)].abs();
                    r = r + a[(i, j)].abs();
                }
            }
            if c.is_zero() || r.is_zero() {
                continue;
            }
            let s = c + r;
            let mut g = r / radix;
            let mut f = S::one();
            while c < g {
                f = f * radix;
                c = c * sqr;
            }
            g = r * radix;
            while c > g {
                f = f / radix;
                c = c / sqr;
            }
            if (c + r) / f < S::c(0.95) * s {
                done = false;
                let inv = S::one() / f;
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] * inv;
                }
                for j in 0..n {
                    a[(j, i)] = a[(j, i)] * f;
                }
            }
        }
    }
    Some((low, high))
}

fn swap_symmetric<S: Real>(a: &mut Matrix<S>, p: usize, q: usize) {
    if p == q {
        return;
    }
    let n = a.rows();
    for k in 0..n {
        let t = a[(p, k)];
        a[(p, k)] = a[(q, k)];
        a[(q, k)] = t;
    }
    for k in 0..n {
        let t = a[(k, p)];
        a[(k, p)] = a[(k, q)];
        a[(k, q)] = t;
    }
}

/// Orthogonal similarity to upper Hessenberg form (Householder).
pub(crate) fn hessenberg_in_place<S: Real>(h: &mut Matrix<S>) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let mut ort = vec![S::zero(); n];
    for m in 1..n - 1 {
        let scale = (m..n).fold(S::zero(), |acc, i| acc + h[(i, m - 1)].abs());
        if scale.is_zero() {
            continue;
        }
        let mut hh = S::zero();
        for i in (m..n).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh = hh + ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > S::zero() {
            g = -g;
        }
        hh = hh - ort[m] * g;
        ort[m] = ort[m] - g;

        for j in m..n {
            let mut f = S::zero();
            for i in (m..n).rev() {
                f = f + ort[i] * h[(i, j)];
            }
            f = f / hh;
            for i in m..n {
                h[(i, j)] = h[(i, j)] - f * ort[i];
            }
        }
        for i in 0..n {
            let mut f = S::zero();
            for j in (m..n).rev() {
                f = f + ort[j] * h[(i, j)];
            }
            f = f / hh;
            for j in m..n {
                h[(i, j)] = h[(i, j)] - f * ort[j];
            }
        }
        ort[m] = scale * ort[m];
        h[(m, m - 1)] = scale * g;
        for i in m + 1..n {
            h[(i, m - 1)] = S::zero();
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
/// The input is destroyed.
pub(crate) fn hessenberg_qr<S: Real>(h: &mut Matrix<S>) -> Result<Vec<Complex<S>>, LinalgError> {
    let nn = h.rows();
    let zero = S::zero();
    let eps = S::epsilon();
    let mut re = vec![zero; nn];
    let mut im = vec![zero; nn];

    let mut norm = zero;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm = norm + h[(i, j)].abs();
        }
    }

    let mut n = nn as isize - 1;
    let mut exshift = zero;
    let mut iter = 0usize;
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut w, mut x, mut y);

    while n >= 0 {
        let nu = n as usize;
        // Find a negligible subdiagonal entry.
        let mut l = nu;
        while l > 0 {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s.is_zero() {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            re[nu] = h[(nu, nu)] + exshift;
            im[nu] = zero;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / S::c(2.0);
            q = p * p + w;
            z = q.abs().sqrt();
            h[(nu, nu)] = h[(nu, nu)] + exshift;
            h[(nu - 1, nu - 1)] = h[(nu - 1, nu - 1)] + exshift;
            x = h[(nu, nu)];
            if q >= zero {
                z = if p >= zero { p + z } else { p - z };
                re[nu - 1] = x + z;
                re[nu] = re[nu - 1];
                if !z.is_zero() {
                    re[nu] = x - w / z;
                }
                im[nu - 1] = zero;
                im[nu] = zero;
            } else {
                re[nu - 1] = x + p;
                re[nu] = x + p;
                im[nu - 1] = z;
                im[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[(nu, nu)];
            y = zero;
            w = zero;
            if l < nu {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }

            // Exceptional shifts break cycles of the standard shift.
            if iter == 10 {
                exshift = exshift + x;
                for i in 0..=nu {
                    h[(i, i)] = h[(i, i)] - x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = S::c(0.75) * s;
                y = x;
                w = S::c(-0.4375) * s * s;
            }
            if iter == 30 {
                s = (y - x) / S::c(2.0);
                s = s * s + w;
                if s > zero {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / S::c(2.0) + s);
                    for i in 0..=nu {
                        h[(i, i)] = h[(i, i)] - s;
                    }
                    exshift = exshift + s;
                    x = S::c(0.964);
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            if iter > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(LinalgError::NoConvergence {
                    remaining: nu + 1,
                    iterations: iter,
                });
            }

            // Look for two consecutive small subdiagonal entries.
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == l {
                    break;
                }
                let lhs = h[(m, m - 1)].abs() * (q.abs() + r.abs());
                let rhs = eps * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()));
                if lhs < rhs {
                    break;
                }
                m -= 1;
            }

            for i in m + 2..=nu {
                h[(i, i - 2)] = zero;
                if i > m + 2 {
                    h[(i, i - 3)] = zero;
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            let mut k = m;
            while k < nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { zero };
                    x = p.abs() + q.abs() + r.abs();
                    if x.is_zero() {
                        k += 1;
                        continue;
                    }
                    p = p / x;
                    q = q / x;
                    r = r / x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < zero {
                    s = -s;
                }
                if !s.is_zero() {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p = p + s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q = q / p;
                    r = r / p;

                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p = p + r * h[(k + 2, j)];
                            h[(k + 2, j)] = h[(k + 2, j)] - p * z;
                        }
                        h[(k, j)] = h[(k, j)] - p * x;
                        h[(k + 1, j)] = h[(k + 1, j)] - p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p = p + z * h[(i, k + 2)];
                            h[(i, k + 2)] = h[(i, k + 2)] - p * r;
                        }
                        h[(i, k)] = h[(i, k)] - p;
                        h[(i, k + 1)] = h[(i, k + 1)] - p * q;
                    }
                }
                k += 1;
            }
        }
    }

    Ok(re.into_iter().zip(im).map(|(a, b)| Complex::new(a, b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn zero_matrix() {
        let ev = eigenvalues(&Matrix::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(ev.len(), 3);
        assert!(ev.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let a = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let ev = sorted(eigenvalues(&a).unwrap());
        assert!((ev[0] - Complex::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - Complex::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn triangular_input_is_read_off_exactly() {
        let a = Matrix::from_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![-1.0, 1.0, 0.0, 0.0],
            vec![0.0, -1.0, 1.0, 0.0],
            vec![0.0, 0.0, -1.0, 1.0],
        ])
        .unwrap();
        let ev = eigenvalues(&a).unwrap();
        assert!(ev.iter().all(|z| *z == Complex::new(1.0, 0.0)));
    }

    #[test]
    fn companion_of_known_cubic() {
        // (x - 1)(x - 2)(x + 3) = x^3 - 7x + 6
        let a = Matrix::from_rows(&[
            vec![0.0, 7.0, -6.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let ev = sorted(eigenvalues(&a).unwrap());
        for (got, want) in ev.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(
            eigenvalues(&Matrix::<f64>::zeros(2, 3)),
            Err(LinalgError::NotSquare((2, 3)))
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let a = Matrix::from_rows(&[vec![2.0f32, 1.0], vec![1.0, 2.0]]).unwrap();
        let mut ev: Vec<f32> = eigenvalues(&a).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-5 && (ev[1] - 3.0).abs() < 1e-5);
    }
}
