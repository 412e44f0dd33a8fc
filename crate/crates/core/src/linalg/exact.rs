//! Eigenvalues of rational matrices with exact multiplicities.
//!
//! The characteristic polynomial is computed exactly (Berkowitz, division
//! free, over the integers after clearing denominators) and split into
//! square-free factors (Yun). Each factor has only simple roots, which are
//! found numerically and polished by Newton iteration. Clusters coming from
//! defective eigenvalues are therefore returned as exact repeated values
//! instead of the `ε^{1/k}` spray a floating-point QR produces.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::linalg::{eigenvalues, LinalgError, Matrix};
use crate::scalar::common_denominator;

/// Dense univariate polynomial over ℚ, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn one() -> Self {
        Self::new(vec![BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.leading().clone();
        Self::new(self.coeffs.iter().map(|c| c / &lead).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        Self::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) - other.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Self::new(Vec::new()), self.clone());
        }
        let lead = divisor.leading().clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Square-free decomposition `f = c · ∏ fᵢ^i` (Yun). Returns `(i, fᵢ)` for
    /// the non-constant factors, each monic.
    pub fn squarefree_factors(&self) -> Vec<(usize, Poly)> {
        let f = self.monic();
        if f.degree() == 0 {
            return Vec::new();
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            let next_b = b.div_rem(&a).0;
            let next_c = d.div_rem(&a).0;
            if a.degree() > 0 {
                out.push((i, a));
            }
            d = next_c.sub(&next_b.derivative());
            b = next_b;
            i += 1;
        }
        out
    }

    fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Numerical roots of a polynomial whose roots are assumed simple.
    pub fn simple_roots(&self) -> Result<Vec<Complex<f64>>, LinalgError> {
        let p = self.monic();
        let deg = p.degree();
        if deg == 0 {
            return Ok(Vec::new());
        }
        let mut roots = Vec::with_capacity(deg);
        let mut p = p;
        // A square-free factor contains x at most once.
        if p.coeffs[0].is_zero() {
            roots.push(Complex::new(0.0, 0.0));
            p = Self::new(p.coeffs[1..].to_vec());
        }
        let c = p.to_f64_coeffs();
        let d = p.degree();
        if d == 0 {
            return Ok(roots);
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let companion = Matrix::from_fn(d, d, |i, j| {
            if i == 0 {
                -c[d - 1 - j]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        for z in eigenvalues(&companion)? {
            roots.push(newton_polish(&c, z));
        }
        Ok(roots)
    }
}

fn horner(c: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn newton_polish(c: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    let real = z.im == 0.0;
    let (mut pz, _) = horner(c, z);
    for _ in 0..8 {
        let (p, dp) = horner(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let mut cand = z - p / dp;
        if real {
            cand.im = 0.0;
        }
        let (pc, _) = horner(c, cand);
        if pc.norm() < pz.norm() {
            z = cand;
            pz = pc;
        } else {
            break;
        }
    }
    z
}

/// Characteristic polynomial `det(xI − A)` of an integer matrix, coefficients
/// from the constant term up (Berkowitz).
pub fn charpoly_integer(a: &Matrix<BigInt>) -> Result<Vec<BigInt>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.shape()));
    }
    let n = a.rows();
    // Coefficients from the leading term down while building.
    let mut vect: Vec<BigInt> = vec![BigInt::one()];
    for r in 0..n {
        let mut t: Vec<BigInt> = Vec::with_capacity(r + 2);
        t.push(BigInt::one());
        t.push(-a[(r, r)].clone());
        let mut v: Vec<BigInt> = (0..r).map(|i| a[(i, r)].clone()).collect();
        for k in 0..r {
            let rv = (0..r).fold(BigInt::zero(), |acc, j| {
                let x = &a[(r, j)];
                if x.is_zero() { acc } else { acc + x * &v[j] }
            });
            t.push(-rv);
            if k + 1 < r {
                v = (0..r)
                    .map(|i| {
                        (0..r).fold(BigInt::zero(), |acc, j| {
                            let x = &a[(i, j)];
                            if x.is_zero() || v[j].is_zero() { acc } else { acc + x * &v[j] }
                        })
                    })
                    .collect();
            }
        }
        let next: Vec<BigInt> = (0..r + 2)
            .map(|i| {
                (0..=i.min(r)).fold(BigInt::zero(), |acc, j| {
                    if t[i - j].is_zero() { acc } else { acc + &t[i - j] * &vect[j] }
                })
            })
            .collect();
        vect = next;
    }
    vect.reverse();
    Ok(vect)
}

/// Characteristic polynomial of a rational matrix, monic.
pub fn charpoly(a: &Matrix<BigRational>) -> Result<Poly, LinalgError> {
    let denom = common_denominator(a.as_slice());
    let scaled = a.map(|x| (x * BigRational::from_integer(denom.clone())).to_integer());
    let coeffs = charpoly_integer(&scaled)?;
    // det(xI − M/D) = D^{-n} det(D x I − M): coefficient k picks up D^{k-n}.
    let n = a.rows();
    let d = BigRational::from_integer(denom);
    let mut pow = BigRational::one();
    let mut out = vec![BigRational::zero(); n + 1];
    for k in (0..=n).rev() {
        out[k] = BigRational::from_integer(coeffs[k].clone()) / &pow;
        pow = &pow * &d;
    }
    Ok(Poly::new(out).monic())
}

/// Eigenvalues of a rational matrix with exact algebraic multiplicities.
pub fn eigenvalues_exact(a: &Matrix<BigRational>) -> Result<Vec<Complex<f64>>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.shape()));
    }
    // Work with the integer matrix M = D·A so root finding sees integer data,
    // then scale roots back.
    let denom = common_denominator(a.as_slice());
    let scaled = a.map(|x| (x * BigRational::from_integer(denom.clone())).to_integer());
    let coeffs = charpoly_integer(&scaled)?;
    let poly = Poly::new(coeffs.into_iter().map(BigRational::from_integer).collect());
    let d = denom.to_f64().unwrap_or(f64::NAN);
    let mut out = Vec::with_capacity(a.rows());
    for (mult, factor) in poly.squarefree_factors() {
        for root in factor.simple_roots()? {
            let z = root / d;
            out.extend(std::iter::repeat_n(z, mult));
        }
    }
    debug_assert_eq!(out.len(), a.rows());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    fn poly(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn berkowitz_matches_2x2_formula() {
        let a = Matrix::from_rows(&[vec![BigInt::from(1), BigInt::from(2)], vec![BigInt::from(3), BigInt::from(4)]]).unwrap();
        // x^2 - 5x - 2
        assert_eq!(
            charpoly_integer(&a).unwrap(),
            vec![BigInt::from(-2), BigInt::from(-5), BigInt::from(1)]
        );
    }

    #[test]
    fn rational_charpoly_scales_back() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let a = Matrix::from_rows(&[vec![half.clone(), q(0)], vec![q(0), q(3)]]).unwrap();
        // (x - 1/2)(x - 3) = x^2 - 7/2 x + 3/2
        let p = charpoly(&a).unwrap();
        assert_eq!(
            p.coeffs(),
            &[BigRational::new(3.into(), 2.into()), BigRational::new((-7).into(), 2.into()), q(1)]
        );
    }

    #[test]
    fn yun_splits_multiplicities() {
        // (x-1)^3 (x+2)^2 x, expanded
        let f = poly(&[0, -4, 8, -1, -5, 1, 1]);
        let factors = f.squarefree_factors();
        let summary: Vec<(usize, usize)> = factors.iter().map(|(m, p)| (*m, p.degree())).collect();
        assert_eq!(summary, vec![(1, 1), (2, 1), (3, 1)]);
        assert_eq!(factors[2].1, poly(&[-1, 1]));
    }

    #[test]
    fn jordan_block_is_resolved_exactly() {
        let n = 6;
        let a = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                q(2)
            } else if j == i + 1 {
                q(1)
            } else {
                q(0)
            }
        });
        // Destroy triangularity with an exact similarity by a unit lower-triangular matrix.
        let p = Matrix::from_fn(n, n, |i, j| if i >= j { q(1) } else { q(0) });
        let pinv = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                q(1)
            } else if i == j + 1 {
                q(-1)
            } else {
                q(0)
            }
        });
        let b = pinv.matmul(&a).unwrap().matmul(&p).unwrap();
        let ev = eigenvalues_exact(&b).unwrap();
        assert_eq!(ev.len(), n);
        assert!(ev.iter().all(|z| (*z - Complex::new(2.0, 0.0)).norm() < 1e-14));
    }

    #[test]
    fn complex_roots_of_rotation() {
        let a = Matrix::from_rows(&[vec![q(0), q(-1)], vec![q(1), q(0)]]).unwrap();
        let mut ev = eigenvalues_exact(&a).unwrap();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - Complex::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - Complex::new(0.0, 1.0)).norm() < 1e-14);
    }
}
