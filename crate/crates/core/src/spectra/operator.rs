use num_rational::BigRational;

use super::SpectraError;
use crate::graph::Laplacian;
use crate::linalg::{kron, unvec, vec, LinalgError, Matrix};
use crate::scalar::Field;

/// Tolerance for the zero blocks of the subspace decomposition.
pub const BLOCK_TOL: f64 = 1e-10;

/// `L̂`: the `m × m²` block-diagonal matrix whose `i`-th diagonal block is the
/// row `Lᵢ`, so that `(L̂·vec X)ᵢ = Lᵢ · X[:, i]`.
pub fn hat_l<S: Field>(l: &Laplacian<S>) -> Matrix<S> {
    let m = l.m();
    let lm = l.matrix();
    Matrix::from_fn(m, m * m, |i, c| {
        if c / m == i {
            lm[(i, c % m)].clone()
        } else {
            S::zero()
        }
    })
}

/// Matrix form of the linearized operator, acting on `vec(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorT<S> {
    pub matrix: Matrix<S>,
    pub hat_l: Matrix<S>,
    pub source: Laplacian<S>,
}

impl<S: Field> OperatorT<S> {
    pub fn m(&self) -> usize {
        self.source.m()
    }

    /// `unvec(T · vec X)`.
    pub fn apply(&self, x: &Matrix<S>) -> Result<Matrix<S>, SpectraError> {
        let m = self.m();
        if x.shape() != (m, m) {
            return Err(shape("OperatorT::apply", (m, m), x.shape()));
        }
        let y = self.matrix.matvec(&vec(x))?;
        Ok(unvec(&y, m, m)?)
    }
}

/// `T = L⊗I + I⊗L − 𝟙⊗L̂ − L̂⊗𝟙`.
pub fn build_operator_t<S: Field>(l: &Laplacian<S>) -> OperatorT<S> {
    let m = l.m();
    let eye = Matrix::identity(m);
    let ones = Matrix::ones_column(m);
    let hat = hat_l(l);
    let terms = [
        kron(l.matrix(), &eye),
        kron(&eye, l.matrix()),
        kron(&ones, &hat),
        kron(&hat, &ones),
    ];
    let [a, b, c, d] = terms;
    let matrix = a
        .add(&b)
        .and_then(|s| s.sub(&c))
        .and_then(|s| s.sub(&d))
        .expect("all four terms are m² × m²");
    OperatorT {
        matrix,
        hat_l: hat,
        source: l.clone(),
    }
}

fn shape(op: &'static str, left: (usize, usize), right: (usize, usize)) -> SpectraError {
    SpectraError::Linalg(LinalgError::Shape { op, left, right })
}

/// `𝒮(X) = LX + XLᵀ`.
pub fn apply_lyapunov<S: Field>(l: &Laplacian<S>, x: &Matrix<S>) -> Result<Matrix<S>, SpectraError> {
    let m = l.m();
    if x.shape() != (m, m) {
        return Err(shape("apply_lyapunov", (m, m), x.shape()));
    }
    let lx = l.matrix().matmul(x)?;
    let xlt = x.matmul(&l.matrix().transpose())?;
    Ok(lx.add(&xlt)?)
}

/// `𝒯(X) = LX + XLᵀ − h𝟙ᵀ − 𝟙hᵀ` with `hᵢ = Lᵢ · X[:, i]`.
pub fn apply_t<S: Field>(l: &Laplacian<S>, x: &Matrix<S>) -> Result<Matrix<S>, SpectraError> {
    let mut out = apply_lyapunov(l, x)?;
    let m = l.m();
    let lm = l.matrix();
    let h: Vec<S> = (0..m)
        .map(|i| (0..m).fold(S::zero(), |acc, k| acc + lm[(i, k)].clone() * x[(k, i)].clone()))
        .collect();
    for i in 0..m {
        for j in 0..m {
            out[(i, j)] = out[(i, j)].clone() - h[i].clone() - h[j].clone();
        }
    }
    Ok(out)
}

/// Ordered bases of the symmetric-hollow, diagonal and skew-symmetric
/// subspaces of `ℝ^{m×m}`.
///
/// `b1 = {Eᵢⱼ + Eⱼᵢ}`, `b2 = {Eᵢᵢ}`, `b3 = {Eᵢⱼ − Eⱼᵢ}`, pairs `i < j` in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBases<S> {
    pub m: usize,
    pub b1: Vec<Matrix<S>>,
    pub b2: Vec<Matrix<S>>,
    pub b3: Vec<Matrix<S>>,
}

fn pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |i| (i + 1..m).map(move |j| (i, j)))
}

pub fn subspace_bases<S: Field>(m: usize) -> SubspaceBases<S> {
    let unit = |entries: &[(usize, usize, S)]| {
        let mut e = Matrix::zeros(m, m);
        for (i, j, v) in entries {
            e[(*i, *j)] = v.clone();
        }
        e
    };
    SubspaceBases {
        m,
        b1: pairs(m).map(|(i, j)| unit(&[(i, j, S::one()), (j, i, S::one())])).collect(),
        b2: (0..m).map(|i| unit(&[(i, i, S::one())])).collect(),
        b3: pairs(m).map(|(i, j)| unit(&[(i, j, S::one()), (j, i, -S::one())])).collect(),
    }
}

impl<S: Field> SubspaceBases<S> {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.b1.len(), self.b2.len(), self.b3.len())
    }

    /// Coordinates of `x` in `[b1, b2, b3]`, concatenated.
    pub fn coordinates(&self, x: &Matrix<S>) -> Vec<S> {
        let m = self.m;
        let half = |v: S| v / S::two();
        let mut out = Vec::with_capacity(m * m);
        out.extend(pairs(m).map(|(i, j)| half(x[(i, j)].clone() + x[(j, i)].clone())));
        out.extend((0..m).map(|i| x[(i, i)].clone()));
        out.extend(pairs(m).map(|(i, j)| half(x[(i, j)].clone() - x[(j, i)].clone())));
        out
    }

    /// Inverse of [`coordinates`](Self::coordinates).
    pub fn reconstruct(&self, coords: &[S]) -> Matrix<S> {
        let mut x = Matrix::zeros(self.m, self.m);
        for (c, b) in coords.iter().zip(self.b1.iter().chain(&self.b2).chain(&self.b3)) {
            x = x.add(&b.scale(c)).expect("same shape");
        }
        x
    }

    /// Matrix of a linear map in the ordered basis `[b1, b2, b3]`.
    pub fn matrix_of<E>(&self, f: impl Fn(&Matrix<S>) -> Result<Matrix<S>, E>) -> Result<Matrix<S>, E> {
        let n = self.m * self.m;
        let mut out = Matrix::zeros(n, n);
        for (k, b) in self.b1.iter().chain(&self.b2).chain(&self.b3).enumerate() {
            for (r, v) in self.coordinates(&f(b)?).into_iter().enumerate() {
                out[(r, k)] = v;
            }
        }
        Ok(out)
    }
}

/// Component of `x` in the skew-symmetric subspace: `(X − Xᵀ)/2`.
pub fn project_onto_k<S: Field>(x: &Matrix<S>) -> Matrix<S> {
    x.sub(&x.transpose()).expect("square").scale(&(S::one() / S::two()))
}

/// `𝒯` and `𝒮` in the basis `[b1, b2, b3]`, split into blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockStructure<S> {
    /// Full matrix of `𝒯`.
    pub t: Matrix<S>,
    /// Full matrix of `𝒮`.
    pub s: Matrix<S>,
    pub t11: Matrix<S>,
    pub t12: Matrix<S>,
    pub t13: Matrix<S>,
    pub t23: Matrix<S>,
    pub t33: Matrix<S>,
    pub s33: Matrix<S>,
    /// Largest entry among the blocks that must vanish.
    pub pattern_residual: f64,
    /// `max |T₃₃ − S₃₃|`.
    pub projection_residual: f64,
}

/// Builds the block matrices and checks the zero pattern
///
/// ```text
/// 𝒯 ~ [T₁₁ T₁₂ T₁₃]     𝒮 ~ [S₁₁ S₁₂ 0  ]
///     [ 0   0  T₂₃]         [S₂₁ S₂₂ 0  ]
///     [ 0   0  T₃₃]         [ 0   0  S₃₃]
/// ```
///
/// and `T₃₃ = S₃₃`, each to `tol`.
pub fn verify_block_structure<S: Field>(l: &Laplacian<S>, tol: f64) -> Result<BlockStructure<S>, SpectraError> {
    let m = l.m();
    let bases = subspace_bases::<S>(m);
    let t = bases.matrix_of(|x| apply_t(l, x))?;
    let s = bases.matrix_of(|x| apply_lyapunov(l, x))?;
    let (n1, n2, _) = bases.dims();
    let (a, b, n) = (n1, n1 + n2, m * m);
    let block = |x: &Matrix<S>, r: (usize, usize), c: (usize, usize)| x.submatrix(r.0, r.1, c.0, c.1);
    let (r1, r2, r3) = ((0, a), (a, b), (b, n));

    let zero_blocks: [(&'static str, Matrix<S>); 8] = [
        ("T21", block(&t, r2, r1)),
        ("T31", block(&t, r3, r1)),
        ("T22", block(&t, r2, r2)),
        ("T32", block(&t, r3, r2)),
        ("S13", block(&s, r1, r3)),
        ("S23", block(&s, r2, r3)),
        ("S31", block(&s, r3, r1)),
        ("S32", block(&s, r3, r2)),
    ];
    let mut pattern_residual = 0.0f64;
    for (name, z) in &zero_blocks {
        let max_abs = z.max_abs();
        if max_abs > tol {
            return Err(SpectraError::PatternViolation { block: name, max_abs });
        }
        pattern_residual = pattern_residual.max(max_abs);
    }

    let t33 = block(&t, r3, r3);
    let s33 = block(&s, r3, r3);
    let projection_residual = t33.max_abs_diff(&s33)?;
    if projection_residual > tol {
        return Err(SpectraError::PatternViolation {
            block: "T33 - S33",
            max_abs: projection_residual,
        });
    }
    Ok(BlockStructure {
        t11: block(&t, r1, r1),
        t12: block(&t, r1, r2),
        t13: block(&t, r1, r3),
        t23: block(&t, r2, r3),
        t33,
        s33,
        t,
        s,
        pattern_residual,
        projection_residual,
    })
}

/// The splitting `T = A − B` used for the spectrum-invariance check:
/// `A = L⊗I + I⊗L − 𝟙⊗L̂`, `B = L̂⊗𝟙`.
pub fn lemma3_split<S: Field>(l: &Laplacian<S>) -> (Matrix<S>, Matrix<S>) {
    let m = l.m();
    let eye = Matrix::identity(m);
    let ones = Matrix::ones_column(m);
    let hat = hat_l(l);
    let a = kron(l.matrix(), &eye)
        .add(&kron(&eye, l.matrix()))
        .and_then(|s| s.sub(&kron(&ones, &hat)))
        .expect("m² × m²");
    (a, kron(&hat, &ones))
}

/// Exact copy of a Laplacian, rebuilt from its weights as rationals.
pub(crate) fn rational_laplacian<S: Field>(l: &Laplacian<S>) -> Laplacian<BigRational> {
    crate::graph::laplacian(&l.source().cast::<BigRational>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, laplacian, Digraph, Family, GraphParams};
    use num_traits::Zero;

    fn lap(edges: &[(usize, usize)], m: usize) -> Laplacian<f64> {
        laplacian(&Digraph::from_edges(m, edges.iter().map(|&(i, j)| (i, j, 1.0))).unwrap())
    }

    fn pseudo_random(m: usize, seed: u64) -> Matrix<f64> {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        Matrix::from_fn(m, m, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn four_term_matrix_agrees_with_apply_t() {
        for (f, m) in [(Family::DirectedCycle, 3), (Family::Complete, 4), (Family::DirectedPath, 5)] {
            let l = laplacian(&generate::<f64>(f, m, &GraphParams::default()).unwrap());
            let op = build_operator_t(&l);
            for seed in 0..5 {
                let x = pseudo_random(m, seed);
                let direct = apply_t(&l, &x).unwrap();
                assert!(op.apply(&x).unwrap().max_abs_diff(&direct).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_graph_gives_zero_operator() {
        let l = laplacian(&Digraph::<f64>::empty(3).unwrap());
        assert!(build_operator_t(&l).matrix.is_zero());
    }

    #[test]
    fn hat_l_layout() {
        let l = lap(&[(1, 0)], 2);
        let h = hat_l(&l);
        assert_eq!(h.shape(), (2, 4));
        // row 0 of L is zero; row 1 = [-1, 1] sits in columns 2..4
        assert_eq!(h.row(0), &[0.0, 0.0, 0.0, 0.0]);
        assert_eq!(h.row(1), &[0.0, 0.0, -1.0, 1.0]);
    }

    #[test]
    fn apply_t_on_symmetric_is_symmetric_hollow() {
        let l = lap(&[(0, 1), (1, 2), (2, 0)], 3);
        let r = pseudo_random(3, 9);
        let x = r.add(&r.transpose()).unwrap();
        let y = apply_t(&l, &x).unwrap();
        assert!(y.max_abs_diff(&y.transpose()).unwrap() < 1e-14);
        assert!((0..3).all(|i| y[(i, i)].abs() < 1e-14));
        assert!(apply_t(&l, &Matrix::zeros(3, 3)).unwrap().is_zero());
    }

    #[test]
    fn lyapunov_on_cycle_skew_unit() {
        let l = lap(&[(0, 1), (1, 2), (2, 0)], 3);
        let mut x = Matrix::zeros(3, 3);
        x[(0, 1)] = 1.0;
        x[(1, 0)] = -1.0;
        let y = apply_lyapunov(&l, &x).unwrap();
        let expected = l
            .matrix()
            .matmul(&x)
            .unwrap()
            .add(&x.matmul(&l.matrix().transpose()).unwrap())
            .unwrap();
        assert_eq!(y, expected);
        assert!(y.add(&y.transpose()).unwrap().is_zero());
        // L = [[1,-1,0],[0,1,-1],[-1,0,1]]
        let want = Matrix::from_rows(&[
            vec![0.0, 2.0, 0.0],
            vec![-2.0, 0.0, 1.0],
            vec![0.0, -1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(y, want);
    }

    #[test]
    fn bases_dims_and_round_trip() {
        let b = subspace_bases::<f64>(2);
        assert_eq!(b.dims(), (1, 2, 1));
        assert_eq!(b.b1[0], Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
        assert_eq!(b.b3[0], Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap());
        assert_eq!(subspace_bases::<f64>(4).dims(), (6, 4, 6));

        let b = subspace_bases::<BigRational>(3);
        let x = Matrix::from_fn(3, 3, |i, j| BigRational::from_integer(((7 * i + 3 * j) % 5).into()) - BigRational::from_integer(2.into()));
        assert_eq!(b.reconstruct(&b.coordinates(&x)), x);
    }

    #[test]
    fn block_structure_two_node_edge() {
        let l = lap(&[(1, 0)], 2);
        let blocks = verify_block_structure(&l, BLOCK_TOL).unwrap();
        assert_eq!(blocks.t33.shape(), (1, 1));
        assert_eq!(blocks.t33[(0, 0)], 1.0);
    }

    #[test]
    fn block_structure_is_exact_for_integer_cycle() {
        let g = generate::<BigRational>(Family::DirectedCycle, 5, &GraphParams::default()).unwrap();
        let blocks = verify_block_structure(&laplacian(&g), 0.0).unwrap();
        assert_eq!(blocks.pattern_residual, 0.0);
        assert!(blocks.t33.sub(&blocks.s33).unwrap().is_zero());
    }

    #[test]
    fn lemma3_split_nilpotent_exactly() {
        let l = rational_laplacian(&laplacian(&generate::<f64>(Family::DirectedCycle, 3, &GraphParams::default()).unwrap()));
        let (a, b) = lemma3_split(&l);
        assert!(b.matmul(&b).unwrap().is_zero());
        let t = build_operator_t(&l).matrix;
        assert_eq!(a.sub(&b).unwrap(), t);
        assert!(!b.as_slice().iter().all(Zero::is_zero));
    }
}
