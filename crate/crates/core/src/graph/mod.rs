//! Weighted digraphs, their Laplacians, and the spanning-tree condition.
//!
//! Orientation: entry `(i, j)` of the weight matrix is `aᵢⱼ`, the weight with
//! which node `j` influences node `i` (an edge from `j` into `i`).

mod edge_list;
mod families;

pub use edge_list::{read_edge_list, write_edge_list};
pub use families::{generate, Family, GraphParams, WeightSpec};

use thiserror::Error;

use crate::linalg::{rank, Matrix};
use crate::scalar::{Field, Real};

/// Default relative singular-value threshold for the rank test.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("weight matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("negative or non-finite weight on edge {from} -> {into}")]
    BadWeight { into: usize, from: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),
    #[error("family {family} needs m >= {min}, got {m}")]
    TooSmall { family: Family, m: usize, min: usize },
    #[error("node {node} out of range for m = {m}")]
    NodeOutOfRange { node: usize, m: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Weighted directed graph on nodes `0..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph<S> {
    weights: Matrix<S>,
}

impl<S: Field> Digraph<S> {
    pub fn new(weights: Matrix<S>) -> Result<Self, GraphError> {
        let (r, c) = weights.shape();
        if r != c {
            return Err(GraphError::NotSquare(r, c));
        }
        if r == 0 {
            return Err(GraphError::Empty);
        }
        for i in 0..r {
            if !weights[(i, i)].is_zero() {
                return Err(GraphError::SelfLoop(i));
            }
            for j in 0..r {
                let w = &weights[(i, j)];
                if *w < S::zero() || !w.magnitude().is_finite() {
                    return Err(GraphError::BadWeight { into: i, from: j });
                }
            }
        }
        Ok(Self { weights })
    }

    /// Graph on `m` nodes with no edges.
    pub fn empty(m: usize) -> Result<Self, GraphError> {
        Self::new(Matrix::zeros(m, m))
    }

    /// Builds a graph from `(into, from, weight)` triples.
    pub fn from_edges(m: usize, edges: impl IntoIterator<Item = (usize, usize, S)>) -> Result<Self, GraphError> {
        let mut w = Matrix::zeros(m, m);
        for (i, j, a) in edges {
            if let Some(node) = [i, j].into_iter().find(|&k| k >= m) {
                return Err(GraphError::NodeOutOfRange { node, m });
            }
            w[(i, j)] = a;
        }
        Self::new(w)
    }

    pub fn m(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Matrix<S> {
        &self.weights
    }

    /// `aᵢⱼ`: weight of the edge from `from` into `into`.
    pub fn weight(&self, into: usize, from: usize) -> &S {
        &self.weights[(into, from)]
    }

    /// Nonzero edges as `(into, from, weight)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        let m = self.m();
        (0..m).flat_map(move |i| {
            (0..m).filter_map(move |j| {
                let w = &self.weights[(i, j)];
                (!w.is_zero()).then_some((i, j, w))
            })
        })
    }

    pub fn scaled(&self, s: &S) -> Result<Self, GraphError> {
        Self::new(self.weights.scale(s))
    }

    /// Converts the weights to another scalar type through `f64`.
    pub fn cast<T: Field>(&self) -> Digraph<T> {
        Digraph {
            weights: self.weights.map(|x| {
                T::from_f64(x.to_f64().unwrap_or(f64::NAN)).expect("weight representable in target scalar")
            }),
        }
    }

    /// Weakly connected component label of every node, numbered in order of
    /// first appearance.
    pub fn weak_components(&self) -> Vec<usize> {
        let m = self.m();
        let mut label = vec![usize::MAX; m];
        let mut next = 0;
        for start in 0..m {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for v in 0..m {
                    let linked = !self.weights[(u, v)].is_zero() || !self.weights[(v, u)].is_zero();
                    if linked && label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Any node from which every node is reachable along edge direction,
    /// found by breadth-first search. Independent of the rank test.
    pub fn spanning_tree_root(&self) -> Option<usize> {
        let m = self.m();
        // out[j] lists nodes i with aᵢⱼ > 0 (edge j -> i).
        let out: Vec<Vec<usize>> = (0..m)
            .map(|j| (0..m).filter(|&i| !self.weights[(i, j)].is_zero()).collect())
            .collect();
        (0..m).find(|&root| {
            let mut seen = vec![false; m];
            seen[root] = true;
            let mut queue = std::collections::VecDeque::from([root]);
            let mut count = 1;
            while let Some(j) = queue.pop_front() {
                for &i in &out[j] {
                    if !seen[i] {
                        seen[i] = true;
                        count += 1;
                        queue.push_back(i);
                    }
                }
            }
            count == m
        })
    }
}

/// Graph Laplacian `L = D − A` with `D` the in-weight diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian<S> {
    entries: Matrix<S>,
    source: Digraph<S>,
}

impl<S: Field> Laplacian<S> {
    pub fn matrix(&self) -> &Matrix<S> {
        &self.entries
    }

    pub fn source(&self) -> &Digraph<S> {
        &self.source
    }

    pub fn m(&self) -> usize {
        self.entries.rows()
    }

    /// `max |L·𝟙|`.
    pub fn row_sum_residual(&self) -> f64 {
        let ones = vec![S::one(); self.m()];
        self.entries
            .matvec(&ones)
            .expect("square")
            .iter()
            .map(Field::magnitude)
            .fold(0.0, f64::max)
    }
}

pub fn laplacian<S: Field>(g: &Digraph<S>) -> Laplacian<S> {
    let m = g.m();
    let mut l = Matrix::zeros(m, m);
    for i in 0..m {
        let mut deg = S::zero();
        for j in 0..m {
            if i != j {
                let a = g.weight(i, j).clone();
                deg = deg + a.clone();
                l[(i, j)] = -a;
            }
        }
        l[(i, i)] = deg;
    }
    Laplacian {
        entries: l,
        source: g.clone(),
    }
}

/// Rank test: `rank(L) = m − 1`, where rank counts singular values above
/// `tol · σ_max`.
pub fn has_spanning_tree<S: Real>(g: &Digraph<S>, tol: S) -> bool {
    laplacian_rank(&laplacian(g), tol) + 1 == g.m()
}

pub fn laplacian_rank<S: Real>(l: &Laplacian<S>, tol: S) -> usize {
    rank(l.matrix(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(m: usize, edges: &[(usize, usize)]) -> Digraph<f64> {
        Digraph::from_edges(m, edges.iter().map(|&(i, j)| (i, j, 1.0))).unwrap()
    }

    #[test]
    fn empty_graph_has_zero_laplacian() {
        let l = laplacian(&Digraph::<f64>::empty(2).unwrap());
        assert!(l.matrix().is_zero());
    }

    #[test]
    fn directed_three_cycle_laplacian() {
        // node i receives from i+1
        let g = unit(3, &[(0, 1), (1, 2), (2, 0)]);
        let l = laplacian(&g);
        for i in 0..3 {
            assert_eq!(l.matrix()[(i, i)], 1.0);
            let negs = (0..3).filter(|&j| l.matrix()[(i, j)] == -1.0).count();
            assert_eq!(negs, 1);
        }
        assert_eq!(l.row_sum_residual(), 0.0);
    }

    #[test]
    fn star_laplacian_rows() {
        let m = 4;
        let g = unit(m, &[(1, 0), (2, 0), (3, 0)]);
        let l = laplacian(&g);
        assert!(l.matrix().row(0).iter().all(|&x| x == 0.0));
        for i in 1..m {
            assert_eq!(l.matrix()[(i, i)], 1.0);
            assert_eq!(l.matrix()[(i, 0)], -1.0);
        }
    }

    #[test]
    fn weak_components_of_disconnected_pair() {
        let g: Digraph<f64> = generate(Family::DisconnectedPair, 5, &GraphParams::default()).unwrap();
        assert_eq!(g.weak_components(), vec![0, 0, 1, 1, 1]);
        let path = Digraph::from_edges(4, [(1, 0, 1.0), (2, 1, 1.0)]).unwrap();
        assert_eq!(path.weak_components(), vec![0, 0, 0, 1]);
    }

    #[test]
    fn spanning_tree_examples() {
        assert!(has_spanning_tree(&unit(3, &[(0, 1), (1, 2), (2, 0)]), 1e-9));
        assert!(!has_spanning_tree(&Digraph::<f64>::empty(2).unwrap(), 1e-9));
        // path 0 -> 1 -> 2 plus isolated 3
        let g = unit(4, &[(1, 0), (2, 1)]);
        assert_eq!(laplacian_rank(&laplacian(&g), 1e-9), 2);
        assert!(!has_spanning_tree(&g, 1e-9));
        assert_eq!(g.spanning_tree_root(), None);
        assert_eq!(unit(3, &[(1, 0), (2, 1)]).spanning_tree_root(), Some(0));
    }

    #[test]
    fn invalid_weights_rejected() {
        let mut w = Matrix::<f64>::zeros(2, 2);
        w[(0, 1)] = -1.0;
        assert_eq!(Digraph::new(w).unwrap_err(), GraphError::BadWeight { into: 0, from: 1 });
        let mut w = Matrix::<f64>::zeros(2, 2);
        w[(1, 1)] = 1.0;
        assert_eq!(Digraph::new(w).unwrap_err(), GraphError::SelfLoop(1));
        assert_eq!(Digraph::<f64>::empty(0).unwrap_err(), GraphError::Empty);
    }
}
