use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Digraph, GraphError};
use crate::linalg::Matrix;
use crate::scalar::Field;

/// Named graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Complete,
    /// Node `i` receives only from node `(i + 1) mod m`.
    DirectedCycle,
    /// Node 0 feeds every other node.
    StarOut,
    /// `0 → 1 → … → m−1`.
    DirectedPath,
    /// Random spanning tree rooted at a random node, plus random extra edges.
    RandomSpanningTreePlusEdges,
    /// Two directed cycles with no edges between them.
    DisconnectedPair,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Complete,
        Family::DirectedCycle,
        Family::StarOut,
        Family::DirectedPath,
        Family::RandomSpanningTreePlusEdges,
        Family::DisconnectedPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Complete => "complete",
            Family::DirectedCycle => "directed_cycle",
            Family::StarOut => "star_out",
            Family::DirectedPath => "directed_path",
            Family::RandomSpanningTreePlusEdges => "random_spanning_tree_plus_edges",
            Family::DisconnectedPair => "disconnected_pair",
        }
    }

    pub fn min_nodes(self) -> usize {
        match self {
            Family::DisconnectedPair => 4,
            _ => 2,
        }
    }

    pub fn is_random(self) -> bool {
        self == Family::RandomSpanningTreePlusEdges
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| GraphError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    Unit,
    /// Independent uniform weights in `[lo, hi)`, drawn from the seeded stream.
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    pub seed: u64,
    pub weights: WeightSpec,
    /// Probability of each extra ordered pair in the random family.
    pub extra_edge_prob: f64,
}

impl Default for GraphParams {
    fn default() -> Self {
        Self {
            seed: 0,
            weights: WeightSpec::Unit,
            extra_edge_prob: 0.3,
        }
    }
}

impl GraphParams {
    pub fn seeded(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

pub fn generate<S: Field>(family: Family, m: usize, params: &GraphParams) -> Result<Digraph<S>, GraphError> {
    if m < family.min_nodes() {
        return Err(GraphError::TooSmall {
            family,
            m,
            min: family.min_nodes(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    match family {
        Family::Complete => {
            for i in 0..m {
                edges.extend((0..m).filter(|&j| j != i).map(|j| (i, j)));
            }
        }
        Family::DirectedCycle => edges.extend((0..m).map(|i| (i, (i + 1) % m))),
        Family::StarOut => edges.extend((1..m).map(|i| (i, 0))),
        Family::DirectedPath => edges.extend((1..m).map(|i| (i, i - 1))),
        Family::RandomSpanningTreePlusEdges => {
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(&mut rng);
            let mut present = vec![vec![false; m]; m];
            for k in 1..m {
                let parent = order[rng.random_range(0..k)];
                let child = order[k];
                present[child][parent] = true;
                edges.push((child, parent));
            }
            for i in 0..m {
                for j in 0..m {
                    if i != j && !present[i][j] && rng.random::<f64>() < params.extra_edge_prob {
                        present[i][j] = true;
                        edges.push((i, j));
                    }
                }
            }
            edges.sort_unstable();
        }
        Family::DisconnectedPair => {
            let half = m / 2;
            for (lo, hi) in [(0, half), (half, m)] {
                let size = hi - lo;
                edges.extend((lo..hi).map(|i| (i, lo + (i - lo + 1) % size)));
            }
        }
    }

    let mut w = Matrix::<S>::zeros(m, m);
    for (i, j) in edges {
        let value = match params.weights {
            WeightSpec::Unit => 1.0,
            WeightSpec::Uniform { lo, hi } => rng.random_range(lo..hi),
        };
        w[(i, j)] = S::from_f64(value).expect("weight representable");
    }
    Digraph::new(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{has_spanning_tree, laplacian};

    #[test]
    fn complete_three() {
        let g: Digraph<f64> = generate(Family::Complete, 3, &GraphParams::default()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(*g.weight(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn cycle_four_receives_from_successor() {
        let g: Digraph<f64> = generate(Family::DirectedCycle, 4, &GraphParams::default()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if j == (i + 1) % 4 { 1.0 } else { 0.0 };
                assert_eq!(*g.weight(i, j), expected);
            }
        }
    }

    #[test]
    fn disconnected_pair_four_is_two_two_cycles() {
        let g: Digraph<f64> = generate(Family::DisconnectedPair, 4, &GraphParams::default()).unwrap();
        let edges: Vec<(usize, usize)> = g.edges().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(edges, vec![(0, 1), (1, 0), (2, 3), (3, 2)]);
        assert!(!has_spanning_tree(&g, 1e-9));
    }

    #[test]
    fn random_family_is_reproducible_and_rooted() {
        for seed in 0..20 {
            let p = GraphParams::seeded(seed);
            let a: Digraph<f64> = generate(Family::RandomSpanningTreePlusEdges, 6, &p).unwrap();
            let b: Digraph<f64> = generate(Family::RandomSpanningTreePlusEdges, 6, &p).unwrap();
            assert_eq!(a, b);
            assert!(a.spanning_tree_root().is_some());
            assert!(has_spanning_tree(&a, 1e-9));
        }
    }

    #[test]
    fn uniform_weights_stay_in_range() {
        let p = GraphParams {
            seed: 3,
            weights: WeightSpec::Uniform { lo: 0.5, hi: 2.0 },
            extra_edge_prob: 0.5,
        };
        let g: Digraph<f64> = generate(Family::RandomSpanningTreePlusEdges, 5, &p).unwrap();
        assert!(g.edges().all(|(_, _, &w)| (0.5..2.0).contains(&w)));
        assert!(laplacian(&g).row_sum_residual() <= 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!("bogus".parse::<Family>(), Err(GraphError::UnknownFamily(_))));
        assert!(matches!(
            generate::<f64>(Family::DisconnectedPair, 3, &GraphParams::default()),
            Err(GraphError::TooSmall { min: 4, .. })
        ));
        assert!(generate::<f64>(Family::Complete, 1, &GraphParams::default()).is_err());
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
    }
}
