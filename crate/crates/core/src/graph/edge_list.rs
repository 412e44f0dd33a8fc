//! Plain-text edge lists.
//!
//! ```text
//! # comment
//! 3
//! 0 1 1.0
//! 1 2 1.0
//! 2 0 1.0
//! ```
//!
//! The first non-comment line is the node count `m`. Each further nonempty
//! line `i j w` is an edge from `j` into `i` with weight `w > 0`.

use std::fmt::{Display, Write as _};
use std::str::FromStr;

use super::{Digraph, GraphError};
use crate::linalg::Matrix;
use crate::scalar::Field;

pub fn write_edge_list<S: Field + Display>(g: &Digraph<S>) -> String {
    let mut out = format!("{}\n", g.m());
    for (i, j, w) in g.edges() {
        writeln!(out, "{i} {j} {w}").expect("writing to String");
    }
    out
}

pub fn read_edge_list<S: Field + FromStr>(text: &str) -> Result<Digraph<S>, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (first, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing node count".into(),
    })?;
    let m: usize = header.parse().map_err(|_| GraphError::Parse {
        line: first,
        msg: format!("expected node count, got `{header}`"),
    })?;
    if m == 0 {
        return Err(GraphError::Empty);
    }

    let mut w = Matrix::<S>::zeros(m, m);
    for (line, text) in lines {
        let parse_err = |msg: String| GraphError::Parse { line, msg };
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [si, sj, sw] = fields[..] else {
            return Err(parse_err(format!("expected `i j w`, got `{text}`")));
        };
        let i: usize = si.parse().map_err(|_| parse_err(format!("bad node index `{si}`")))?;
        let j: usize = sj.parse().map_err(|_| parse_err(format!("bad node index `{sj}`")))?;
        let weight: S = sw.parse().map_err(|_| parse_err(format!("bad weight `{sw}`")))?;
        if i >= m || j >= m {
            return Err(parse_err(format!("node index {} out of range for m = {m}", i.max(j))));
        }
        if i == j {
            return Err(parse_err(format!("self-loop at node {i}")));
        }
        if weight <= S::zero() || !weight.magnitude().is_finite() {
            return Err(parse_err(format!("weight must be positive and finite, got `{sw}`")));
        }
        if !w[(i, j)].is_zero() {
            return Err(parse_err(format!("duplicate edge {j} -> {i}")));
        }
        w[(i, j)] = weight;
    }
    Digraph::new(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, GraphParams, WeightSpec};

    #[test]
    fn parses_three_cycle() {
        let g: Digraph<f64> = read_edge_list("3\n0 1 1.0\n1 2 1.0\n2 0 1.0").unwrap();
        let expected: Digraph<f64> = Digraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        assert_eq!(g, expected);
    }

    #[test]
    fn header_only_is_empty_graph() {
        let g: Digraph<f64> = read_edge_list("2\n").unwrap();
        assert_eq!(g, Digraph::empty(2).unwrap());
    }

    #[test]
    fn comments_and_blank_lines() {
        let g: Digraph<f64> = read_edge_list("# header\n\n2\n# edge\n1 0 2.5\n").unwrap();
        assert_eq!(*g.weight(1, 0), 2.5);
    }

    #[test]
    fn round_trip_random_family() {
        let p = GraphParams {
            seed: 7,
            weights: WeightSpec::Uniform { lo: 0.1, hi: 3.0 },
            extra_edge_prob: 0.3,
        };
        let g: Digraph<f64> = generate(Family::RandomSpanningTreePlusEdges, 5, &p).unwrap();
        let back: Digraph<f64> = read_edge_list(&write_edge_list(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn malformed_inputs() {
        let cases = [
            ("", "missing"),
            ("x\n", "node count"),
            ("2\n0 1\n", "expected"),
            ("2\n0 1 -1.0\n", "positive"),
            ("2\n0 1 0\n", "positive"),
            ("2\n1 1 1.0\n", "self-loop"),
            ("2\n0 2 1.0\n", "out of range"),
            ("2\n0 1 1.0\n0 1 1.0\n", "duplicate"),
            ("2\n0 1 abc\n", "bad weight"),
        ];
        for (text, needle) in cases {
            let err = read_edge_list::<f64>(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{text:?}: {err}");
        }
    }
}
