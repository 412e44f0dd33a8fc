//! Summary documents: an ordered key/value tree rendered as indented text or
//! as JSON.

use std::fmt::Write;

use num_complex::Complex;
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    Map(Map),
    List(Vec<Node>),
}

/// Insertion-ordered map; keys are unique by construction of the callers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Map(Vec<(String, Node)>);

impl Map {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: &str, value: impl Into<Node>) -> &mut Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn with(mut self, key: &str, value: impl Into<Node>) -> Self {
        self.insert(key, value);
        self
    }

    pub fn into_entries(self) -> Vec<(String, Node)> {
        self.0
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_map(&mut out, self, 0);
        out
    }

    pub fn to_json(&self) -> Value {
        Node::Map(self.clone()).to_json()
    }
}

impl Node {
    pub fn complex(z: Complex<f64>) -> Node {
        Map::new().with("re", z.re).with("im", z.im).into()
    }

    fn to_json(&self) -> Value {
        match self {
            Node::Str(s) => json!(s),
            Node::Int(i) => json!(i),
            // non-finite floats have no JSON number form
            Node::Float(x) if x.is_finite() => json!(x),
            Node::Float(x) => json!(format_float(*x)),
            Node::Bool(b) => json!(b),
            Node::Map(m) => Value::Object(m.0.iter().map(|(k, v)| (k.clone(), v.to_json())).collect()),
            Node::List(items) => Value::Array(items.iter().map(Node::to_json).collect()),
        }
    }
}

/// 17 significant digits, round-trip exact.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn scalar_text(node: &Node) -> Option<String> {
    match node {
        Node::Str(s) => Some(s.clone()),
        Node::Int(i) => Some(i.to_string()),
        Node::Float(x) => Some(format_float(*x)),
        Node::Bool(b) => Some(b.to_string()),
        Node::Map(m) if m.0.is_empty() => Some("{}".into()),
        Node::List(l) if l.is_empty() => Some("[]".into()),
        _ => None,
    }
}

fn write_map(out: &mut String, map: &Map, indent: usize) {
    let pad = "  ".repeat(indent);
    for (k, v) in &map.0 {
        match scalar_text(v) {
            Some(s) => writeln!(out, "{pad}{k}: {s}").unwrap(),
            None => {
                writeln!(out, "{pad}{k}:").unwrap();
                write_node(out, v, indent + 1);
            }
        }
    }
}

fn write_node(out: &mut String, node: &Node, indent: usize) {
    match node {
        Node::Map(m) => write_map(out, m, indent),
        Node::List(items) => {
            let pad = "  ".repeat(indent);
            for item in items {
                match (scalar_text(item), item) {
                    (Some(s), _) => writeln!(out, "{pad}- {s}").unwrap(),
                    (None, Node::Map(m)) => {
                        // first key shares the line with the dash
                        let mut body = String::new();
                        write_map(&mut body, m, indent + 1);
                        let body = body.strip_prefix(&format!("{pad}  ")).unwrap_or(&body);
                        write!(out, "{pad}- {body}").unwrap();
                    }
                    (None, nested) => {
                        writeln!(out, "{pad}-").unwrap();
                        write_node(out, nested, indent + 1);
                    }
                }
            }
        }
        scalar => writeln!(out, "{}{}", "  ".repeat(indent), scalar_text(scalar).unwrap_or_default()).unwrap(),
    }
}

impl From<&str> for Node {
    fn from(s: &str) -> Self {
        Node::Str(s.to_string())
    }
}

impl From<String> for Node {
    fn from(s: String) -> Self {
        Node::Str(s)
    }
}

impl From<f64> for Node {
    fn from(x: f64) -> Self {
        Node::Float(x)
    }
}

impl From<bool> for Node {
    fn from(b: bool) -> Self {
        Node::Bool(b)
    }
}

impl From<usize> for Node {
    fn from(i: usize) -> Self {
        Node::Int(i as i64)
    }
}

impl From<u64> for Node {
    fn from(i: u64) -> Self {
        Node::Int(i as i64)
    }
}

impl From<Map> for Node {
    fn from(m: Map) -> Self {
        Node::Map(m)
    }
}

impl<T: Into<Node>> From<Vec<T>> for Node {
    fn from(v: Vec<T>) -> Self {
        Node::List(v.into_iter().map(Into::into).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_layout() {
        let doc = Map::new()
            .with("command", "verify")
            .with("tol", 1e-7)
            .with("items", vec![Map::new().with("index", 0usize).with("ok", true), Map::new()])
            .with("values", vec![1.5, 2.0])
            .with("empty", Vec::<Node>::new())
            .with("nested", Map::new().with("x", 3usize));
        let expected = "command: verify\n\
                        tol: 9.9999999999999995e-8\n\
                        items:\n  - index: 0\n    ok: true\n  - {}\n\
                        values:\n  - 1.5000000000000000e0\n  - 2.0000000000000000e0\n\
                        empty: []\n\
                        nested:\n  x: 3\n";
        assert_eq!(doc.to_text(), expected);
    }

    #[test]
    fn float_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, f64::MIN_POSITIVE] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_variant() {
        let doc = Map::new()
            .with("z", Node::complex(Complex::new(1.0, -2.0)))
            .with("bad", f64::INFINITY);
        assert_eq!(doc.to_json(), json!({"z": {"re": 1.0, "im": -2.0}, "bad": "inf"}));
    }
}
