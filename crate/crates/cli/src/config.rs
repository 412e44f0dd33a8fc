//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comment
//! graph.family = directed_cycle
//! graph.m = 4
//! sim.n = 3
//! sim.seed = 1
//! out.csv = traj.csv
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sphere_sync::graph::{Family, GraphParams, WeightSpec};

use crate::CliError;

/// Recognized keys, in documentation order.
pub const KEYS: [&str; 17] = [
    "graph.family",
    "graph.m",
    "graph.seed",
    "graph.weights",
    "graph.extra_edge_prob",
    "graph.path",
    "sim.n",
    "sim.seed",
    "sim.spread",
    "sim.init",
    "sim.h",
    "sim.t_end",
    "fit.window_lo",
    "fit.window_hi",
    "fit.floor",
    "out.csv",
    "out.summary",
];

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Family { family: Family, m: usize, params: GraphParams },
    Path(PathBuf),
}

/// How initial states are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    /// All agents around one random base point.
    NearConsensus,
    /// One base point per weakly connected component of the graph.
    Clusters,
}

impl InitKind {
    pub fn name(self) -> &'static str {
        match self {
            InitKind::NearConsensus => "near_consensus",
            InitKind::Clusters => "clusters",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub n: usize,
    /// `None` defers to the global `--seed`.
    pub seed: Option<u64>,
    pub spread: f64,
    pub init: InitKind,
    pub h: Option<f64>,
    pub t_end: Option<f64>,
    pub window: Option<(f64, f64)>,
    pub floor: Option<f64>,
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

fn field(key: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        field: key.to_string(),
        msg: msg.into(),
    }
}

fn parse_lines(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| field(&format!("line {}", lineno + 1), "expected `key = value`"))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(field(k, "unknown key"));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(field(k, "duplicate key"));
        }
    }
    Ok(map)
}

struct Fields {
    map: BTreeMap<String, String>,
    base: PathBuf,
}

impl Fields {
    fn parsed<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, CliError> {
        self.map
            .get(key)
            .map(|v| v.parse().map_err(|_| field(key, format!("expected {what}, got `{v}`"))))
            .transpose()
    }

    fn float(&self, key: &str, ok: impl Fn(f64) -> bool, what: &str) -> Result<Option<f64>, CliError> {
        match self.parsed::<f64>(key, what)? {
            Some(x) if !(x.is_finite() && ok(x)) => Err(field(key, format!("expected {what}, got {x}"))),
            x => Ok(x),
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.map.get(key).map(|p| self.base.join(p))
    }
}

pub fn parse_weights(v: &str) -> Result<WeightSpec, CliError> {
    let bad = || field("graph.weights", format!("expected `unit` or `uniform LO HI` with 0 < LO < HI, got `{v}`"));
    let parts: Vec<&str> = v.split_whitespace().collect();
    match parts.as_slice() {
        ["unit"] => Ok(WeightSpec::Unit),
        ["uniform", lo, hi] => {
            let (lo, hi): (f64, f64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
            if lo > 0.0 && lo < hi && hi.is_finite() {
                Ok(WeightSpec::Uniform { lo, hi })
            } else {
                Err(bad())
            }
        }
        _ => Err(bad()),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let f = Fields {
            map: parse_lines(text)?,
            base: base.to_path_buf(),
        };
        let graph = match (f.map.get("graph.family"), f.path("graph.path")) {
            (Some(_), Some(_)) => return Err(field("graph.path", "conflicts with graph.family")),
            (None, None) => return Err(field("graph.family", "one of graph.family or graph.path is required")),
            (None, Some(p)) => {
                if !p.is_file() {
                    return Err(field("graph.path", format!("no such file `{}`", p.display())));
                }
                if let Some(k) = ["graph.m", "graph.seed", "graph.weights", "graph.extra_edge_prob"]
                    .into_iter()
                    .find(|k| f.map.contains_key(*k))
                {
                    return Err(field(k, "only valid together with graph.family"));
                }
                GraphSource::Path(p)
            }
            (Some(name), None) => {
                let family: Family = name.parse().map_err(|_| {
                    let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                    field("graph.family", format!("unknown family `{name}` (expected one of {})", names.join(", ")))
                })?;
                let m: usize = f.parsed("graph.m", "a node count")?.ok_or_else(|| field("graph.m", "required with graph.family"))?;
                if m < family.min_nodes() {
                    return Err(field("graph.m", format!("{family} needs m >= {}, got {m}", family.min_nodes())));
                }
                let mut params = GraphParams::seeded(f.parsed("graph.seed", "an unsigned integer")?.unwrap_or(0));
                if let Some(w) = f.map.get("graph.weights") {
                    params.weights = parse_weights(w)?;
                }
                if let Some(p) = f.float("graph.extra_edge_prob", |p| (0.0..=1.0).contains(&p), "a probability in [0, 1]")? {
                    params.extra_edge_prob = p;
                }
                GraphSource::Family { family, m, params }
            }
        };

        let n = f.parsed("sim.n", "an integer >= 2")?.unwrap_or(3);
        if n < 2 {
            return Err(field("sim.n", format!("expected an integer >= 2, got {n}")));
        }
        let window = match (
            f.float("fit.window_lo", |x| x >= 0.0, "a time >= 0")?,
            f.float("fit.window_hi", |x| x > 0.0, "a time > 0")?,
        ) {
            (None, None) => None,
            (Some(lo), Some(hi)) if lo < hi => Some((lo, hi)),
            (Some(lo), Some(hi)) => return Err(field("fit.window_hi", format!("must exceed fit.window_lo ({lo}), got {hi}"))),
            (Some(_), None) => return Err(field("fit.window_hi", "required with fit.window_lo")),
            (None, Some(_)) => return Err(field("fit.window_lo", "required with fit.window_hi")),
        };
        let cfg = ExperimentConfig {
            graph,
            n,
            seed: f.parsed("sim.seed", "an unsigned integer")?,
            spread: f
                .float("sim.spread", |s| (0.0..std::f64::consts::FRAC_PI_2).contains(&s), "radians in [0, π/2)")?
                .unwrap_or(0.05),
            init: match f.map.get("sim.init").map(String::as_str) {
                None | Some("near_consensus") => InitKind::NearConsensus,
                Some("clusters") => InitKind::Clusters,
                Some(other) => {
                    return Err(field("sim.init", format!("expected `near_consensus` or `clusters`, got `{other}`")))
                }
            },
            h: f.float("sim.h", |h| h > 0.0, "a step > 0")?,
            t_end: f.float("sim.t_end", |t| t > 0.0, "a time > 0")?,
            window,
            floor: f.float("fit.floor", |x| x > 0.0, "a level > 0")?,
            csv: f.path("out.csv"),
            summary: f.path("out.summary"),
        };
        if let (Some(h), Some(t)) = (cfg.h, cfg.t_end) {
            if h > t {
                return Err(field("sim.h", format!("step {h} exceeds sim.t_end {t}")));
            }
        }
        for (key, p) in [("out.csv", &cfg.csv), ("out.summary", &cfg.summary)] {
            if let Some(dir) = p.as_ref().and_then(|p| p.parent()) {
                if !dir.as_os_str().is_empty() && !dir.is_dir() {
                    return Err(field(key, format!("directory `{}` does not exist", dir.display())));
                }
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::parse(text, Path::new(""))
    }

    fn field_of(e: CliError) -> String {
        match e {
            CliError::Config { field, .. } => field,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimal_family() {
        let c = parse("# cycle\ngraph.family = directed_cycle\ngraph.m = 4\n\nsim.seed=1\n").unwrap();
        assert_eq!(
            c.graph,
            GraphSource::Family {
                family: Family::DirectedCycle,
                m: 4,
                params: GraphParams::default()
            }
        );
        assert_eq!((c.n, c.seed, c.spread), (3, Some(1), 0.05));
        assert!(c.window.is_none() && c.csv.is_none());
    }

    #[test]
    fn weights_and_window() {
        let c = parse(
            "graph.family = random_spanning_tree_plus_edges\ngraph.m = 5\ngraph.seed = 7\n\
             graph.weights = uniform 0.5 2\nfit.window_lo = 1\nfit.window_hi = 4\nsim.spread = 0",
        )
        .unwrap();
        let GraphSource::Family { params, .. } = c.graph else { panic!() };
        assert_eq!(params.seed, 7);
        assert_eq!(params.weights, WeightSpec::Uniform { lo: 0.5, hi: 2.0 });
        assert_eq!(c.window, Some((1.0, 4.0)));
        assert_eq!(c.spread, 0.0);
    }

    #[test]
    fn field_level_errors() {
        let base = "graph.family = complete\ngraph.m = 3\n";
        for (extra, key) in [
            ("sim.h = -1", "sim.h"),
            ("sim.spread = 2", "sim.spread"),
            ("sim.n = 1", "sim.n"),
            ("sim.seed = x", "sim.seed"),
            ("sim.init = spread_out", "sim.init"),
            ("fit.window_lo = 3", "fit.window_hi"),
            ("fit.window_lo = 3\nfit.window_hi = 2", "fit.window_hi"),
            ("bogus.key = 1", "bogus.key"),
            ("graph.m = 4", "graph.m"),
            ("graph.weights = heavy", "graph.weights"),
            ("graph.path = nowhere.txt", "graph.path"),
            ("out.csv = no/such/dir/x.csv", "out.csv"),
        ] {
            assert_eq!(field_of(parse(&format!("{base}{extra}")).unwrap_err()), key, "{extra}");
        }
        assert_eq!(field_of(parse("graph.family = tree\ngraph.m = 3").unwrap_err()), "graph.family");
        assert_eq!(field_of(parse("graph.family = disconnected_pair\ngraph.m = 3").unwrap_err()), "graph.m");
        assert_eq!(field_of(parse("sim.n = 3").unwrap_err()), "graph.family");
        assert_eq!(field_of(parse("graph.family complete").unwrap_err()), "line 1");
    }
}
