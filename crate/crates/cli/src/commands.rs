use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use sphere_sync::dynamics::{
    error_from_states, initial_in_clusters, initial_near_consensus, integrate_riccati, integrate_sphere, IntegratorOptions,
};
use sphere_sync::graph::{
    generate, has_spanning_tree, laplacian, laplacian_rank, read_edge_list, write_edge_list, Family, GraphParams,
    DEFAULT_RANK_TOL,
};
use sphere_sync::rate::{measure_sync_rate, RateEstimate, RateOptions};
use sphere_sync::spectra::{
    default_zero_tol, lambda2, laplacian_spectrum, verify_block_structure, verify_lemma1_with,
    verify_lemma3_construction, verify_prop2_with, SpectralReport, SpectrumMethod, BLOCK_TOL,
};
use sphere_sync::Digraph64;

use crate::config::{ExperimentConfig, GraphSource, InitKind};
use crate::summary::{Map, Node};
use crate::CliError;

/// Result of a command: the summary document and whether every check passed.
#[derive(Debug)]
pub struct Outcome {
    pub doc: Map,
    pub passed: bool,
}

pub fn load_graph(path: &Path) -> Result<Digraph64, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_edge_list(&text).map_err(|source| CliError::Graph {
        origin: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn complex_list(values: Vec<num_complex::Complex<f64>>) -> Node {
    Node::List(values.into_iter().map(Node::complex).collect())
}

fn spectral_report(r: &SpectralReport, tol: f64) -> Map {
    let mut m = Map::new();
    m.insert("passed", r.passed(tol))
        .insert("method", r.method.name())
        .insert("max_residual", r.max_residual);
    if let Some(f) = r.float_residual {
        m.insert("float_residual", f);
    }
    m.insert("computed", complex_list(r.computed.values().to_vec()))
        .insert("predicted", complex_list(r.predicted.values().to_vec()))
        .insert("pairing", r.pairing.clone());
    m
}

fn error_entry(e: impl std::fmt::Display) -> Map {
    Map::new().with("passed", false).with("error", e.to_string())
}

pub fn cmd_generate(family: Family, m: usize, params: &GraphParams, out: Option<&Path>) -> Result<(Outcome, String), CliError> {
    let g: Digraph64 = generate(family, m, params).map_err(|source| CliError::Graph {
        origin: format!("{family} m={m}"),
        source,
    })?;
    let text = write_edge_list(&g);
    let mut doc = Map::new();
    doc.insert("family", family.name())
        .insert("m", m)
        .insert("seed", params.seed)
        .insert("edges", g.edges().count())
        .insert("spanning_tree", has_spanning_tree(&g, DEFAULT_RANK_TOL));
    if let Some(p) = out {
        write_file(p, &text)?;
        doc.insert("path", p.display().to_string());
    }
    Ok((Outcome { doc, passed: true }, text))
}

pub fn cmd_spectrum(path: &Path, method: SpectrumMethod) -> Result<Outcome, CliError> {
    let g = load_graph(path)?;
    let l = laplacian(&g);
    let spec = laplacian_spectrum(&l, method).map_err(CliError::failed)?;
    let tree = has_spanning_tree(&g, DEFAULT_RANK_TOL);
    let mut doc = Map::new();
    doc.insert("graph", path.display().to_string())
        .insert("m", g.m())
        .insert("method", method.name())
        .insert("rank", laplacian_rank(&l, DEFAULT_RANK_TOL))
        .insert("spanning_tree", tree);
    if let Some(root) = g.spanning_tree_root() {
        doc.insert("spanning_tree_root", root);
    }
    doc.insert("eigenvalues", complex_list(spec.sorted()));
    if tree {
        let l2 = lambda2(&spec, default_zero_tol(&l)).map_err(CliError::failed)?;
        doc.insert("lambda2", Node::complex(l2)).insert("lambda2_re", l2.re);
    }
    Ok(Outcome { doc, passed: true })
}

/// A graph to verify and how it was obtained.
#[derive(Debug, Clone)]
pub struct VerifyItem {
    pub source: String,
    pub seed: Option<u64>,
    pub graph: Result<Digraph64, String>,
}

/// `count` random graphs; graph `k` has `m = 2 + k mod (mmax − 1)` nodes and
/// seed `seed + k`, so every size in `2..=mmax` is covered.
pub fn random_batch(count: usize, mmax: usize, seed: u64) -> Vec<VerifyItem> {
    (0..count)
        .map(|k| {
            let m = 2 + k % (mmax - 1);
            let s = seed.wrapping_add(k as u64);
            let family = Family::RandomSpanningTreePlusEdges;
            VerifyItem {
                source: format!("{family} m={m}"),
                seed: Some(s),
                graph: generate(family, m, &GraphParams::seeded(s)).map_err(|e| e.to_string()),
            }
        })
        .collect()
}

fn verify_one(index: usize, item: &VerifyItem, tol: f64, method: SpectrumMethod) -> (Map, bool) {
    let mut doc = Map::new();
    doc.insert("index", index).insert("source", item.source.clone());
    if let Some(s) = item.seed {
        doc.insert("seed", s);
    }
    let g = match &item.graph {
        Ok(g) => g,
        Err(e) => {
            doc.insert("passed", false).insert("error", e.clone());
            return (doc, false);
        }
    };
    let l = laplacian(g);
    doc.insert("m", g.m()).insert("spanning_tree", has_spanning_tree(g, DEFAULT_RANK_TOL));
    let mut ok = true;
    let mut check = |name: &str, entry: Result<(Map, bool), String>| {
        let (m, passed) = entry.unwrap_or_else(|e| (error_entry(e), false));
        ok &= passed;
        (name.to_string(), m)
    };
    let checks = [
        check(
            "prop2",
            verify_prop2_with(g, tol, method)
                .map(|r| (spectral_report(&r, tol), r.passed(tol)))
                .map_err(|e| e.to_string()),
        ),
        check(
            "lemma1",
            verify_lemma1_with(&l, tol, method)
                .map(|r| (spectral_report(&r, tol), r.passed(tol)))
                .map_err(|e| e.to_string()),
        ),
        check(
            "block_structure",
            verify_block_structure(&l, BLOCK_TOL)
                .map(|b| {
                    let passed = b.pattern_residual <= BLOCK_TOL && b.projection_residual <= BLOCK_TOL;
                    let m = Map::new()
                        .with("passed", passed)
                        .with("tol", BLOCK_TOL)
                        .with("pattern_residual", b.pattern_residual)
                        .with("projection_residual", b.projection_residual);
                    (m, passed)
                })
                .map_err(|e| e.to_string()),
        ),
        check(
            "lemma3",
            verify_lemma3_construction(&l, tol)
                .map(|r| {
                    let passed = r.b_squared_zero
                        && r.identity_kron_l_annihilates
                        && r.ones_kron_hat_annihilates
                        && r.minus.passed(tol)
                        && r.plus.passed(tol);
                    let m = Map::new()
                        .with("passed", passed)
                        .with("b_squared_zero", r.b_squared_zero)
                        .with("identity_kron_l_annihilates", r.identity_kron_l_annihilates)
                        .with("ones_kron_hat_annihilates", r.ones_kron_hat_annihilates)
                        .with("max_residual", r.max_residual())
                        .with("minus", spectral_report(&r.minus, tol))
                        .with("plus", spectral_report(&r.plus, tol));
                    (m, passed)
                })
                .map_err(|e| e.to_string()),
        ),
    ];
    doc.insert("passed", ok);
    for (name, m) in checks {
        doc.insert(&name, m);
    }
    (doc, ok)
}

/// Verifies every item in parallel; results keep input order.
pub fn cmd_verify(items: &[VerifyItem], tol: f64, method: SpectrumMethod) -> Outcome {
    let results: Vec<(Map, bool)> = items
        .par_iter()
        .enumerate()
        .map(|(k, item)| verify_one(k, item, tol, method))
        .collect();
    let passed = results.iter().filter(|r| r.1).count();
    let mut doc = Map::new();
    doc.insert("tol", tol)
        .insert("method", method.name())
        .insert("graphs", items.len())
        .insert("passed", passed)
        .insert("failed", items.len() - passed)
        .insert("results", Node::List(results.into_iter().map(|r| r.0.into()).collect()));
    Outcome {
        passed: passed == items.len(),
        doc,
    }
}

fn resolve_graph(cfg: &ExperimentConfig) -> Result<(Digraph64, Map), CliError> {
    match &cfg.graph {
        GraphSource::Path(p) => Ok((load_graph(p)?, Map::new().with("path", p.display().to_string()))),
        GraphSource::Family { family, m, params } => {
            let g = generate(*family, *m, params).map_err(|source| CliError::Graph {
                origin: format!("{family} m={m}"),
                source,
            })?;
            Ok((g, Map::new().with("family", family.name()).with("seed", params.seed)))
        }
    }
}

fn graph_section(g: &Digraph64, mut source: Map) -> Map {
    source
        .insert("m", g.m())
        .insert("edges", g.edges().count())
        .insert("spanning_tree", has_spanning_tree(g, DEFAULT_RANK_TOL));
    source
}

/// CSV with columns `t, max_err, max_e, e_0_1, e_0_2, …`.
fn trajectory_csv(times: &[f64], rows: &[(f64, f64, Vec<f64>)], m: usize) -> String {
    let mut out = String::from("t,max_err,max_e");
    for i in 0..m {
        for j in i + 1..m {
            write!(out, ",e_{i}_{j}").unwrap();
        }
    }
    out.push('\n');
    for (t, (d, e_max, upper)) in times.iter().zip(rows) {
        write!(out, "{t:.16e},{d:.16e},{e_max:.16e}").unwrap();
        for e in upper {
            write!(out, ",{e:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn cmd_simulate(cfg: &ExperimentConfig, seed: u64, cross_tol: f64) -> Result<Outcome, CliError> {
    let (g, source) = resolve_graph(cfg)?;
    let h = cfg.h.unwrap_or_else(|| IntegratorOptions::default_step(&g));
    let t_end = cfg.t_end.unwrap_or(10.0);
    let opts = IntegratorOptions::new(h, t_end);
    let cfg0 = match cfg.init {
        InitKind::NearConsensus => initial_near_consensus::<f64>(g.m(), cfg.n, cfg.spread, seed),
        InitKind::Clusters => initial_in_clusters::<f64>(&g.weak_components(), cfg.n, cfg.spread, seed),
    }
    .map_err(CliError::failed)?;
    let sphere = integrate_sphere(&g, &cfg0, &opts).map_err(CliError::failed)?;
    let riccati = integrate_riccati(&g, &error_from_states(&cfg0), &opts).map_err(CliError::failed)?;

    let mut cross = 0.0f64;
    let mut rows = Vec::with_capacity(sphere.len());
    for (c, e_ric) in sphere.samples.iter().zip(&riccati.samples) {
        let e = error_from_states(c);
        cross = cross.max(e.entries().max_abs_diff(e_ric.entries()).map_err(CliError::failed)?);
        rows.push((c.max_pairwise_distance(), e.max_entry(), e.upper()));
    }
    if let Some(p) = &cfg.csv {
        write_file(p, &trajectory_csv(&sphere.times, &rows, g.m()))?;
    }
    let first = rows.first().map_or(0.0, |r| r.0);
    let last = rows.last().map_or((0.0, 0.0), |r| (r.0, r.1));
    let passed = cross <= cross_tol;
    let mut doc = Map::new();
    doc.insert("graph", graph_section(&g, source)).insert(
        "sim",
        Map::new()
            .with("n", cfg.n)
            .with("seed", seed)
            .with("spread", cfg.spread)
            .with("init", cfg.init.name())
            .with("h", sphere.meta.h)
            .with("t_end", t_end)
            .with("steps", sphere.meta.steps)
            .with("sample_every", sphere.meta.sample_every)
            .with("samples", sphere.len()),
    );
    doc.insert("initial_max_err", first)
        .insert("final_max_err", last.0)
        .insert("final_max_e", last.1)
        .insert("cross_check_residual", cross)
        .insert("cross_check_tol", cross_tol)
        .insert("cross_check_passed", passed)
        .insert("sphere_max_correction", sphere.meta.max_correction)
        .insert("riccati_max_correction", riccati.meta.max_correction);
    if let Some(p) = &cfg.csv {
        doc.insert("csv", p.display().to_string());
    }
    Ok(Outcome { doc, passed })
}

fn estimate_section(e: &RateEstimate) -> Map {
    let mut m = Map::new();
    m.insert("quantity", e.quantity.name())
        .insert("mu_hat", e.mu_hat)
        .insert("predicted", e.predicted)
        .insert("relative_error", e.relative_error)
        .insert("window_lo", e.window.0)
        .insert("window_hi", e.window.1)
        .insert("r_squared", e.r_squared)
        .insert("fit", e.fit.name())
        .insert("n_points", e.n_points);
    if let Some(r) = e.raw_r_squared {
        m.insert("raw_r_squared", r);
    }
    if let Some(w) = e.ringing_frequency {
        m.insert("ringing_frequency", w);
    }
    m
}

pub fn cmd_rate(cfg: &ExperimentConfig, seed: u64, max_rel_error: f64) -> Result<Outcome, CliError> {
    let (g, source) = resolve_graph(cfg)?;
    let mut opts = RateOptions {
        spread: cfg.spread,
        h: cfg.h,
        t_end: cfg.t_end,
        window: cfg.window,
        ..RateOptions::default()
    };
    if let Some(f) = cfg.floor {
        opts.floor = f;
    }
    if cfg.init != InitKind::NearConsensus {
        return Err(CliError::Config {
            field: "sim.init".into(),
            msg: "rate fits start near consensus".into(),
        });
    }
    if opts.spread == 0.0 {
        return Err(CliError::Config {
            field: "sim.spread".into(),
            msg: "a rate fit needs sim.spread > 0".into(),
        });
    }
    let r = measure_sync_rate(&g, cfg.n, seed, &opts).map_err(CliError::failed)?;
    let passed = r.state.relative_error <= max_rel_error && r.error.relative_error <= max_rel_error;
    let mut doc = Map::new();
    doc.insert("graph", graph_section(&g, source))
        .insert("n", cfg.n)
        .insert("seed", seed)
        .insert("spread", opts.spread)
        .insert("h", r.h)
        .insert("t_end", r.t_end)
        .insert("lambda2_re", r.lambda2.re)
        .insert("lambda2_im", r.lambda2.im)
        .insert("lambda2_simple", r.lambda2_simple)
        .insert("mu_hat_state", r.state.mu_hat)
        .insert("mu_hat_error", r.error.mu_hat)
        .insert("relative_error_state", r.state.relative_error)
        .insert("relative_error_error", r.error.relative_error)
        .insert("max_relative_error", max_rel_error)
        .insert("passed", passed)
        .insert("state", estimate_section(&r.state))
        .insert("error", estimate_section(&r.error));
    if let Some(e) = &r.mean_state {
        doc.insert("mean_state", estimate_section(e));
    }
    Ok(Outcome { doc, passed })
}
