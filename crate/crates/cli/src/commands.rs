//! Subcommand bodies. Each returns the process exit code or an error that
//! maps to exit code 1.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use causal_id::counterexamples::{catalog_entry, certificate, negative_info_model, paper_graph_catalog, CatalogEntry, Expected};
use causal_id::estimand::{render_estimand, Style};
use causal_id::graph::{CausalGraph, NodeId, NodeSet};
use causal_id::identify::{identify as run_identify, Verdict};
use causal_id::inference::{estimand_gap, info_measures, random_binary_model, random_model_with_concentration, DiscreteModel};
use causal_id::model_file::ModelFile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsl::{parse_graph_named, print_graph, NamedGraph};
use crate::query::{format_query, parse_query, parse_set};
use crate::trace::trace_json;
use crate::{Format, EXIT_NOT_IDENTIFIABLE, EXIT_OK, EXIT_VERIFY_FAILED};

fn load_graph(path: &str) -> Result<NamedGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read graph file {path}"))?;
    parse_graph_named(&text).with_context(|| format!("in {path}"))
}

type Edges = Vec<(NodeId, NodeId)>;

fn edge_sets(g: &CausalGraph) -> (NodeSet, Edges, Edges) {
    let mut d = g.directed_edges().to_vec();
    let mut a = g.bidirected_arcs().to_vec();
    d.sort();
    a.sort();
    (g.visible().clone(), d, a)
}

/// The catalog entry posing the same query on the same graph.
pub fn catalog_match(g: &CausalGraph, s: &NodeSet, t: &NodeSet) -> Option<CatalogEntry> {
    let key = edge_sets(g);
    paper_graph_catalog().into_iter().find(|e| e.s == *s && e.t == *t && edge_sets(&e.graph) == key)
}

/// Clamps values that print as zero so they never render as `-0.000…`.
fn fixed(v: f64) -> String {
    let s = format!("{v:.12}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        format!("{:.12}", 0.0)
    } else {
        s
    }
}

pub fn identify(graph: &str, query: &str, format: Format, out: &mut dyn Write) -> Result<i32> {
    let named = load_graph(graph)?;
    let (s, t) = parse_query(query, &named.graph)?;
    let trace = run_identify(&named.graph, &s, &t)?;
    let cert = catalog_match(&named.graph, &s, &t).and_then(|e| e.certificate);
    let code = if trace.is_identifiable() { EXIT_OK } else { EXIT_NOT_IDENTIFIABLE };
    if format == Format::TraceJson {
        writeln!(out, "{}", serde_json::to_string_pretty(&trace_json(&trace, cert))?)?;
        return Ok(code);
    }
    match &trace.verdict {
        Verdict::Identifiable { estimand } => {
            let style = if format == Format::Latex { Style::Latex } else { Style::Plain };
            writeln!(out, "{}", render_estimand(estimand, style))?;
        }
        Verdict::NotIdentifiable { witness } => {
            writeln!(out, "NOT-IDENTIFIABLE")?;
            writeln!(out, "witness D = {}", witness.d)?;
            write!(out, "{}", print_graph("witness", &witness.graph))?;
            if let Some(c) = cert {
                writeln!(out, "certificate: {c}")?;
            }
        }
    }
    Ok(code)
}

/// Mixes `step` of `other` into every CPT of `base`.
fn blend(base: &DiscreteModel, other: &DiscreteModel, step: f64) -> DiscreteModel {
    let tables = base
        .expanded()
        .ordered_nodes()
        .into_iter()
        .map(|n| {
            let v = base
                .cpt(&n)
                .values()
                .iter()
                .zip(other.cpt(&n).values())
                .map(|(a, b)| (1.0 - step) * a + step * b)
                .collect();
            (n, v)
        })
        .collect();
    DiscreteModel::new(base.graph().clone(), base.cardinalities().clone(), tables).expect("convex mix of models")
}

/// Binary model with uniform latents and random deterministic mechanisms,
/// each mixed with `noise` of the uniform distribution.
fn near_deterministic_model(g: &CausalGraph, rng: &mut ChaCha8Rng, noise: f64) -> DiscreteModel {
    let expanded = causal_id::graph::latent_expand(g);
    let cards: BTreeMap<NodeId, usize> = expanded.ordered_nodes().into_iter().map(|n| (n, 2)).collect();
    let tables = expanded
        .ordered_nodes()
        .into_iter()
        .map(|n| {
            let rows = 1usize << expanded.parents(&n).len();
            let v = if expanded.is_latent(&n) {
                vec![0.5; 2 * rows]
            } else {
                (0..rows)
                    .flat_map(|_| {
                        let hit = rng.random_range(0..2);
                        (0..2).map(move |k| if k == hit { 1.0 - noise / 2.0 } else { noise / 2.0 })
                    })
                    .collect()
            };
            (n, v)
        })
        .collect();
    DiscreteModel::new(g.clone(), cards, tables).expect("well-formed tables")
}

/// Dirichlet concentrations cycled over search trials; `None` starts from
/// a near-deterministic model.
const SEARCH_STARTS: [Option<f64>; 4] = [Some(1.0), None, Some(0.1), None];
const SEARCH_NOISE: f64 = 1e-3;
const SEARCH_STEPS: usize = 12;

pub fn verify(graph: &str, query: &str, trials: usize, seed: u64, tolerance: f64, out: &mut dyn Write) -> Result<i32> {
    if tolerance.is_nan() || tolerance < 0.0 {
        bail!("tolerance must be non-negative");
    }
    let named = load_graph(graph)?;
    let g = &named.graph;
    let (s, t) = parse_query(query, g)?;
    let trace = run_identify(g, &s, &t)?;
    writeln!(out, "query {}", format_query(&s, &t))?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut code = EXIT_OK;
    match &trace.verdict {
        Verdict::Identifiable { estimand } => {
            writeln!(out, "verdict identifiable")?;
            writeln!(out, "estimand {}", render_estimand(estimand, Style::Plain))?;
            let mut worst = 0.0f64;
            for i in 0..trials {
                let model_seed: u64 = master.random();
                let gap = estimand_gap(&random_binary_model(g, model_seed), estimand, &s, &t)?;
                worst = worst.max(gap);
                let status = if gap <= tolerance { "ok" } else { "FAIL" };
                writeln!(out, "trial {i} seed {model_seed} gap {gap:.3e} {status}")?;
            }
            let pass = worst <= tolerance;
            writeln!(
                out,
                "max gap {worst:.3e} over {trials} trials, tolerance {tolerance:e}: {}",
                if pass { "PASS" } else { "FAIL" }
            )?;
            if !pass {
                code = EXIT_VERIFY_FAILED;
            }
        }
        Verdict::NotIdentifiable { witness } => {
            writeln!(out, "verdict not-identifiable")?;
            writeln!(out, "witness D = {}", witness.d)?;
            let mut best: Option<(usize, f64)> = None;
            for i in 0..trials {
                let trial_seed: u64 = master.random();
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
                let start = SEARCH_STARTS[i % SEARCH_STARTS.len()];
                let h_of = |m: &DiscreteModel| info_measures(m, &s, &t, &NodeSet::new()).map(|r| r.h_uprooted_mi).ok();
                let draw = |rng: &mut ChaCha8Rng| match start {
                    Some(alpha) => random_model_with_concentration(g, &BTreeMap::new(), rng.random(), alpha),
                    None => near_deterministic_model(g, rng, SEARCH_NOISE),
                };
                let mut model = draw(&mut rng);
                let mut h = h_of(&model).unwrap_or(f64::INFINITY);
                // small steps toward fresh draws, kept only when H decreases
                for _ in 0..SEARCH_STEPS {
                    let other = draw(&mut rng);
                    let candidate = blend(&model, &other, 0.1);
                    if let Some(hc) = h_of(&candidate) {
                        if hc < h {
                            model = candidate;
                            h = hc;
                        }
                    }
                }
                let label = start.map_or("near-deterministic".to_string(), |a| format!("dirichlet {a}"));
                writeln!(out, "search trial {i} seed {trial_seed} {label} H(s:t^) {}", fixed(h))?;
                if best.is_none_or(|(_, b)| h < b) {
                    best = Some((i, h));
                }
            }
            match best {
                Some((i, h)) if h < -tolerance => {
                    writeln!(out, "search: negative witness at trial {i}, H(s:t^) = {}", fixed(h))?
                }
                Some((_, h)) => writeln!(out, "search: no negative witness found, min H(s:t^) = {}", fixed(h))?,
                None => writeln!(out, "search: 0 trials")?,
            }
            if let Some(name) = catalog_match(g, &s, &t).and_then(|e| e.certificate) {
                if !replay_certificate(name, tolerance, out)? {
                    code = EXIT_VERIFY_FAILED;
                }
            }
        }
    }
    Ok(code)
}

/// Replays a shipped certificate; true when it holds.
fn replay_certificate(name: &str, tolerance: f64, out: &mut dyn Write) -> Result<bool> {
    let mut ok = true;
    if let Some(pair) = certificate(name) {
        let obs = pair.observed_gap()?;
        let int = pair.interventional_gap()?;
        let holds = obs <= tolerance && int >= 1e-3;
        ok &= holds;
        writeln!(
            out,
            "certificate {name}: observed gap {obs:.3e}, interventional gap {int:.6}: {}",
            if holds { "PASS" } else { "FAIL" }
        )?;
    }
    if let (Some(model), Some(entry)) = (negative_info_model(name), catalog_entry(name)) {
        let h = info_measures(&model, &entry.s, &entry.t, &NodeSet::new())?.h_uprooted_mi;
        let holds = h < -tolerance;
        ok &= holds;
        writeln!(out, "certificate {name}: shipped model H(s:t^) = {}: {}", fixed(h), if holds { "PASS" } else { "FAIL" })?;
    }
    Ok(ok)
}

pub fn info(graph: &str, model: &str, b: &str, a: &str, e: &str, out: &mut dyn Write) -> Result<i32> {
    let named = load_graph(graph)?;
    let text = fs::read_to_string(model).with_context(|| format!("cannot read model file {model}"))?;
    let m = ModelFile::parse(&text)
        .and_then(|f| f.to_model(&named.graph, Some(&named.name)))
        .with_context(|| format!("in {model}"))?;
    let g = &named.graph;
    let (b, a, e) = (parse_set(b, g)?, parse_set(a, g)?, parse_set(e, g)?);
    let r = info_measures(&m, &b, &a, &e)?;
    for (label, v) in [
        ("h_mi", r.h_mi),
        ("h_uprooted_mi", r.h_uprooted_mi),
        ("h_cmi", r.h_cmi),
        ("h_uprooted_cmi", r.h_uprooted_cmi),
        ("loss_mi", r.loss_mi),
        ("loss_cmi", r.loss_cmi),
    ] {
        writeln!(out, "{label:<15} {}", fixed(v))?;
    }
    writeln!(out, "identity h_uprooted_cmi + loss_cmi - h_cmi = {}", fixed(r.h_uprooted_cmi + r.loss_cmi - r.h_cmi))?;
    Ok(EXIT_OK)
}

/// Files emitted for one catalog entry: `(file name, contents)`.
pub fn example_files(entry: &CatalogEntry) -> Vec<(String, String)> {
    let mut graph_text = format!(
        "# query: {}\n# expected: {}\n",
        format_query(&entry.s, &entry.t),
        match entry.expected {
            Expected::Identifiable => "identifiable",
            Expected::NotIdentifiable => "not-identifiable",
        }
    );
    graph_text.push_str(&print_graph(entry.name, &entry.graph));
    let mut files = vec![(format!("{}.graph", entry.name), graph_text)];
    if let Some(name) = entry.certificate {
        if let Some(pair) = certificate(name) {
            files.push((format!("{}.a.json", entry.name), ModelFile::from_model(&pair.model_a, Some(entry.name)).to_json()));
            files.push((format!("{}.b.json", entry.name), ModelFile::from_model(&pair.model_b, Some(entry.name)).to_json()));
        }
        if let Some(m) = negative_info_model(name) {
            files.push((format!("{}.negative.json", entry.name), ModelFile::from_model(&m, Some(entry.name)).to_json()));
        }
    }
    files
}

pub fn examples(name: &str, out_dir: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    let entries = if name == "all" {
        paper_graph_catalog()
    } else {
        let known: Vec<&str> = paper_graph_catalog().iter().map(|e| e.name).collect();
        vec![catalog_entry(name).with_context(|| format!("unknown example {name:?}; known: all, {}", known.join(", ")))?]
    };
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {dir}"))?;
    }
    for (i, entry) in entries.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        writeln!(out, "== {}", entry.name)?;
        writeln!(out, "query: {}", format_query(&entry.s, &entry.t))?;
        let verdict = match entry.expected {
            Expected::Identifiable => "identifiable",
            Expected::NotIdentifiable => "not-identifiable",
        };
        writeln!(out, "expected: {verdict}")?;
        if let Some(e) = entry.expected_estimand {
            writeln!(out, "estimand: {e}")?;
        }
        if let Some(c) = entry.certificate {
            writeln!(out, "certificate: {c}")?;
        }
        for (file, contents) in example_files(entry) {
            match out_dir {
                Some(dir) => {
                    let path = Path::new(dir).join(&file);
                    fs::write(&path, &contents).with_context(|| format!("cannot write {}", path.display()))?;
                    writeln!(out, "wrote {}", path.display())?;
                }
                None => {
                    writeln!(out, "--- {file}")?;
                    write!(out, "{contents}")?;
                    if !contents.ends_with('\n') {
                        writeln!(out)?;
                    }
                }
            }
        }
    }
    Ok(EXIT_OK)
}
