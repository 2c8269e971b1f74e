//! `P(s1, s2 | do(t1), do(t2))` query syntax and node-set flags.

use anyhow::{bail, Context, Result};
use causal_id::graph::{CausalGraph, NodeId, NodeSet};

/// Parses a query against `graph`; returns `(s, t)`.
pub fn parse_query(text: &str, graph: &CausalGraph) -> Result<(NodeSet, NodeSet)> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact
        .strip_prefix("P(")
        .and_then(|r| r.strip_suffix(')'))
        .with_context(|| format!("query {text:?} must have the form P(s | do(t))"))?;
    let (lhs, rhs) = match inner.split_once('|') {
        Some((l, r)) => (l, Some(r)),
        None => (inner, None),
    };
    let s = names(lhs, graph, "outcome")?;
    if s.is_empty() {
        bail!("query {text:?} has no outcome variables");
    }
    let mut t = NodeSet::new();
    if let Some(rhs) = rhs {
        let mut rest = rhs;
        while !rest.is_empty() {
            let body = rest
                .strip_prefix("do(")
                .with_context(|| format!("conditioning part {rhs:?} must be a list of do(...) terms"))?;
            let close = body.find(')').with_context(|| format!("unclosed do( in {rhs:?}"))?;
            for n in names(&body[..close], graph, "intervention")? {
                if !t.insert(n.clone()) {
                    bail!("{n} is intervened on twice");
                }
            }
            rest = &body[close + 1..];
            if let Some(r) = rest.strip_prefix(',') {
                if r.is_empty() {
                    bail!("trailing comma in {rhs:?}");
                }
                rest = r;
            } else if !rest.is_empty() {
                bail!("unexpected {rest:?} after do(...)");
            }
        }
        if t.is_empty() {
            bail!("empty intervention list in {text:?}");
        }
    }
    if let Some(n) = s.intersection(&t).first() {
        bail!("{n} is both an outcome and an intervention");
    }
    Ok((s, t))
}

fn names(list: &str, graph: &CausalGraph, what: &str) -> Result<NodeSet> {
    let mut out = NodeSet::new();
    if list.is_empty() {
        return Ok(out);
    }
    for part in list.split(',') {
        let n = NodeId::new(part).map_err(|_| anyhow::anyhow!("bad {what} name {part:?}"))?;
        if !graph.visible().contains(&n) {
            bail!("{what} {n} is not a node of the graph");
        }
        if !out.insert(n.clone()) {
            bail!("{n} is listed twice");
        }
    }
    Ok(out)
}

/// Parses a comma or whitespace separated node list such as `y1,y2` or
/// `{y1, y2}`; an empty string is the empty set.
pub fn parse_set(text: &str, graph: &CausalGraph) -> Result<NodeSet> {
    let body = text.trim().trim_start_matches('{').trim_end_matches('}');
    let joined: Vec<&str> = body.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
    names(&joined.join(","), graph, "set member")
}

/// `P(y1,y2|do(x))`
pub fn format_query(s: &NodeSet, t: &NodeSet) -> String {
    let join = |set: &NodeSet| set.iter().map(NodeId::as_str).collect::<Vec<_>>().join(",");
    if t.is_empty() {
        format!("P({})", join(s))
    } else {
        let dos: Vec<String> = t.iter().map(|n| format!("do({n})")).collect();
        format!("P({} | {})", join(s), dos.join(", "))
    }
}
