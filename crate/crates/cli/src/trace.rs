//! `trace-json` output, schema `causal-id/trace/v1`.
//!
//! ```json
//! {
//!   "schema": "causal-id/trace/v1",
//!   "query": { "s": ["y"], "t": ["x"] },
//!   "steps": [ { "depth": 0, "sigma": [...], "t": [...], "beta": [...],
//!                "d": [...], "component": [...], "big_d": [...],
//!                "action": "rule2" | "rule3" | "prune" | "fail" } ],
//!   "verdict": "identifiable" | "not-identifiable",
//!   "estimand": { "plain": "...", "latex": "..." },          // identifiable
//!   "witness": { "d": [...], "graph": { "nodes": [...],      // otherwise
//!                "directed": [[a, b]], "bidirected": [[a, b]] } },
//!   "certificate": "one_tooth" | null
//! }
//! ```

use causal_id::estimand::{render_estimand, Style};
use causal_id::graph::{CausalGraph, NodeSet};
use causal_id::identify::{IdentifyTrace, TraceStep, Verdict};
use serde_json::{json, Value};

pub const TRACE_SCHEMA: &str = "causal-id/trace/v1";

fn set(s: &NodeSet) -> Value {
    json!(s.iter().map(|n| n.as_str()).collect::<Vec<_>>())
}

pub fn graph_json(g: &CausalGraph) -> Value {
    let pairs = |v: &[(causal_id::NodeId, causal_id::NodeId)]| {
        v.iter().map(|(a, b)| json!([a.as_str(), b.as_str()])).collect::<Vec<_>>()
    };
    json!({
        "nodes": set(g.visible()),
        "directed": pairs(g.directed_edges()),
        "bidirected": pairs(g.bidirected_arcs()),
    })
}

fn step_json(s: &TraceStep) -> Value {
    json!({
        "depth": s.depth,
        "sigma": set(&s.sigma),
        "t": set(&s.t),
        "beta": set(&s.beta),
        "d": set(&s.d),
        "component": set(&s.component),
        "big_d": set(&s.big_d),
        "action": s.action.as_str(),
    })
}

pub fn trace_json(trace: &IdentifyTrace, certificate: Option<&str>) -> Value {
    let mut out = json!({
        "schema": TRACE_SCHEMA,
        "query": { "s": set(&trace.s), "t": set(&trace.t) },
        "steps": trace.steps.iter().map(step_json).collect::<Vec<_>>(),
    });
    let obj = out.as_object_mut().expect("object literal");
    match &trace.verdict {
        Verdict::Identifiable { estimand } => {
            obj.insert("verdict".into(), json!("identifiable"));
            obj.insert(
                "estimand".into(),
                json!({
                    "plain": render_estimand(estimand, Style::Plain),
                    "latex": render_estimand(estimand, Style::Latex),
                }),
            );
        }
        Verdict::NotIdentifiable { witness } => {
            obj.insert("verdict".into(), json!("not-identifiable"));
            obj.insert("witness".into(), json!({ "d": set(&witness.d), "graph": graph_json(&witness.graph) }));
        }
    }
    obj.insert("certificate".into(), json!(certificate));
    out
}
