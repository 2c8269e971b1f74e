//! d-separation and the premises of do-calculus Rules 2 and 3.

use std::collections::{BTreeSet, VecDeque};

use crate::graph::{latent_expand, mutilate, CausalGraph, ExpandedGraph, NodeId, NodeSet};

/// `(b ⊥ a | ĥ, i)` asked of a mutilated graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RulePremiseQuery {
    /// outcome
    pub b: NodeSet,
    /// tested intervention
    pub a: NodeSet,
    /// held interventions
    pub h: NodeSet,
    /// held observations
    pub i: NodeSet,
}

impl RulePremiseQuery {
    pub fn new(b: NodeSet, a: NodeSet, h: NodeSet) -> Self {
        RulePremiseQuery { b, a, h, i: NodeSet::new() }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Dir {
    /// arrived from a child
    Up,
    /// arrived from a parent
    Down,
}

/// Nodes reachable from `source` by an active trail given `given`.
pub fn reachable(graph: &ExpandedGraph, source: &NodeSet, given: &NodeSet) -> NodeSet {
    let anc_given = graph.ancestors(given);
    let mut visited: BTreeSet<(NodeId, Dir)> = BTreeSet::new();
    let mut out = NodeSet::new();
    let mut queue: VecDeque<(NodeId, Dir)> = source.iter().map(|n| (n.clone(), Dir::Up)).collect();
    while let Some((node, dir)) = queue.pop_front() {
        if !visited.insert((node.clone(), dir)) {
            continue;
        }
        let observed = given.contains(&node);
        if !observed {
            out.insert(node.clone());
        }
        match dir {
            Dir::Up if !observed => {
                for p in graph.parents(&node) {
                    queue.push_back((p, Dir::Up));
                }
                for c in graph.children(&node) {
                    queue.push_back((c, Dir::Down));
                }
            }
            Dir::Up => {}
            Dir::Down => {
                if !observed {
                    for c in graph.children(&node) {
                        queue.push_back((c, Dir::Down));
                    }
                }
                if anc_given.contains(&node) {
                    for p in graph.parents(&node) {
                        queue.push_back((p, Dir::Up));
                    }
                }
            }
        }
    }
    out
}

/// True iff every path between `a` and `b` is blocked by `z`.
pub fn d_separated(graph: &ExpandedGraph, a: &NodeSet, b: &NodeSet, z: &NodeSet) -> bool {
    if a.is_empty() || b.is_empty() {
        return true;
    }
    reachable(graph, a, z).is_disjoint(b)
}

/// Rule 2 premise: `b ⊥ a | h ∪ i` in `G_{ĥ, ǎ}`.
///
/// When true, `P(b|â,ĥ,i) = P(b|a,ĥ,i)`.
pub fn rule2_premise(graph: &CausalGraph, q: &RulePremiseQuery) -> bool {
    if q.a.is_empty() {
        return true;
    }
    let expanded = latent_expand(graph);
    let m = mutilate(&expanded, &q.h, &q.a);
    d_separated(&m, &q.b, &q.a, &q.h.union(&q.i))
}

/// Rule 3 premise: `b ⊥ a | h ∪ i` in `G_{ĥ, (a⁻)^}` with
/// `a⁻ = a − an(i, G_ĥ)`.
///
/// When true, `P(b|â,ĥ,i) = P(b|ĥ,i)`.
pub fn rule3_premise(graph: &CausalGraph, q: &RulePremiseQuery) -> bool {
    if q.a.is_empty() {
        return true;
    }
    let expanded = latent_expand(graph);
    let a_minus = q
        .a
        .difference(&mutilate(&expanded, &q.h, &NodeSet::new()).ancestors(&q.i));
    let m = mutilate(&expanded, &q.h.union(&a_minus), &NodeSet::new());
    d_separated(&m, &q.b, &q.a, &q.h.union(&q.i))
}
