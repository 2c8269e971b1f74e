//! Semi-Markovian causal graphs.
//!
//! A [`CausalGraph`] holds visible nodes, directed edges and bidirected arcs.
//! Each arc stands for a latent root with exactly two visible children; the
//! latents only become explicit nodes in an [`ExpandedGraph`], which is what
//! d-separation and exact inference operate on.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while building or validating a graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid node name {0:?}: expected letters, digits or underscore")]
    InvalidName(String),
    #[error("directed cycle: {}", format_cycle(.0))]
    CycleDetected(Vec<NodeId>),
    #[error("edge endpoint {0} is not a declared node")]
    DanglingNode(NodeId),
    #[error("duplicate edge {0}")]
    DuplicateEdge(String),
    #[error("bidirected arc joins {0} to itself")]
    SelfArc(NodeId),
}

fn format_cycle(cycle: &[NodeId]) -> String {
    cycle
        .iter()
        .map(NodeId::as_str)
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// Name of a node. Ordering is lexicographic on the name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    /// Checked constructor: non-empty ASCII letters, digits and underscores.
    pub fn new(name: &str) -> Result<Self, GraphError> {
        if is_valid_name(name) {
            Ok(NodeId(name.to_string()))
        } else {
            Err(GraphError::InvalidName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl From<&str> for NodeId {
    /// Unchecked; names are checked by [`validate`].
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ordered set of nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeSet(BTreeSet<NodeId>);

impl NodeSet {
    pub fn new() -> Self {
        NodeSet(BTreeSet::new())
    }

    /// Builds a set from names, e.g. `NodeSet::of(&["x", "y"])`.
    pub fn of(names: &[&str]) -> Self {
        names.iter().map(|n| NodeId::from(*n)).collect()
    }

    pub fn singleton(n: NodeId) -> Self {
        let mut s = NodeSet::new();
        s.insert(n);
        s
    }

    pub fn insert(&mut self, n: NodeId) -> bool {
        self.0.insert(n)
    }

    pub fn remove(&mut self, n: &NodeId) -> bool {
        self.0.remove(n)
    }

    pub fn contains(&self, n: &NodeId) -> bool {
        self.0.contains(n)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &NodeId> + Clone {
        self.0.iter()
    }

    pub fn first(&self) -> Option<&NodeId> {
        self.0.iter().next()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn with(&self, n: &NodeId) -> NodeSet {
        let mut s = self.clone();
        s.insert(n.clone());
        s
    }

    pub fn without(&self, n: &NodeId) -> NodeSet {
        let mut s = self.clone();
        s.remove(n);
        s
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        self.0.iter().cloned().collect()
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        NodeSet(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = &'a NodeId>>(iter: I) -> Self {
        NodeSet(iter.into_iter().cloned().collect())
    }
}

impl IntoIterator for NodeSet {
    type Item = NodeId;
    type IntoIter = std::collections::btree_set::IntoIter<NodeId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = &'a NodeId;
    type IntoIter = std::collections::btree_set::Iter<'a, NodeId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

/// Visible nodes, directed edges and bidirected arcs.
///
/// Arcs are stored as `(a, b)` with `a < b`. Edge and arc lists keep their
/// insertion order, which fixes the latent numbering of [`latent_expand`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalGraph {
    visible: NodeSet,
    directed: Vec<(NodeId, NodeId)>,
    arcs: Vec<(NodeId, NodeId)>,
}

impl CausalGraph {
    /// Builds and validates a graph.
    pub fn new(
        visible: impl IntoIterator<Item = NodeId>,
        directed: Vec<(NodeId, NodeId)>,
        arcs: Vec<(NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        let arcs = arcs
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        let g = CausalGraph {
            visible: visible.into_iter().collect(),
            directed,
            arcs,
        };
        validate(&g)?;
        Ok(g)
    }

    /// Builds a graph whose nodes are `nodes` plus every edge endpoint.
    pub fn from_names(
        nodes: &[&str],
        directed: &[(&str, &str)],
        arcs: &[(&str, &str)],
    ) -> Result<Self, GraphError> {
        let mut visible: NodeSet = nodes.iter().map(|n| NodeId::from(*n)).collect();
        for (a, b) in directed.iter().chain(arcs) {
            visible.insert(NodeId::from(*a));
            visible.insert(NodeId::from(*b));
        }
        CausalGraph::new(
            visible,
            directed.iter().map(|(a, b)| ((*a).into(), (*b).into())).collect(),
            arcs.iter().map(|(a, b)| ((*a).into(), (*b).into())).collect(),
        )
    }

    pub fn empty() -> Self {
        CausalGraph {
            visible: NodeSet::new(),
            directed: Vec::new(),
            arcs: Vec::new(),
        }
    }

    pub fn visible(&self) -> &NodeSet {
        &self.visible
    }

    pub fn directed_edges(&self) -> &[(NodeId, NodeId)] {
        &self.directed
    }

    pub fn bidirected_arcs(&self) -> &[(NodeId, NodeId)] {
        &self.arcs
    }

    pub fn parents(&self, v: &NodeId) -> NodeSet {
        self.directed
            .iter()
            .filter(|(_, c)| c == v)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn children(&self, v: &NodeId) -> NodeSet {
        self.directed
            .iter()
            .filter(|(p, _)| p == v)
            .map(|(_, c)| c)
            .collect()
    }

    /// Nodes joined to `v` by a bidirected arc.
    pub fn spouses(&self, v: &NodeId) -> NodeSet {
        self.arcs
            .iter()
            .filter_map(|(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Applies a renaming to every node. Names missing from `map` are kept.
    pub fn renamed(&self, map: &BTreeMap<NodeId, NodeId>) -> Result<CausalGraph, GraphError> {
        let r = |n: &NodeId| map.get(n).cloned().unwrap_or_else(|| n.clone());
        CausalGraph::new(
            self.visible.iter().map(r),
            self.directed.iter().map(|(a, b)| (r(a), r(b))).collect(),
            self.arcs.iter().map(|(a, b)| (r(a), r(b))).collect(),
        )
    }
}

/// Checks every [`CausalGraph`] invariant.
pub fn validate(graph: &CausalGraph) -> Result<(), GraphError> {
    for n in graph.visible.iter() {
        if !is_valid_name(n.as_str()) {
            return Err(GraphError::InvalidName(n.as_str().to_string()));
        }
    }
    let mut seen = BTreeSet::new();
    for (a, b) in &graph.directed {
        for n in [a, b] {
            if !graph.visible.contains(n) {
                return Err(GraphError::DanglingNode(n.clone()));
            }
        }
        if !seen.insert((a.clone(), b.clone())) {
            return Err(GraphError::DuplicateEdge(format!("{a} -> {b}")));
        }
    }
    let mut seen = BTreeSet::new();
    for (a, b) in &graph.arcs {
        for n in [a, b] {
            if !graph.visible.contains(n) {
                return Err(GraphError::DanglingNode(n.clone()));
            }
        }
        if a == b {
            return Err(GraphError::SelfArc(a.clone()));
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if !seen.insert(key) {
            return Err(GraphError::DuplicateEdge(format!("{a} <-> {b}")));
        }
    }
    if let Some(cycle) = find_cycle(graph) {
        return Err(GraphError::CycleDetected(cycle));
    }
    Ok(())
}

fn find_cycle(graph: &CausalGraph) -> Option<Vec<NodeId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut children: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for (a, b) in &graph.directed {
        children.entry(a).or_default().push(b);
    }
    let mut mark: BTreeMap<&NodeId, Mark> = graph.visible.iter().map(|n| (n, Mark::White)).collect();
    for root in graph.visible.iter() {
        if mark[root] != Mark::White {
            continue;
        }
        // iterative DFS keeping the grey path on a stack
        let mut stack: Vec<(&NodeId, usize)> = vec![(root, 0)];
        mark.insert(root, Mark::Grey);
        while let Some((node, idx)) = stack.pop() {
            let kids = children.get(node).map(Vec::as_slice).unwrap_or(&[]);
            if idx < kids.len() {
                stack.push((node, idx + 1));
                let next = kids[idx];
                match mark[next] {
                    Mark::White => {
                        mark.insert(next, Mark::Grey);
                        stack.push((next, 0));
                    }
                    Mark::Grey => {
                        let start = stack.iter().position(|(n, _)| *n == next).unwrap_or(0);
                        let mut cycle: Vec<NodeId> =
                            stack[start..].iter().map(|(n, _)| (*n).clone()).collect();
                        cycle.push(next.clone());
                        return Some(cycle);
                    }
                    Mark::Black => {}
                }
            } else {
                mark.insert(node, Mark::Black);
            }
        }
    }
    None
}

/// Topological order of `subset` in the induced subgraph, ties broken
/// lexicographically.
pub fn topological_order(graph: &CausalGraph, subset: &NodeSet) -> Vec<NodeId> {
    let mut indegree: BTreeMap<&NodeId, usize> = subset.iter().map(|n| (n, 0)).collect();
    let mut children: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for (a, b) in &graph.directed {
        if subset.contains(a) && subset.contains(b) {
            *indegree.get_mut(b).expect("subset member") += 1;
            children.entry(a).or_default().push(b);
        }
    }
    let mut ready: BTreeSet<&NodeId> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(n, _)| *n)
        .collect();
    let mut order = Vec::with_capacity(subset.len());
    while let Some(n) = ready.pop_first() {
        order.push(n.clone());
        for c in children.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indegree.get_mut(c).expect("subset member");
            *d -= 1;
            if *d == 0 {
                ready.insert(c);
            }
        }
    }
    order
}

/// `seed` plus all of its ancestors in the induced subgraph on `within`.
/// Arcs do not contribute ancestry.
pub fn ancestral_closure(graph: &CausalGraph, seed: &NodeSet, within: &NodeSet) -> NodeSet {
    let mut out = seed.clone();
    let mut queue: VecDeque<NodeId> = seed.iter().cloned().collect();
    while let Some(n) = queue.pop_front() {
        for (p, c) in &graph.directed {
            if *c == n && within.contains(p) && out.insert(p.clone()) {
                queue.push_back(p.clone());
            }
        }
    }
    out
}

/// Keeps exactly the nodes in `keep` and the edges and arcs inside it.
pub fn induced_subgraph(graph: &CausalGraph, keep: &NodeSet) -> CausalGraph {
    let inside = |(a, b): &&(NodeId, NodeId)| keep.contains(a) && keep.contains(b);
    CausalGraph {
        visible: graph.visible.intersection(keep),
        directed: graph.directed.iter().filter(inside).cloned().collect(),
        arcs: graph.arcs.iter().filter(inside).cloned().collect(),
    }
}

/// Connected components of the arc-only graph, ordered by least member.
pub fn c_components(graph: &CausalGraph) -> Vec<NodeSet> {
    let mut seen = NodeSet::new();
    let mut blocks = Vec::new();
    for start in graph.visible.iter() {
        if seen.contains(start) {
            continue;
        }
        let mut block = NodeSet::singleton(start.clone());
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(n) = queue.pop_front() {
            for m in graph.spouses(&n) {
                if block.insert(m.clone()) {
                    queue.push_back(m);
                }
            }
        }
        seen = seen.union(&block);
        blocks.push(block);
    }
    blocks
}

/// Graph with one explicit latent root per bidirected arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandedGraph {
    visible: NodeSet,
    latents: Vec<NodeId>,
    directed: Vec<(NodeId, NodeId)>,
    /// `(arc, latent)` in arc order
    latent_of_arc: Vec<((NodeId, NodeId), NodeId)>,
}

impl ExpandedGraph {
    pub fn visible(&self) -> &NodeSet {
        &self.visible
    }

    pub fn latents(&self) -> &[NodeId] {
        &self.latents
    }

    /// All nodes as a set.
    pub fn nodes(&self) -> NodeSet {
        self.visible.iter().chain(&self.latents).collect()
    }

    /// Canonical node order: visible nodes lexicographically, then latents
    /// in arc order.
    pub fn ordered_nodes(&self) -> Vec<NodeId> {
        self.visible.iter().chain(&self.latents).cloned().collect()
    }

    pub fn directed_edges(&self) -> &[(NodeId, NodeId)] {
        &self.directed
    }

    pub fn latent_of_arc(&self) -> &[((NodeId, NodeId), NodeId)] {
        &self.latent_of_arc
    }

    pub fn is_latent(&self, n: &NodeId) -> bool {
        self.latents.contains(n)
    }

    /// Parents of `n` in canonical order (visible first, then latents).
    pub fn parents(&self, n: &NodeId) -> Vec<NodeId> {
        let ps: BTreeSet<&NodeId> = self
            .directed
            .iter()
            .filter(|(_, c)| c == n)
            .map(|(p, _)| p)
            .collect();
        self.visible
            .iter()
            .chain(&self.latents)
            .filter(|m| ps.contains(m))
            .cloned()
            .collect()
    }

    pub fn children(&self, n: &NodeId) -> Vec<NodeId> {
        self.directed
            .iter()
            .filter(|(p, _)| p == n)
            .map(|(_, c)| c.clone())
            .collect()
    }

    /// Visible plus latent ancestors of `seed`, including `seed`.
    pub fn ancestors(&self, seed: &NodeSet) -> NodeSet {
        let mut out = seed.clone();
        let mut queue: VecDeque<NodeId> = seed.iter().cloned().collect();
        while let Some(n) = queue.pop_front() {
            for (p, c) in &self.directed {
                if *c == n && out.insert(p.clone()) {
                    queue.push_back(p.clone());
                }
            }
        }
        out
    }
}

/// Makes every arc explicit as a latent root `u_<i>` (`i` = arc index).
/// A name already taken by a visible node gets `_` prefixes until free.
pub fn latent_expand(graph: &CausalGraph) -> ExpandedGraph {
    let mut directed = graph.directed.clone();
    let mut latents = Vec::new();
    let mut latent_of_arc = Vec::new();
    for (i, (a, b)) in graph.arcs.iter().enumerate() {
        let mut name = format!("u_{i}");
        while graph.visible.contains(&NodeId::from(name.as_str())) {
            name.insert(0, '_');
        }
        let u = NodeId(name);
        directed.push((u.clone(), a.clone()));
        directed.push((u.clone(), b.clone()));
        latents.push(u.clone());
        latent_of_arc.push(((a.clone(), b.clone()), u));
    }
    ExpandedGraph {
        visible: graph.visible.clone(),
        latents,
        directed,
        latent_of_arc,
    }
}

/// Removes edges into `hat` nodes and edges out of `vee` nodes.
pub fn mutilate(graph: &ExpandedGraph, hat: &NodeSet, vee: &NodeSet) -> ExpandedGraph {
    ExpandedGraph {
        visible: graph.visible.clone(),
        latents: graph.latents.clone(),
        directed: graph
            .directed
            .iter()
            .filter(|(p, c)| !hat.contains(c) && !vee.contains(p))
            .cloned()
            .collect(),
        latent_of_arc: graph.latent_of_arc.clone(),
    }
}

/// Random graph on nodes `a`, `b`, … (at most 26). Each pair is joined by a
/// directed edge with probability `edge_prob`, oriented along a random
/// order, and `arcs` distinct bidirected arcs are placed uniformly.
pub fn random_graph(rng: &mut impl Rng, n: usize, edge_prob: f64, arcs: usize) -> CausalGraph {
    assert!(n <= 26, "at most 26 nodes");
    let names: Vec<NodeId> = (0..n).map(|i| NodeId(((b'a' + i as u8) as char).to_string())).collect();
    let mut order = names.clone();
    order.shuffle(rng);
    let mut directed = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < edge_prob {
                directed.push((order[i].clone(), order[j].clone()));
            }
        }
    }
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((names[i].clone(), names[j].clone()));
        }
    }
    pairs.shuffle(rng);
    pairs.truncate(arcs);
    CausalGraph::new(names, directed, pairs).expect("random graph is acyclic by construction")
}
