#![allow(dead_code)]

use std::collections::BTreeMap;

use causal_id::estimand::Estimand;
use causal_id::graph::{random_graph, CausalGraph, NodeId, NodeSet};
use causal_id::inference::{DiscreteModel, JointTable};
use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Graph with 2..=6 visible nodes and at most 4 arcs.
pub fn small_graph(rng: &mut ChaCha8Rng) -> CausalGraph {
    let n = rng.random_range(2..=6);
    let max_arcs = (n * (n - 1) / 2).min(4);
    let arcs = rng.random_range(0..=max_arcs);
    random_graph(rng, n, 0.45, arcs)
}

/// Disjoint non-empty `s` and `t` with `|t| <= max_t`.
pub fn query(rng: &mut ChaCha8Rng, g: &CausalGraph, max_t: usize) -> (NodeSet, NodeSet) {
    let nodes = g.visible().to_vec();
    let k = rng.random_range(1..=max_t.min(nodes.len() - 1));
    let t: NodeSet = nodes.iter().cloned().choose_multiple(rng, k).into_iter().collect();
    let rest: Vec<NodeId> = nodes.iter().filter(|n| !t.contains(n)).cloned().collect();
    let m = rng.random_range(1..=rest.len().min(2));
    let s: NodeSet = rest.into_iter().choose_multiple(rng, m).into_iter().collect();
    (s, t)
}

/// Copies `table` along every variable of `scope` it does not mention.
pub fn widen(table: &JointTable, scope: &[NodeId], cards: &BTreeMap<NodeId, usize>) -> JointTable {
    let extra: Vec<(NodeId, usize)> = scope.iter().map(|n| (n.clone(), cards[n])).collect();
    table.broadcast(&extra).reorder(scope)
}

/// Max-norm gap between the estimand and brute force; free variables
/// outside `s ∪ t` may only be do-values the estimand does not depend on.
pub fn estimand_gap(model: &DiscreteModel, e: &Estimand, s: &NodeSet, t: &NodeSet) -> f64 {
    for v in e.free_vars() {
        assert!(v.primes == 0, "free primed variable in {e}");
        assert!(model.graph().visible().contains(&v.node), "unknown variable in {e}");
    }
    causal_id::inference::estimand_gap(model, e, s, t).unwrap()
}
