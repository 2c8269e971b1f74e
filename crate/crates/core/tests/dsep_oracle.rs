//! Bayes-ball reachability against exhaustive path enumeration.
mod common;

use causal_id::dsep::d_separated;
use causal_id::graph::{latent_expand, mutilate, ExpandedGraph, NodeId, NodeSet};
use common::{rng, small_graph};
use rand::seq::IteratorRandom;
use rand::Rng;

fn adjacent(g: &ExpandedGraph, n: &NodeId) -> Vec<NodeId> {
    let mut out = g.parents(n);
    out.extend(g.children(n));
    out
}

fn is_edge(g: &ExpandedGraph, p: &NodeId, c: &NodeId) -> bool {
    g.directed_edges().iter().any(|(a, b)| a == p && b == c)
}

fn descendants_or_self(g: &ExpandedGraph, n: &NodeId) -> NodeSet {
    let mut out = NodeSet::singleton(n.clone());
    let mut stack = vec![n.clone()];
    while let Some(m) = stack.pop() {
        for c in g.children(&m) {
            if out.insert(c.clone()) {
                stack.push(c);
            }
        }
    }
    out
}

fn path_active(g: &ExpandedGraph, path: &[NodeId], z: &NodeSet) -> bool {
    for w in path.windows(3) {
        let collider = is_edge(g, &w[0], &w[1]) && is_edge(g, &w[2], &w[1]);
        if collider {
            if descendants_or_self(g, &w[1]).is_disjoint(z) {
                return false;
            }
        } else if z.contains(&w[1]) {
            return false;
        }
    }
    true
}

fn connected(g: &ExpandedGraph, path: &mut Vec<NodeId>, b: &NodeSet, z: &NodeSet) -> bool {
    let last = path.last().unwrap().clone();
    if !path_active(g, path, z) {
        return false;
    }
    if path.len() > 1 && b.contains(&last) {
        return true;
    }
    for n in adjacent(g, &last) {
        if path.contains(&n) {
            continue;
        }
        path.push(n);
        if connected(g, path, b, z) {
            return true;
        }
        path.pop();
    }
    false
}

fn brute_separated(g: &ExpandedGraph, a: &NodeSet, b: &NodeSet, z: &NodeSet) -> bool {
    !a.iter().any(|s| connected(g, &mut vec![s.clone()], b, z))
}

#[test]
fn bayes_ball_matches_path_enumeration() {
    let mut r = rng(10);
    for case in 0..400 {
        let g = small_graph(&mut r);
        let mut eg = latent_expand(&g);
        if case % 2 == 1 {
            let hat: NodeSet = g.visible().iter().cloned().choose_multiple(&mut r, 1).into_iter().collect();
            eg = mutilate(&eg, &hat, &NodeSet::new());
        }
        let nodes = g.visible().to_vec();
        let a: NodeSet = nodes.iter().cloned().choose_multiple(&mut r, 1).into_iter().collect();
        let rest: Vec<NodeId> = nodes.iter().filter(|n| !a.contains(n)).cloned().collect();
        let b: NodeSet = rest.iter().cloned().choose_multiple(&mut r, 1).into_iter().collect();
        let others: Vec<NodeId> = rest.iter().filter(|n| !b.contains(n)).cloned().collect();
        let k = r.random_range(0..=others.len());
        let z: NodeSet = others.into_iter().choose_multiple(&mut r, k).into_iter().collect();
        assert_eq!(d_separated(&eg, &a, &b, &z), brute_separated(&eg, &a, &b, &z), "case {case}: {g:?} {a} {b} {z}");
    }
}
