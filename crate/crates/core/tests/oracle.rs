mod common;

use std::collections::BTreeMap;

use causal_id::counterexamples::{paper_graph_catalog, Expected};
use causal_id::graph::{ancestral_closure, induced_subgraph, CausalGraph, NodeId, NodeSet};
use causal_id::identify::{identify, pv_express, upsilon_decompose};
use causal_id::inference::{do_distribution, random_binary_model};
use common::{estimand_gap, query, rng, small_graph, widen};
use rand::seq::SliceRandom;

const TOL: f64 = 1e-9;

#[test]
fn catalog_estimands_match_brute_force() {
    for e in paper_graph_catalog().into_iter().filter(|e| e.expected == Expected::Identifiable) {
        let tr = identify(&e.graph, &e.s, &e.t).unwrap();
        let est = tr.estimand().unwrap();
        let worst = (0..100)
            .map(|seed| estimand_gap(&random_binary_model(&e.graph, seed), est, &e.s, &e.t))
            .fold(0.0, f64::max);
        assert!(worst <= TOL, "{}: gap {worst}", e.name);
    }
}

#[test]
fn random_graph_estimands_match_brute_force() {
    let mut r = rng(2024);
    let mut identified = 0;
    for case in 0..200u64 {
        let g = small_graph(&mut r);
        let (s, t) = query(&mut r, &g, 1);
        let tr = identify(&g, &s, &t).unwrap();
        assert!(!tr.steps.is_empty());
        if let Some(est) = tr.estimand() {
            identified += 1;
            for seed in 0..3 {
                let gap = estimand_gap(&random_binary_model(&g, 1000 * case + seed), est, &s, &t);
                assert!(gap <= TOL, "case {case}: {g:?} P({s}|do {t}) = {est}: gap {gap}");
            }
        }
    }
    assert!(identified > 100, "only {identified} identifiable cases");
}

#[test]
fn multi_intervention_estimands_match_brute_force() {
    let mut r = rng(77);
    let mut identified = 0;
    for case in 0..200u64 {
        let g = small_graph(&mut r);
        if g.visible().len() < 3 {
            continue;
        }
        let (s, t) = query(&mut r, &g, 3);
        let tr = identify(&g, &s, &t).unwrap();
        if let Some(est) = tr.estimand() {
            identified += 1;
            for seed in 0..3 {
                let gap = estimand_gap(&random_binary_model(&g, 5000 + 10 * case + seed), est, &s, &t);
                assert!(gap <= TOL, "case {case}: {g:?} P({s}|do {t}) = {est}: gap {gap}");
            }
        }
    }
    assert!(identified > 50);
}

#[test]
fn chain_with_both_nodes_intervened() {
    let g = CausalGraph::from_names(&[], &[("x", "z"), ("z", "y")], &[]).unwrap();
    let (s, t) = (NodeSet::of(&["y"]), NodeSet::of(&["x", "z"]));
    let est = identify(&g, &s, &t).unwrap().estimand().unwrap().clone();
    assert_eq!(est.plain(), "P(y|z)");
    for seed in 0..20 {
        assert!(estimand_gap(&random_binary_model(&g, seed), &est, &s, &t) <= TOL);
    }
}

fn rename(g: &CausalGraph, perm: &[NodeId]) -> (CausalGraph, BTreeMap<NodeId, NodeId>) {
    let map: BTreeMap<NodeId, NodeId> = g.visible().iter().cloned().zip(perm.iter().cloned()).collect();
    (g.renamed(&map).unwrap(), map)
}

#[test]
fn verdict_is_invariant_under_renaming() {
    let mut r = rng(9);
    for e in paper_graph_catalog() {
        let base = identify(&e.graph, &e.s, &e.t).unwrap().is_identifiable();
        for _ in 0..20 {
            let mut names: Vec<NodeId> = (0..e.graph.visible().len()).map(|i| NodeId::from(format!("n{i}").as_str())).collect();
            names.shuffle(&mut r);
            let (h, map) = rename(&e.graph, &names);
            let s: NodeSet = e.s.iter().map(|n| map[n].clone()).collect();
            let t: NodeSet = e.t.iter().map(|n| map[n].clone()).collect();
            assert_eq!(identify(&h, &s, &t).unwrap().is_identifiable(), base, "{}", e.name);
        }
    }
    for _ in 0..50 {
        let g = small_graph(&mut r);
        let (s, t) = query(&mut r, &g, 2);
        let base = identify(&g, &s, &t).unwrap().is_identifiable();
        let mut names = g.visible().to_vec();
        names.shuffle(&mut r);
        let (h, map) = rename(&g, &names);
        let s2: NodeSet = s.iter().map(|n| map[n].clone()).collect();
        let t2: NodeSet = t.iter().map(|n| map[n].clone()).collect();
        assert_eq!(identify(&h, &s2, &t2).unwrap().is_identifiable(), base);
    }
}

#[test]
fn disconnected_additions_keep_the_verdict() {
    let mut r = rng(31);
    let mut cases: Vec<(CausalGraph, NodeSet, NodeSet)> =
        paper_graph_catalog().into_iter().map(|e| (e.graph, e.s, e.t)).collect();
    for _ in 0..50 {
        let g = small_graph(&mut r);
        let (s, t) = query(&mut r, &g, 2);
        cases.push((g, s, t));
    }
    for (g, s, t) in cases {
        let base = identify(&g, &s, &t).unwrap();
        let mut visible = g.visible().clone();
        visible.insert("extra1".into());
        visible.insert("extra2".into());
        let mut arcs = g.bidirected_arcs().to_vec();
        arcs.push(("extra1".into(), "extra2".into()));
        let plus = CausalGraph::new(visible, g.directed_edges().to_vec(), arcs).unwrap();
        let tr = identify(&plus, &s, &t).unwrap();
        assert_eq!(tr.is_identifiable(), base.is_identifiable());
        if tr.is_identifiable() {
            // identifiable in the supergraph, hence in the pruned subgraph
            let kept = ancestral_closure(&plus, &s.union(&t), plus.visible());
            let sub = induced_subgraph(&plus, &kept);
            assert!(identify(&sub, &s, &t).unwrap().is_identifiable());
        }
    }
}

#[test]
fn pie_decomposition_reproduces_the_interventional_marginal() {
    let mut r = rng(555);
    let mut checked = 0;
    for case in 0..120u64 {
        let g = small_graph(&mut r);
        let (s, t) = query(&mut r, &g, 1);
        let tn = t.first().unwrap().clone();
        let beta = ancestral_closure(&g, &s.union(&t), g.visible());
        let pie = upsilon_decompose(&g, &s, &tn, &beta);
        let m = random_binary_model(&g, case);
        let cards = m.cardinalities();
        let mut acc = do_distribution(&m, &pie.big_d, &beta.difference(&pie.component).union(&t)).unwrap();
        for (dg, block) in &pie.others {
            acc = acc.product(&do_distribution(&m, dg, &beta.difference(block)).unwrap());
        }
        let acc = acc.sum_out(&pie.d.difference(&s).to_vec());
        let truth = do_distribution(&m, &s, &t).unwrap();
        let scope: Vec<NodeId> = acc.scope().to_vec();
        let truth = widen(&truth, &scope, cards);
        let acc = widen(&acc, &scope, cards);
        let gap = truth.max_abs_diff(&acc);
        assert!(gap <= TOL, "case {case}: {g:?}, gap {gap}");
        checked += 1;
    }
    assert_eq!(checked, 120);
}

#[test]
fn empty_intervention_gives_the_marginal() {
    let mut r = rng(4);
    for _ in 0..20 {
        let g = small_graph(&mut r);
        let (s, _) = query(&mut r, &g, 1);
        let tr = pv_express(&g, &s, &NodeSet::new(), g.visible());
        let want: Vec<&str> = s.iter().map(NodeId::as_str).collect();
        assert_eq!(tr.estimand().unwrap().plain(), format!("P({})", want.join(",")));
    }
}
