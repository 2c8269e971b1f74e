mod common;

use causal_id::counterexamples::{backdoor_xor_model, catalog_entry, negative_info_model, paper_graph_catalog, Expected};
use causal_id::graph::{NodeId, NodeSet};
use causal_id::identify::{graphical_condition, identify};
use causal_id::inference::{info_measures, random_binary_model, random_model_with_concentration};
use common::{rng, small_graph};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

#[test]
fn information_identities_on_random_triples() {
    let mut r = rng(600);
    for case in 0..500u64 {
        let g = small_graph(&mut r);
        let mut nodes = g.visible().to_vec();
        nodes.shuffle(&mut r);
        let nb = r.random_range(1..nodes.len());
        let na = r.random_range(1..=nodes.len() - nb);
        let ne = r.random_range(0..=nodes.len() - nb - na);
        let b: NodeSet = nodes[..nb].iter().collect();
        let a: NodeSet = nodes[nb..nb + na].iter().collect();
        let e: NodeSet = nodes[nb + na..nb + na + ne].iter().collect();
        let m = if case % 4 == 0 {
            random_model_with_concentration(&g, &BTreeMap::new(), case, 0.3)
        } else {
            random_binary_model(&g, case)
        };
        let rep = info_measures(&m, &b, &a, &e).unwrap();
        assert!((rep.h_uprooted_cmi + rep.loss_cmi - rep.h_cmi).abs() <= 1e-9, "case {case}: {rep:?}");
        assert!((rep.h_uprooted_mi + rep.loss_mi - rep.h_mi).abs() <= 1e-9, "case {case}: {rep:?}");
        assert!(rep.loss_cmi >= -1e-12 && rep.loss_mi >= -1e-12, "case {case}: {rep:?}");
        assert!(rep.h_cmi >= -1e-12 && rep.h_mi >= -1e-12, "case {case}: {rep:?}");
    }
}

fn single(n: &str) -> NodeSet {
    NodeSet::of(&[n])
}

#[test]
fn pos_and_zero_graphs() {
    let (y, x) = (single("y"), single("x"));
    for e in paper_graph_catalog() {
        let pos = e.name.starts_with("pos_");
        let zero = e.name.starts_with("zero_");
        if !pos && !zero {
            continue;
        }
        let est = identify(&e.graph, &y, &x).unwrap().estimand().unwrap().plain();
        assert_eq!(est, if pos { "P(y|x)" } else { "P(y)" }, "{}", e.name);
        for seed in 0..50 {
            let r = info_measures(&random_binary_model(&e.graph, seed), &y, &x, &NodeSet::new()).unwrap();
            if pos {
                assert!((r.h_uprooted_mi - r.h_mi).abs() <= 1e-9, "{}: {r:?}", e.name);
            } else {
                assert!(r.h_uprooted_mi.abs() <= 1e-9, "{}: {r:?}", e.name);
            }
        }
    }
}

#[test]
fn graphical_condition_agrees_with_the_verdict() {
    for e in paper_graph_catalog() {
        let tr = identify(&e.graph, &e.s, &e.t).unwrap();
        let t: NodeId = e.t.first().unwrap().clone();
        assert_eq!(graphical_condition(&e.graph, &e.s, &t), tr.is_identifiable(), "{}", e.name);
    }
}

#[test]
fn shipped_models_have_negative_information_for_non_identifiable_queries() {
    for e in paper_graph_catalog().into_iter().filter(|e| e.expected == Expected::NotIdentifiable) {
        let m = negative_info_model(e.name).unwrap();
        let h = info_measures(&m, &e.s, &e.t, &NodeSet::new()).unwrap().h_uprooted_mi;
        assert!(h < 0.0, "{}", e.name);
    }
}

fn min_uprooted_information(name: &str) -> f64 {
    let e = catalog_entry(name).unwrap();
    (0..200)
        .map(|seed| {
            info_measures(&random_binary_model(&e.graph, seed), &e.s, &e.t, &NodeSet::new())
                .unwrap()
                .h_uprooted_mi
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn unconfounded_identifiable_queries_keep_nonnegative_information() {
    for name in ["missing_tooth", "pos_direct", "pos_parent", "pos_confounded_parent", "zero_reversed", "zero_disconnected", "zero_confounded"] {
        assert!(min_uprooted_information(name) >= -1e-9, "{name}");
    }
}

// Identifiability does not imply H(s:t̂) >= 0: adjustment through a
// confounder can reverse the sign.
#[test]
fn confounded_identifiable_queries_can_have_negative_information() {
    for name in ["backdoor", "frontdoor", "tp_fig2", "tp_fig3", "tp_fig6"] {
        assert!(min_uprooted_information(name) < -1e-6, "{name}");
    }
    let m = backdoor_xor_model(0.05);
    let h = info_measures(&m, &NodeSet::of(&["y"]), &NodeSet::of(&["z"]), &NodeSet::new()).unwrap().h_uprooted_mi;
    assert!((h - -0.296437362120267).abs() < 1e-9, "{h}");
    assert!(identify(m.graph(), &NodeSet::of(&["y"]), &NodeSet::of(&["z"])).unwrap().is_identifiable());
}
