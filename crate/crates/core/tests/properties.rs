//! Property tests over seeded random graphs.
mod common;

use causal_id::estimand::{parse_plain, render_estimand, Style};
use causal_id::graph::{ancestral_closure, c_components, latent_expand, topological_order, validate, NodeSet};
use causal_id::identify::identify;
use causal_id::inference::{info_measures, random_binary_model};
use common::{query, rng, small_graph};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_graphs_validate(seed in any::<u64>()) {
        let g = small_graph(&mut rng(seed));
        prop_assert!(validate(&g).is_ok());
        for (a, b) in g.bidirected_arcs() {
            prop_assert!(a < b);
        }
    }

    #[test]
    fn topological_order_respects_edges(seed in any::<u64>()) {
        let g = small_graph(&mut rng(seed));
        let order = topological_order(&g, g.visible());
        prop_assert_eq!(order.len(), g.visible().len());
        let pos = |n| order.iter().position(|m| m == n).unwrap();
        for (a, b) in g.directed_edges() {
            prop_assert!(pos(a) < pos(b));
        }
    }

    #[test]
    fn c_components_partition_visible_nodes(seed in any::<u64>()) {
        let g = small_graph(&mut rng(seed));
        let blocks = c_components(&g);
        let mut seen = NodeSet::new();
        for b in &blocks {
            prop_assert!(!b.is_empty());
            prop_assert!(seen.is_disjoint(b));
            seen = seen.union(b);
        }
        prop_assert_eq!(&seen, g.visible());
        for (a, b) in g.bidirected_arcs() {
            prop_assert!(blocks.iter().any(|c| c.contains(a) && c.contains(b)));
        }
    }

    #[test]
    fn ancestral_closure_is_closed(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = small_graph(&mut r);
        let (s, _) = query(&mut r, &g, 1);
        let a = ancestral_closure(&g, &s, g.visible());
        prop_assert!(s.is_subset(&a));
        for n in &a {
            prop_assert!(g.parents(n).is_subset(&a));
        }
    }

    #[test]
    fn expansion_adds_one_latent_per_arc(seed in any::<u64>()) {
        let g = small_graph(&mut rng(seed));
        let eg = latent_expand(&g);
        prop_assert_eq!(eg.latents().len(), g.bidirected_arcs().len());
        prop_assert_eq!(eg.nodes().len(), g.visible().len() + g.bidirected_arcs().len());
        for l in eg.latents() {
            prop_assert!(eg.parents(l).is_empty());
            prop_assert_eq!(eg.children(l).len(), 2);
        }
    }

    #[test]
    fn estimands_round_trip_through_plain_text(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = small_graph(&mut r);
        let (s, t) = query(&mut r, &g, 2);
        let trace = identify(&g, &s, &t).unwrap();
        if let Some(e) = trace.estimand() {
            let text = render_estimand(e, Style::Plain);
            let back = parse_plain(&text).unwrap();
            prop_assert!(back.structurally_eq(e), "{} vs {}", text, back);
            prop_assert_eq!(render_estimand(&back, Style::Plain), text);
        }
    }

    #[test]
    fn identify_is_deterministic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = small_graph(&mut r);
        let (s, t) = query(&mut r, &g, 2);
        let a = identify(&g, &s, &t).unwrap();
        let b = identify(&g, &s, &t).unwrap();
        prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn information_identities(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = small_graph(&mut r);
        let (b, a) = query(&mut r, &g, 2);
        let rep = info_measures(&random_binary_model(&g, seed), &b, &a, &NodeSet::new()).unwrap();
        prop_assert!((rep.h_uprooted_mi + rep.loss_mi - rep.h_mi).abs() <= 1e-9);
        prop_assert!(rep.loss_mi >= -1e-12);
        prop_assert!(rep.h_mi >= -1e-12);
    }
}
