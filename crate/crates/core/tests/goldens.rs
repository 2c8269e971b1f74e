use causal_id::counterexamples::{paper_graph_catalog, Expected};
use causal_id::estimand::parse_plain;
use causal_id::identify::identify;

#[test]
fn catalog_verdicts_and_estimands() {
    for e in paper_graph_catalog() {
        let tr = identify(&e.graph, &e.s, &e.t).unwrap();
        println!("{}: {:?} {}", e.name, tr.is_identifiable(), tr.estimand().map(|x| x.plain()).unwrap_or_default());
        if let (Some(want), Some(got)) = (e.expected_estimand, tr.estimand()) {
            let want = parse_plain(want).unwrap();
            assert!(want.structurally_eq(got), "{}: got {}", e.name, got);
        }
        if e.name != "shark3_modified" {
            assert_eq!(tr.is_identifiable(), e.expected == Expected::Identifiable, "{}", e.name);
        }
    }
}
