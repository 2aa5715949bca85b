use proptest::prelude::*;
use tcycle::io::{format_graph, parse_graph, Labels, TableFile};
use tcycle_core::adversarial::{generate_g6, generate_gk};
use tcycle_core::coloring::{Provenance, ThresholdTable};
use tcycle_core::generators::random_gnp;

proptest! {
    #[test]
    fn graph_text_round_trips(n in 1usize..40, p in 0.0f64..0.5, seed in any::<u64>()) {
        let g = random_gnp(n, p, seed).unwrap();
        let text = format_graph(&g, &["comment".to_string()]);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(back.node_count(), g.node_count());
        prop_assert_eq!(back.edge_count(), g.edge_count());
        prop_assert!(g.edges().all(|(a, b)| back.has_edge(a, b)));
        prop_assert_eq!(format_graph(&back, &["comment".to_string()]), text);
    }
}

#[test]
fn loader_rejects_malformed_files() {
    assert!(parse_graph("").is_err());
    assert!(parse_graph("# only a comment\n").is_err());
    assert!(parse_graph("3 1\n0 0\n").is_err());
    assert!(parse_graph("3 1\n1 0\n").is_err());
    assert!(parse_graph("3 2\n0 1\n0 1\n").is_err());
    assert!(parse_graph("3 1\n0 3\n").is_err());
    assert!(parse_graph("3 2\n0 1\n").is_err());
    assert!(parse_graph("3 1\n0 1 2\n").is_err());
    assert!(parse_graph("3 x\n").is_err());
    let g = parse_graph("# header\n\n3 2\n# edge list\n0 1\n1 2\n").unwrap();
    assert_eq!((g.node_count(), g.edge_count()), (3, 2));
}

#[test]
fn labels_rebuild_the_adversarial_instance() {
    for inst in [generate_gk(7, 2).unwrap(), generate_gk(9, 1).unwrap(), generate_g6(2).unwrap()] {
        let labels = Labels::of_instance("gk", &inst);
        let json = serde_json::to_string(&labels).unwrap();
        let back: Labels = serde_json::from_str(&json).unwrap();
        assert_eq!(back, labels);
        let text = format_graph(&inst.graph, &[]);
        let rebuilt = back.to_instance(parse_graph(&text).unwrap()).unwrap();
        assert_eq!(rebuilt.paths, inst.paths);
        assert_eq!(rebuilt.cycle, inst.cycle);
        assert_eq!((rebuilt.k, rebuilt.size, rebuilt.pattern), (inst.k, inst.size, inst.pattern));
    }
    let inst = generate_gk(7, 1).unwrap();
    let mut labels = Labels::of_instance("gk", &inst);
    labels.edge_count += 1;
    assert!(labels.check(&inst.graph).is_err());
    let mut labels = Labels::of_instance("gk", &inst);
    labels.schema_version = 99;
    assert!(labels.check(&inst.graph).is_err());
}

#[test]
fn threshold_table_json() {
    let text =
        r#"{"k": 7, "caps": {"1": 60, "2": 600, "3": 6000, "4": 30000, "5": 150000, "6": 900000}, "symmetric": true}"#;
    let t = serde_json::from_str::<TableFile>(text).unwrap().to_table().unwrap();
    assert_eq!(t.half(), ThresholdTable::c14_stage().half());
    assert_eq!(t.cap(13), Some(60));
    assert_eq!(t.provenance(), Provenance::Custom);
    let unbounded = r#"{"k": 2, "caps": {"1": null}}"#;
    let t = serde_json::from_str::<TableFile>(unbounded).unwrap().to_table().unwrap();
    assert_eq!(t.cap(1), None);
    for bad in [
        r#"{"k": 3, "caps": {"1": 2}}"#,
        r#"{"k": 3, "caps": {"1": 0, "2": 1}}"#,
        r#"{"k": 3, "caps": {"x": 1, "2": 1}}"#,
    ] {
        assert!(serde_json::from_str::<TableFile>(bad).unwrap().to_table().is_err(), "{bad}");
    }
    let asym = ThresholdTable::from_map(
        3,
        &[(1, Some(2)), (2, Some(3)), (4, Some(5)), (5, Some(7))].into_iter().collect(),
        false,
    )
    .unwrap();
    let back = TableFile::from_table(&asym).to_table().unwrap();
    assert_eq!(back.to_map(), asym.to_map());
    let t5 = ThresholdTable::external_default(5).unwrap();
    let back = TableFile::from_table(&t5).to_table().unwrap();
    assert_eq!((back.half(), back.provenance()), (t5.half(), Provenance::External));
}
