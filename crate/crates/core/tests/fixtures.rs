//! The bundled analytical figures must resolve, verify green, and agree
//! with the RICH reading of their horizontal arrows.

use gis_core::netio::{
    export_dot, parse_network, resolve_network, serialize_network, verify_network, DotStyle,
};
use gis_core::pcmath::{Modulus, PcSegment};
use gis_core::serial::{figures, rich};
use gis_core::subdual::build_m7_m10_network;

fn seg(text: &str) -> PcSegment {
    PcSegment::parse(text, Modulus::TWELVE).unwrap()
}

#[test]
fn m7_m10_network_verifies() {
    let doc = build_m7_m10_network();
    assert_eq!(doc.nodes.len(), 24);
    assert_eq!(doc.edges.len(), 40);
    let network = resolve_network(doc).unwrap();
    let report = verify_network(&network);
    for check in &report.edges {
        assert!(
            check.pass,
            "edge {} -{}-> {} computed {:?}",
            check.from, check.op, check.to, check.computed
        );
    }
    assert!(report.pass());

    // Specific figure edges.
    let doc = network.doc();
    let has_edge = |from: &str, to: &str, op: &str| {
        doc.edges
            .iter()
            .any(|e| e.from == from && e.to == to && e.op == op)
    };
    assert!(has_edge("maj_0_4_7", "maj_4_0_9", "R"));
    assert!(has_edge("maj_0_4_7", "str_0_4_10", "M10"));
    assert!(has_edge("str_0_4_10", "str_3_7_1", "Q3"));

    let dot = export_dot(&network, &DotStyle::default());
    assert!(dot.contains("subgraph cluster_2"));
    assert!(!dot.contains("subgraph cluster_3"));
}

#[test]
fn opening_theme_verifies() {
    let doc = figures::opening_theme_network();
    let network = resolve_network(doc).unwrap();
    let report = verify_network(&network);
    assert!(report.pass(), "{:#?}", report.edges);
    // The first arrow is also a RICH move.
    assert_eq!(rich(&seg("2,1,5")).unwrap(), seg("1,5,4"));
}

#[test]
fn rich_chain_verifies() {
    let doc = figures::rich_chain_network();
    let network = resolve_network(doc).unwrap();
    let report = verify_network(&network);
    assert!(report.pass(), "{:#?}", report.edges);
    // Every arrow of the chain is a RICH move.
    let chain = ["3,8,0", "8,0,5", "0,5,9", "5,9,2", "9,2,6"];
    for pair in chain.windows(2) {
        assert_eq!(rich(&seg(pair[0])).unwrap(), seg(pair[1]));
    }
}

#[test]
fn summary_network_verifies() {
    let doc = figures::summary_network();
    assert_eq!(doc.systems.len(), 6);
    assert_eq!(doc.nodes.len(), 32);
    assert_eq!(doc.edges.len(), 50);
    assert_eq!(doc.squares.len(), 1);
    let network = resolve_network(doc).unwrap();
    let report = verify_network(&network);
    for check in &report.edges {
        assert!(
            check.pass,
            "edge {} -{}-> {} computed {:?}",
            check.from, check.op, check.to, check.computed
        );
    }
    for square in &report.squares {
        assert!(square.pass, "square {:?}", square.corners);
    }

    // Every horizontal arrow is RICH-consistent: RICH follows the temporal
    // direction, which the reversed stride-strain row draws right to left.
    let doc = network.doc();
    for edge in &doc.edges {
        if !edge.op.starts_with("(13)") {
            continue;
        }
        let from = network.node_segment(&edge.from).unwrap();
        let to = network.node_segment(&edge.to).unwrap();
        let forwards = rich(from).unwrap() == *to;
        let backwards = rich(to).unwrap() == *from;
        assert!(
            forwards || backwards,
            "edge {} -> {} is not a RICH move either way",
            edge.from,
            edge.to
        );
        if !edge.from.starts_with("r5") {
            assert!(
                forwards,
                "edge {} -> {} should be forward RICH",
                edge.from, edge.to
            );
        } else {
            assert!(backwards, "row-5 arrows run against temporal order");
        }
    }
}

#[test]
fn fixtures_serialize_and_reparse() {
    for doc in [
        figures::opening_theme_network(),
        figures::rich_chain_network(),
        figures::summary_network(),
        build_m7_m10_network(),
    ] {
        let text = serialize_network(&doc);
        let reparsed = parse_network(&text).unwrap();
        assert_eq!(reparsed.doc(), &doc);
        assert!(verify_network(&reparsed).pass());
    }
}
