mod common;

use std::path::PathBuf;

use common::*;
use dot_parser::{ast, canonical};
use subop_core::export::RelationDocument;
use subop_core::{from_json, iterate, oracle_relation, order_isomorphic, to_dot, to_json, Budget};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares against a checked-in file; `SUBOP_BLESS=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("SUBOP_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "{}", path.display());
}

#[test]
fn oracle_rank1_golden() {
    let t = table(ONE_CLASS);
    let reference = oracle_relation(&t, 1, Budget::default()).unwrap();
    check_golden("one_class_rank1.json", &to_json(&reference));
    check_golden("one_class_rank1.dot", &to_dot(&reference));
}

#[test]
fn built_rank1_matches_golden() {
    let t = table(ONE_CLASS);
    let built = iterate(&t, 1, Budget::default()).unwrap();
    let expected = std::fs::read_to_string(golden("one_class_rank1.json")).unwrap();
    assert_eq!(to_json(&built), expected);
    let expected = std::fs::read_to_string(golden("one_class_rank1.dot")).unwrap();
    assert_eq!(to_dot(&built), expected);
}

#[test]
fn rank1_json_numbers_types_0_to_7() {
    let t = table(ONE_CLASS);
    let doc = RelationDocument::from_relation(&iterate(&t, 1, Budget::default()).unwrap());
    assert_eq!(doc.iteration, 1);
    let ids: Vec<usize> = doc.types.iter().map(|e| e.id).collect();
    assert_eq!(ids, (0..8).collect::<Vec<_>>());
    let names: Vec<&str> = doc.types.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "C<?>",
            "N",
            "O",
            "C<? :> C<?>>",
            "C<? <: C<?>>",
            "C<C<?>>",
            "C<N>",
            "C<O>"
        ]
    );
}

#[test]
fn json_is_well_formed() {
    for (label, t) in test_tables() {
        let r = iterate(&t, 2, Budget::default()).unwrap();
        let doc: RelationDocument = serde_json::from_str(&to_json(&r)).unwrap();
        let n = doc.types.len();
        let mut sorted = doc.hasse_edges.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, doc.hasse_edges, "{label}: sorted, no duplicates");
        for [a, b] in &doc.hasse_edges {
            assert!(*a < n && *b < n && a != b, "{label}");
        }
    }
}

#[test]
fn json_round_trip_rebuilds_relation() {
    for (label, t) in test_tables() {
        let r = iterate(&t, 2, Budget::default()).unwrap();
        let back = from_json(&to_json(&r), &t).unwrap();
        assert_eq!(back, r, "{label}");
        assert_eq!(back.iteration(), 2);
        assert!(order_isomorphic(&r, &back, |x| x.clone()).unwrap());
    }
}

#[test]
fn exports_are_deterministic() {
    let t = table(TWO_CLASS);
    let a = iterate(&t, 2, Budget::default()).unwrap();
    let b = iterate(&t, 2, Budget::default()).unwrap();
    assert_eq!(to_dot(&a), to_dot(&b));
    assert_eq!(to_json(&a), to_json(&b));
}

#[test]
fn dot_parses_and_mirrors_hasse_edges() {
    for (label, t) in test_tables() {
        let r = iterate(&t, 2, Budget::default()).unwrap();
        let text = to_dot(&r);
        let graph = canonical::Graph::from(
            ast::Graph::try_from(text.as_str()).unwrap_or_else(|e| panic!("{label}: {e}")),
        );
        assert_eq!(graph.nodes.set.len(), r.len(), "{label}");
        let mut edges: Vec<(String, String)> = graph
            .edges
            .set
            .iter()
            .map(|e| (e.from.to_string(), e.to.to_string()))
            .collect();
        edges.sort();
        let mut want: Vec<(String, String)> = r
            .hasse_indices()
            .iter()
            .map(|(i, j)| (format!("t{i}"), format!("t{j}")))
            .collect();
        want.sort();
        assert_eq!(edges, want, "{label}");
    }
}

#[test]
fn empty_table_dot_has_two_nodes() {
    let t = table("");
    let dot = to_dot(&iterate(&t, 4, Budget::default()).unwrap());
    assert_eq!(dot.matches("[label=").count(), 2);
    assert_eq!(dot.matches(" -> ").count(), 1);
}
