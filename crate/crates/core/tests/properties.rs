mod common;

use std::collections::{BTreeMap, BTreeSet};

use collabmap::clustering::{cluster, normalized_mutual_information};
use collabmap::collabgraph::{build_graph, CollabGraph, Scope};
use collabmap::indicators::betweenness;
use collabmap::ingest::{filter_records, parse_records_str, write_records, DocType, PublicationRecord, YearRange};
use collabmap::Rational;
use common::*;
use proptest::prelude::*;

fn record_strategy() -> impl Strategy<Value = (i32, usize, BTreeSet<usize>, BTreeSet<usize>)> {
    (
        1990..2021i32,
        0..DocType::ALL.len(),
        prop::collection::btree_set(0..30usize, 1..6),
        prop::collection::btree_set(0..4usize, 0..3),
    )
}

fn records_strategy(max: usize) -> impl Strategy<Value = Vec<PublicationRecord>> {
    prop::collection::vec(record_strategy(), 0..max).prop_map(|raw| {
        let fields = ["Medicine", "Physics", "Plant Sciences", "Soil Science"];
        raw.into_iter()
            .enumerate()
            .map(|(i, (year, t, countries, fs))| {
                let mut r =
                    PublicationRecord::new(format!("P{i}"), year, DocType::ALL[t], countries.into_iter().map(cc));
                r.fields = fs.into_iter().map(|f| fields[f].to_string()).collect();
                r
            })
            .collect()
    })
}

fn total_edge_weight(g: &CollabGraph) -> u64 {
    g.edges().values().sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn records_survive_serialization(records in records_strategy(60)) {
        let mut text = Vec::new();
        write_records(&records, &mut text).unwrap();
        let (parsed, report) = parse_records_str(std::str::from_utf8(&text).unwrap());
        prop_assert!(report.rejects.is_empty());
        prop_assert!(report.reconciles());
        prop_assert_eq!(parsed, records);
    }

    #[test]
    fn filtering_is_idempotent(records in records_strategy(60), a in 1990..2021i32, b in 1990..2021i32, mask in 1u8..32) {
        let types: BTreeSet<DocType> = DocType::ALL.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, t)| *t).collect();
        let range = YearRange::new(a.min(b), a.max(b)).unwrap();
        let once = filter_records(&records, &types, range);
        prop_assert!(once.iter().all(|r| types.contains(&r.doc_type) && range.contains(r.year)));
        prop_assert_eq!(filter_records(&once, &types, range), once);
    }

    #[test]
    fn graph_ignores_record_order(records in records_strategy(80), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut shuffled = records.clone();
        shuffled.shuffle(&mut rng(seed));
        prop_assert_eq!(build_graph(&shuffled, &Scope::All), build_graph(&records, &Scope::All));
    }

    #[test]
    fn adding_records_never_decreases_counts(base in records_strategy(40), extra in records_strategy(20)) {
        let before = build_graph(&base, &Scope::All);
        let mut all = base.clone();
        all.extend(extra.into_iter().enumerate().map(|(i, mut r)| { r.id = format!("X{i}"); r }));
        let after = build_graph(&all, &Scope::All);
        for (c, n) in before.nodes() {
            prop_assert!(after.output(*c) >= *n);
        }
        for (p, w) in before.edges() {
            prop_assert!(after.weight(p.lo(), p.hi()) >= *w);
        }
    }

    #[test]
    fn one_record_adds_all_its_pairs(records in records_strategy(30), (year, t, countries, _) in record_strategy()) {
        let before = build_graph(&records, &Scope::All);
        let k = countries.len() as u64;
        let mut all = records.clone();
        all.push(PublicationRecord::new("NEW", year, DocType::ALL[t], countries.into_iter().map(cc)));
        let after = build_graph(&all, &Scope::All);
        prop_assert_eq!(total_edge_weight(&after) - total_edge_weight(&before), k * (k - 1) / 2);
        let outputs = |g: &CollabGraph| g.nodes().values().sum::<u64>();
        prop_assert_eq!(outputs(&after) - outputs(&before), k);
    }

    #[test]
    fn merged_graphs_equal_joint_build(a in records_strategy(30), b in records_strategy(30)) {
        let b: Vec<PublicationRecord> = b.into_iter().map(|mut r| { r.id = format!("B{}", r.id); r }).collect();
        let mut joint = a.clone();
        joint.extend(b.iter().cloned());
        let ga = build_graph(&a, &Scope::All);
        let gb = build_graph(&b, &Scope::All);
        prop_assert_eq!(ga.clone().merge(gb.clone()), build_graph(&joint, &Scope::All));
        prop_assert_eq!(ga.clone().merge(gb.clone()), gb.merge(ga));
    }

    #[test]
    fn betweenness_ignores_weight_scale(seed in any::<u64>(), n in 1usize..10, factor in 2u64..50) {
        let mut r = rng(seed);
        let w = random_weights(&mut r, n, 0.4, 6);
        let scaled: BTreeMap<_, _> = w.iter().map(|(k, v)| (*k, v * factor)).collect();
        let plain = betweenness::<Rational>(&graph_from_weights(n, &w));
        prop_assert_eq!(plain, betweenness::<Rational>(&graph_from_weights(n, &scaled)));
    }

    #[test]
    fn reported_quality_matches_direct_sum(seed in any::<u64>(), n in 2usize..16, gamma in 0.2f64..3.0) {
        let mut r = rng(seed);
        let g = graph_from_weights(n, &random_weights(&mut r, n, 0.5, 8));
        prop_assume!(g.edge_count() > 0);
        let c = cluster::<f64>(&g, gamma, seed);
        prop_assert!((c.quality - modularity_oracle(&g, &c.assignment, gamma)).abs() < 1e-9);
        let singletons: BTreeMap<_, _> = g.nodes().keys().enumerate().map(|(i, k)| (*k, i)).collect();
        prop_assert!(c.quality >= modularity_oracle(&g, &singletons, gamma) - 1e-9);
    }

    #[test]
    fn nmi_is_symmetric_and_bounded(a in prop::collection::vec(0usize..4, 1..40), seed in any::<u64>()) {
        use rand::Rng;
        let mut r = rng(seed);
        let b: Vec<usize> = a.iter().map(|_| r.random_range(0..4)).collect();
        let ab = normalized_mutual_information(&a, &b);
        prop_assert!((ab - normalized_mutual_information(&b, &a)).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
        prop_assert!((normalized_mutual_information(&a, &a) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn clustering_is_reproducible_per_seed() {
    let (g, _) = planted_blocks(99, 40, 4);
    for seed in 0..5 {
        assert_eq!(cluster::<f64>(&g, 1.0, seed), cluster::<f64>(&g, 1.0, seed));
    }
}

#[test]
fn scope_restricts_nodes_but_keeps_their_counts() {
    let mut r = rng(5);
    let records = random_records(&mut r, 500, 10, 3);
    let keep: BTreeSet<_> = (0..5).map(cc).collect();
    let scoped = build_graph(&records, &Scope::Only(keep.clone()));
    let full = build_graph(&records, &Scope::All);
    assert_eq!(scoped, full.subgraph(&keep));
}
