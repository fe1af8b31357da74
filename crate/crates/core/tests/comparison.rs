mod common;

use common::*;
use conceptgraph::report::rank_group;
use conceptgraph::{
    cooccurrence_matrix, entropy, export_report, filter_single_node_clusters, mutual_information, nmi, GraphKind,
    NodeLabel, Partition, RankingScore,
};
use proptest::prelude::*;

#[test]
fn frozen_information_values() {
    let p = [0, 0, 1, 1];
    let q = [0, 0, 0, 1];
    assert!((entropy(&[0, 0, 1]).unwrap() - 0.6365141682948128).abs() < 1e-15);
    assert!((mutual_information(&p, &q).unwrap() - 0.21576155433883565).abs() < 1e-15);
    assert!((nmi(&p, &q).unwrap() - 0.3437110184854508).abs() < 1e-15);
    assert!(nmi::<u32, u32>(&[], &[]).is_err());
    assert!(nmi(&[0, 1], &[0]).is_err());
}

#[test]
fn cooccurrence_counts_and_rows() {
    let c = corpus(
        2,
        &[],
        &[
            (&["a", "b"], &[0]),
            (&["a", "b", "c"], &[1]),
            (&["a"], &[0]),
            (&["a"], &[1]),
            (&["c"], &[1]),
        ],
    );
    let (single, multi) = c.split_by_category_count();
    let m = cooccurrence_matrix(&multi, &single);
    assert_eq!(m.labels, vec!["a", "b", "c"]);
    assert_eq!(m.raw, vec![vec![2, 2, 1], vec![2, 0, 1], vec![1, 1, 1]]);
    assert_eq!(m.raw_count("b", "c"), Some(1));
    assert_eq!(m.normalized[0], vec![0.4, 0.4, 0.2]);
}

#[test]
fn one_shared_document_splits_rows_evenly() {
    let c = corpus(1, &[], &[(&["a", "b"], &[0]), (&["a"], &[0]), (&["b"], &[0])]);
    let (single, multi) = c.split_by_category_count();
    let m = cooccurrence_matrix(&multi, &single);
    assert_eq!(m.normalized, vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    let (only_single, none) = corpus(1, &[], &[(&["a"], &[0]), (&["b"], &[0])]).split_by_category_count();
    assert_eq!(cooccurrence_matrix(&none, &only_single).normalized, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
}

#[test]
fn singleton_clusters_are_dropped() {
    let c = corpus(
        1,
        &[],
        &[(&["x"], &[0]), (&["x"], &[0]), (&["y"], &[0]), (&["y"], &[0])],
    );
    let nodes = (0..4).map(NodeLabel::Doc).collect();
    let p = Partition::new(vec![5, 5, 9, 7], nodes, f64::NAN, GraphKind::Idf, 0);
    let pair = filter_single_node_clusters(&p, &c);
    assert_eq!(pair.items, vec![0, 1]);
    assert_eq!(pair.clusters, vec![0, 0]);
}

#[test]
fn report_percentages_recount_from_documents() {
    let mut r = rng(8);
    let c = random_corpus(&mut r, 60, 30, 3);
    let (single, _) = c.split_by_category_count();
    let nodes: Vec<NodeLabel> = single.documents().iter().map(|d| NodeLabel::Doc(d.doc_id)).collect();
    let assignment = random_assignment(&mut r, nodes.len(), 3);
    let p = Partition::new(assignment, nodes, 0.0, GraphKind::Idf, 0);
    let pair = filter_single_node_clusters(&p, &single);
    let report = export_report(&c, &p, &pair, 5);
    for cluster in &report.clusters {
        let members: Vec<u32> = p
            .doc_clusters()
            .filter(|&(_, k)| k == cluster.partition_cluster)
            .map(|(d, _)| d)
            .collect();
        assert_eq!(members.len(), cluster.size);
        for e in &cluster.ranking.entries {
            let count = members
                .iter()
                .filter(|&&d| c.document(d).unwrap().concept_ids.contains(&e.concept_id))
                .count();
            assert_eq!(count, e.count);
            assert!((e.percentage - 100.0 * count as f64 / members.len() as f64).abs() < 1e-9);
            assert!(!c.is_generic(e.concept_id));
        }
    }
    let ranked = rank_group(&c, &[0, 1, 2], 3, RankingScore::Frequency);
    assert!(ranked.windows(2).all(|w| w[0].count >= w[1].count));
}

proptest! {
    #[test]
    fn nmi_is_symmetric_and_bounded(p in proptest::collection::vec(0u8..5, 1..80), shift in 0u8..5) {
        let q: Vec<u8> = p.iter().enumerate().map(|(i, &x)| (x + shift + (i % 3) as u8) % 5).collect();
        let a = nmi(&p, &q).unwrap();
        prop_assert_eq!(a, nmi(&q, &p).unwrap());
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((nmi(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nmi_ignores_label_names(p in proptest::collection::vec(0u32..6, 1..60), q in proptest::collection::vec(0u32..6, 60)) {
        let q = &q[..p.len()];
        let renamed: Vec<String> = p.iter().map(|c| format!("cluster-{}", 7 * c + 1)).collect();
        prop_assert!((nmi(&p, q).unwrap() - nmi(&renamed, q).unwrap()).abs() < 1e-12);
    }
}
