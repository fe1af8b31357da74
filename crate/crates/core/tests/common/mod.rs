#![allow(dead_code)]

use conceptgraph::{BipartiteGraph, ConceptEntry, Corpus, DocumentRecord, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const KARATE_EDGES: [(u32, u32); 78] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (0, 5),
    (0, 6),
    (0, 7),
    (0, 8),
    (0, 10),
    (0, 11),
    (0, 12),
    (0, 13),
    (0, 17),
    (0, 19),
    (0, 21),
    (0, 31),
    (1, 2),
    (1, 3),
    (1, 7),
    (1, 13),
    (1, 17),
    (1, 19),
    (1, 21),
    (1, 30),
    (2, 3),
    (2, 7),
    (2, 8),
    (2, 9),
    (2, 13),
    (2, 27),
    (2, 28),
    (2, 32),
    (3, 7),
    (3, 12),
    (3, 13),
    (4, 6),
    (4, 10),
    (5, 6),
    (5, 10),
    (5, 16),
    (6, 16),
    (8, 30),
    (8, 32),
    (8, 33),
    (9, 33),
    (13, 33),
    (14, 32),
    (14, 33),
    (15, 32),
    (15, 33),
    (18, 32),
    (18, 33),
    (19, 33),
    (20, 32),
    (20, 33),
    (22, 32),
    (22, 33),
    (23, 25),
    (23, 27),
    (23, 29),
    (23, 32),
    (23, 33),
    (24, 25),
    (24, 27),
    (24, 31),
    (25, 31),
    (26, 29),
    (26, 33),
    (27, 33),
    (28, 31),
    (28, 33),
    (29, 32),
    (29, 33),
    (30, 32),
    (30, 33),
    (31, 32),
    (31, 33),
    (32, 33),
];

pub fn karate() -> WeightedGraph {
    let edges: Vec<(u32, u32, f64)> = KARATE_EDGES.iter().map(|&(a, b)| (a, b, 1.0)).collect();
    WeightedGraph::from_edges(34, &edges).unwrap()
}

/// Random weighted graph on `n` nodes with edge density `p`, weights in (0, 1].
pub fn random_weighted(rng: &mut ChaCha8Rng, n: usize, p: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0 - rng.random::<f64>()));
            }
        }
    }
    WeightedGraph::from_edges(n, &edges).unwrap()
}

pub fn random_bipartite(rng: &mut ChaCha8Rng, n_docs: usize, n_concepts: usize, p: f64) -> BipartiteGraph {
    let mut edges = Vec::new();
    for d in 0..n_docs as u32 {
        for c in 0..n_concepts as u32 {
            if rng.random::<f64>() < p {
                edges.push((d, c));
            }
        }
    }
    BipartiteGraph::from_edges(n_docs, n_concepts, edges).unwrap()
}

pub fn random_assignment(rng: &mut ChaCha8Rng, n: usize, k: u32) -> Vec<u32> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

/// Barber modularity as the literal double sum over document–concept pairs.
pub fn barber_double_sum(g: &BipartiteGraph, assignment: &[u32]) -> f64 {
    let nd = g.n_docs();
    let m = g.m() as f64;
    let mut adj = vec![vec![0.0; g.n_concepts()]; nd];
    for &(d, c) in &g.edges {
        adj[d as usize][c as usize] = 1.0;
    }
    let mut q = 0.0;
    for d in 0..nd {
        for c in 0..g.n_concepts() {
            if assignment[d] == assignment[nd + c] {
                let k = g.doc_degree[d] as f64;
                let dd = g.concept_degree[c] as f64;
                q += adj[d][c] - k * dd / m;
            }
        }
    }
    q / m
}

/// Corpus from `(categories, concepts)` per document; concept ids `0..n_concepts`,
/// the ids in `generic` flagged generic.
pub fn corpus(n_concepts: u32, generic: &[u32], docs: &[(&[&str], &[u32])]) -> Corpus {
    let vocabulary = (0..n_concepts)
        .map(|c| ConceptEntry {
            concept_id: c,
            name: format!("k{c}"),
            is_generic: generic.contains(&c),
            doc_count: 0,
        })
        .collect();
    let documents = docs
        .iter()
        .enumerate()
        .map(|(i, (cats, concepts))| DocumentRecord {
            doc_id: i as u32,
            external_id: format!("doc{i}"),
            categories: cats.iter().map(|s| s.to_string()).collect(),
            concept_ids: concepts.to_vec(),
        })
        .collect();
    Corpus::new(vocabulary, documents).unwrap()
}

/// Random corpus with up to three categories per document.
pub fn random_corpus(rng: &mut ChaCha8Rng, n_docs: usize, n_concepts: u32, n_categories: usize) -> Corpus {
    let labels: Vec<String> = (0..n_categories).map(|q| format!("cat{q}")).collect();
    let vocabulary = (0..n_concepts)
        .map(|c| ConceptEntry {
            concept_id: c,
            name: format!("k{c}"),
            is_generic: rng.random::<f64>() < 0.1,
            doc_count: 0,
        })
        .collect();
    let documents = (0..n_docs)
        .map(|i| {
            let mut cats: Vec<String> = Vec::new();
            let n_cats = if rng.random::<f64>() < 0.6 {
                1
            } else {
                rng.random_range(2..=3)
            };
            while cats.len() < n_cats.min(n_categories) {
                let l = &labels[rng.random_range(0..n_categories)];
                if !cats.contains(l) {
                    cats.push(l.clone());
                }
            }
            let concept_ids = (0..n_concepts).filter(|_| rng.random::<f64>() < 0.2).collect();
            DocumentRecord {
                doc_id: i as u32,
                external_id: format!("r{i}"),
                categories: cats,
                concept_ids,
            }
        })
        .collect();
    Corpus::new(vocabulary, documents).unwrap()
}
