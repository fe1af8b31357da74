//! Bipartite document–concept graphs and their idf-weighted one-mode
//! projection onto documents.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, LogBase};
use crate::error::{Error, Result};

/// Which network representation a graph or partition belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    /// Unweighted document–concept bipartite graph.
    Bp,
    /// Cosine-similarity projection onto documents.
    Idf,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Bp => "bp",
            GraphKind::Idf => "idf",
        }
    }
}

impl std::fmt::Display for GraphKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bp" => Ok(GraphKind::Bp),
            "idf" => Ok(GraphKind::Idf),
            other => Err(Error::InvalidParameter(format!("unknown graph kind `{other}`"))),
        }
    }
}

/// Document–concept incidence graph over non-generic concepts.
///
/// Doc node `i` is `doc_ids[i]`, concept node `j` is `concept_ids[j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub doc_ids: Vec<u32>,
    pub concept_ids: Vec<u32>,
    /// `(doc node, concept node)`, sorted, no duplicates.
    pub edges: Vec<(u32, u32)>,
    pub doc_degree: Vec<u32>,
    pub concept_degree: Vec<u32>,
}

impl BipartiteGraph {
    /// Builds a graph from raw incidences; duplicates are collapsed.
    pub fn from_edges(n_docs: usize, n_concepts: usize, mut edges: Vec<(u32, u32)>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        let mut doc_degree = vec![0u32; n_docs];
        let mut concept_degree = vec![0u32; n_concepts];
        for &(d, c) in &edges {
            if d as usize >= n_docs || c as usize >= n_concepts {
                return Err(Error::InvalidParameter(format!(
                    "edge ({d}, {c}) outside a {n_docs}x{n_concepts} bipartite graph"
                )));
            }
            doc_degree[d as usize] += 1;
            concept_degree[c as usize] += 1;
        }
        Ok(BipartiteGraph {
            doc_ids: (0..n_docs as u32).collect(),
            concept_ids: (0..n_concepts as u32).collect(),
            edges,
            doc_degree,
            concept_degree,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn n_concepts(&self) -> usize {
        self.concept_ids.len()
    }

    /// Doc nodes first, then concept nodes.
    pub fn n_nodes(&self) -> usize {
        self.n_docs() + self.n_concepts()
    }

    /// Total edge count.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn export_edges_csv(&self, path: &Path) -> Result<()> {
        let mut out = create(path)?;
        let mut body = String::from("src,dst,weight\n");
        for &(d, c) in &self.edges {
            body.push_str(&format!(
                "d{},c{},1\n",
                self.doc_ids[d as usize], self.concept_ids[c as usize]
            ));
        }
        write_all(&mut out, path, body.as_bytes())
    }
}

/// Symmetric weighted document graph in CSR form (both directions stored).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub doc_ids: Vec<u32>,
    pub offsets: Vec<usize>,
    pub targets: Vec<u32>,
    pub weights: Vec<f64>,
    /// Sum of weights over undirected edges.
    pub total_weight: f64,
}

impl WeightedGraph {
    /// Builds a graph from undirected edges `(i, j, w)`. Self-loops,
    /// non-positive weights and duplicates (the later one wins) are rejected
    /// or dropped as documented on each case.
    pub fn from_edges(n_nodes: usize, edges: &[(u32, u32, f64)]) -> Result<Self> {
        let mut directed: Vec<(u32, u32, f64)> = Vec::with_capacity(edges.len() * 2);
        for &(i, j, w) in edges {
            if i as usize >= n_nodes || j as usize >= n_nodes {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) outside {n_nodes} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("self-loop on node {i}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                continue;
            }
            directed.push((i, j, w));
            directed.push((j, i, w));
        }
        directed.sort_by_key(|a| (a.0, a.1));
        directed.dedup_by(|later, earlier| {
            (later.0, later.1) == (earlier.0, earlier.1) && {
                earlier.2 = later.2;
                true
            }
        });
        let rows = group_rows(n_nodes, directed);
        Ok(Self::from_rows((0..n_nodes as u32).collect(), rows))
    }

    fn from_rows(doc_ids: Vec<u32>, rows: Vec<Vec<(u32, f64)>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let total: usize = rows.iter().map(Vec::len).sum();
        let mut targets = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for row in rows {
            for (j, w) in row {
                targets.push(j);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        let mut graph = WeightedGraph {
            doc_ids,
            offsets,
            targets,
            weights,
            total_weight: 0.0,
        };
        graph.total_weight = graph.edges().map(|(_, _, w)| w).sum();
        graph
    }

    pub fn n_nodes(&self) -> usize {
        self.doc_ids.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.targets[range.clone()]
            .binary_search(&(j as u32))
            .ok()
            .map(|k| self.weights[range.start + k])
    }

    /// Undirected edges in canonical `(min, max)` order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.n_nodes()).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&(j, _)| j as usize > i)
                .map(move |(j, w)| (i as u32, j, w))
        })
    }

    /// Weighted degree of a node.
    pub fn strength(&self, i: usize) -> f64 {
        self.neighbors(i).map(|(_, w)| w).sum()
    }

    pub fn export_edges_csv(&self, path: &Path) -> Result<()> {
        let mut out = create(path)?;
        let mut body = String::from("src,dst,weight\n");
        for (i, j, w) in self.edges() {
            body.push_str(&format!(
                "{},{},{}\n",
                self.doc_ids[i as usize], self.doc_ids[j as usize], w
            ));
        }
        write_all(&mut out, path, body.as_bytes())
    }
}

fn group_rows(n_nodes: usize, directed: Vec<(u32, u32, f64)>) -> Vec<Vec<(u32, f64)>> {
    let mut rows = vec![Vec::new(); n_nodes];
    for (i, j, w) in directed {
        rows[i as usize].push((j, w));
    }
    rows
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn write_all(out: &mut BufWriter<File>, path: &Path, bytes: &[u8]) -> Result<()> {
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// One edge per (document, non-generic concept) membership.
///
/// Concepts without any non-generic incidence are left out of the concept
/// side; documents without one stay as isolated doc nodes.
pub fn build_bipartite(corpus: &Corpus) -> BipartiteGraph {
    let docs = corpus.documents();
    let mut concept_node = vec![u32::MAX; corpus.vocabulary().len()];
    let mut concept_ids = Vec::new();
    for entry in corpus.vocabulary() {
        if !entry.is_generic && entry.doc_count > 0 {
            concept_node[entry.concept_id as usize] = concept_ids.len() as u32;
            concept_ids.push(entry.concept_id);
        }
    }
    let mut edges = Vec::new();
    let mut doc_degree = vec![0u32; docs.len()];
    let mut concept_degree = vec![0u32; concept_ids.len()];
    for (d, doc) in docs.iter().enumerate() {
        for c in corpus.specific_concepts(doc) {
            let node = concept_node[c as usize];
            edges.push((d as u32, node));
            doc_degree[d] += 1;
            concept_degree[node as usize] += 1;
        }
    }
    edges.sort_unstable();
    BipartiteGraph {
        doc_ids: docs.iter().map(|d| d.doc_id).collect(),
        concept_ids,
        edges,
        doc_degree,
        concept_degree,
    }
}

/// Cosine-similarity projection with natural-log idf weights.
pub fn build_projection(corpus: &Corpus) -> WeightedGraph {
    build_projection_with_base(corpus, LogBase::Natural)
}

/// Cosine-similarity projection via an inverted concept index.
///
/// Each row is accumulated independently in concept order, so the result is
/// bit-identical regardless of the number of worker threads.
pub fn build_projection_with_base(corpus: &Corpus, base: LogBase) -> WeightedGraph {
    let docs = corpus.documents();
    let n = docs.len();
    let idf = corpus.idf_table(base);

    // per document: (concept, idf) for non-generic concepts
    let vectors: Vec<Vec<(u32, f64)>> = docs
        .iter()
        .map(|d| {
            corpus
                .specific_concepts(d)
                .map(|c| (c, idf[c as usize].unwrap_or(0.0)))
                .collect()
        })
        .collect();
    let norm_sq: Vec<f64> = vectors.iter().map(|v| v.iter().map(|&(_, w)| w * w).sum()).collect();

    let mut postings: Vec<Vec<u32>> = vec![Vec::new(); corpus.vocabulary().len()];
    for (i, v) in vectors.iter().enumerate() {
        for &(c, w) in v {
            if w > 0.0 {
                postings[c as usize].push(i as u32);
            }
        }
    }

    // upper triangle rows: neighbours j > i
    let upper: Vec<Vec<(u32, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0.0f64; n], Vec::<u32>::new()),
            |(acc, touched), i| {
                if norm_sq[i] == 0.0 {
                    return Vec::new();
                }
                for &(c, w) in &vectors[i] {
                    if w == 0.0 {
                        continue;
                    }
                    let list = &postings[c as usize];
                    let start = list.partition_point(|&j| j as usize <= i);
                    for &j in &list[start..] {
                        let slot = &mut acc[j as usize];
                        if *slot == 0.0 {
                            touched.push(j);
                        }
                        *slot += w * w;
                    }
                }
                touched.sort_unstable();
                let row = touched
                    .drain(..)
                    .filter_map(|j| {
                        let dot = std::mem::take(&mut acc[j as usize]);
                        let w = (dot / (norm_sq[i] * norm_sq[j as usize]).sqrt()).min(1.0);
                        (w > 0.0).then_some((j, w))
                    })
                    .collect();
                row
            },
        )
        .collect();

    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    // lower triangle entries first so every row stays sorted
    for (i, row) in upper.iter().enumerate() {
        for &(j, w) in row {
            rows[j as usize].push((i as u32, w));
        }
    }
    for (i, row) in upper.into_iter().enumerate() {
        rows[i].extend(row);
    }
    WeightedGraph::from_rows(docs.iter().map(|d| d.doc_id).collect(), rows)
}

/// Stored number of undirected projection edges.
pub fn projection_edge_count(graph: &WeightedGraph) -> usize {
    graph.edge_count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ConceptEntry, DocumentRecord};

    fn corpus(generic: &[bool], docs: &[&[u32]]) -> Corpus {
        Corpus::new(
            generic
                .iter()
                .enumerate()
                .map(|(i, &g)| ConceptEntry {
                    concept_id: i as u32,
                    name: format!("c{i}"),
                    is_generic: g,
                    doc_count: 0,
                })
                .collect(),
            docs.iter()
                .enumerate()
                .map(|(i, cs)| DocumentRecord {
                    doc_id: i as u32,
                    external_id: i.to_string(),
                    categories: vec!["x".into()],
                    concept_ids: cs.to_vec(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn bipartite_skips_generic() {
        // concept 0 = c (specific), concept 1 = g (generic)
        let g = build_bipartite(&corpus(&[false, true], &[&[0, 1], &[0]]));
        assert_eq!(g.m(), 2);
        assert_eq!(g.edges, vec![(0, 0), (1, 0)]);
        assert_eq!(g.concept_ids, vec![0]);
    }

    #[test]
    fn bipartite_all_generic() {
        let g = build_bipartite(&corpus(&[true, true], &[&[0, 1], &[0], &[1]]));
        assert_eq!(g.m(), 0);
        assert_eq!(g.n_docs(), 3);
        assert_eq!(g.n_concepts(), 0);
    }

    #[test]
    fn identical_and_disjoint_documents() {
        // concept 2 keeps idf(0) and idf(1) non-zero
        let g = build_projection(&corpus(&[false; 3], &[&[0, 1], &[0, 1], &[2]]));
        assert_eq!(g.weight(0, 1), Some(1.0));
        assert_eq!(g.weight(0, 2), None);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn zero_idf_overlap_is_dropped() {
        // concept 0 is in every document, so its idf is 0
        let g = build_projection(&corpus(&[false; 3], &[&[0, 1], &[0, 2]]));
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn complete_overlap_edge_count() {
        let n = 6;
        let docs: Vec<&[u32]> = vec![&[0, 1]; n];
        let mut docs = docs;
        let extra: &[u32] = &[2];
        docs.push(extra);
        let g = build_projection(&corpus(&[false; 3], &docs));
        assert_eq!(projection_edge_count(&g), n * (n - 1) / 2);
    }

    #[test]
    fn empty_graph() {
        let g = build_projection(&corpus(&[false], &[]));
        assert_eq!(projection_edge_count(&g), 0);
        assert_eq!(g.total_weight, 0.0);
    }

    #[test]
    fn from_edges_is_symmetric() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 2.0), (2, 1, 0.5), (0, 2, 0.0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weight(1, 0), Some(2.0));
        assert_eq!(g.weight(1, 2), Some(0.5));
        assert_eq!(g.total_weight, 2.5);
        assert!(WeightedGraph::from_edges(2, &[(1, 1, 1.0)]).is_err());
    }
}
