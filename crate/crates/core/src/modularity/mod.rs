//! Modularity objectives and their maximization.
//!
//! Unipartite graphs use Newman's weighted modularity
//! `Q = Σ_c [Σ_in/(2m) − (Σ_tot/(2m))²]`. Bipartite graphs are co-clustered
//! under Barber's modularity `Q_B = Σ_c (e_c − K_c·D_c/m)/m`, where `K_c` and
//! `D_c` are the document- and concept-side degree sums of cluster `c`.

mod brute;
mod louvain;
mod partition;

pub use brute::{brute_force_max, BRUTE_FORCE_MAX_NODES};
pub use louvain::{best_of_runs, louvain};
pub use partition::{canonicalize, NodeLabel, Partition};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, GraphKind, WeightedGraph};

/// Borrowed view of either graph representation.
#[derive(Clone, Copy, Debug)]
pub enum GraphRef<'a> {
    Weighted(&'a WeightedGraph),
    Bipartite(&'a BipartiteGraph),
}

impl<'a> From<&'a WeightedGraph> for GraphRef<'a> {
    fn from(g: &'a WeightedGraph) -> Self {
        GraphRef::Weighted(g)
    }
}

impl<'a> From<&'a BipartiteGraph> for GraphRef<'a> {
    fn from(g: &'a BipartiteGraph) -> Self {
        GraphRef::Bipartite(g)
    }
}

impl<'a> GraphRef<'a> {
    pub fn kind(self) -> GraphKind {
        match self {
            GraphRef::Weighted(_) => GraphKind::Idf,
            GraphRef::Bipartite(_) => GraphKind::Bp,
        }
    }

    pub fn node_count(self) -> usize {
        match self {
            GraphRef::Weighted(g) => g.n_nodes(),
            GraphRef::Bipartite(g) => g.n_nodes(),
        }
    }

    pub fn node_labels(self) -> Vec<NodeLabel> {
        match self {
            GraphRef::Weighted(g) => g.doc_ids.iter().map(|&d| NodeLabel::Doc(d)).collect(),
            GraphRef::Bipartite(g) => g
                .doc_ids
                .iter()
                .map(|&d| NodeLabel::Doc(d))
                .chain(g.concept_ids.iter().map(|&c| NodeLabel::Concept(c)))
                .collect(),
        }
    }

    pub fn aggregates(self, assignment: &[u32]) -> Result<CommunityAggregates> {
        match self {
            GraphRef::Weighted(g) => unipartite_aggregates(g, assignment),
            GraphRef::Bipartite(g) => bipartite_aggregates(g, assignment),
        }
    }

    /// Modularity of the kind matching the graph.
    pub fn modularity(self, assignment: &[u32]) -> Result<f64> {
        self.aggregates(assignment)?.modularity()
    }
}

/// Per-cluster bookkeeping from which modularity is evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CommunityAggregates {
    Unipartite {
        /// Σ_in: weight inside each cluster, every edge counted in both directions.
        internal: Vec<f64>,
        /// Σ_tot: summed node strengths.
        total: Vec<f64>,
        m: f64,
    },
    Bipartite {
        /// e_c: edges inside each cluster.
        internal: Vec<f64>,
        /// K_c: document-side degree sums.
        doc_mass: Vec<f64>,
        /// D_c: concept-side degree sums.
        concept_mass: Vec<f64>,
        m: f64,
    },
}

impl CommunityAggregates {
    pub fn m(&self) -> f64 {
        match self {
            CommunityAggregates::Unipartite { m, .. } | CommunityAggregates::Bipartite { m, .. } => *m,
        }
    }

    pub fn modularity(&self) -> Result<f64> {
        match self {
            CommunityAggregates::Unipartite { internal, total, m } => {
                if *m <= 0.0 {
                    return Err(Error::UndefinedModularity);
                }
                let two_m = 2.0 * m;
                Ok(internal
                    .iter()
                    .zip(total)
                    .map(|(&inside, &tot)| inside / two_m - (tot / two_m).powi(2))
                    .sum())
            }
            CommunityAggregates::Bipartite {
                internal,
                doc_mass,
                concept_mass,
                m,
            } => {
                if *m <= 0.0 {
                    return Err(Error::UndefinedModularity);
                }
                Ok(internal
                    .iter()
                    .zip(doc_mass.iter().zip(concept_mass))
                    .map(|(&e, (&k, &d))| (e - k * d / m) / m)
                    .sum())
            }
        }
    }
}

/// Dense relabeling of an arbitrary assignment, plus the cluster count.
fn dense(assignment: &[u32]) -> (Vec<u32>, usize) {
    let mut a = assignment.to_vec();
    canonicalize(&mut a);
    let k = a.iter().max().map_or(0, |&c| c as usize + 1);
    (a, k)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::PartitionSize { expected, got });
    }
    Ok(())
}

fn unipartite_aggregates(graph: &WeightedGraph, assignment: &[u32]) -> Result<CommunityAggregates> {
    check_len(graph.n_nodes(), assignment.len())?;
    let (a, k) = dense(assignment);
    let mut internal = vec![0.0; k];
    let mut total = vec![0.0; k];
    for i in 0..graph.n_nodes() {
        let ci = a[i] as usize;
        for (j, w) in graph.neighbors(i) {
            total[ci] += w;
            if a[j as usize] as usize == ci {
                internal[ci] += w;
            }
        }
    }
    Ok(CommunityAggregates::Unipartite {
        internal,
        total,
        m: graph.total_weight,
    })
}

fn bipartite_aggregates(graph: &BipartiteGraph, assignment: &[u32]) -> Result<CommunityAggregates> {
    check_len(graph.n_nodes(), assignment.len())?;
    let (a, k) = dense(assignment);
    let n_docs = graph.n_docs();
    let mut internal = vec![0.0; k];
    let mut doc_mass = vec![0.0; k];
    let mut concept_mass = vec![0.0; k];
    for (d, &deg) in graph.doc_degree.iter().enumerate() {
        doc_mass[a[d] as usize] += deg as f64;
    }
    for (c, &deg) in graph.concept_degree.iter().enumerate() {
        concept_mass[a[n_docs + c] as usize] += deg as f64;
    }
    for &(d, c) in &graph.edges {
        let cd = a[d as usize];
        if cd == a[n_docs + c as usize] {
            internal[cd as usize] += 1.0;
        }
    }
    Ok(CommunityAggregates::Bipartite {
        internal,
        doc_mass,
        concept_mass,
        m: graph.m() as f64,
    })
}

/// Newman weighted modularity of a document-graph partition.
pub fn modularity_unipartite(graph: &WeightedGraph, assignment: &[u32]) -> Result<f64> {
    unipartite_aggregates(graph, assignment)?.modularity()
}

/// Barber modularity of a co-clustering; doc nodes first, then concepts.
pub fn modularity_bipartite(graph: &BipartiteGraph, assignment: &[u32]) -> Result<f64> {
    bipartite_aggregates(graph, assignment)?.modularity()
}
