//! Concept networks for annotated document corpora.
//!
//! A corpus of documents, each tagged with categories and a set of concepts,
//! is turned into two networks: the unweighted document–concept bipartite
//! graph and a document graph weighted by cosine similarity of idf concept
//! vectors. Both are partitioned by seeded multi-level modularity
//! maximization (Barber modularity for the bipartite graph, Newman
//! modularity for the projection), and the partitions are compared with the
//! documents' categories.
//!
//! ```
//! use conceptgraph::{best_of_runs, build_projection, generate_synthetic, PlantedConfig};
//!
//! let corpus = generate_synthetic(&PlantedConfig {
//!     n_docs: 40,
//!     n_concepts: 60,
//!     n_blocks: 2,
//!     p_in: 0.4,
//!     p_out: 0.02,
//!     seed: 1,
//! })
//! .unwrap();
//! let graph = build_projection(&corpus);
//! let partition = best_of_runs(&graph, 5, 0).unwrap();
//! assert!(partition.score > 0.3);
//! ```

pub mod compare;
pub mod corpus;
mod error;
pub mod graph;
pub mod io;
pub mod modularity;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use compare::{
    composition_matrix, cooccurrence_matrix, entropy, filter_single_node_clusters, mutual_information, nmi,
    ContingencyTable, CooccurrenceMatrix, LabeledMatrix, LabeledPartitionPair,
};
pub use corpus::{load_corpus, ConceptEntry, ConceptVector, Corpus, CorpusStats, DocumentRecord, LogBase};
pub use error::{Error, Result};
pub use graph::{
    build_bipartite, build_projection, build_projection_with_base, projection_edge_count, BipartiteGraph, GraphKind,
    WeightedGraph,
};
pub use io::AnyGraph;
pub use modularity::{
    best_of_runs, brute_force_max, louvain, modularity_bipartite, modularity_unipartite, CommunityAggregates, GraphRef,
    NodeLabel, Partition,
};
pub use pipeline::{run_pipeline, Manifest, Mode, PipelineConfig};
pub use report::{export_report, representative_concepts, ConceptRanking, RankingScore, Report};
pub use synth::{generate_synthetic, PlantedConfig};
