//! Cluster characterization by their most frequent concepts.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::compare::{
    composition_matrix, cooccurrence_matrix, CompositionMatrix, CooccurrenceMatrix, LabeledPartitionPair,
};
use crate::corpus::{Corpus, CorpusStats};
use crate::error::{Error, Result};
use crate::graph::GraphKind;
use crate::modularity::Partition;

pub const DEFAULT_TOP_K: usize = 10;

/// How concepts are ranked within a group.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankingScore {
    /// Share of the group's documents containing the concept.
    #[default]
    Frequency,
    /// Group frequency divided by corpus frequency.
    Lift,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedConcept {
    pub concept_id: u32,
    pub name: String,
    /// `100 * count / group_size`.
    pub percentage: f64,
    pub count: usize,
    pub lift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConceptRanking {
    pub cluster: u32,
    pub category: Option<String>,
    pub group_size: usize,
    pub entries: Vec<RankedConcept>,
    /// Set when the group holds no documents.
    pub empty: bool,
}

/// Ranks the non-generic concepts of a set of documents.
pub fn rank_group(corpus: &Corpus, docs: &[u32], top_k: usize, score: RankingScore) -> Vec<RankedConcept> {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for &d in docs {
        if let Some(doc) = corpus.document(d) {
            for c in corpus.specific_concepts(doc) {
                *counts.entry(c).or_insert(0) += 1;
            }
        }
    }
    let size = docs.len() as f64;
    let n = corpus.n() as f64;
    let mut entries: Vec<RankedConcept> = counts
        .into_iter()
        .map(|(c, count)| {
            let entry = corpus.concept(c).expect("validated corpus");
            let share = count as f64 / size;
            RankedConcept {
                concept_id: c,
                name: entry.name.clone(),
                percentage: 100.0 * share,
                count,
                lift: share / (entry.doc_count as f64 / n),
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        let (x, y) = match score {
            RankingScore::Frequency => (a.percentage, b.percentage),
            RankingScore::Lift => (a.lift, b.lift),
        };
        y.total_cmp(&x)
            .then_with(|| a.name.cmp(&b.name))
            .then(a.concept_id.cmp(&b.concept_id))
    });
    entries.truncate(top_k);
    entries
}

/// Most frequent concepts of one partition cluster, optionally restricted
/// to documents of one category.
pub fn representative_concepts(
    corpus: &Corpus,
    partition: &Partition,
    cluster: u32,
    top_k: usize,
    category_filter: Option<&str>,
    score: RankingScore,
) -> Result<ConceptRanking> {
    if top_k == 0 {
        return Err(Error::InvalidParameter("top_k must be at least 1".into()));
    }
    if cluster as usize >= partition.n_clusters() {
        return Err(Error::InvalidParameter(format!(
            "cluster {cluster} does not exist ({} clusters)",
            partition.n_clusters()
        )));
    }
    let docs: Vec<u32> = partition
        .doc_clusters()
        .filter(|&(_, c)| c == cluster)
        .map(|(d, _)| d)
        .filter(|&d| match (category_filter, corpus.document(d)) {
            (_, None) => false,
            (None, Some(_)) => true,
            (Some(cat), Some(doc)) => doc.categories.iter().any(|c| c == cat),
        })
        .collect();
    if docs.is_empty() {
        log::warn!("cluster {cluster}: empty group for ranking");
    }
    Ok(ConceptRanking {
        cluster,
        category: category_filter.map(str::to_string),
        group_size: docs.len(),
        entries: rank_group(corpus, &docs, top_k, score),
        empty: docs.is_empty(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub kind: GraphKind,
    pub n_nodes: usize,
    pub n_clusters: usize,
    /// Node counts per cluster, in partition cluster order.
    pub cluster_sizes: Vec<usize>,
    pub score: Option<f64>,
    pub seed: u64,
    /// Clusters left after dropping single-document clusters.
    pub n_clusters_filtered: usize,
    pub n_items_filtered: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    /// Dense id after singleton filtering (composition row).
    pub cluster: u32,
    /// Id in the partition file.
    pub partition_cluster: u32,
    pub size: usize,
    pub ranking: ConceptRanking,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub stats: CorpusStats,
    pub partition: PartitionSummary,
    pub nmi: Option<f64>,
    pub composition: CompositionMatrix,
    pub cooccurrence: CooccurrenceMatrix,
    pub clusters: Vec<ClusterReport>,
}

/// Assembles the full report. `corpus` may contain multi-category
/// documents; they feed the co-occurrence matrix only.
pub fn export_report(corpus: &Corpus, partition: &Partition, pair: &LabeledPartitionPair, top_k: usize) -> Report {
    let (single, multi) = corpus.split_by_category_count();

    let original: HashMap<u32, u32> = partition.doc_clusters().collect();
    let mut groups: Vec<Vec<u32>> = vec![Vec::new(); pair.n_clusters()];
    let mut source = vec![0u32; pair.n_clusters()];
    for (&d, &c) in pair.items.iter().zip(&pair.clusters) {
        groups[c as usize].push(d);
        source[c as usize] = original[&d];
    }
    let clusters = groups
        .iter()
        .enumerate()
        .map(|(c, docs)| ClusterReport {
            cluster: c as u32,
            partition_cluster: source[c],
            size: docs.len(),
            ranking: ConceptRanking {
                cluster: c as u32,
                category: None,
                group_size: docs.len(),
                entries: rank_group(corpus, docs, top_k, RankingScore::Frequency),
                empty: docs.is_empty(),
            },
        })
        .collect();

    Report {
        stats: single.stats(),
        partition: PartitionSummary {
            kind: partition.kind,
            n_nodes: partition.len(),
            n_clusters: partition.n_clusters(),
            cluster_sizes: partition.cluster_sizes(),
            score: partition.score.is_finite().then_some(partition.score),
            seed: partition.seed,
            n_clusters_filtered: pair.n_clusters(),
            n_items_filtered: pair.len(),
        },
        nmi: pair.nmi().ok(),
        composition: composition_matrix(pair),
        cooccurrence: cooccurrence_matrix(&multi, &single),
        clusters,
    }
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Plain-text summary with one ranking table per cluster.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.stats.to_text("corpus"));
        let p = &self.partition;
        let _ = writeln!(
            out,
            "\nkind={} clusters={} (after singleton filtering: {}, {} articles) Q={} NMI={}",
            p.kind,
            p.n_clusters,
            p.n_clusters_filtered,
            p.n_items_filtered,
            p.score.map_or("n/a".into(), |q| format!("{q:.6}")),
            self.nmi.map_or("n/a".into(), |v| format!("{v:.4}")),
        );
        for cluster in &self.clusters {
            out.push('\n');
            out.push_str(&ranking_table(&cluster.ranking));
        }
        out
    }
}

/// Two-column table of concept names and percentages.
pub fn ranking_table(ranking: &ConceptRanking) -> String {
    let mut title = format!("cluster {}", ranking.cluster);
    if let Some(cat) = &ranking.category {
        let _ = write!(title, " / {cat}");
    }
    let _ = write!(title, " ({} articles)", ranking.group_size);
    let width = ranking
        .entries
        .iter()
        .map(|e| e.name.chars().count())
        .max()
        .unwrap_or(0)
        .max(7);
    let mut out = format!("{title}\n");
    let _ = writeln!(out, "{:<width$}  {:>7}", "concept", "%");
    for e in &ranking.entries {
        let _ = writeln!(out, "{:<width$}  {:>7.2}", e.name, e.percentage);
    }
    out
}
