//! Agreement between detected clusters and an external classification.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::modularity::Partition;

/// Documents with a detected cluster and an external category each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPartitionPair {
    pub items: Vec<u32>,
    /// Dense cluster ids.
    pub clusters: Vec<u32>,
    pub categories: Vec<String>,
}

impl LabeledPartitionPair {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn n_clusters(&self) -> usize {
        self.clusters.iter().max().map_or(0, |&c| c as usize + 1)
    }

    pub fn category_labels(&self) -> Vec<String> {
        self.categories
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn nmi(&self) -> Result<f64> {
        nmi(&self.clusters, &self.categories)
    }

    pub fn contingency(&self) -> ContingencyTable {
        let labels = self.category_labels();
        let col: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut counts = vec![vec![0u64; labels.len()]; self.n_clusters()];
        for (&c, q) in self.clusters.iter().zip(&self.categories) {
            counts[c as usize][col[q.as_str()]] += 1;
        }
        ContingencyTable::from_counts(counts, labels)
    }
}

/// Cluster × category counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
    pub category_labels: Vec<String>,
}

impl ContingencyTable {
    fn from_counts(counts: Vec<Vec<u64>>, category_labels: Vec<String>) -> Self {
        let row_sums: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<u64> = (0..category_labels.len())
            .map(|q| counts.iter().map(|r| r[q]).sum())
            .collect();
        let total = row_sums.iter().sum();
        ContingencyTable {
            counts,
            row_sums,
            col_sums,
            total,
            category_labels,
        }
    }
}

/// Shannon entropy (natural log) of a labeling.
pub fn entropy<L: Eq + Hash>(labels: &[L]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::Empty("entropy of an empty labeling"));
    }
    Ok(entropy_of_counts(counts(labels).into_values(), labels.len()))
}

fn counts<L: Eq + Hash>(labels: &[L]) -> HashMap<&L, u64> {
    let mut map = HashMap::new();
    for l in labels {
        *map.entry(l).or_insert(0) += 1;
    }
    map
}

/// Terms are summed in sorted order so the result does not depend on the
/// hash iteration order.
fn entropy_of_counts(counts: impl Iterator<Item = u64>, n: usize) -> f64 {
    let n = n as f64;
    let mut terms: Vec<f64> = counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .collect();
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum::<f64>().max(0.0)
}

/// Mutual information (natural log) between two labelings of the same items.
pub fn mutual_information<A: Eq + Hash, B: Eq + Hash>(p: &[A], q: &[B]) -> Result<f64> {
    check_pair(p.len(), q.len())?;
    let n = p.len() as f64;
    let cp = counts(p);
    let cq = counts(q);
    let mut joint: HashMap<(&A, &B), u64> = HashMap::new();
    for pair in p.iter().zip(q) {
        *joint.entry(pair).or_insert(0) += 1;
    }
    let mut terms: Vec<f64> = joint
        .into_iter()
        .map(|((a, b), npq)| {
            let npq = npq as f64;
            // n_p * n_q is commutative, so I(P,Q) and I(Q,P) see identical terms
            npq / n * (n * npq / (cp[a] as f64 * cq[b] as f64)).ln()
        })
        .collect();
    terms.sort_by(f64::total_cmp);
    Ok(terms.into_iter().sum::<f64>().max(0.0))
}

fn check_pair(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::MismatchedItems { left, right });
    }
    if left == 0 {
        return Err(Error::Empty("labelings must cover at least one item"));
    }
    Ok(())
}

/// `2 I(P,Q) / (H(P) + H(Q))`, in `[0, 1]`. Two single-cluster labelings
/// are identical and score 1.
pub fn nmi<A: Eq + Hash, B: Eq + Hash>(p: &[A], q: &[B]) -> Result<f64> {
    check_pair(p.len(), q.len())?;
    let denom = entropy(p)? + entropy(q)?;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((2.0 * mutual_information(p, q)? / denom).clamp(0.0, 1.0))
}

/// Drops documents whose cluster holds a single document (concept nodes of
/// bipartite partitions are ignored when sizing clusters), relabels the
/// remaining clusters densely and attaches each document's category.
///
/// The external label of a document is its first category; documents
/// missing from `corpus` are skipped.
pub fn filter_single_node_clusters(partition: &Partition, corpus: &Corpus) -> LabeledPartitionPair {
    let docs: Vec<(u32, u32)> = partition
        .doc_clusters()
        .filter(|&(d, _)| corpus.document(d).is_some())
        .collect();
    let mut size: HashMap<u32, usize> = HashMap::new();
    for &(_, c) in &docs {
        *size.entry(c).or_insert(0) += 1;
    }
    let mut relabel: HashMap<u32, u32> = HashMap::new();
    let mut pair = LabeledPartitionPair {
        items: Vec::new(),
        clusters: Vec::new(),
        categories: Vec::new(),
    };
    for (d, c) in docs {
        if size[&c] < 2 {
            continue;
        }
        let next = relabel.len() as u32;
        let dense = *relabel.entry(c).or_insert(next);
        let doc = corpus.document(d).expect("filtered above");
        pair.items.push(d);
        pair.clusters.push(dense);
        pair.categories.push(doc.categories[0].clone());
    }
    pair
}

/// A labeled real matrix as written to the comparison CSVs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledMatrix {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl LabeledMatrix {
    /// CSV with the corner cell `corner`, column labels on the first row and
    /// row labels in the first column.
    pub fn to_csv_string(&self, corner: &str) -> String {
        let mut out = String::from(corner);
        for c in &self.col_labels {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.values) {
            out.push_str(label);
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.col_labels.len())
            .map(|j| self.values.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.values.iter().map(|r| r.iter().sum()).collect()
    }
}

/// Fraction of each category's documents in each cluster; rows are
/// clusters, columns categories, every non-empty column sums to 1.
pub type CompositionMatrix = LabeledMatrix;

pub fn composition_matrix(pair: &LabeledPartitionPair) -> CompositionMatrix {
    let table = pair.contingency();
    let values = table
        .counts
        .iter()
        .map(|row| {
            row.iter()
                .zip(&table.col_sums)
                .map(|(&n, &nq)| if nq == 0 { 0.0 } else { n as f64 / nq as f64 })
                .collect()
        })
        .collect();
    LabeledMatrix {
        row_labels: (0..table.counts.len()).map(|c| c.to_string()).collect(),
        col_labels: table.category_labels,
        values,
    }
}

/// Category co-occurrence: raw counts and their row-normalized form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CooccurrenceMatrix {
    pub labels: Vec<String>,
    /// Off-diagonal: multi-category documents carrying both labels.
    /// Diagonal: single-category documents with that label.
    pub raw: Vec<Vec<u64>>,
    /// Each row of `raw` divided by its sum.
    pub normalized: Vec<Vec<f64>>,
}

impl CooccurrenceMatrix {
    pub fn raw_matrix(&self) -> LabeledMatrix {
        LabeledMatrix {
            row_labels: self.labels.clone(),
            col_labels: self.labels.clone(),
            values: self.raw.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect(),
        }
    }

    pub fn normalized_matrix(&self) -> LabeledMatrix {
        LabeledMatrix {
            row_labels: self.labels.clone(),
            col_labels: self.labels.clone(),
            values: self.normalized.clone(),
        }
    }

    pub fn raw_count(&self, a: &str, b: &str) -> Option<u64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.raw[i][j])
    }
}

pub fn cooccurrence_matrix(multi: &Corpus, single: &Corpus) -> CooccurrenceMatrix {
    let labels: Vec<String> = multi
        .categories()
        .into_iter()
        .chain(single.categories())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let k = labels.len();
    let mut raw = vec![vec![0u64; k]; k];
    for doc in multi.documents() {
        let ids: Vec<usize> = doc.categories.iter().map(|c| index[c.as_str()]).collect();
        for (x, &a) in ids.iter().enumerate() {
            for &b in &ids[x + 1..] {
                raw[a][b] += 1;
                raw[b][a] += 1;
            }
        }
    }
    for doc in single.documents() {
        if let [only] = doc.categories.as_slice() {
            let a = index[only.as_str()];
            raw[a][a] += 1;
        }
    }
    let normalized = raw
        .iter()
        .map(|row| {
            let sum: u64 = row.iter().sum();
            row.iter()
                .map(|&v| if sum == 0 { 0.0 } else { v as f64 / sum as f64 })
                .collect()
        })
        .collect();
    CooccurrenceMatrix {
        labels,
        raw,
        normalized,
    }
}
