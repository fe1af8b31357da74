use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphKind;

/// Identity of a graph node in terms of the corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeLabel {
    Doc(u32),
    Concept(u32),
}

impl NodeLabel {
    /// `d<id>` / `c<id>` in bipartite graphs, the bare document id otherwise.
    pub fn render(self, kind: GraphKind) -> String {
        match (self, kind) {
            (NodeLabel::Doc(id), GraphKind::Idf) => id.to_string(),
            (NodeLabel::Doc(id), GraphKind::Bp) => format!("d{id}"),
            (NodeLabel::Concept(id), _) => format!("c{id}"),
        }
    }

    pub fn doc_id(self) -> Option<u32> {
        match self {
            NodeLabel::Doc(id) => Some(id),
            NodeLabel::Concept(_) => None,
        }
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(GraphKind::Bp))
    }
}

impl FromStr for NodeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownNode(s.to_string());
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('c') {
            rest.parse().map(NodeLabel::Concept).map_err(|_| bad())
        } else {
            s.strip_prefix('d')
                .unwrap_or(s)
                .parse()
                .map(NodeLabel::Doc)
                .map_err(|_| bad())
        }
    }
}

/// Total assignment of graph nodes to clusters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    /// Cluster per node, canonical: dense ids numbered by first occurrence.
    pub assignment: Vec<u32>,
    pub nodes: Vec<NodeLabel>,
    /// Modularity reached; NaN when unknown (e.g. read back from CSV).
    pub score: f64,
    pub kind: GraphKind,
    pub seed: u64,
}

impl Partition {
    pub fn new(mut assignment: Vec<u32>, nodes: Vec<NodeLabel>, score: f64, kind: GraphKind, seed: u64) -> Self {
        assert_eq!(assignment.len(), nodes.len(), "one cluster per node");
        canonicalize(&mut assignment);
        Partition {
            assignment,
            nodes,
            score,
            kind,
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn n_clusters(&self) -> usize {
        self.assignment.iter().max().map_or(0, |&c| c as usize + 1)
    }

    /// Node counts per cluster.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters()];
        for &c in &self.assignment {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// `(doc_id, cluster)` for every document node, in node order.
    pub fn doc_clusters(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.nodes
            .iter()
            .zip(&self.assignment)
            .filter_map(|(node, &c)| node.doc_id().map(|d| (d, c)))
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("node,cluster\n");
        for (node, c) in self.nodes.iter().zip(&self.assignment) {
            out.push_str(&node.render(self.kind));
            out.push(',');
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the `node,cluster` CSV. The graph kind is inferred from the
    /// node prefixes; the score is unknown (NaN).
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "node" || &headers[1] != "cluster" {
            return Err(Error::InvalidParameter(
                "partition CSV must have header `node,cluster`".into(),
            ));
        }
        let mut nodes = Vec::new();
        let mut assignment = Vec::new();
        let mut prefixed = false;
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let raw = record.get(0).unwrap_or("").trim();
            prefixed |= raw.starts_with('c') || raw.starts_with('d');
            nodes.push(raw.parse::<NodeLabel>()?);
            let cluster = record
                .get(1)
                .unwrap_or("")
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidParameter(format!("partition CSV row {}: bad cluster id", i + 2)))?;
            assignment.push(cluster);
        }
        let kind = if prefixed { GraphKind::Bp } else { GraphKind::Idf };
        Ok(Partition::new(assignment, nodes, f64::NAN, kind, 0))
    }
}

/// Relabels clusters densely by first occurrence.
pub fn canonicalize(assignment: &mut [u32]) {
    let mut map: HashMap<u32, u32> = HashMap::new();
    for c in assignment.iter_mut() {
        let next = map.len() as u32;
        *c = *map.entry(*c).or_insert(next);
    }
}
