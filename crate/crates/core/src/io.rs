//! Versioned binary containers for corpora and graphs.
//!
//! Layout: 8-byte magic, little-endian `u32` format version, bincode payload.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, GraphKind, WeightedGraph};
use crate::modularity::GraphRef;

pub const FORMAT_VERSION: u32 = 1;
const CORPUS_MAGIC: &[u8; 8] = b"CGCORPUS";
const GRAPH_MAGIC: &[u8; 8] = b"CGGRAPH\0";

/// A graph of either representation, as stored in `graph.bin`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AnyGraph {
    Bipartite(BipartiteGraph),
    Weighted(WeightedGraph),
}

impl AnyGraph {
    pub fn as_ref(&self) -> GraphRef<'_> {
        match self {
            AnyGraph::Bipartite(g) => GraphRef::Bipartite(g),
            AnyGraph::Weighted(g) => GraphRef::Weighted(g),
        }
    }

    pub fn kind(&self) -> GraphKind {
        self.as_ref().kind()
    }

    pub fn export_edges_csv(&self, path: &Path) -> Result<()> {
        match self {
            AnyGraph::Bipartite(g) => g.export_edges_csv(path),
            AnyGraph::Weighted(g) => g.export_edges_csv(path),
        }
    }
}

fn write_container<T: Serialize>(path: &Path, magic: &[u8; 8], value: &T) -> Result<()> {
    let ctx = || format!("writing {}", path.display());
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
    out.write_all(magic)
        .and_then(|_| out.write_all(&FORMAT_VERSION.to_le_bytes()))
        .map_err(|e| Error::io(ctx(), e))?;
    bincode::serialize_into(&mut out, value).map_err(|e| Error::Encode(e.to_string()))?;
    out.flush().map_err(|e| Error::io(ctx(), e))
}

fn read_container<T: DeserializeOwned>(path: &Path, magic: &[u8; 8], what: &'static str) -> Result<T> {
    let ctx = || format!("reading {}", path.display());
    let mut input = BufReader::new(File::open(path).map_err(|e| Error::io(ctx(), e))?);
    let mut header = [0u8; 12];
    if input.read_exact(&mut header).is_err() || &header[..8] != magic {
        return Err(Error::BadMagic {
            path: path.to_path_buf(),
            expected: what,
        });
    }
    let version = u32::from_le_bytes(header[8..12].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(Error::BadVersion {
            path: path.to_path_buf(),
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    bincode::deserialize_from(input).map_err(|e| Error::Encode(format!("{}: {e}", path.display())))
}

pub fn write_corpus(path: &Path, corpus: &Corpus) -> Result<()> {
    write_container(path, CORPUS_MAGIC, corpus)
}

pub fn read_corpus(path: &Path) -> Result<Corpus> {
    read_container(path, CORPUS_MAGIC, "corpus")
}

pub fn write_graph(path: &Path, graph: &AnyGraph) -> Result<()> {
    write_container(path, GRAPH_MAGIC, graph)
}

pub fn read_graph(path: &Path) -> Result<AnyGraph> {
    read_container(path, GRAPH_MAGIC, "graph")
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))
}
