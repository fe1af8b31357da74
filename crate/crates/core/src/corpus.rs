//! Concept-annotated document corpora.
//!
//! A [`Corpus`] pairs a concept vocabulary (with generic flags) with a list of
//! documents, each carrying its category labels and the set of concepts found
//! in it. Document frequencies are always recounted from the documents, so a
//! constructed corpus is internally consistent.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptEntry {
    pub concept_id: u32,
    pub name: String,
    pub is_generic: bool,
    /// Number of documents containing the concept.
    pub doc_count: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: u32,
    pub external_id: String,
    pub categories: Vec<String>,
    /// Sorted, without duplicates.
    pub concept_ids: Vec<u32>,
}

impl DocumentRecord {
    pub fn is_single_category(&self) -> bool {
        self.categories.len() == 1
    }
}

/// Logarithm used for inverse document frequencies.
///
/// Cosine similarities are invariant under the choice, the other bases exist
/// so that invariance can be checked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }
}

/// Sparse idf-weighted vector over a document's non-generic concepts.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConceptVector {
    /// `(concept_id, weight)` sorted by concept id.
    pub entries: Vec<(u32, f64)>,
}

impl ConceptVector {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, concept_id: u32) -> Option<f64> {
        self.entries
            .binary_search_by_key(&concept_id, |&(c, _)| c)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum()
    }

    pub fn dot(&self, other: &ConceptVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i], other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a.1 * b.1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n: usize,
    pub v: usize,
    pub v_gen: usize,
    /// Mean number of distinct non-generic concepts per document.
    pub mean_k: f64,
    pub max_k: usize,
}

impl CorpusStats {
    /// Aligned two-line table in the layout of a dataset summary.
    pub fn to_text(&self, name: &str) -> String {
        let header = ["", "N", "V", "V_gen", "<k>", "k_max"];
        let row = [
            name.to_string(),
            self.n.to_string(),
            self.v.to_string(),
            self.v_gen.to_string(),
            format!("{:.2}", self.mean_k),
            self.max_k.to_string(),
        ];
        let widths: Vec<usize> = header.iter().zip(&row).map(|(h, r)| h.len().max(r.len())).collect();
        let mut out = String::new();
        for line in [header.map(str::to_string).to_vec(), row.to_vec()] {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (cell, &w))| {
                    if i == 0 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    documents: Vec<DocumentRecord>,
    vocabulary: Vec<ConceptEntry>,
}

impl Corpus {
    /// Validates the parts and recomputes every `doc_count`.
    ///
    /// Concept ids must be exactly `0..V` (in any order), document ids and
    /// external ids unique, categories non-empty and duplicate-free. Concept
    /// lists are collapsed to sorted sets.
    pub fn new(mut vocabulary: Vec<ConceptEntry>, mut documents: Vec<DocumentRecord>) -> Result<Self> {
        vocabulary.sort_by_key(|c| c.concept_id);
        for (expected, entry) in vocabulary.iter().enumerate() {
            if entry.concept_id as usize != expected {
                if expected > 0 && vocabulary[expected - 1].concept_id == entry.concept_id {
                    return Err(Error::DuplicateId {
                        what: "concept",
                        id: entry.concept_id.to_string(),
                    });
                }
                return Err(Error::InvalidParameter(format!(
                    "concept ids must be dense in [0, {}): missing id {expected}",
                    vocabulary.len()
                )));
            }
        }

        documents.sort_by_key(|d| d.doc_id);
        let mut external = HashSet::with_capacity(documents.len());
        for doc in documents.iter_mut() {
            if !external.insert(doc.external_id.clone()) {
                return Err(Error::DuplicateId {
                    what: "document",
                    id: doc.external_id.clone(),
                });
            }
            validate_categories(&doc.categories)
                .map_err(|msg| Error::InvalidParameter(format!("document `{}`: {msg}", doc.external_id)))?;
            doc.concept_ids.sort_unstable();
            doc.concept_ids.dedup();
            if let Some(&c) = doc.concept_ids.last() {
                if c as usize >= vocabulary.len() {
                    return Err(Error::DanglingConcept {
                        doc: doc.external_id.clone(),
                        concept: c as u64,
                    });
                }
            }
        }
        if let Some(w) = documents.windows(2).find(|w| w[0].doc_id == w[1].doc_id) {
            return Err(Error::DuplicateId {
                what: "document",
                id: w[0].doc_id.to_string(),
            });
        }

        let mut corpus = Corpus { documents, vocabulary };
        corpus.recount();
        Ok(corpus)
    }

    fn recount(&mut self) {
        for entry in &mut self.vocabulary {
            entry.doc_count = 0;
        }
        for doc in &self.documents {
            for &c in &doc.concept_ids {
                self.vocabulary[c as usize].doc_count += 1;
            }
        }
    }

    pub fn documents(&self) -> &[DocumentRecord] {
        &self.documents
    }

    pub fn vocabulary(&self) -> &[ConceptEntry] {
        &self.vocabulary
    }

    /// Number of documents.
    pub fn n(&self) -> usize {
        self.documents.len()
    }

    pub fn concept(&self, concept_id: u32) -> Option<&ConceptEntry> {
        self.vocabulary.get(concept_id as usize)
    }

    pub fn document(&self, doc_id: u32) -> Option<&DocumentRecord> {
        self.documents
            .binary_search_by_key(&doc_id, |d| d.doc_id)
            .ok()
            .map(|i| &self.documents[i])
    }

    pub fn is_generic(&self, concept_id: u32) -> bool {
        self.vocabulary[concept_id as usize].is_generic
    }

    /// Non-generic concepts of a document, in id order.
    pub fn specific_concepts<'a>(&'a self, doc: &'a DocumentRecord) -> impl Iterator<Item = u32> + 'a {
        doc.concept_ids.iter().copied().filter(move |&c| !self.is_generic(c))
    }

    /// Single-category documents and the rest, each with recounted
    /// document frequencies.
    pub fn split_by_category_count(&self) -> (Corpus, Corpus) {
        let (single, multi): (Vec<_>, Vec<_>) = self
            .documents
            .iter()
            .cloned()
            .partition(DocumentRecord::is_single_category);
        let mut a = Corpus {
            documents: single,
            vocabulary: self.vocabulary.clone(),
        };
        let mut b = Corpus {
            documents: multi,
            vocabulary: self.vocabulary.clone(),
        };
        a.recount();
        b.recount();
        (a, b)
    }

    /// Natural-log inverse document frequency `ln(N / N(c))`.
    pub fn compute_idf(&self, concept_id: u32) -> Result<f64> {
        self.compute_idf_with_base(concept_id, LogBase::Natural)
    }

    pub fn compute_idf_with_base(&self, concept_id: u32, base: LogBase) -> Result<f64> {
        let entry = self
            .concept(concept_id)
            .ok_or_else(|| Error::UnknownNode(format!("c{concept_id}")))?;
        if entry.doc_count == 0 {
            return Err(Error::UndefinedIdf(concept_id));
        }
        // N(c) <= N, clamp the -0.0 / rounding case at N(c) == N
        Ok(base.log(self.n() as f64 / entry.doc_count as f64).max(0.0))
    }

    /// idf for every concept id; `None` for concepts occurring nowhere.
    pub fn idf_table(&self, base: LogBase) -> Vec<Option<f64>> {
        (0..self.vocabulary.len() as u32)
            .map(|c| self.compute_idf_with_base(c, base).ok())
            .collect()
    }

    pub fn concept_vector(&self, doc_id: u32) -> Result<ConceptVector> {
        self.concept_vector_with_base(doc_id, LogBase::Natural)
    }

    pub fn concept_vector_with_base(&self, doc_id: u32, base: LogBase) -> Result<ConceptVector> {
        let doc = self
            .document(doc_id)
            .ok_or_else(|| Error::UnknownNode(format!("d{doc_id}")))?;
        let entries = self
            .specific_concepts(doc)
            .map(|c| Ok((c, self.compute_idf_with_base(c, base)?)))
            .collect::<Result<_>>()?;
        Ok(ConceptVector { entries })
    }

    pub fn stats(&self) -> CorpusStats {
        let ks: Vec<usize> = self
            .documents
            .iter()
            .map(|d| self.specific_concepts(d).count())
            .collect();
        let mean_k = if ks.is_empty() {
            0.0
        } else {
            ks.iter().sum::<usize>() as f64 / ks.len() as f64
        };
        CorpusStats {
            n: self.n(),
            v: self.vocabulary.len(),
            v_gen: self.vocabulary.iter().filter(|c| c.is_generic).count(),
            mean_k,
            max_k: ks.into_iter().max().unwrap_or(0),
        }
    }

    /// Sorted list of all category labels used by any document.
    pub fn categories(&self) -> Vec<String> {
        let mut cats: Vec<String> = self
            .documents
            .iter()
            .flat_map(|d| d.categories.iter().cloned())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        cats.sort();
        cats
    }

    pub fn write_vocabulary_tsv(&self, path: &Path) -> Result<()> {
        let ctx = || format!("writing {}", path.display());
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
        let mut body = String::from("concept_id\tname\tgeneric\n");
        for c in &self.vocabulary {
            body.push_str(&format!("{}\t{}\t{}\n", c.concept_id, c.name, u8::from(c.is_generic)));
        }
        out.write_all(body.as_bytes()).map_err(|e| Error::io(ctx(), e))?;
        out.flush().map_err(|e| Error::io(ctx(), e))
    }

    pub fn write_documents_jsonl(&self, path: &Path) -> Result<()> {
        let ctx = || format!("writing {}", path.display());
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
        for d in &self.documents {
            let line = serde_json::to_string(&RawDocument {
                id: d.external_id.clone(),
                categories: d.categories.clone(),
                concepts: d.concept_ids.iter().map(|&c| c as u64).collect(),
            })?;
            writeln!(out, "{line}").map_err(|e| Error::io(ctx(), e))?;
        }
        out.flush().map_err(|e| Error::io(ctx(), e))
    }
}

fn validate_categories(categories: &[String]) -> std::result::Result<(), String> {
    if categories.is_empty() {
        return Err("no categories".into());
    }
    let mut seen = HashSet::new();
    for c in categories {
        if !seen.insert(c) {
            return Err(format!("duplicate category `{c}`"));
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct RawDocument {
    id: String,
    categories: Vec<String>,
    concepts: Vec<u64>,
}

/// Reads a vocabulary TSV and a documents JSONL file.
///
/// Document ids are assigned in file order starting at 0. Any `doc_count`
/// column in the vocabulary is ignored.
pub fn load_corpus(vocabulary_path: &Path, documents_path: &Path) -> Result<Corpus> {
    let vocabulary = read_vocabulary(vocabulary_path)?;
    let v = vocabulary.len() as u64;
    let documents = read_documents(documents_path, v)?;
    Corpus::new(vocabulary, documents)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(format!("opening {}", path.display()), e))
}

fn read_vocabulary(path: &Path) -> Result<Vec<ConceptEntry>> {
    let mut entries = Vec::new();
    let mut ids = HashMap::new();
    for (idx, line) in open(path)?.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let line = line.trim_end_matches('\r');
        if idx == 0 {
            let cols: Vec<&str> = line.trim_start_matches('\u{feff}').split('\t').collect();
            if cols.len() < 3 || cols[..3] != ["concept_id", "name", "generic"] {
                return Err(Error::parse(
                    path,
                    lineno,
                    "expected header `concept_id<TAB>name<TAB>generic`",
                ));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 3 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 3 columns, found {}", cols.len()),
            ));
        }
        let concept_id: u32 = cols[0]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("invalid concept id `{}`", cols[0])))?;
        let is_generic = match cols[2].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("generic flag must be 0 or 1, got `{other}`"),
                ))
            }
        };
        if let Some(prev) = ids.insert(concept_id, lineno) {
            return Err(Error::parse(
                path,
                lineno,
                format!("duplicate concept id {concept_id} (first seen on line {prev})"),
            ));
        }
        entries.push(ConceptEntry {
            concept_id,
            name: cols[1].to_string(),
            is_generic,
            doc_count: 0,
        });
    }
    Ok(entries)
}

fn read_documents(path: &Path, vocabulary_size: u64) -> Result<Vec<DocumentRecord>> {
    let mut documents = Vec::new();
    let mut external = HashMap::new();
    for (idx, line) in open(path)?.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawDocument = serde_json::from_str(&line).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        validate_categories(&raw.categories).map_err(|msg| Error::parse(path, lineno, msg))?;
        if let Some(&c) = raw.concepts.iter().find(|&&c| c >= vocabulary_size) {
            return Err(Error::DanglingConcept {
                doc: raw.id,
                concept: c,
            });
        }
        if let Some(prev) = external.insert(raw.id.clone(), lineno) {
            return Err(Error::parse(
                path,
                lineno,
                format!("duplicate document id `{}` (first seen on line {prev})", raw.id),
            ));
        }
        let mut concept_ids: Vec<u32> = raw.concepts.iter().map(|&c| c as u32).collect();
        concept_ids.sort_unstable();
        concept_ids.dedup();
        documents.push(DocumentRecord {
            doc_id: documents.len() as u32,
            external_id: raw.id,
            categories: raw.categories,
            concept_ids,
        });
    }
    Ok(documents)
}
