//! End-to-end runs: ingest, build, cluster, compare, report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::compare::{
    composition_matrix, cooccurrence_matrix, filter_single_node_clusters, CooccurrenceMatrix, LabeledPartitionPair,
};
use crate::corpus::load_corpus;
use crate::error::{Error, Result};
use crate::graph::{build_bipartite, build_projection, GraphKind};
use crate::io::{read_text, write_corpus, write_graph, write_text, AnyGraph};
use crate::modularity::best_of_runs;
use crate::report::{export_report, DEFAULT_TOP_K};

pub const DEFAULT_RUNS_IDF: usize = 100;
pub const DEFAULT_RUNS_BP: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bp,
    Idf,
    Both,
}

impl Mode {
    pub fn kinds(self) -> Vec<GraphKind> {
        match self {
            Mode::Bp => vec![GraphKind::Bp],
            Mode::Idf => vec![GraphKind::Idf],
            Mode::Both => vec![GraphKind::Bp, GraphKind::Idf],
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bp" => Ok(Mode::Bp),
            "idf" => Ok(Mode::Idf),
            "both" => Ok(Mode::Both),
            other => Err(Error::InvalidParameter(format!(
                "mode must be bp, idf or both, got `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub vocab: PathBuf,
    pub docs: PathBuf,
    pub mode: Mode,
    pub runs_idf: usize,
    pub runs_bp: usize,
    pub seed: u64,
    pub top_k: usize,
    pub out_dir: PathBuf,
}

impl PipelineConfig {
    pub fn new(vocab: impl Into<PathBuf>, docs: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            vocab: vocab.into(),
            docs: docs.into(),
            mode: Mode::Both,
            runs_idf: DEFAULT_RUNS_IDF,
            runs_bp: DEFAULT_RUNS_BP,
            seed: 0,
            top_k: DEFAULT_TOP_K,
            out_dir: out_dir.into(),
        }
    }

    pub fn runs(&self, kind: GraphKind) -> usize {
        match kind {
            GraphKind::Bp => self.runs_bp,
            GraphKind::Idf => self.runs_idf,
        }
    }

    /// Applies `key = value` settings. Recognized keys: `vocab`, `docs`,
    /// `mode`, `runs` (both kinds), `runs_idf`, `runs_bp`, `seed`, `top_k`,
    /// `out_dir`. Unknown keys are an error.
    pub fn apply(&mut self, settings: &BTreeMap<String, String>) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::InvalidParameter(format!("config `{key}`: invalid value `{v}`")))
        }
        for (key, value) in settings {
            let v = value.as_str();
            match key.as_str() {
                "vocab" => self.vocab = v.into(),
                "docs" => self.docs = v.into(),
                "mode" => self.mode = v.parse()?,
                "runs" => {
                    self.runs_idf = num(key, v)?;
                    self.runs_bp = self.runs_idf;
                }
                "runs_idf" => self.runs_idf = num(key, v)?,
                "runs_bp" => self.runs_bp = num(key, v)?,
                "seed" => self.seed = num(key, v)?,
                "top_k" => self.top_k = num(key, v)?,
                "out_dir" => self.out_dir = v.into(),
                other => return Err(Error::InvalidParameter(format!("unknown config key `{other}`"))),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs_idf == 0 || self.runs_bp == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        if self.top_k == 0 {
            return Err(Error::InvalidParameter("top_k must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parses a flat `key = value` file; `#` starts a comment line.
pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = read_text(path)?;
    let mut settings = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(path, i + 1, "expected `key = value`"))?;
        let key = key.trim().replace('-', "_");
        settings.insert(key, value.trim().to_string());
    }
    Ok(settings)
}

/// `prefix` names a directory when it ends with a separator or exists as
/// one; otherwise files are written as `<prefix>_<name>`.
pub fn prefixed(prefix: &Path, name: &str) -> PathBuf {
    let text = prefix.to_string_lossy();
    if text.ends_with('/') || text.ends_with(std::path::MAIN_SEPARATOR) || prefix.is_dir() {
        prefix.join(name)
    } else {
        PathBuf::from(format!("{text}_{name}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NmiSummary {
    pub nmi: Option<f64>,
    pub n_items: usize,
    pub n_clusters: usize,
    pub n_categories: usize,
}

impl NmiSummary {
    pub fn of(pair: &LabeledPartitionPair) -> Self {
        NmiSummary {
            nmi: pair.nmi().ok(),
            n_items: pair.len(),
            n_clusters: pair.n_clusters(),
            n_categories: pair.category_labels().len(),
        }
    }
}

/// Writes `nmi.json`, `composition.csv`, `cooccurrence.csv` and
/// `cooccurrence_raw.csv` under `prefix`.
pub fn write_comparison(
    prefix: &Path,
    pair: &LabeledPartitionPair,
    cooccurrence: &CooccurrenceMatrix,
) -> Result<Vec<PathBuf>> {
    if let Some(parent) = prefixed(prefix, "x").parent() {
        create_dir(parent)?;
    }
    let files = [
        ("nmi.json", serde_json::to_string_pretty(&NmiSummary::of(pair))? + "\n"),
        ("composition.csv", composition_matrix(pair).to_csv_string("cluster")),
        (
            "cooccurrence.csv",
            cooccurrence.normalized_matrix().to_csv_string("category"),
        ),
        (
            "cooccurrence_raw.csv",
            cooccurrence.raw_matrix().to_csv_string("category"),
        ),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = prefixed(prefix, name);
        write_text(&path, &body)?;
        written.push(path);
    }
    Ok(written)
}

fn create_dir(path: &Path) -> Result<()> {
    if path.as_os_str().is_empty() {
        return Ok(());
    }
    std::fs::create_dir_all(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))
}

/// Failure of one named stage.
#[derive(Debug, thiserror::Error)]
#[error("stage `{stage}` failed: {source}")]
pub struct PipelineError {
    pub stage: &'static str,
    #[source]
    pub source: Error,
}

trait Stage<T> {
    fn stage(self, name: &'static str) -> std::result::Result<T, PipelineError>;
}

impl<T> Stage<T> for Result<T> {
    fn stage(self, name: &'static str) -> std::result::Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage: name, source })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub kind: GraphKind,
    pub runs: usize,
    pub base_seed: u64,
    pub best_seed: u64,
    pub score: f64,
    pub n_clusters: usize,
    pub nmi: Option<f64>,
    pub file: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: PipelineConfig,
    pub partitions: Vec<PartitionRecord>,
    pub files: Vec<FileRecord>,
    /// Wall-clock seconds per stage; the only run-dependent field.
    pub timings: BTreeMap<String, f64>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Runs every stage and writes all artifacts plus `manifest.json` into
/// `config.out_dir`.
///
/// Graphs are built on the single-category documents; the multi-category
/// remainder only feeds the co-occurrence matrix.
pub fn run_pipeline(config: &PipelineConfig) -> std::result::Result<Manifest, PipelineError> {
    config.validate().stage("config")?;
    let out = &config.out_dir;
    create_dir(out).stage("config")?;
    let mut timings = BTreeMap::new();
    let mut written: Vec<PathBuf> = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        *timings.entry(name.to_string()).or_insert(0.0) += clock.elapsed().as_secs_f64();
        clock = Instant::now();
    };

    let corpus = load_corpus(&config.vocab, &config.docs).stage("ingest")?;
    let corpus_path = out.join("corpus.bin");
    write_corpus(&corpus_path, &corpus).stage("ingest")?;
    written.push(corpus_path);
    let (single, multi) = corpus.split_by_category_count();
    let stats_path = out.join("stats.json");
    let stats_json = serde_json::to_string_pretty(&single.stats())
        .map_err(Error::from)
        .stage("ingest")?;
    write_text(&stats_path, &(stats_json + "\n")).stage("ingest")?;
    written.push(stats_path);
    let cooccurrence = cooccurrence_matrix(&multi, &single);
    lap("ingest", &mut timings);

    let mut partitions = Vec::new();
    for kind in config.mode.kinds() {
        let graph = match kind {
            GraphKind::Bp => AnyGraph::Bipartite(build_bipartite(&single)),
            GraphKind::Idf => AnyGraph::Weighted(build_projection(&single)),
        };
        let graph_path = out.join(format!("graph_{kind}.bin"));
        write_graph(&graph_path, &graph).stage("build")?;
        written.push(graph_path);
        lap("build", &mut timings);

        let runs = config.runs(kind);
        let partition = best_of_runs(graph.as_ref(), runs, config.seed).stage("cluster")?;
        let partition_name = format!("partition_{kind}.csv");
        let partition_path = out.join(&partition_name);
        write_text(&partition_path, &partition.to_csv_string()).stage("cluster")?;
        written.push(partition_path);
        lap("cluster", &mut timings);

        let pair = filter_single_node_clusters(&partition, &single);
        let prefix = out.join(format!("{kind}/"));
        written.extend(write_comparison(&prefix, &pair, &cooccurrence).stage("compare")?);
        lap("compare", &mut timings);

        let report = export_report(&corpus, &partition, &pair, config.top_k);
        let report_path = prefix.join("report.json");
        write_text(&report_path, &(report.to_json().stage("report")? + "\n")).stage("report")?;
        written.push(report_path);
        lap("report", &mut timings);

        partitions.push(PartitionRecord {
            kind,
            runs,
            base_seed: config.seed,
            best_seed: partition.seed,
            score: partition.score,
            n_clusters: partition.n_clusters(),
            nmi: report.nmi,
            file: partition_name,
        });
    }

    let mut files = Vec::new();
    for path in &written {
        let rel = path
            .strip_prefix(out)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/");
        let bytes = std::fs::metadata(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))
            .stage("manifest")?
            .len();
        files.push(FileRecord {
            path: rel,
            bytes,
            sha256: sha256_file(path).stage("manifest")?,
        });
    }
    files.sort_by(|a, b| a.path.cmp(&b.path));

    let manifest = Manifest {
        tool: "conceptgraph".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        partitions,
        files,
        timings,
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(Error::from)
        .stage("manifest")?;
    write_text(&out.join("manifest.json"), &(json + "\n")).stage("manifest")?;
    Ok(manifest)
}
