use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use conceptgraph::io::{read_corpus, read_graph, write_corpus, write_graph, AnyGraph};
use conceptgraph::pipeline::{parse_config_file, write_comparison, DEFAULT_RUNS_BP, DEFAULT_RUNS_IDF};
use conceptgraph::report::{ranking_table, DEFAULT_TOP_K};
use conceptgraph::{
    best_of_runs, build_bipartite, build_projection, cooccurrence_matrix, export_report, filter_single_node_clusters,
    generate_synthetic, load_corpus, representative_concepts, run_pipeline, Corpus, Error, GraphKind, Mode, Partition,
    PipelineConfig, PlantedConfig, RankingScore,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Concept networks, modularity clustering and partition audits for
/// concept-annotated document corpora.
#[derive(Parser, Debug)]
#[command(name = "conceptgraph", version, about)]
struct Cli {
    /// Worker thread cap (results do not depend on it).
    #[arg(long, global = true, env = "CONCEPTGRAPH_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a vocabulary TSV and documents JSONL into corpus.bin.
    Ingest {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        docs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print dataset statistics of the single-category documents.
    Stats {
        corpus: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Count every document, not only single-category ones.
        #[arg(long)]
        all_docs: bool,
    },
    /// Build the bipartite (bp) or projected (idf) graph.
    Build {
        #[arg(long, value_enum)]
        mode: KindArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the edge list as CSV.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Include multi-category documents in the graph.
        #[arg(long)]
        all_docs: bool,
    },
    /// Best-of-n modularity maximization.
    Cluster {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to 100 for idf graphs and 1000 for bp graphs.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// NMI, composition and co-occurrence matrices for a partition.
    Compare {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// Directory (trailing `/`) or file-name prefix for the outputs.
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Representative concepts per cluster.
    Report {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        top_k: usize,
        /// Restrict each cluster's group to articles of this category.
        #[arg(long)]
        category: Option<String>,
        #[arg(long, value_enum, default_value_t = ScoreArg::Frequency)]
        score: ScoreArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a planted-partition corpus as vocabulary.tsv + documents.jsonl.
    Synth {
        #[arg(long)]
        n_docs: usize,
        #[arg(long)]
        n_concepts: usize,
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        p_in: f64,
        #[arg(long)]
        p_out: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run ingest, build, cluster, compare and report in one go.
    Pipeline {
        /// `key = value` file; flags given on the command line win.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long)]
        docs: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Runs for both kinds.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        runs_idf: Option<usize>,
        #[arg(long)]
        runs_bp: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Bp,
    Idf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Bp,
    Idf,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScoreArg {
    Frequency,
    Lift,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::TooLarge { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    match std::panic::catch_unwind(|| run(cli.command)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Usage(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Ok(Err(Failure::Data(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DATA)
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Ingest { vocab, docs, out } => {
            let corpus = load_corpus(&vocab, &docs)?;
            write_corpus(&out, &corpus)?;
            let (single, multi) = corpus.split_by_category_count();
            println!(
                "{} documents ({} single-category, {} multi-category), {} concepts -> {}",
                corpus.n(),
                single.n(),
                multi.n(),
                corpus.vocabulary().len(),
                out.display()
            );
        }
        Command::Stats {
            corpus,
            format,
            all_docs,
        } => {
            let corpus = graph_corpus(read_corpus(&corpus)?, all_docs);
            let stats = corpus.stats();
            match format {
                Format::Text => print!("{}", stats.to_text("corpus")),
                Format::Json => println!("{}", json(&stats)?),
            }
        }
        Command::Build {
            mode,
            input,
            out,
            export,
            all_docs,
        } => {
            let corpus = graph_corpus(read_corpus(&input)?, all_docs);
            let graph = match mode {
                KindArg::Bp => AnyGraph::Bipartite(build_bipartite(&corpus)),
                KindArg::Idf => AnyGraph::Weighted(build_projection(&corpus)),
            };
            write_graph(&out, &graph)?;
            if let Some(path) = export {
                graph.export_edges_csv(&path)?;
            }
            match &graph {
                AnyGraph::Bipartite(g) => println!(
                    "kind=bp docs={} concepts={} edges={}",
                    g.n_docs(),
                    g.n_concepts(),
                    g.m()
                ),
                AnyGraph::Weighted(g) => println!(
                    "kind=idf docs={} edges={} total_weight={}",
                    g.n_nodes(),
                    g.edge_count(),
                    g.total_weight
                ),
            }
        }
        Command::Cluster { input, runs, seed, out } => {
            let graph = read_graph(&input)?;
            let runs = runs.unwrap_or(match graph.kind() {
                GraphKind::Bp => DEFAULT_RUNS_BP,
                GraphKind::Idf => DEFAULT_RUNS_IDF,
            });
            let partition = best_of_runs(graph.as_ref(), runs, seed)?;
            write(&out, &partition.to_csv_string())?;
            println!(
                "kind={} runs={} best_seed={} Q={}",
                partition.kind, runs, partition.seed, partition.score
            );
        }
        Command::Compare {
            partition,
            corpus,
            out_prefix,
        } => {
            let partition = read_partition(&partition)?;
            let (single, multi) = read_corpus(&corpus)?.split_by_category_count();
            let pair = filter_single_node_clusters(&partition, &single);
            let cooccurrence = cooccurrence_matrix(&multi, &single);
            let files = write_comparison(&out_prefix, &pair, &cooccurrence)?;
            match pair.nmi() {
                Ok(v) => println!(
                    "nmi={v} items={} clusters={} categories={}",
                    pair.len(),
                    pair.n_clusters(),
                    pair.category_labels().len()
                ),
                Err(_) => println!("nmi=n/a items=0"),
            }
            for f in files {
                log::info!("wrote {}", f.display());
            }
        }
        Command::Report {
            corpus,
            partition,
            top_k,
            category,
            score,
            format,
            out,
        } => {
            if top_k == 0 {
                return Err(Failure::Usage("--top-k must be at least 1".into()));
            }
            let corpus = read_corpus(&corpus)?;
            let partition = read_partition(&partition)?;
            let score = match score {
                ScoreArg::Frequency => RankingScore::Frequency,
                ScoreArg::Lift => RankingScore::Lift,
            };
            let text = if let Some(cat) = category {
                let mut rankings = Vec::new();
                for cluster in 0..partition.n_clusters() as u32 {
                    let r = representative_concepts(&corpus, &partition, cluster, top_k, Some(&cat), score)?;
                    if !r.empty {
                        rankings.push(r);
                    }
                }
                match format {
                    Format::Json => json(&rankings)? + "\n",
                    Format::Text => rankings.iter().map(ranking_table).collect::<Vec<_>>().join("\n"),
                }
            } else {
                let (single, _) = corpus.split_by_category_count();
                let pair = filter_single_node_clusters(&partition, &single);
                let report = export_report(&corpus, &partition, &pair, top_k);
                match format {
                    Format::Json => report.to_json()? + "\n",
                    Format::Text => report.to_text(),
                }
            };
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Synth {
            n_docs,
            n_concepts,
            blocks,
            p_in,
            p_out,
            seed,
            out_dir,
        } => {
            let corpus = generate_synthetic(&PlantedConfig {
                n_docs,
                n_concepts,
                n_blocks: blocks,
                p_in,
                p_out,
                seed,
            })?;
            std::fs::create_dir_all(&out_dir).map_err(|e| Failure::Data(format!("{}: {e}", out_dir.display())))?;
            corpus.write_vocabulary_tsv(&out_dir.join("vocabulary.tsv"))?;
            corpus.write_documents_jsonl(&out_dir.join("documents.jsonl"))?;
            println!("wrote {} documents to {}", corpus.n(), out_dir.display());
        }
        Command::Pipeline {
            config,
            vocab,
            docs,
            mode,
            runs,
            runs_idf,
            runs_bp,
            seed,
            top_k,
            out_dir,
        } => {
            let mut cfg = PipelineConfig::new("", "", "");
            if let Some(path) = config {
                cfg.apply(&parse_config_file(&path)?)?;
            }
            if let Some(v) = vocab {
                cfg.vocab = v;
            }
            if let Some(v) = docs {
                cfg.docs = v;
            }
            if let Some(m) = mode {
                cfg.mode = match m {
                    ModeArg::Bp => Mode::Bp,
                    ModeArg::Idf => Mode::Idf,
                    ModeArg::Both => Mode::Both,
                };
            }
            if let Some(r) = runs {
                cfg.runs_idf = r;
                cfg.runs_bp = r;
            }
            cfg.runs_idf = runs_idf.unwrap_or(cfg.runs_idf);
            cfg.runs_bp = runs_bp.unwrap_or(cfg.runs_bp);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.top_k = top_k.unwrap_or(cfg.top_k);
            if let Some(d) = out_dir {
                cfg.out_dir = d;
            }
            for (name, path) in [("vocab", &cfg.vocab), ("docs", &cfg.docs), ("out-dir", &cfg.out_dir)] {
                if path.as_os_str().is_empty() {
                    return Err(Failure::Usage(format!("missing --{name} (flag or config file)")));
                }
            }
            let manifest = run_pipeline(&cfg).map_err(|e| match Failure::from(e.source) {
                Failure::Usage(msg) => Failure::Usage(format!("stage `{}`: {msg}", e.stage)),
                Failure::Data(msg) => Failure::Data(format!("stage `{}`: {msg}", e.stage)),
            })?;
            for p in &manifest.partitions {
                println!(
                    "kind={} runs={} best_seed={} Q={} nmi={}",
                    p.kind,
                    p.runs,
                    p.best_seed,
                    p.score,
                    p.nmi.map_or("n/a".into(), |v| v.to_string())
                );
            }
            println!("manifest: {}", cfg.out_dir.join("manifest.json").display());
        }
    }
    Ok(())
}

/// Graphs are built on single-category documents unless asked otherwise.
fn graph_corpus(corpus: Corpus, all_docs: bool) -> Corpus {
    if all_docs {
        corpus
    } else {
        corpus.split_by_category_count().0
    }
}

fn read_partition(path: &Path) -> CliResult<Partition> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    Partition::from_csv_str(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    std::fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Data(e.to_string()))
}
