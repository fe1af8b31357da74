//! Python bindings: corpora, graphs, clustering and partition comparison.

use std::path::PathBuf;

use conceptgraph as cg;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: cg::Error) -> PyErr {
    match e {
        cg::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Corpus", module = "conceptgraph_py", frozen)]
struct PyCorpus {
    inner: cg::Corpus,
}

#[pymethods]
impl PyCorpus {
    #[staticmethod]
    fn load(vocab: PathBuf, docs: PathBuf) -> PyResult<Self> {
        cg::load_corpus(&vocab, &docs)
            .map(|inner| PyCorpus { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        cg::io::read_corpus(&path)
            .map(|inner| PyCorpus { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n_docs, n_concepts, n_blocks, p_in, p_out, seed=0))]
    fn synthetic(
        n_docs: usize,
        n_concepts: usize,
        n_blocks: usize,
        p_in: f64,
        p_out: f64,
        seed: u64,
    ) -> PyResult<Self> {
        cg::generate_synthetic(&cg::PlantedConfig {
            n_docs,
            n_concepts,
            n_blocks,
            p_in,
            p_out,
            seed,
        })
        .map(|inner| PyCorpus { inner })
        .map_err(to_py)
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        cg::io::write_corpus(&path, &self.inner).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!(
            "Corpus(n={}, concepts={})",
            self.inner.n(),
            self.inner.vocabulary().len()
        )
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.inner.stats();
        let d = PyDict::new(py);
        d.set_item("n", s.n)?;
        d.set_item("v", s.v)?;
        d.set_item("v_gen", s.v_gen)?;
        d.set_item("mean_k", s.mean_k)?;
        d.set_item("max_k", s.max_k)?;
        Ok(d)
    }

    /// `(single_category, multi_category)`.
    fn split(&self) -> (PyCorpus, PyCorpus) {
        let (a, b) = self.inner.split_by_category_count();
        (PyCorpus { inner: a }, PyCorpus { inner: b })
    }

    fn categories(&self) -> Vec<String> {
        self.inner.categories()
    }

    fn external_ids(&self) -> Vec<String> {
        self.inner.documents().iter().map(|d| d.external_id.clone()).collect()
    }

    fn idf(&self, concept_id: u32) -> PyResult<f64> {
        self.inner.compute_idf(concept_id).map_err(to_py)
    }

    /// Sparse idf vector as `(concept_id, weight)` pairs.
    fn concept_vector(&self, doc_id: u32) -> PyResult<Vec<(u32, f64)>> {
        self.inner.concept_vector(doc_id).map(|v| v.entries).map_err(to_py)
    }
}

#[pyclass(name = "Graph", module = "conceptgraph_py", frozen)]
struct PyGraph {
    inner: cg::AnyGraph,
}

#[pymethods]
impl PyGraph {
    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        cg::io::read_graph(&path).map(|inner| PyGraph { inner }).map_err(to_py)
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        cg::io::write_graph(&path, &self.inner).map_err(to_py)
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.inner.as_ref().node_count()
    }

    /// `(src, dst, weight)` triples with node labels as in partition files.
    fn edges(&self) -> Vec<(String, String, f64)> {
        match &self.inner {
            cg::AnyGraph::Bipartite(g) => g
                .edges
                .iter()
                .map(|&(d, c)| {
                    (
                        format!("d{}", g.doc_ids[d as usize]),
                        format!("c{}", g.concept_ids[c as usize]),
                        1.0,
                    )
                })
                .collect(),
            cg::AnyGraph::Weighted(g) => g
                .edges()
                .map(|(i, j, w)| (g.doc_ids[i as usize].to_string(), g.doc_ids[j as usize].to_string(), w))
                .collect(),
        }
    }

    fn __repr__(&self) -> String {
        format!("Graph(kind={}, nodes={})", self.kind(), self.n_nodes())
    }
}

#[pyclass(name = "Partition", module = "conceptgraph_py", frozen)]
struct PyPartition {
    inner: cg::Partition,
}

#[pymethods]
impl PyPartition {
    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        cg::Partition::from_csv_str(text)
            .map(|inner| PyPartition { inner })
            .map_err(to_py)
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv_string()
    }

    #[getter]
    fn assignment(&self) -> Vec<u32> {
        self.inner.assignment.clone()
    }

    #[getter]
    fn nodes(&self) -> Vec<String> {
        self.inner.nodes.iter().map(|n| n.render(self.inner.kind)).collect()
    }

    #[getter]
    fn score(&self) -> f64 {
        self.inner.score
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind.to_string()
    }

    fn n_clusters(&self) -> usize {
        self.inner.n_clusters()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Partition(kind={}, nodes={}, clusters={}, score={})",
            self.inner.kind,
            self.inner.len(),
            self.inner.n_clusters(),
            self.inner.score
        )
    }
}

/// Unweighted document–concept graph; generic concepts are left out.
#[pyfunction]
fn build_bipartite(corpus: &PyCorpus) -> PyGraph {
    PyGraph {
        inner: cg::AnyGraph::Bipartite(cg::build_bipartite(&corpus.inner)),
    }
}

/// Document graph weighted by idf-cosine similarity.
#[pyfunction]
fn build_projection(py: Python<'_>, corpus: &PyCorpus) -> PyGraph {
    let g = py.detach(|| cg::build_projection(&corpus.inner));
    PyGraph {
        inner: cg::AnyGraph::Weighted(g),
    }
}

#[pyfunction]
#[pyo3(signature = (graph, seed=0))]
fn louvain(py: Python<'_>, graph: &PyGraph, seed: u64) -> PyPartition {
    let inner = py.detach(|| cg::louvain(graph.inner.as_ref(), seed));
    PyPartition { inner }
}

#[pyfunction]
#[pyo3(signature = (graph, n_runs, base_seed=0))]
fn best_of_runs(py: Python<'_>, graph: &PyGraph, n_runs: usize, base_seed: u64) -> PyResult<PyPartition> {
    py.detach(|| cg::best_of_runs(graph.inner.as_ref(), n_runs, base_seed))
        .map(|inner| PyPartition { inner })
        .map_err(to_py)
}

/// Newman modularity for projections, Barber modularity for bipartite graphs.
#[pyfunction]
fn modularity(graph: &PyGraph, assignment: Vec<u32>) -> PyResult<f64> {
    graph.inner.as_ref().modularity(&assignment).map_err(to_py)
}

fn label_keys(labels: &[Bound<'_, PyAny>]) -> PyResult<Vec<String>> {
    labels.iter().map(|l| Ok(l.repr()?.to_string())).collect()
}

#[pyfunction]
fn entropy(labels: Vec<Bound<'_, PyAny>>) -> PyResult<f64> {
    cg::entropy(&label_keys(&labels)?).map_err(to_py)
}

/// Normalized mutual information of two labelings of the same items.
#[pyfunction]
fn nmi(p: Vec<Bound<'_, PyAny>>, q: Vec<Bound<'_, PyAny>>) -> PyResult<f64> {
    cg::nmi(&label_keys(&p)?, &label_keys(&q)?).map_err(to_py)
}

/// Compares a partition with the first category of each single-category
/// document: NMI, composition matrix and category co-occurrence.
#[pyfunction]
fn compare<'py>(py: Python<'py>, partition: &PyPartition, corpus: &PyCorpus) -> PyResult<Bound<'py, PyDict>> {
    let (single, multi) = corpus.inner.split_by_category_count();
    let pair = cg::filter_single_node_clusters(&partition.inner, &single);
    let composition = cg::composition_matrix(&pair);
    let cooc = cg::cooccurrence_matrix(&multi, &single);
    let d = PyDict::new(py);
    d.set_item("nmi", pair.nmi().ok())?;
    d.set_item("n_items", pair.len())?;
    d.set_item("clusters", pair.clusters.clone())?;
    d.set_item("categories", pair.categories.clone())?;
    d.set_item("category_labels", composition.col_labels.clone())?;
    d.set_item("composition", composition.values.clone())?;
    d.set_item("cooccurrence_labels", cooc.labels.clone())?;
    d.set_item("cooccurrence", cooc.normalized.clone())?;
    d.set_item("cooccurrence_raw", cooc.raw.clone())?;
    Ok(d)
}

/// Full cluster report as a JSON string.
#[pyfunction]
#[pyo3(signature = (corpus, partition, top_k=10))]
fn report(corpus: &PyCorpus, partition: &PyPartition, top_k: usize) -> PyResult<String> {
    let (single, _) = corpus.inner.split_by_category_count();
    let pair = cg::filter_single_node_clusters(&partition.inner, &single);
    cg::export_report(&corpus.inner, &partition.inner, &pair, top_k)
        .to_json()
        .map_err(to_py)
}

#[pymodule]
fn conceptgraph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCorpus>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyPartition>()?;
    m.add_function(wrap_pyfunction!(build_bipartite, m)?)?;
    m.add_function(wrap_pyfunction!(build_projection, m)?)?;
    m.add_function(wrap_pyfunction!(louvain, m)?)?;
    m.add_function(wrap_pyfunction!(best_of_runs, m)?)?;
    m.add_function(wrap_pyfunction!(modularity, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(nmi, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
