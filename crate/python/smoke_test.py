"""Smoke test for the conceptgraph_py extension module.

Build first, e.g. `maturin develop -m crates/python/Cargo.toml`, or
`cargo build -p conceptgraph-py --release --features extension-module`
and copy target/release/libconceptgraph_py.so next to this file as
conceptgraph_py.so.
"""

import json
import math
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import conceptgraph_py as cg


def main():
    corpus = cg.Corpus.synthetic(200, 400, 4, 0.3, 0.01, seed=1)
    assert len(corpus) == 200
    stats = corpus.stats()
    assert stats["n"] == 200 and stats["v"] == 400

    single, multi = corpus.split()
    assert len(single) == 200 and len(multi) == 0
    assert corpus.idf(0) >= 0.0
    vec = corpus.concept_vector(0)
    assert vec and all(w >= 0 for _, w in vec)

    for build, kind in ((cg.build_bipartite, "bp"), (cg.build_projection, "idf")):
        graph = build(corpus)
        assert graph.kind == kind
        part = cg.best_of_runs(graph, 20, base_seed=0)
        assert math.isclose(part.score, cg.modularity(graph, part.assignment), abs_tol=1e-9)
        again = cg.best_of_runs(graph, 20, base_seed=0)
        assert again.assignment == part.assignment

        result = cg.compare(part, corpus)
        assert result["nmi"] >= 0.95, result["nmi"]
        for col in zip(*result["composition"]):
            assert abs(sum(col) - 1.0) < 1e-9

        back = cg.Partition.from_csv(part.to_csv())
        assert back.assignment == part.assignment and back.nodes == part.nodes

        report = json.loads(cg.report(corpus, part, top_k=5))
        assert report["clusters"]
        print(f"{kind}: Q={part.score:.4f} clusters={part.n_clusters()} nmi={result['nmi']:.4f}")

    assert cg.nmi([0, 0, 1, 1], ["a", "a", "b", "b"]) == 1.0
    assert math.isclose(cg.nmi([0, 0, 1, 1], [0, 0, 0, 1]), 0.3437110184854508)
    assert math.isclose(cg.entropy([0, 1]), math.log(2))

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "corpus.bin")
        corpus.write(path)
        assert len(cg.Corpus.read(path)) == 200
        try:
            cg.Corpus.read(os.path.join(tmp, "missing.bin"))
        except OSError:
            pass
        else:
            raise AssertionError("expected OSError")

    try:
        cg.best_of_runs(cg.build_projection(corpus), 0)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
    print("smoke test passed")


if __name__ == "__main__":
    main()
