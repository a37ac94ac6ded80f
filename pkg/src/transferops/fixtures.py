"""The shipped corpus: four canonical graphs, a handful of positive-map
matrices, and twenty seeded regression graphs (frozen seeds, deterministic
reconstruction).  Fixture JSON files live in the package's fixtures/
directory and are addressed by name everywhere (tests, CLI, service).
"""

from __future__ import annotations

import json
import random
from fractions import Fraction
from importlib import resources

from .cpmaps import PositiveMapMatrix
from .graphs import Graph, WeightSystem, load_graph

GRAPH_DOCS = {
    "g_line": {
        "vertices": ["w", "v"],
        "edges": [{"id": "e", "src": "w", "rng": "v", "lambda": "1"}],
    },
    "g_loop": {
        "vertices": ["v"],
        "edges": [{"id": "e", "src": "v", "rng": "v", "lambda": "1"}],
    },
    "g_2loop": {
        "vertices": ["v"],
        "edges": [
            {"id": "e", "src": "v", "rng": "v", "lambda": "1/2"},
            {"id": "f", "src": "v", "rng": "v", "lambda": "1/2"},
        ],
    },
    "g_fork": {
        "vertices": ["w1", "w2", "v"],
        "edges": [
            {"id": "e", "src": "w1", "rng": "v", "lambda": "1/3"},
            {"id": "f", "src": "w2", "rng": "v", "lambda": "2/3"},
        ],
    },
    "g_point": {"vertices": ["v"], "edges": []},
}

MATRIX_DOCS = {
    # the running example: phi(a) = ((a0+a1)/2, a1)
    "m_half": [["1/2", "1/2"], ["0", "1"]],
    # 2-point shift: L(a) = (a1, 0)
    "m_shift": [["0", "1"], ["0", "0"]],
    # identity on 3 points
    "m_id3": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
    # image = functions on {0,1} (an ideal), two unit-preserving sections
    "m_two_sections": [["0", "0", "1"], ["0", "1", "0"], ["0", "0", "0"]],
    # image contains (1,1,0): not an indicator-supported span, not an ideal
    "m_nonideal": [["0", "0", "1"], ["0", "0", "1"], ["0", "0", "0"]],
    # column 1 is zero: a nontrivial GNS-kernel
    "m_killer": [["1", "0"], ["1", "0"]],
}

REGRESSION_SEEDS = tuple(range(101, 121))  # 20 frozen seeds


def graph_fixture(name):
    doc = GRAPH_DOCS.get(name)
    if doc is None:
        raise KeyError(f"unknown graph fixture {name!r}")
    return load_graph(doc)


def matrix_fixture(name):
    doc = MATRIX_DOCS.get(name)
    if doc is None:
        raise KeyError(f"unknown matrix fixture {name!r}")
    return PositiveMapMatrix.from_json(doc)


def random_graph(rng, max_vertices=8, max_edges=16, acyclic=False, max_paths_depth4=400):
    """Seeded random multigraph; resamples until the depth-4 path count stays
    under the cap so exhaustive basis checks remain desk-scale."""
    while True:
        nv = rng.randint(1, max_vertices)
        vertices = [f"v{i}" for i in range(nv)]
        ne = rng.randint(1, max_edges)
        edges, src, rng_map = [], {}, {}
        for k in range(ne):
            a = rng.randrange(nv)
            b = rng.randrange(nv)
            if acyclic:
                if nv == 1:
                    continue
                a, b = sorted((a, b))
                if a == b:
                    continue
                # edges run from the larger index to the smaller: k -> j, j < k
                src_v, rng_v = f"v{b}", f"v{a}"
            else:
                src_v, rng_v = f"v{a}", f"v{b}"
            eid = f"e{k}"
            edges.append(eid)
            src[eid] = src_v
            rng_map[eid] = rng_v
        if not edges:
            continue
        g = Graph(vertices, edges, src, rng_map)
        if acyclic and not g.is_acyclic():
            continue
        if _path_count(g, 4) <= max_paths_depth4:
            return g


def _path_count(g, depth):
    count = len(g.vertices)
    layer = [g.vertex_path(v) for v in g.vertices]
    for _ in range(depth):
        nxt = []
        for p in layer:
            for e in g.in_edges(g.path_source(p)):
                nxt.append(g.extend(p, e))
        count += len(nxt)
        if count > 10_000:
            return count
        layer = nxt
    return count


def random_weights(rng, g, normalized=False):
    """Seeded strictly positive rational weights; normalized weights sum to
    one on every emitter."""
    if normalized:
        weights = {}
        for v in g.vertices:
            out = g.out_edges(v)
            if not out:
                continue
            cuts = sorted(rng.randint(1, 9) for _ in out)
            total = sum(cuts)
            for e, c in zip(out, cuts):
                weights[e] = Fraction(c, total)
        return WeightSystem(weights)
    return WeightSystem(
        {e: Fraction(rng.randint(1, 9), rng.randint(1, 9)) for e in g.edges}
    )


def random_matrix(rng, max_n=8, density=None):
    n = rng.randint(1, max_n)
    density = density if density is not None else rng.uniform(0.2, 0.9)
    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            if rng.random() < density:
                row.append(Fraction(rng.randint(1, 9), rng.randint(1, 9)))
            else:
                row.append(Fraction(0))
        rows.append(row)
    return PositiveMapMatrix(rows)


def regression_graphs():
    """The frozen regression corpus: (name, graph, weights) triples.  Even
    seeds give acyclic graphs, odd seeds may contain cycles; half of each
    kind get normalized weights."""
    out = []
    for i, seed in enumerate(REGRESSION_SEEDS):
        rng = random.Random(seed)
        g = random_graph(rng, acyclic=(i % 2 == 0))
        w = random_weights(rng, g, normalized=(i % 4 < 2))
        out.append((f"r{seed}", g, w))
    return out


def corpus_listing():
    items = [{"name": n, "kind": "graph"} for n in sorted(GRAPH_DOCS)]
    items += [{"name": n, "kind": "matrix"} for n in sorted(MATRIX_DOCS)]
    items += [
        {"name": name, "kind": "regression-graph", "seed": seed}
        for (name, _g, _w), seed in zip(regression_graphs(), REGRESSION_SEEDS)
    ]
    return items


def fixture_document(name):
    """The JSON document for a named fixture (graph, matrix, or regression)."""
    if name in GRAPH_DOCS:
        return GRAPH_DOCS[name]
    if name in MATRIX_DOCS:
        return MATRIX_DOCS[name]
    for fname, g, w in regression_graphs():
        if fname == name:
            return g.to_json(w)
    raise KeyError(f"unknown fixture {name!r}")


def install_fixture_files(directory):
    """Write every fixture document to <directory>/<name>.json."""
    import os

    os.makedirs(directory, exist_ok=True)
    written = []
    names = list(GRAPH_DOCS) + list(MATRIX_DOCS) + [n for n, _g, _w in regression_graphs()]
    for name in names:
        path = os.path.join(directory, f"{name}.json")
        with open(path, "w") as fh:
            json.dump(fixture_document(name), fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return written


def packaged_fixture_path(name):
    """Path of a fixture JSON shipped inside the installed package."""
    return resources.files("transferops") / "fixtures" / f"{name}.json"
