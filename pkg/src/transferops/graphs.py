"""Directed multigraphs, path combinatorics, boundary-path enumeration and
edge-weight admissibility checks.

Conventions (used by every other module): an edge e runs from src(e) to
rng(e); a path mu = mu_1 ... mu_n composes with src(mu_i) = rng(mu_{i+1}),
so the first edge carries the range of the path and paths grow at the
source end.  A vertex v is a *source* when it receives no edges
(in_edges(v) empty) and a *sink* when it emits none.  A finite path is a
boundary path when its source vertex is a source of the graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import format_rational, parse_rational


class GraphDocumentError(ValueError):
    """Raised for malformed or inconsistent graph documents."""


class Path:
    """A finite path: a tuple of edge ids, or a bare vertex when empty.
    Value semantics with a precomputed hash; treat instances as immutable."""

    __slots__ = ("edges", "vertex", "_hash")

    def __init__(self, edges, vertex=None):
        edges = tuple(edges)
        if edges and vertex is not None:
            raise ValueError("vertex is only stored for the empty path")
        if not edges and vertex is None:
            raise ValueError("empty path needs a vertex")
        self.edges = edges
        self.vertex = vertex
        self._hash = hash((edges, vertex))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (
            isinstance(other, Path)
            and self.edges == other.edges
            and self.vertex == other.vertex
        )

    def __repr__(self):
        return f"Path({self.label()!r})"

    def __len__(self):
        return len(self.edges)

    def label(self):
        return self.vertex if not self.edges else "".join(self.edges)

    def sort_key(self):
        return (len(self.edges), self.edges, self.vertex or "")

    def to_json(self):
        if self.edges:
            return {"path": list(self.edges)}
        return {"path": [], "vertex": self.vertex}

    @staticmethod
    def from_json(doc):
        edges = tuple(doc.get("path", ()))
        return Path(edges) if edges else Path((), doc["vertex"])


class Graph:
    """Finite directed multigraph with deterministic (sorted) iteration order."""

    def __init__(self, vertices, edges, src, rng):
        self.vertices = tuple(sorted(vertices))
        self.edges = tuple(sorted(edges))
        self.src = dict(src)
        self.rng = dict(rng)
        self._validate()
        self._out = {v: [] for v in self.vertices}
        self._in = {v: [] for v in self.vertices}
        for e in self.edges:
            self._out[self.src[e]].append(e)
            self._in[self.rng[e]].append(e)
        self._out = {v: tuple(es) for v, es in self._out.items()}
        self._in = {v: tuple(es) for v, es in self._in.items()}
        self._extend_cache = {}

    def _validate(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphDocumentError("duplicate vertex ids")
        if len(set(self.edges)) != len(self.edges):
            raise GraphDocumentError("duplicate edge ids")
        vs = set(self.vertices)
        for e in self.edges:
            if e not in self.src or e not in self.rng:
                raise GraphDocumentError(f"edge {e!r} missing an endpoint map")
            if self.src[e] not in vs or self.rng[e] not in vs:
                raise GraphDocumentError(f"dangling endpoint on edge {e!r}")

    def out_edges(self, v):
        """s^{-1}(v): edges emitted at v."""
        return self._out[v]

    def in_edges(self, v):
        """r^{-1}(v): edges received at v."""
        return self._in[v]

    # -- paths ------------------------------------------------------------

    def vertex_path(self, v):
        cached = self._extend_cache.get(v)
        if cached is not None:
            return cached
        if v not in self._out:
            raise GraphDocumentError(f"unknown vertex {v!r}")
        out = Path((), v)
        self._extend_cache[v] = out
        return out

    def path(self, edge_ids):
        p = Path(tuple(edge_ids)) if edge_ids else None
        if p is None:
            raise ValueError("use vertex_path for length-0 paths")
        for e in p.edges:
            if e not in self.src:
                raise GraphDocumentError(f"unknown edge {e!r}")
        for a, b in zip(p.edges, p.edges[1:]):
            if self.src[a] != self.rng[b]:
                raise GraphDocumentError(f"edges {a!r},{b!r} do not compose")
        return p

    def path_range(self, p):
        return self.rng[p.edges[0]] if p.edges else p.vertex

    def path_source(self, p):
        return self.src[p.edges[-1]] if p.edges else p.vertex

    def extend(self, p, e):
        """Append edge e at the source end (the path grows away from its range)."""
        cached = self._extend_cache.get((p, e))
        if cached is not None:
            return cached
        if self.rng[e] != self.path_source(p):
            raise ValueError("edge does not compose with the path's source")
        out = Path(p.edges + (e,))
        self._extend_cache[(p, e)] = out
        return out

    def prepend(self, e, p):
        """Prepend edge e at the range end; requires src(e) = rng(p)."""
        if self.src[e] != self.path_range(p):
            raise ValueError("edge does not compose with the path's range")
        return Path((e,) + p.edges)

    def is_prefix(self, p, q):
        """p is an initial (range-end) segment of q; vertex paths need matching range."""
        if len(p.edges) > len(q.edges):
            return False
        if not p.edges:
            return p.vertex == self.path_range(q)
        return q.edges[: len(p.edges)] == p.edges

    def paths_up_to(self, max_len):
        """All paths of length <= max_len, sorted; vertex paths included."""
        out = [self.vertex_path(v) for v in self.vertices]
        layer = list(out)
        for _ in range(max_len):
            nxt = []
            for p in layer:
                for e in self.in_edges(self.path_source(p)):
                    nxt.append(self.extend(p, e))
            out.extend(nxt)
            layer = nxt
            if not layer:
                break
        return sorted(out, key=Path.sort_key)

    def is_acyclic(self):
        color = {v: 0 for v in self.vertices}

        def visit(v):
            color[v] = 1
            for e in self._out[v]:
                w = self.rng[e]
                if color[w] == 1:
                    return False
                if color[w] == 0 and not visit(w):
                    return False
            color[v] = 2
            return True

        return all(color[v] != 0 or visit(v) for v in self.vertices)

    def to_json(self, weights=None):
        edges = []
        for e in self.edges:
            doc = {"id": e, "src": self.src[e], "rng": self.rng[e]}
            if weights is not None:
                doc["lambda"] = format_rational(weights[e])
            edges.append(doc)
        return {"vertices": list(self.vertices), "edges": edges}


def shift(g, p):
    """Drop the first (range-end) edge; length-1 paths map to their source vertex."""
    if not p.edges:
        raise ValueError("shift undefined on length-0 path")
    rest = p.edges[1:]
    return Path(rest) if rest else g.vertex_path(g.src[p.edges[0]])


@dataclass(frozen=True)
class WeightSystem:
    """Strictly positive rational weight per edge."""

    weights: dict

    def __post_init__(self):
        for e, w in self.weights.items():
            if not isinstance(w, Fraction):
                raise GraphDocumentError(f"weight of {e!r} is not an exact rational")
            if w <= 0:
                raise GraphDocumentError(f"non-positive weight on edge {e!r}")
        import weakref

        object.__setattr__(self, "_covered", weakref.WeakSet())

    def __getitem__(self, e):
        return self.weights[e]

    def covers(self, g):
        if g in self._covered:
            return True
        ok = all(e in self.weights for e in g.edges)
        if ok:
            self._covered.add(g)
        return ok

    @staticmethod
    def uniform(g):
        """lambda_e = 1/|s^{-1}(s(e))|: a uniform distribution on every emitter."""
        return WeightSystem({e: Fraction(1, len(g.out_edges(g.src[e]))) for e in g.edges})

    def vertex_sum(self, g, v):
        return sum((self.weights[e] for e in g.out_edges(v)), Fraction(0))

    def to_json(self):
        return {e: format_rational(w) for e, w in sorted(self.weights.items())}


# -- loading ----------------------------------------------------------------

def load_graph(doc, allow_float=False):
    """Build (Graph, WeightSystem|None) from the JSON document format.

    Rationals must be "p/q" strings or ints; floats are rejected unless
    allow_float is set, in which case they convert via their exact binary
    expansion (the conversion is noted in the weight system itself).
    """
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise GraphDocumentError("document must contain 'vertices' and 'edges'")
    seen = set()
    src, rng, weights = {}, {}, {}
    for ed in doc["edges"]:
        eid = ed.get("id")
        if eid is None or eid in seen:
            raise GraphDocumentError(f"missing or duplicate edge id {eid!r}")
        seen.add(eid)
        src[eid] = ed.get("src")
        rng[eid] = ed.get("rng")
        if "lambda" in ed:
            raw = ed["lambda"]
            if isinstance(raw, float):
                if not allow_float:
                    raise GraphDocumentError(
                        f"floating weight on edge {eid!r}; pass --float to convert exactly"
                    )
                weights[eid] = Fraction(raw)
            else:
                weights[eid] = parse_rational(raw)
    g = Graph(doc["vertices"], seen, src, rng)
    ws = WeightSystem(weights) if weights else None
    if ws is not None and not ws.covers(g):
        raise GraphDocumentError("weights given for some but not all edges")
    return g, ws


def load_graph_file(path, allow_float=False):
    with open(path) as fh:
        return load_graph(json.load(fh), allow_float=allow_float)


# -- classification ---------------------------------------------------------

@dataclass
class VertexClassification:
    sources: tuple
    sinks: tuple
    regular_receivers: tuple
    infinite_receivers: tuple = ()
    infinite_emitters: tuple = ()
    budget: int | None = None
    exhausted: bool = True

    def to_json(self):
        out = {
            "sources": list(self.sources),
            "sinks": list(self.sinks),
            "regular_receivers": list(self.regular_receivers),
        }
        if not self.exhausted:
            out["suspected_infinite_receivers"] = list(self.infinite_receivers)
            out["suspected_infinite_emitters"] = list(self.infinite_emitters)
            out["budget"] = self.budget
            out["exhausted"] = False
        return out


def classify_vertices(g):
    """Exact source/sink/regular-receiver partition of a finite graph."""
    sources = tuple(v for v in g.vertices if not g.in_edges(v))
    sinks = tuple(v for v in g.vertices if not g.out_edges(v))
    regular = tuple(v for v in g.vertices if g.in_edges(v))
    return VertexClassification(sources, sinks, regular)


class LazyGraph:
    """Countable graph given by an edge enumerator; checks are budget-relative.

    enumerate_edges() yields (edge_id, src, rng, weight) in a fixed order.
    Nothing is ever silently truncated: classification and weight checks
    always carry the budget they were run under.
    """

    def __init__(self, name, enumerator):
        self.name = name
        self.enumerate_edges = enumerator


def rose_graph(weight=Fraction(1)):
    """Countably many loops at a single vertex v (an infinite emitter/receiver)."""

    def gen():
        k = 0
        while True:
            yield (f"e{k}", "v", "v", weight)
            k += 1

    return LazyGraph("rose", gen)


def star_receiver_graph(weight=Fraction(1)):
    """Vertex v receives one edge from each of w0, w1, ... (infinite receiver)."""

    def gen():
        k = 0
        while True:
            yield (f"e{k}", f"w{k}", "v", weight)
            k += 1

    return LazyGraph("star", gen)


def finite_as_lazy(g, weights):
    """Wrap a finite graph as a LazyGraph (the enumerator exhausts)."""

    def gen():
        for e in g.edges:
            yield (e, g.src[e], g.rng[e], weights[e] if weights else Fraction(1))

    return LazyGraph("finite", gen)


def classify_vertices_lazy(lg, budget, suspect_threshold=64):
    """Budget-relative classification with 'suspected infinite' flags.

    A vertex is flagged suspected-infinite when its degree within the
    enumerated prefix reaches suspect_threshold and the enumerator did not
    exhaust.  Exhausted enumerations give the exact classification.
    """
    outdeg, indeg = {}, {}
    vertices = set()
    exhausted = True
    gen = lg.enumerate_edges()
    for i, (eid, s, r, _w) in enumerate(gen):
        if i >= budget:
            exhausted = False
            break
        vertices.update((s, r))
        outdeg[s] = outdeg.get(s, 0) + 1
        indeg[r] = indeg.get(r, 0) + 1
    vs = sorted(vertices)
    if exhausted:
        sources = tuple(v for v in vs if indeg.get(v, 0) == 0)
        sinks = tuple(v for v in vs if outdeg.get(v, 0) == 0)
        regular = tuple(v for v in vs if indeg.get(v, 0) > 0)
        return VertexClassification(sources, sinks, regular, budget=budget)
    inf_rec = tuple(v for v in vs if indeg.get(v, 0) >= suspect_threshold)
    inf_emit = tuple(v for v in vs if outdeg.get(v, 0) >= suspect_threshold)
    sources = tuple(v for v in vs if indeg.get(v, 0) == 0)
    sinks = tuple(v for v in vs if outdeg.get(v, 0) == 0)
    regular = tuple(v for v in vs if 0 < indeg.get(v, 0) < suspect_threshold)
    return VertexClassification(
        sources, sinks, regular, inf_rec, inf_emit, budget=budget, exhausted=False
    )


# -- boundary paths ----------------------------------------------------------

@dataclass
class BoundaryAtlas:
    """Boundary paths of a finite graph, plus the cylinder prefix tree.

    For acyclic graphs boundary_paths is the complete boundary: every finite
    path whose source vertex is a source (finite graphs have no infinite
    receivers).  For cyclic graphs the atlas holds the tree to the requested
    depth and is flagged incomplete because infinite paths exist.
    """

    boundary_paths: list
    tree: list
    depth: int
    complete: bool

    def to_json(self):
        return {
            "boundary": [p.to_json() for p in self.boundary_paths],
            "tree": [p.to_json() for p in self.tree],
            "depth": self.depth,
            "complete": self.complete,
        }


def enumerate_boundary(g, depth=None):
    if not isinstance(g, Graph):
        raise TypeError("enumerate_boundary needs a finite Graph")
    acyclic = g.is_acyclic()
    if acyclic:
        # every path terminates within |V| steps
        tree = g.paths_up_to(len(g.vertices))
        sources = set(classify_vertices(g).sources)
        boundary = [p for p in tree if g.path_source(p) in sources]
        d = max((len(p) for p in tree), default=0)
        if depth is not None:
            tree = [p for p in tree if len(p) <= depth]
            d = depth
        return BoundaryAtlas(boundary, tree, d, complete=True)
    if depth is None:
        raise ValueError("cyclic graph: an explicit depth is required")
    tree = g.paths_up_to(depth)
    sources = set(classify_vertices(g).sources)
    boundary = [p for p in tree if g.path_source(p) in sources]
    return BoundaryAtlas(boundary, tree, depth, complete=False)


def frontier_basis(g, depth):
    """Leaves of the depth-d cylinder tree: paths of length d plus shorter
    paths ending at a source.  These projections are an exact linear basis of
    the depth-d diagonal subalgebra."""
    sources = set(classify_vertices(g).sources)
    out = [
        p
        for p in g.paths_up_to(depth)
        if len(p) == depth or g.path_source(p) in sources
    ]
    return sorted(out, key=Path.sort_key)


# -- lambda conditions --------------------------------------------------------

@dataclass
class ConditionReport:
    holds_linf: bool | None
    holds_c0: bool | None
    sup_value: Fraction | None
    verdict: str
    budget: int | None = None
    exhausted: bool = True
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "linf": self.holds_linf,
            "c0": self.holds_c0,
            "sup": None if self.sup_value is None else format_rational(self.sup_value),
            "verdict": self.verdict,
            "budget": self.budget,
            "exhausted": self.exhausted,
            "details": self.details,
        }


def check_lambda_conditions(g, weights, budget=None):
    """Boundedness conditions for the weighted transfer operator.

    Finite graphs: both conditions hold; the exact supremum
    max_v sum_{e in s^{-1}(v)} lambda_e is reported.  Lazy graphs get
    budget-relative verdicts built from monotone partial sums.
    """
    if isinstance(g, Graph):
        if not weights.covers(g):
            raise GraphDocumentError("weights missing for some edges")
        sums = {v: weights.vertex_sum(g, v) for v in g.vertices if g.out_edges(v)}
        sup = max(sums.values(), default=Fraction(0))
        return ConditionReport(
            True,
            True,
            sup,
            "holds",
            details={"vertex_sums": {v: format_rational(s) for v, s in sorted(sums.items())}},
        )
    return _check_lambda_lazy(g, budget or 10_000)


def _check_lambda_lazy(lg, budget, c0_epsilon=Fraction(1, 100), c0_witnesses=100):
    out_sums = {}
    pair_sums = {}  # (receiver v, emitter w) -> partial sum over r^-1(v) & s^-1(w)
    exhausted = True
    for i, (eid, s, r, w) in enumerate(lg.enumerate_edges()):
        if i >= budget:
            exhausted = False
            break
        out_sums[s] = out_sums.get(s, Fraction(0)) + w
        pair_sums[(r, s)] = pair_sums.get((r, s), Fraction(0)) + w
    sup = max(out_sums.values(), default=Fraction(0))
    if exhausted:
        return ConditionReport(True, True, sup, "holds (enumeration exhausted)",
                               budget=budget, exhausted=True)
    # c0 evidence: receivers with many emitters whose partial sums stay large
    witnesses = {}
    for (r, s), val in pair_sums.items():
        if val >= c0_epsilon:
            witnesses[r] = witnesses.get(r, 0) + 1
    bad = sorted(v for v, k in witnesses.items() if k >= c0_witnesses)
    if bad:
        return ConditionReport(
            None,
            False,
            sup,
            "fails c0 on truncation evidence",
            budget=budget,
            exhausted=False,
            details={"receivers": bad, "linf_lower_bound": format_rational(sup)},
        )
    return ConditionReport(
        None,
        None,
        sup,
        "inconclusive",
        budget=budget,
        exhausted=False,
        details={"linf_lower_bound": format_rational(sup)},
    )
