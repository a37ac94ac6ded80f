"""Exact symbolic calculus on the diagonal algebra of a finite graph.

Elements are rational linear combinations of cylinder projections q_mu
(mu a finite path).  The three structural operations are

  multiply:  q_mu q_nu = q_nu if mu is a prefix of nu, q_mu if nu is a
             prefix of mu, and 0 otherwise;
  alpha:     alpha(q_eta) = sum over edges e with src(e) = rng(eta) of
             q_{e eta} (prepend at the range end; empty sums are zero);
  transfer:  L(q_eta) = lambda_{eta_1} q_{shift(eta)} for |eta| >= 1 and
             L(q_v) = sum over e in r^{-1}(v) of lambda_e q_{src(e)}.

The canonical form refines every term at its source end (a projection at a
receiving vertex splits as the sum of its one-edge extensions) until all
supports sit on a common frontier; two elements are equal iff their
canonical forms agree.
"""

from __future__ import annotations

from fractions import Fraction

from .graphs import shift as path_shift
from .linalg import format_rational, parse_rational


class GraphMismatchError(ValueError):
    """Operands built over different graphs."""


class DiagElement:
    """Immutable rational combination of cylinder projections over one graph."""

    __slots__ = ("graph", "terms")

    def __init__(self, graph, terms=None):
        self.graph = graph
        clean = {}
        for p, c in (terms or {}).items():
            if c:
                clean[p] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(graph):
        return DiagElement(graph)

    @staticmethod
    def projection(graph, path):
        if isinstance(path, str):
            path = graph.vertex_path(path)
        elif isinstance(path, (list, tuple)):
            path = graph.path(path)
        return DiagElement(graph, {path: Fraction(1)})

    @staticmethod
    def unit(graph):
        """The identity of the diagonal algebra: sum of all vertex projections."""
        return DiagElement(graph, {graph.vertex_path(v): Fraction(1) for v in graph.vertices})

    # -- ring structure -------------------------------------------------------

    def _check(self, other):
        if self.graph is not other.graph:
            raise GraphMismatchError("operands live over different graphs")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, Fraction(0)) + c
        return DiagElement(self.graph, out)

    def __sub__(self, other):
        self._check(other)
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, Fraction(0)) - c
        return DiagElement(self.graph, out)

    def __neg__(self):
        return DiagElement(self.graph, {p: -c for p, c in self.terms.items()})

    def scale(self, c):
        c = Fraction(c)
        return DiagElement(self.graph, {p: c * v for p, v in self.terms.items()})

    def __rmul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def is_zero(self):
        return not self.normalize().terms

    def support_depth(self):
        return max((len(p) for p in self.terms), default=0)

    # -- canonical form -------------------------------------------------------

    def normalize(self, depth=None):
        """Refine all supports to a common frontier and merge coefficients.

        Terms refine at their source end (q_mu = sum of q_{mu e} over
        e in r^{-1}(src(mu))) until they reach the requested depth or end at
        a source vertex.  depth defaults to the maximum support length.
        """
        g = self.graph
        if depth is None:
            depth = self.support_depth()
        elif depth < self.support_depth():
            raise ValueError("normalize depth is below the current support depth")
        in_edges = g.in_edges
        source_of = g.path_source
        if not any(
            len(p.edges) < depth and in_edges(source_of(p)) for p in self.terms
        ):
            return self  # already on the frontier; immutable, safe to share
        out = {}
        stack = list(self.terms.items())
        while stack:
            p, c = stack.pop()
            if len(p.edges) < depth:
                ext = in_edges(source_of(p))
                if ext:
                    for e in ext:
                        stack.append((g.extend(p, e), c))
                    continue
            if p in out:
                out[p] += c
            else:
                out[p] = c
        return DiagElement(g, out)

    def equals(self, other):
        self._check(other)
        if self.terms == other.terms:
            return True
        return not (self - other).normalize().terms

    def __eq__(self, other):
        if not isinstance(other, DiagElement):
            return NotImplemented
        return self.graph is other.graph and self.equals(other)

    def __hash__(self):  # elements are compared through equals(); no dict use
        return id(self)

    # -- the three structural maps ---------------------------------------------

    def multiply(self, other):
        """Bilinear extension of the cylinder prefix rule, then normalize."""
        self._check(other)
        g = self.graph
        out = {}
        for p, cp in self.terms.items():
            for q, cq in other.terms.items():
                if g.is_prefix(p, q):
                    r = q
                elif g.is_prefix(q, p):
                    r = p
                else:
                    continue
                if r in out:
                    out[r] += cp * cq
                else:
                    out[r] = cp * cq
        return DiagElement(g, out).normalize()

    def __mul__(self, other):
        if isinstance(other, DiagElement):
            return self.multiply(other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def alpha(self):
        """The shift endomorphism: prepend every edge composable at the range."""
        g = self.graph
        out = {}
        for p, c in self.terms.items():
            for e in g.out_edges(g.path_range(p)):
                q = g.prepend(e, p)
                if q in out:
                    out[q] += c
                else:
                    out[q] = c
        return DiagElement(g, out).normalize()

    def transfer(self, weights):
        """The weighted transfer operator; weights must cover all edges."""
        g = self.graph
        if not weights.covers(g):
            raise ValueError("weight system does not cover all edges")
        wmap = weights.weights
        out = {}
        for p, c in self.terms.items():
            if p.edges:
                q = path_shift(g, p)
                w = c * wmap[p.edges[0]]
                if q in out:
                    out[q] += w
                else:
                    out[q] = w
            else:
                for e in g.in_edges(p.vertex):
                    q = g.vertex_path(g.src[e])
                    w = c * wmap[e]
                    if q in out:
                        out[q] += w
                    else:
                        out[q] = w
        return DiagElement(g, out).normalize()

    # -- evaluation and serialization -------------------------------------------

    def evaluate_at(self, boundary_path):
        """Value of the element, read as a function on the boundary, at one
        boundary path: chi of the cylinder of mu is 1 exactly on paths with
        prefix mu.  This is the pointwise oracle used to cross-check the
        symbolic calculus."""
        g = self.graph
        val = Fraction(0)
        for p, c in self.terms.items():
            if g.is_prefix(p, boundary_path):
                val += c
        return val

    def coefficients_on(self, basis):
        """Coordinates in a frontier basis (normalize first to that depth)."""
        depth = max((len(p) for p in basis), default=0)
        normed = self.normalize(max(depth, self.support_depth()))
        index = {p: i for i, p in enumerate(basis)}
        vec = [Fraction(0)] * len(basis)
        for p, c in normed.terms.items():
            if p not in index:
                raise ValueError(f"support path {p.label()!r} outside the given basis")
            vec[index[p]] += c
        return vec

    def to_json(self):
        items = sorted(self.terms.items(), key=lambda t: t[0].sort_key())
        return {
            "terms": [dict(p.to_json(), coeff=format_rational(c)) for p, c in items]
        }

    @staticmethod
    def from_json(graph, doc):
        terms = {}
        for td in doc.get("terms", []):
            edges = tuple(td.get("path", ()))
            p = graph.path(edges) if edges else graph.vertex_path(td["vertex"])
            terms[p] = terms.get(p, Fraction(0)) + parse_rational(td["coeff"])
        return DiagElement(graph, terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for p, c in sorted(self.terms.items(), key=lambda t: t[0].sort_key()):
            bits.append(f"{format_rational(c)}*q[{p.label()}]")
        return " + ".join(bits)
