"""Positive maps on functions over a finite set, encoded as nonnegative
rational matrices, and the structure attached to them: operator norm,
GNS-kernel, multiplicative domain, faithfulness, support relation/quiver,
conditional expectations, and endomorphism/transfer-operator pairs.

Convention (fixed once, to keep the transpose honest): phi(a)(x) =
sum_y M[x][y] a(y), so row x of M is the measure mu_x.  The correspondence
module later reads the same matrix with transposed indices in its Gram
computation; that is deliberate and documented there.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import linalg
from .linalg import format_rational, parse_rational


class MatrixDocumentError(ValueError):
    """Malformed matrix or subalgebra documents."""


class InternalConsistencyError(AssertionError):
    """An identity the theory guarantees failed; the build, not the input, is wrong."""


class PositiveMapMatrix:
    """Nonnegative square rational matrix acting by phi(a)(x) = sum_y M[x][y]a(y)."""

    def __init__(self, rows):
        self.rows = [[Fraction(x) for x in row] for row in rows]
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise MatrixDocumentError("matrix must be square")
        if any(x < 0 for r in self.rows for x in r):
            raise MatrixDocumentError("matrix must be entrywise nonnegative")
        self.n = n

    def __getitem__(self, xy):
        return self.rows[xy[0]][xy[1]]

    def apply(self, vec):
        return [sum((self.rows[x][y] * vec[y] for y in range(self.n)), Fraction(0))
                for x in range(self.n)]

    def row_sum(self, x):
        return sum(self.rows[x], Fraction(0))

    def column(self, y):
        return [self.rows[x][y] for x in range(self.n)]

    def to_json(self):
        return [[format_rational(x) for x in row] for row in self.rows]

    @staticmethod
    def from_json(doc):
        if not isinstance(doc, list) or not doc:
            raise MatrixDocumentError("expected a JSON array of rows")
        rows = []
        for row in doc:
            rows.append([_entry(x) for x in row])
        return PositiveMapMatrix(rows)

    @staticmethod
    def from_csv(text):
        rows = []
        for row in csv.reader(io.StringIO(text)):
            if row:
                rows.append([_entry(x.strip()) for x in row])
        return PositiveMapMatrix(rows)


def _entry(x):
    if isinstance(x, float):
        raise MatrixDocumentError("floating entries are rejected; use 'p/q' strings")
    return parse_rational(x)


def load_matrix_file(path):
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("[") or stripped.startswith("{"):
        doc = json.loads(text)
        if isinstance(doc, dict):
            doc = doc["matrix"]
        return PositiveMapMatrix.from_json(doc)
    return PositiveMapMatrix.from_csv(text)


# -- subalgebras of functions on a finite set ---------------------------------

@dataclass(frozen=True)
class Subalgebra:
    """Span of the indicators of disjoint blocks (a partition of a subset).

    Points outside every block carry the zero functional constraint; the
    algebra is unital iff the blocks cover the whole set.
    """

    n: int
    blocks: tuple

    def __post_init__(self):
        seen = set()
        for b in self.blocks:
            if not b:
                raise MatrixDocumentError("empty block")
            if seen & set(b):
                raise MatrixDocumentError("blocks must be disjoint")
            seen |= set(b)
        if any(p < 0 or p >= self.n for p in seen):
            raise MatrixDocumentError("block entry out of range")

    @staticmethod
    def from_json(doc, n):
        blocks = tuple(tuple(sorted(b)) for b in doc.get("blocks", []))
        return Subalgebra(n, tuple(sorted(blocks)))

    @staticmethod
    def full(n):
        return Subalgebra(n, tuple((i,) for i in range(n)))

    def support(self):
        return tuple(sorted(p for b in self.blocks for p in b))

    def dimension(self):
        return len(self.blocks)

    def is_unital(self):
        return len(self.support()) == self.n

    def indicator_basis(self):
        out = []
        for b in self.blocks:
            v = [Fraction(0)] * self.n
            for p in b:
                v[p] = Fraction(1)
            out.append(v)
        return out

    def contains(self, vec):
        return linalg.row_space_contains(self.indicator_basis(), list(vec))

    def to_json(self):
        return {"blocks": [list(b) for b in self.blocks]}


def subalgebra_from_span(vectors, n):
    """Recover the block structure of a product-closed solution space.

    Fails with InternalConsistencyError when the span is not spanned by
    block indicators, i.e. not closed under the pointwise product.
    """
    vecs = [v for v in vectors if any(v)]
    if not vecs:
        return Subalgebra(n, ())
    rows, _ = linalg.rref(vecs)
    rows = [r for r in rows if any(r)]
    cols = {p: tuple(r[p] for r in rows) for p in range(n)}
    blocks = {}
    for p, colv in cols.items():
        if any(colv):
            blocks.setdefault(colv, []).append(p)
    alg = Subalgebra(n, tuple(sorted(tuple(sorted(b)) for b in blocks.values())))
    if not linalg.same_span(alg.indicator_basis(), rows):
        raise InternalConsistencyError("solution space is not closed under product")
    return alg


# -- the basic invariants of a positive map -----------------------------------

def op_norm(m):
    """Norm of a positive map on functions: the largest row sum (attained at 1)."""
    return max((m.row_sum(x) for x in range(m.n)), default=Fraction(0))


@dataclass
class GnsKernelReport:
    zero_columns: tuple
    maximality_checked: bool

    def to_json(self):
        return {"support": list(self.zero_columns), "maximal": self.maximality_checked}


def gns_kernel(m):
    """Largest ideal inside ker(phi): functions supported on the zero columns.

    The closed form (column test) is cross-checked by brute force: every
    indicator inside the support must be killed, and adding any point with a
    nonzero column must break the ideal-in-kernel property.
    """
    zero_cols = tuple(y for y in range(m.n) if not any(m.column(y)))
    for y in zero_cols:
        e = [Fraction(0)] * m.n
        e[y] = Fraction(1)
        if any(m.apply(e)):
            raise InternalConsistencyError("zero column not killed")
    for y in range(m.n):
        if y in zero_cols:
            continue
        e = [Fraction(0)] * m.n
        e[y] = Fraction(1)
        if not any(m.apply(e)):
            raise InternalConsistencyError("nonzero column killed an indicator")
    return GnsKernelReport(zero_cols, True)


@dataclass
class MultiplicativeDomainReport:
    algebra: Subalgebra
    dimension: int
    contractive_crosscheck: bool | None  # None when the map is not contractive

    def to_json(self):
        return {
            "algebra": self.algebra.to_json(),
            "dimension": self.dimension,
            "contractive_crosscheck": self.contractive_crosscheck,
        }


def multiplicative_domain(m):
    """Largest subalgebra on which phi multiplies against everything.

    Primitive definition (bilateral): a is in MD iff for every x, y with
    M[x][y] > 0 one has a(y) = sum_z M[x][z] a(z).  When the map is
    contractive the single-variable characterization phi(a)^2 = phi(a^2) is
    computed independently and equality of the two solution spaces asserted.
    """
    n = m.n
    rows = []
    for x in range(n):
        for y in range(n):
            if m[x, y]:
                row = [Fraction(0)] * n
                row[y] += 1
                for z in range(n):
                    row[z] -= m[x, z]
                rows.append(row)
    basis = linalg.nullspace(rows) if rows else [e for e in linalg.identity(n)]
    alg = subalgebra_from_span(basis, n)
    cross = None
    if op_norm(m) <= 1:
        cross_basis = _md_contractive_solution(m)
        cross = linalg.same_span(alg.indicator_basis(), cross_basis)
        if not cross:
            raise InternalConsistencyError(
                "contractive multiplicative-domain characterization disagrees"
            )
    return MultiplicativeDomainReport(alg, alg.dimension(), cross)


def _md_contractive_solution(m):
    """Solutions of phi(a^2) = phi(a)^2 for a contractive map, computed from
    the equality case of Cauchy-Schwarz: per row x, a is constant on the
    support of mu_x, and that constant is 0 unless the row mass is 1."""
    n = m.n
    rows = []
    for x in range(n):
        supp = [y for y in range(n) if m[x, y]]
        if not supp:
            continue
        for y in supp[1:]:
            row = [Fraction(0)] * n
            row[supp[0]] += 1
            row[y] -= 1
            rows.append(row)
        if m.row_sum(x) != 1:
            row = [Fraction(0)] * n
            row[supp[0]] += 1
            rows.append(row)
    return linalg.nullspace(rows) if rows else [e for e in linalg.identity(n)]


@dataclass
class FaithfulnessReport:
    faithful_on_ideal: bool
    faithful_on_hereditary: bool
    almost_faithful: bool
    verdict: bool
    witness: int | None = None

    def to_json(self):
        return {
            "faithful_on_ideal": self.faithful_on_ideal,
            "faithful_on_hereditary": self.faithful_on_hereditary,
            "almost_faithful": self.almost_faithful,
            "verdict": self.verdict,
            "witness_point": self.witness,
        }


def faithfulness_report(m, support_c):
    """Three equivalent faithfulness notions for phi against the subalgebra of
    functions supported on support_c; all evaluated by indicator witnesses
    and asserted to agree (they must, over a commutative base)."""
    support_c = tuple(sorted(support_c))
    zero_cols = set(gns_kernel(m).zero_columns)

    def killed(y):
        return y in zero_cols

    # (i) faithful on the generated ideal = functions supported on support_c
    witness = next((y for y in support_c if killed(y)), None)
    faithful_ideal = witness is None
    # (ii) faithful on the hereditary subalgebra CAC: same support set
    faithful_her = faithful_ideal
    # (iii) almost faithful on the ideal: support disjoint from the GNS kernel
    almost = not (set(support_c) & zero_cols)
    if not (faithful_ideal == faithful_her == almost):
        raise InternalConsistencyError("faithfulness notions disagree on a commutative base")
    return FaithfulnessReport(faithful_ideal, faithful_her, almost, faithful_ideal, witness)


# -- support relation and quiver ----------------------------------------------

@dataclass
class SupportRelation:
    pairs: tuple  # (x, y) with M[x][y] > 0
    row_supports: dict  # x -> tuple of y

    def to_json(self):
        return {"pairs": [list(p) for p in self.pairs]}


def support_relation(m):
    pairs = tuple((x, y) for x in range(m.n) for y in range(m.n) if m[x, y])
    rowsup = {x: tuple(y for y in range(m.n) if m[x, y]) for x in range(m.n)}
    return SupportRelation(pairs, rowsup)


@dataclass
class Quiver:
    """Discrete quiver of a positive map: one edge per nonzero entry,
    src(x,y) = x, rng(x,y) = y, and the source-fiber measure weights
    lambda_x({(x,y)}) = M[x][y]."""

    n: int
    edges: tuple
    measures: dict  # edge -> Fraction
    proper_domain: bool  # True when some row is zero
    zero_rows: tuple

    def to_json(self):
        return {
            "points": self.n,
            "edges": [list(e) for e in self.edges],
            "measures": {f"{x},{y}": format_rational(w) for (x, y), w in sorted(self.measures.items())},
            "zero_rows": list(self.zero_rows),
            "axioms": {
                "fiber_support": "supp lambda_x = s^-1(x) by construction",
                "openness": "vacuously true (discrete)",
            },
        }


def quiver(m):
    rel = support_relation(m)
    zero_rows = tuple(x for x in range(m.n) if not rel.row_supports[x])
    measures = {(x, y): m[x, y] for (x, y) in rel.pairs}
    return Quiver(m.n, rel.pairs, measures, bool(zero_rows), zero_rows)


def quiver_to_map(q):
    """Round trip: rebuild the positive map from quiver data."""
    rows = [[Fraction(0)] * q.n for _ in range(q.n)]
    for (x, y), w in q.measures.items():
        rows[x][y] = w
    return PositiveMapMatrix(rows)


# -- conditional expectations ---------------------------------------------------

@dataclass
class ConditionalExpectationReport:
    verdict: bool
    failed_axiom: str | None

    def to_json(self):
        return {"verdict": self.verdict, "failed_axiom": self.failed_axiom}


def is_conditional_expectation(m, b):
    """Is phi a conditional expectation onto the subalgebra b?

    Axioms checked in order: idempotence (M^2 = M), image inside b,
    b fixed pointwise, and b inside the multiplicative domain.
    """
    mm = linalg.mat_mul(m.rows, m.rows)
    if not linalg.mat_eq(mm, m.rows):
        return ConditionalExpectationReport(False, "not idempotent")
    for y in range(m.n):
        if not b.contains(m.column(y)):
            return ConditionalExpectationReport(False, "image not inside the subalgebra")
    for v in b.indicator_basis():
        if m.apply(v) != v:
            return ConditionalExpectationReport(False, "subalgebra not fixed")
    md = multiplicative_domain(m).algebra
    for v in b.indicator_basis():
        if not md.contains(v):
            return ConditionalExpectationReport(False, "subalgebra outside multiplicative domain")
    return ConditionalExpectationReport(True, None)


# -- endomorphisms and transfer pairs ------------------------------------------

class NotAnEndomorphismError(ValueError):
    pass


def point_map_from_matrix(ma):
    """Validate a 0/1 matrix as composition with a partial point map g:
    alpha(a)(x) = a(g(x)).  Returns {x: g(x)} over the domain of g."""
    g = {}
    for x in range(ma.n):
        nz = [y for y in range(ma.n) if ma[x, y]]
        if len(nz) > 1 or any(ma[x, y] != 1 for y in nz):
            raise NotAnEndomorphismError(
                "not an endomorphism: rows must be 0/1 with at most one unit entry"
            )
        if nz:
            g[x] = nz[0]
    return g


def endomorphism_matrix(n, point_map):
    rows = [[Fraction(0)] * n for _ in range(n)]
    for x, y in point_map.items():
        rows[x][y] = Fraction(1)
    return PositiveMapMatrix(rows)


@dataclass
class TransferPairReport:
    is_exel: bool
    is_regular: bool
    is_corner: bool
    witness: str | None
    regular_via_projection: bool
    hereditary_range: bool
    regular_transfer_count: int | None  # only when the range is hereditary
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "is_exel": self.is_exel,
            "is_regular": self.is_regular,
            "is_corner": self.is_corner,
            "witness": self.witness,
            "regular_via_projection": self.regular_via_projection,
            "hereditary_range": self.hereditary_range,
            "regular_transfer_count": self.regular_transfer_count,
            "details": self.details,
        }


def check_transfer_pair(ma, ml):
    """Classify an (endomorphism, positive map) pair on a finite point set.

    Checks the transfer identity L(a alpha(b)) = L(a) b on the indicator
    basis, decides regularity two ways (alpha L alpha = alpha, and L(1) a
    projection onto the annihilator of ker alpha), decides the corner
    property via alpha(L(a)) = alpha(1) a alpha(1), and, when the range of
    alpha is hereditary, enumerates every regular transfer operator for
    alpha and asserts there is at most one.
    """
    if ma.n != ml.n:
        raise MatrixDocumentError("size mismatch")
    n = ma.n
    g = point_map_from_matrix(ma)

    witness = None
    is_exel = True
    for y, z in product(range(n), repeat=2):
        # a = e_y, b = e_z
        ey = [Fraction(1) if i == y else Fraction(0) for i in range(n)]
        alpha_b = ma.apply([Fraction(1) if i == z else Fraction(0) for i in range(n)])
        lhs = ml.apply([ey[i] * alpha_b[i] for i in range(n)])
        la = ml.apply(ey)
        rhs = [la[i] if i == z else Fraction(0) for i in range(n)]
        if lhs != rhs:
            is_exel = False
            witness = f"L(e_{y} alpha(e_{z})) != L(e_{y}) e_{z}"
            break

    # regularity (a): alpha L alpha = alpha as matrices on functions
    ala = linalg.mat_mul(ma.rows, linalg.mat_mul(ml.rows, ma.rows))
    regular_a = linalg.mat_eq(ala, ma.rows)
    # regularity (b): L(1) is a projection onto (ker alpha)^perp = functions on range(g)
    l1 = [ml.row_sum(x) for x in range(n)]
    rng_g = sorted(set(g.values()))
    regular_b = all(v in (0, 1) for v in l1) and [x for x in range(n) if l1[x] == 1] == rng_g
    if is_exel and regular_a != regular_b:
        raise InternalConsistencyError("the two regularity criteria disagree")
    is_regular = is_exel and regular_a

    # corner: alpha(L(a)) = alpha(1) a alpha(1), i.e. Malpha @ ML = diag(alpha(1))
    alpha1 = ma.apply([Fraction(1)] * n)
    diag = [[alpha1[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    corner_identity = linalg.mat_eq(linalg.mat_mul(ma.rows, ml.rows), diag)
    hereditary = len(set(g.values())) == len(g)  # g injective on its domain
    is_corner = is_regular and corner_identity
    if is_corner and not hereditary:
        raise InternalConsistencyError("corner identity held for a non-hereditary range")

    count = None
    if hereditary:
        count = len(enumerate_regular_transfers(ma))
        if count > 1:
            raise InternalConsistencyError(
                "hereditary range admitted more than one regular transfer"
            )
    if not is_regular and witness is None and is_exel:
        witness = "L(1) is not a projection onto the annihilator of ker alpha"
    return TransferPairReport(
        is_exel,
        is_regular,
        is_corner,
        witness,
        regular_b,
        hereditary,
        count,
        details={"L1": [format_rational(v) for v in l1]},
    )


def enumerate_regular_transfers(ma):
    """All regular transfer operators for an endomorphism with hereditary
    range.  A transfer operator for composition with g concentrates column y
    at row g(y) with a free weight c_y >= 0; regularity (alpha L alpha =
    alpha) forces the fiber sums sum_{w in g^-1(u)} c_w = 1, which pins every
    weight exactly when g is injective."""
    n = ma.n
    g = point_map_from_matrix(ma)
    if len(set(g.values())) != len(g):
        raise ValueError(
            "range is not hereditary; regular transfers form an infinite family"
        )
    dom = sorted(g)
    out = []
    rows, rhs = [], []
    for x in dom:
        z = g[x]
        # (Ma Ml Ma)[x][z] = sum_{y: g(y) = z} c_y must equal Ma[x][z] = 1
        rows.append([Fraction(1) if g[y] == z else Fraction(0) for y in dom])
        rhs.append(Fraction(1))
    sol = linalg.solve(rows, rhs)
    if sol is None or linalg.nullspace(rows):
        return out
    if any(c < 0 for c in sol):
        return out
    rowsM = [[Fraction(0)] * n for _ in range(n)]
    for c, y in zip(sol, dom):
        rowsM[g[y]][y] = c
    ml = PositiveMapMatrix(rowsM)
    if check_transfer_pair_quick(ma, ml):
        out.append(ml)
    return out


def check_transfer_pair_quick(ma, ml):
    """Transfer identity plus alpha L alpha = alpha, without the full report."""
    n = ma.n
    for y, z in product(range(n), repeat=2):
        ey = [Fraction(1) if i == y else Fraction(0) for i in range(n)]
        alpha_b = ma.apply([Fraction(1) if i == z else Fraction(0) for i in range(n)])
        lhs = ml.apply([ey[i] * alpha_b[i] for i in range(n)])
        la = ml.apply(ey)
        rhs = [la[i] if i == z else Fraction(0) for i in range(n)]
        if lhs != rhs:
            return False
    ala = linalg.mat_mul(ma.rows, linalg.mat_mul(ml.rows, ma.rows))
    return linalg.mat_eq(ala, ma.rows)
