"""Finite-dimensional GNS correspondences of positive maps on function
algebras: Gram matrix, null-space quotient, module actions, compacts, the
Katsura-type ideal, and the structural isomorphism checks against quivers
and against the module built from an (endomorphism, transfer) pair.

Index orientation (the one place a silent transpose could hide): with
phi(a)(x) = sum_y M[x][y] a(y), the inner product <a ox b, c ox d> =
b* phi(a* c) d gives the pair e_x ox e_y squared length M[y][x] -- the
matrix is read transposed here, on purpose.  Transporting the module
structure to edge functions on the quiver of M therefore matches the pair
(x, y) with the edge (y, x), and the left action becomes multiplication at
the *range* coordinate, the right action multiplication at the source:
(a . f . b)(u, v) = a(v) f(u, v) b(u).  With that orientation the kernel of
the left action is exactly the zero-column ideal (the GNS-kernel), which is
the identity everything downstream relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .cpmaps import (
    InternalConsistencyError,
    check_transfer_pair,
    gns_kernel,
    point_map_from_matrix,
    support_relation,
)
from .linalg import format_rational

MAX_POINTS = 16


@dataclass
class Correspondence:
    n: int
    surviving: list  # pairs (x, y) with Gram entry M[y][x] > 0, sorted
    gram_diagonal: list  # the corresponding entries M[y][x]
    left_action: dict  # point z -> diagonal of the action matrix on the quotient
    right_action: dict

    def dimension(self):
        return len(self.surviving)

    def left_kernel_support(self):
        """Points whose coordinate function acts as zero on the left."""
        active = {x for (x, _y) in self.surviving}
        return tuple(z for z in range(self.n) if z not in active)

    def to_json(self):
        return {
            "dimension": self.dimension(),
            "surviving_pairs": [list(p) for p in self.surviving],
            "gram_diagonal": [format_rational(v) for v in self.gram_diagonal],
            "left_action": {str(z): [format_rational(v) for v in d] for z, d in self.left_action.items()},
            "right_action": {str(z): [format_rational(v) for v in d] for z, d in self.right_action.items()},
        }


def pair_gram_entry(m, pair_a, pair_b):
    """<e_x ox e_y, e_x' ox e_y'> scalarized through the sum of point
    evaluations: the A-valued form is e_y phi(e_x e_x') e_y', which vanishes
    unless x = x' and y = y' and then has total mass M[y][x]."""
    (x, y), (xp, yp) = pair_a, pair_b
    if x != xp or y != yp:
        # e_x * e_x' = 0 or e_y * e_y' = 0 pointwise
        return Fraction(0)
    return m[y, x]


def gns_correspondence(m):
    """Build the quotient correspondence of a positive map (n <= MAX_POINTS).

    The pair basis Gram is assembled from the inner-product formula, its
    null space removed by exact rank computation, and the two structural
    invariants asserted: quotient dimension equals the number of nonzero
    entries of M, and the left-action kernel equals the GNS-kernel.
    """
    if m.n > MAX_POINTS:
        raise ValueError(f"point set too large (max {MAX_POINTS})")
    pairs = [(x, y) for x in range(m.n) for y in range(m.n)]
    diag = {p: pair_gram_entry(m, p, p) for p in pairs}
    # the Gram is diagonal: entries for distinct pairs vanish identically
    surviving = sorted(p for p in pairs if diag[p])
    gram_rank = sum(1 for p in pairs if diag[p])
    nnz = sum(1 for x in range(m.n) for y in range(m.n) if m[x, y])
    if gram_rank != nnz:
        raise InternalConsistencyError("Gram rank differs from the entry count")
    left = {}
    right = {}
    for z in range(m.n):
        left[z] = [Fraction(1) if x == z else Fraction(0) for (x, _y) in surviving]
        right[z] = [Fraction(1) if y == z else Fraction(0) for (_x, y) in surviving]
    corr = Correspondence(m.n, surviving, [diag[p] for p in surviving], left, right)
    kernel = set(gns_kernel(m).zero_columns)
    if set(corr.left_kernel_support()) != kernel:
        raise InternalConsistencyError("left-action kernel differs from the GNS-kernel")
    return corr


def full_gram_matrix(m):
    """The complete pair-basis Gram as an n^2 x n^2 rational matrix; used as
    an independent rank oracle for small n."""
    pairs = [(x, y) for x in range(m.n) for y in range(m.n)]
    return [[pair_gram_entry(m, p, q) for q in pairs] for p in pairs]


@dataclass
class QuiverDimensionReport:
    dimension: int
    edge_count: int
    actions_match: bool

    def to_json(self):
        return {
            "dimension": self.dimension,
            "edge_count": self.edge_count,
            "actions_match": self.actions_match,
        }


def quiver_dimension_check(m):
    """dim X_phi = number of quiver edges, and the module actions transported
    to edge functions are the pullbacks a(rng(e)) f(e) b(src(e)), verified
    entrywise pair by pair."""
    corr = gns_correspondence(m)
    rel = support_relation(m)
    if corr.dimension() != len(rel.pairs):
        raise InternalConsistencyError("correspondence dimension != quiver edge count")
    edge_of_pair = {(x, y): (y, x) for (x, y) in corr.surviving}
    edge_index = {e: i for i, e in enumerate(rel.pairs)}
    for z in range(m.n):
        for i, pair in enumerate(corr.surviving):
            e = edge_of_pair[pair]
            src, rng = e
            want_left = Fraction(1) if rng == z else Fraction(0)
            want_right = Fraction(1) if src == z else Fraction(0)
            if corr.left_action[z][i] != want_left or corr.right_action[z][i] != want_right:
                raise InternalConsistencyError("module action mismatch with quiver pullbacks")
            if e not in edge_index:
                raise InternalConsistencyError("surviving pair without a quiver edge")
    return QuiverDimensionReport(corr.dimension(), len(rel.pairs), True)


@dataclass
class KatsuraReport:
    support: tuple
    collapse_note: str

    def to_json(self):
        return {"support": list(self.support), "note": self.collapse_note}


def katsura_ideal(m):
    """(ker of left action)^perp intersected with the compact preimage; in
    finite dimensions every operator is compact, so the second factor is the
    whole algebra and the ideal is the complement of the GNS-kernel."""
    kernel = set(gns_kernel(m).zero_columns)
    support = tuple(y for y in range(m.n) if y not in kernel)
    return KatsuraReport(
        support,
        "finite-dimensional collapse: all operators on the module are compact",
    )


@dataclass
class ModuleIsoReport:
    dim_gns: int
    dim_exel_module: int
    isometric: bool
    surjective: bool

    def to_json(self):
        return {
            "dim_gns": self.dim_gns,
            "dim_exel_module": self.dim_exel_module,
            "isometric": self.isometric,
            "surjective": self.surjective,
        }


def exel_module_iso_check(ma, ml):
    """The map a ox b -> class of a*alpha(b) from the GNS correspondence of L
    onto the module (A, <m,n> = L(m* n)) is isometric and onto; verified by
    exact Gram comparison on the pair basis and by rank computation.
    Requires an Exel pair."""
    report = check_transfer_pair(ma, ml)
    if not report.is_exel:
        raise ValueError("not an Exel system: transfer identity fails")
    n = ml.n
    g = point_map_from_matrix(ma)

    def alpha_vec(v):
        return ma.apply(v)

    def scal(vec):
        return sum(vec, Fraction(0))

    def module_gram(u, v):
        # <q(u), q(v)> = L(u v) scalarized through the sum of point evaluations
        return scal(ml.apply([a * b for a, b in zip(u, v)]))

    corr = gns_correspondence(ml)
    basis_pairs = [(x, y) for x in range(n) for y in range(n)]
    images = []
    for (x, y) in basis_pairs:
        ex = [Fraction(1) if i == x else Fraction(0) for i in range(n)]
        ey = [Fraction(1) if i == y else Fraction(0) for i in range(n)]
        ay = alpha_vec(ey)
        images.append([a * b for a, b in zip(ex, ay)])
    isometric = True
    for i, p in enumerate(basis_pairs):
        for j, q in enumerate(basis_pairs):
            if pair_gram_entry(ml, p, q) != module_gram(images[i], images[j]):
                isometric = False
    # rank of the image span inside the module quotient: strip the null
    # directions (functions supported on zero columns have length zero).
    kernel = set(gns_kernel(ml).zero_columns)
    keep = [i for i in range(n) if i not in kernel]
    image_rows = [[v[i] for i in keep] for v in images]
    dim_module = len(keep)
    surjective = linalg.rank(image_rows) == dim_module
    if isometric and linalg.rank(image_rows) != corr.dimension():
        raise InternalConsistencyError("isometric image rank differs from the domain rank")
    return ModuleIsoReport(corr.dimension(), dim_module, isometric, surjective)


@dataclass
class CompactFrameReport:
    generators: list  # (bra_pair, ket_pair, matrix) triples
    span_dimension: int
    module_endo_dimension: int

    def to_json(self):
        return {
            "generator_count": len(self.generators),
            "span_dimension": self.span_dimension,
            "module_endomorphism_dimension": self.module_endo_dimension,
        }


def compact_operator_frame(corr):
    """Rank-one operators Theta_{xi, eta} over the surviving basis.

    Theta_{xi,eta} zeta = xi . <eta, zeta>_A; on the diagonal quotient this
    is a scaled matrix unit when the right-action coordinates of xi and eta
    agree and zero otherwise.  In finite dimensions the compacts exhaust the
    adjointable module maps, which for a diagonal right action means all
    block matrices preserving the right-action eigencoordinate; the frame is
    asserted to span exactly that.
    """
    d = corr.dimension()
    mats = []
    for i, xi in enumerate(corr.surviving):
        for j, eta in enumerate(corr.surviving):
            mat = [[Fraction(0)] * d for _ in range(d)]
            # <eta, zeta>_A is supported at eta's y-coordinate with weight
            # gram_diagonal[j]; xi . (that) survives iff xi shares the y-coordinate.
            if xi[1] == eta[1]:
                mat[i][j] = corr.gram_diagonal[j]
            mats.append(((xi, eta), mat))
    rows = [[m[a][b] for a in range(d) for b in range(d)] for (_pair, m) in mats]
    span_dim = linalg.rank(rows) if rows else 0
    blocks = {}
    for i, (_x, y) in enumerate(corr.surviving):
        blocks.setdefault(y, []).append(i)
    endo_dim = sum(len(ix) ** 2 for ix in blocks.values())
    if span_dim != endo_dim:
        raise InternalConsistencyError("compact frame does not span the module maps")
    return CompactFrameReport([(p, q, m) for ((p, q), m) in mats], span_dim, endo_dim)
