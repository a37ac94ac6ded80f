"""Classification of the triple (diagonal algebra, shift endomorphism,
weighted transfer operator) attached to a finite weighted graph: transfer
identity verification, regularity and corner tests, ideal computations, the
covariance span, depth-relative multiplicative domains, and enumeration of
regular endomorphisms for finite commutative systems.

Everything on cyclic graphs is depth-parameterized and says so in its
report: the diagonal algebra is infinite-dimensional there, and no claim of
exactness beyond the stated depth is ever made.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .cpmaps import (
    InternalConsistencyError,
    PositiveMapMatrix,
    check_transfer_pair_quick,
    multiplicative_domain,
    point_map_from_matrix,
    subalgebra_from_span,
)
from .diagonal import DiagElement
from .graphs import classify_vertices, enumerate_boundary, frontier_basis
from .linalg import format_rational


# -- transfer identity -------------------------------------------------------------

@dataclass
class TransferIdentityReport:
    passed: bool
    pairs_checked: int
    witness: dict | None = None

    def to_json(self):
        return {
            "passed": self.passed,
            "pairs_checked": self.pairs_checked,
            "witness": self.witness,
        }


def verify_transfer_identity(g, weights, depth, alpha_fn=None):
    """Exhaustively check L(q_mu alpha(q_nu)) = L(q_mu) q_nu over all basis
    paths to the given depth.  alpha_fn substitutes a different map for the
    shift endomorphism (negative controls); the default is the genuine one.
    """
    paths = g.paths_up_to(depth)
    projs = [DiagElement.projection(g, p) for p in paths]
    alphas = [alpha_fn(q) if alpha_fn else q.alpha() for q in projs]
    checked = 0
    for i, qmu in enumerate(projs):
        lmu = qmu.transfer(weights)
        for j, anu in enumerate(alphas):
            lhs = qmu.multiply(anu).transfer(weights)
            rhs = lmu.multiply(projs[j])
            checked += 1
            if not lhs.equals(rhs):
                return TransferIdentityReport(
                    False,
                    checked,
                    {
                        "mu": paths[i].to_json(),
                        "nu": paths[j].to_json(),
                        "lhs": lhs.to_json(),
                        "rhs": rhs.to_json(),
                    },
                )
    return TransferIdentityReport(True, checked)


# -- system classification -----------------------------------------------------------

@dataclass
class SystemClassification:
    is_exel_system: bool
    is_regular: bool
    is_corner: bool
    witness: dict | None
    normalization_on_emitters: bool
    normalization_all_vertices: bool
    depth: int
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "is_exel": self.is_exel_system,
            "is_regular": self.is_regular,
            "is_corner": self.is_corner,
            "witness": self.witness,
            "normalization_on_emitters": self.normalization_on_emitters,
            "normalization_all_vertices": self.normalization_all_vertices,
            "depth": self.depth,
            "details": self.details,
        }


def classify_system(g, weights, depth):
    """Decide Exel / regular / corner for the graph system, each by two
    independent routes that are cross-checked:

    regular (a): per-vertex normalization sum_{e in s^-1(v)} lambda_e = 1
    over emitting vertices (the reading that follows the proof; the
    all-vertices reading is reported alongside, and is vacuously false as
    soon as the graph has sinks);
    regular (b): alpha(L(alpha(q_mu))) = alpha(q_mu) on basis paths to depth.

    corner: alpha(L(q_mu)) = p q_mu p with p the sum of all edge
    projections, plus a hereditary-range test on the depth-truncated
    subalgebra.  Disagreements between routes raise, never resolve silently.
    """
    exel = verify_transfer_identity(g, weights, depth)
    emitters = [v for v in g.vertices if g.out_edges(v)]
    sums = {v: weights.vertex_sum(g, v) for v in emitters}
    regular_a = all(s == 1 for s in sums.values())
    normalization_all = regular_a and all(g.out_edges(v) for v in g.vertices)

    regular_b = True
    witness = None
    paths = g.paths_up_to(depth)
    for mu in paths:
        q = DiagElement.projection(g, mu)
        aq = q.alpha()
        lhs = aq.transfer(weights).alpha()
        if not lhs.equals(aq):
            regular_b = False
            factor = _proportionality_factor(lhs, aq)
            witness = {
                "mu": mu.to_json(),
                "lhs": lhs.to_json(),
                "rhs": aq.to_json(),
                "factor": None if factor is None else format_rational(factor),
            }
            break
    if regular_a != regular_b:
        raise InternalConsistencyError(
            "regularity criteria disagree: normalization says "
            f"{regular_a}, the operator identity says {regular_b}"
        )
    is_regular = exel.passed and regular_a

    p_edges = DiagElement(g, {g.path((e,)): Fraction(1) for e in g.edges})
    corner_identity = True
    corner_witness = None
    for mu in paths:
        q = DiagElement.projection(g, mu)
        lhs = q.transfer(weights).alpha()
        rhs = p_edges.multiply(q).multiply(p_edges)
        if not lhs.equals(rhs):
            corner_identity = False
            corner_witness = {"mu": mu.to_json(), "lhs": lhs.to_json(), "rhs": rhs.to_json()}
            break
    hereditary = _alpha_range_hereditary(g, depth)
    is_corner = is_regular and corner_identity and hereditary

    if is_corner and not is_regular:
        raise InternalConsistencyError("corner without regular")
    if is_regular and not exel.passed:
        raise InternalConsistencyError("regular without exel")

    return SystemClassification(
        exel.passed,
        is_regular,
        is_corner,
        witness or corner_witness or (exel.witness if not exel.passed else None),
        regular_a,
        normalization_all,
        depth,
        details={
            "vertex_sums": {v: format_rational(s) for v, s in sorted(sums.items())},
            "corner_identity": corner_identity,
            "hereditary_range": hereditary,
        },
    )


def _proportionality_factor(a, b):
    """c with a = c b when the two elements are exactly proportional."""
    an = a.normalize(max(a.support_depth(), b.support_depth()))
    bn = b.normalize(max(a.support_depth(), b.support_depth()))
    if not bn.terms or set(an.terms) != set(bn.terms):
        return None
    ratios = {an.terms[p] / bn.terms[p] for p in bn.terms}
    return ratios.pop() if len(ratios) == 1 else None


def _alpha_range_hereditary(g, depth):
    """Is the span of alpha applied to the depth-(d-1) subalgebra a
    hereditary subalgebra of the depth-d one?  For finite-dimensional
    commutative algebras hereditary means: equal to chi_S * A for its own
    support set S, i.e. the span's rank equals the size of its support."""
    basis = frontier_basis(g, depth)
    gens = g.paths_up_to(max(depth - 1, 0))
    rows = []
    for mu in gens:
        vec = DiagElement.projection(g, mu).alpha().coefficients_on(basis)
        if any(vec):
            rows.append(vec)
    if not rows:
        return True  # the zero subalgebra is hereditary
    support = [i for i in range(len(basis)) if any(r[i] for r in rows)]
    return linalg.rank(rows) == len(support)


# -- ideals -----------------------------------------------------------------------

@dataclass
class IdealReport:
    n_l: list
    n_l_perp: list
    j_xl: list
    intersection: list
    depth: int
    brute_force_checked: bool

    def to_json(self):
        lab = lambda ps: [p.to_json() for p in ps]
        return {
            "N_L": lab(self.n_l),
            "N_L_perp": lab(self.n_l_perp),
            "J_XL": lab(self.j_xl),
            "intersection": lab(self.intersection),
            "depth": self.depth,
            "brute_force_checked": self.brute_force_checked,
        }


def boundary_transfer_matrix(g, weights):
    """The transfer operator as an exact matrix on functions over the finite
    boundary-path set (acyclic graphs), straight from its pointwise formula
    L(a)(x) = sum over edges e composable at the range of x of
    lambda_e a(e x).  This is the independent route used to cross-check the
    symbolic calculus."""
    atlas = enumerate_boundary(g)
    pts = atlas.boundary_paths
    index = {p: i for i, p in enumerate(pts)}
    n = len(pts)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i, x in enumerate(pts):
        for e in g.out_edges(g.path_range(x)):
            ex = g.prepend(e, x)
            j = index.get(ex)
            if j is not None:
                rows[i][j] += weights[e]
    return PositiveMapMatrix(rows), pts


def compute_ideals(g, weights, depth):
    """Generator lists for the kernel ideal, its annihilator, and the
    compact-preimage ideal, per their closed forms; finite graphs have no
    infinite receivers, so the third is everything.  Acyclic graphs also run
    the brute-force largest-ideal computation over the boundary functions
    and disagreement is a hard error."""
    cls = classify_vertices(g)
    sources = set(cls.sources)
    paths = g.paths_up_to(depth)
    n_l = [p for p in paths if len(p) == 0 and p.vertex in sources]
    n_l_perp = [p for p in paths if not (len(p) == 0 and p.vertex in sources)]
    j_xl = list(paths)
    inter = [p for p in paths if len(p) >= 1]

    # termwise orthogonality of the kernel and its annihilator generators
    for pv in n_l:
        qv = DiagElement.projection(g, pv)
        for pm in n_l_perp:
            if not qv.multiply(DiagElement.projection(g, pm)).is_zero():
                raise InternalConsistencyError("N_L and its annihilator overlap termwise")

    brute_checked = False
    if g.is_acyclic():
        m, pts = boundary_transfer_matrix(g, weights)
        zero_cols = [y for y in range(m.n) if not any(m.column(y))]
        brute_rows = []
        for y in zero_cols:
            v = [Fraction(0)] * m.n
            v[y] = Fraction(1)
            brute_rows.append(v)
        closed_rows = [_boundary_vector(g, p, pts) for p in n_l]
        if not linalg.same_span(brute_rows, closed_rows):
            raise InternalConsistencyError("brute-force kernel ideal differs from the closed form")
        # annihilator: functions supported off the zero columns
        perp_rows = []
        for y in range(m.n):
            if y not in zero_cols:
                v = [Fraction(0)] * m.n
                v[y] = Fraction(1)
                perp_rows.append(v)
        full_depth = max((len(p) for p in pts), default=0)
        closed_perp = [
            _boundary_vector(g, p, pts)
            for p in g.paths_up_to(full_depth)
            if not (len(p) == 0 and p.vertex in sources)
        ]
        if not linalg.same_span(perp_rows, closed_perp):
            raise InternalConsistencyError("brute-force annihilator differs from the closed form")
        brute_checked = True
    return IdealReport(n_l, n_l_perp, j_xl, inter, depth, brute_checked)


def _boundary_vector(g, path, pts):
    """chi of the cylinder of the path, as a vector over the boundary points."""
    return [Fraction(1) if g.is_prefix(path, x) else Fraction(0) for x in pts]


# -- covariance span -------------------------------------------------------------------

@dataclass
class CovarianceSpanReport:
    equal: bool
    dimension: int
    depth: int

    def to_json(self):
        return {"equal": self.equal, "dimension": self.dimension, "depth": self.depth}


def covariance_span_check(g, depth):
    """span{alpha(q_mu) q_nu} = span{q_eta : |eta| >= 1} inside the depth-d
    truncation; exact rank equality over the rationals.  Generators use
    |mu| <= d-1 (alpha raises depth by one) and |nu|, |eta| <= d."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    basis = frontier_basis(g, depth)
    lhs_rows = []
    paths_lo = g.paths_up_to(depth - 1)
    paths_hi = g.paths_up_to(depth)
    for mu in paths_lo:
        amu = DiagElement.projection(g, mu).alpha()
        for nu in paths_hi:
            vec = amu.multiply(DiagElement.projection(g, nu)).coefficients_on(basis)
            if any(vec):
                lhs_rows.append(vec)
    rhs_rows = []
    for eta in paths_hi:
        if len(eta) >= 1:
            vec = DiagElement.projection(g, eta).coefficients_on(basis)
            rhs_rows.append(vec)
    equal = linalg.same_span(lhs_rows, rhs_rows)
    dim = linalg.rank(rhs_rows) if rhs_rows else 0
    return CovarianceSpanReport(equal, dim, depth)


# -- truncated systems and multiplicative domains ------------------------------------------

def truncated_transfer_matrix(g, weights, depth):
    """The transfer operator restricted to the depth-d diagonal subalgebra,
    as a PositiveMapMatrix in the frontier-projection basis (the truncation
    is exact: the subalgebra is invariant)."""
    basis = frontier_basis(g, depth)
    n = len(basis)
    cols = []
    for mu in basis:
        img = DiagElement.projection(g, mu).transfer(weights)
        cols.append(img.coefficients_on(basis))
    rows = [[cols[j][i] for j in range(n)] for i in range(n)]
    return PositiveMapMatrix(rows), basis


@dataclass
class TruncatedMDReport:
    blocks: list  # blocks of frontier-path labels
    dimension: int
    depth: int
    label: str
    corner_closed_form_checked: bool | None

    def to_json(self):
        return {
            "blocks": self.blocks,
            "dimension": self.dimension,
            "depth": self.depth,
            "label": self.label,
            "corner_closed_form_checked": self.corner_closed_form_checked,
        }


def multiplicative_domain_truncated(g, weights, depth, corner=None):
    """Solve L(b a) = L(b) L(a) for a in the depth-d subalgebra against every
    b in the depth-(d+1) subalgebra; the result is labeled depth-relative
    (it may strictly contain the true multiplicative domain on cyclic
    graphs).  For corner systems the closed form pAp + (1-p)A(1-p), which is
    everything over a commutative base, is asserted."""
    basis_lo = frontier_basis(g, depth)
    basis_hi = frontier_basis(g, depth + 1)
    cols = {}
    for mu in basis_lo:
        q = DiagElement.projection(g, mu)
        per_b = []
        for nu in basis_hi:
            b = DiagElement.projection(g, nu)
            diff = b.multiply(q).transfer(weights) - b.transfer(weights).multiply(q.transfer(weights))
            per_b.append(diff.coefficients_on(basis_hi))
        cols[mu] = per_b
    rows = []
    n_lo = len(basis_lo)
    n_hi = len(basis_hi)
    for bi in range(n_hi):
        for out in range(n_hi):
            row = [cols[mu][bi][out] for mu in basis_lo]
            if any(row):
                rows.append(row)
    sol = linalg.nullspace(rows) if rows else [list(r) for r in linalg.identity(n_lo)]
    alg = subalgebra_from_span(sol, n_lo)
    if corner is None:
        corner = classify_system(g, weights, depth).is_corner
    corner_checked = None
    if corner:
        corner_checked = alg.dimension() == n_lo
        if not corner_checked:
            raise InternalConsistencyError(
                "corner closed form violated: depth-relative MD is not everything"
            )
    blocks = [[basis_lo[i].label() for i in b] for b in alg.blocks]
    return TruncatedMDReport(blocks, alg.dimension(), depth, "depth-relative", corner_checked)


# -- regular endomorphism enumeration --------------------------------------------------------

@dataclass
class RegularEndomorphismReport:
    status: str  # "ok", "image_not_ideal", "no_section"
    endomorphisms: list  # unit-preserving sections (0/1 endomorphism matrices)
    corner_endomorphisms: list  # hereditary-range sections (at most one)
    reason: str | None = None

    def count(self):
        return len(self.endomorphisms)

    def corner_count(self):
        return len(self.corner_endomorphisms)

    def to_json(self):
        return {
            "status": self.status,
            "count": self.count(),
            "endomorphisms": [m.to_json() for m in self.endomorphisms],
            "corner_count": self.corner_count(),
            "corner_endomorphisms": [m.to_json() for m in self.corner_endomorphisms],
            "reason": self.reason,
        }


MAX_ENUMERATION_POINTS = 8


def enumerate_regular_endomorphisms(ml):
    """Regular Exel structures over a finite commutative algebra with the
    given transfer candidate L.

    The image of L must be a complemented ideal (functions supported on a
    coordinate subset); otherwise no regular system exists and a structured
    result says so.  Two families are enumerated:

    * unit-preserving sections: unital subalgebras of the multiplicative
      domain (partitions of its block set, merged) mapped bijectively onto
      the image; each induces alpha(a) = theta(L(1) a);
    * corner sections: hereditary subalgebras chi_S A inside the
      multiplicative domain mapped bijectively onto the image.  The transfer
      operator determines the corner endomorphism outright, so at most one
      exists; more than one is a hard error.

    Every emitted endomorphism is re-verified against the transfer identity
    and regularity.
    """
    n = ml.n
    if n > MAX_ENUMERATION_POINTS:
        raise ValueError(f"point set too large (max {MAX_ENUMERATION_POINTS})")
    cols = [ml.column(y) for y in range(n)]
    image_rows = [c for c in cols if any(c)]
    r = linalg.rank(image_rows) if image_rows else 0
    support = sorted({x for c in cols for x in range(n) if c[x]})
    if r != len(support):
        return RegularEndomorphismReport(
            "image_not_ideal",
            [],
            [],
            "the image of L contains a non-indicator-supported function; "
            "no regular system exists",
        )
    md = multiplicative_domain(ml).algebra
    found = []
    for grouping in _partitions(list(md.blocks)):
        merged = [tuple(sorted(p for blk in grp for p in blk)) for grp in grouping]
        if len(merged) != r:
            continue
        b_basis = []
        for blk in merged:
            v = [Fraction(0)] * n
            for p in blk:
                v[p] = Fraction(1)
            b_basis.append(v)
        images = [ml.apply(v) for v in b_basis]
        if linalg.rank(images) != r:
            continue
        if not linalg.same_span(images, image_rows):
            continue
        # theta = inverse of L restricted to B; alpha(a) = theta(chi_support * a)
        alpha_cols = []
        ok = True
        for y in range(n):
            if y not in support:
                alpha_cols.append([Fraction(0)] * n)
                continue
            target = [Fraction(1) if x == y else Fraction(0) for x in range(n)]
            coeffs = linalg.solve(linalg.transpose(images), target)
            if coeffs is None:
                ok = False
                break
            vec = [Fraction(0)] * n
            for c, bv in zip(coeffs, b_basis):
                for i in range(n):
                    vec[i] += c * bv[i]
            alpha_cols.append(vec)
        if not ok:
            continue
        rows = [[alpha_cols[y][x] for y in range(n)] for x in range(n)]
        # theta is an algebra isomorphism, so the induced map is an honest
        # 0/1 endomorphism matrix; anything else is a build error.
        try:
            ma = PositiveMapMatrix(rows)
            point_map_from_matrix(ma)
        except ValueError as exc:
            raise InternalConsistencyError(f"section induced a non-endomorphism: {exc}")
        if not check_transfer_pair_quick(ma, ml):
            raise InternalConsistencyError("section failed the transfer identity")
        found.append(ma)
    corners = _corner_sections(ml, image_rows, r, support, md)
    if not found and not corners:
        return RegularEndomorphismReport(
            "no_section", [], [], "no section of L exists"
        )
    found.sort(key=lambda m: m.to_json())
    return RegularEndomorphismReport("ok", found, corners)


def _corner_sections(ml, image_rows, r, support, md):
    """Hereditary-range sections chi_S A of L: S runs over r-subsets whose
    indicator algebra sits inside the multiplicative domain and maps
    bijectively onto the image.  alpha inverts L there and kills the
    complement of the image.  At most one can exist."""
    from itertools import combinations

    n = ml.n
    out = []
    for s_set in combinations(range(n), r):
        basis = []
        ok = True
        for y in s_set:
            e = [Fraction(1) if i == y else Fraction(0) for i in range(n)]
            if not md.contains(e):
                ok = False
                break
            basis.append(e)
        if not ok:
            continue
        images = [ml.apply(v) for v in basis]
        if linalg.rank(images) != r or not linalg.same_span(images, image_rows):
            continue
        alpha_cols = []
        for y in range(n):
            if y not in support:
                alpha_cols.append([Fraction(0)] * n)
                continue
            target = [Fraction(1) if x == y else Fraction(0) for x in range(n)]
            coeffs = linalg.solve(linalg.transpose(images), target)
            if coeffs is None:
                ok = False
                break
            vec = [Fraction(0)] * n
            for c, bv in zip(coeffs, basis):
                for i in range(n):
                    vec[i] += c * bv[i]
            alpha_cols.append(vec)
        if not ok:
            continue
        rows = [[alpha_cols[y][x] for y in range(n)] for x in range(n)]
        try:
            ma = PositiveMapMatrix(rows)
            point_map_from_matrix(ma)
        except ValueError as exc:
            raise InternalConsistencyError(f"corner section induced a non-endomorphism: {exc}")
        if not check_transfer_pair_quick(ma, ml):
            raise InternalConsistencyError("corner section failed the transfer identity")
        out.append(ma)
    if len(out) > 1:
        raise InternalConsistencyError(
            "the transfer operator admitted two corner endomorphisms"
        )
    return out


def _partitions(items):
    """All set partitions of a list (at most 8 items here: 4140 partitions)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part
