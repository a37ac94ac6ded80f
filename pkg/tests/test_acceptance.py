"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines; every
tolerance is exact rational (or exact radical) arithmetic unless the
criterion itself states a runtime budget, which is asserted here too.
"""

import random
import time
from fractions import Fraction

from transferops.cpmaps import NotAnEndomorphismError, PositiveMapMatrix, check_transfer_pair
from transferops.correspondence import gns_correspondence
from transferops.cpmaps import gns_kernel
from transferops.diagonal import DiagElement
from transferops.exel import (
    classify_system,
    compute_ideals,
    covariance_span_check,
    enumerate_regular_endomorphisms,
    truncated_transfer_matrix,
    verify_transfer_identity,
)
from transferops.fixtures import (
    graph_fixture,
    matrix_fixture,
    random_graph,
    random_matrix,
    random_weights,
    regression_graphs,
)
from transferops.graphs import WeightSystem
from transferops.reps import (
    boundary_representation,
    build_u,
    partial_isometry_report,
    redundancy_test,
    verify_representation,
)

FIXTURES = ["g_line", "g_loop", "g_2loop", "g_fork"]


def report(n, text, ok):
    print(f"[ACCEPTANCE {n}] {text}: {'PASS' if ok else 'FAIL'}")
    assert ok


def test_criterion_1_transfer_identity_suite():
    """L(q_mu alpha(q_nu)) = L(q_mu) q_nu exactly, basis to depth 4, on the
    four fixtures and 100 seeded random graphs; budget 60 s."""
    t0 = time.monotonic()
    ok = True
    pairs = 0
    for name in FIXTURES:
        g, w = graph_fixture(name)
        rep = verify_transfer_identity(g, w, 4)
        ok = ok and rep.passed
        pairs += rep.pairs_checked
    for seed in range(100):
        rng = random.Random(1000 + seed)
        g = random_graph(rng, max_vertices=8, max_edges=16)
        w = random_weights(rng, g)
        rep = verify_transfer_identity(g, w, 4)
        ok = ok and rep.passed
        pairs += rep.pairs_checked
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 60
    report(1, f"transfer identity, {pairs} basis pairs, {elapsed:.1f}s", ok)


def test_criterion_2_regularity_equivalence():
    """The two regularity criteria agree on 200 seeded instances; the
    2-loop fixture is regular at (1/2,1/2) and non-regular at (1,1) with
    witness factor exactly 2."""
    ok = True
    for seed in range(200):
        rng = random.Random(2000 + seed)
        g = random_graph(rng, max_vertices=6, max_edges=10)
        w = random_weights(rng, g, normalized=bool(seed % 2))
        classify_system(g, w, 2)  # raises on internal disagreement
    g, w = graph_fixture("g_2loop")
    ok = ok and classify_system(g, w, 3).is_regular
    bad = WeightSystem({"e": Fraction(1), "f": Fraction(1)})
    cls = classify_system(g, bad, 3)
    ok = ok and (not cls.is_regular) and cls.witness["factor"] == "2"
    report(2, "regularity criteria agree on 200 instances + 2-loop witness", ok)


def test_criterion_3_ideal_lemma():
    """Closed-form ideal generators equal brute-force largest-ideal
    enumeration on every acyclic regression graph (<= 10 vertices)."""
    count = 0
    for name, g, w in regression_graphs():
        if not g.is_acyclic() or len(g.vertices) > 10:
            continue
        rep = compute_ideals(g, w, 3)  # hard error inside on any mismatch
        assert rep.brute_force_checked
        count += 1
    report(3, f"ideal lemma closed form == brute force on {count} acyclic graphs", count >= 5)


def test_criterion_4_covariance_span():
    """span{alpha(q_mu) q_nu} = span{q_eta : |eta| >= 1} at depth 3 on all
    fixtures, exact rank equality."""
    ok = True
    for name in FIXTURES:
        g, _ = graph_fixture(name)
        ok = ok and covariance_span_check(g, 3).equal
    report(4, "covariance span equality at depth 3 on all fixtures", ok)


def test_criterion_5_correspondence_dimension():
    """dim X_phi = nnz(M) and left-action kernel = zero-column set on 100
    seeded random rational matrices up to 8x8."""
    ok = True
    for seed in range(100):
        rng = random.Random(5000 + seed)
        m = random_matrix(rng, max_n=8)
        corr = gns_correspondence(m)
        nnz = sum(1 for x in range(m.n) for y in range(m.n) if m[x, y])
        ok = ok and corr.dimension() == nnz
        ok = ok and set(corr.left_kernel_support()) == set(gns_kernel(m).zero_columns)
    report(5, "correspondence dimension and left kernel on 100 matrices", ok)


def test_criterion_6_representation_suite():
    """On acyclic fixtures: CK relations, u* pi(a) u = pi(L(a)),
    u pi(a) = pi(alpha(a)) u, and the redundancy/covariance-ideal
    cross-check, all at zero residual in exact arithmetic; budget 30 s."""
    t0 = time.monotonic()
    ok = True
    for name in ["g_line", "g_fork", "g_point"]:
        g, w = graph_fixture(name)
        if w is None:
            w = WeightSystem({})
        rep = boundary_representation(g)  # asserts CK relations exactly
        corner = classify_system(g, w, 2).is_corner if g.edges else False
        ver = verify_representation(rep, w, 2, corner=corner)
        ok = ok and ver.all_passed()
        u = build_u(rep, w)
        ideals = compute_ideals(g, w, 2)
        span_paths = {p for p in ideals.intersection}
        kernel_paths = {p for p in ideals.n_l}
        for mu in g.paths_up_to(2):
            r = redundancy_test(rep, u, DiagElement.projection(g, mu), 2)
            ok = ok and r.exists
            refined = DiagElement.projection(g, mu).normalize(2)
            in_span = set(refined.terms) <= {
                p for p in g.paths_up_to(2) if len(p) >= 1
            }
            if in_span:
                ok = ok and r.member
            if mu in kernel_paths:
                ok = ok and not r.member
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 30
    report(6, f"representation suite, zero residual, {elapsed:.1f}s", ok)


def test_criterion_7_partial_isometry_criterion():
    """u*u is a projection iff every emitting vertex's weight sum is one;
    50 seeded acyclic instances covering both outcomes, operator-level test
    against the weight-level test, exact."""
    outcomes = set()
    for seed in range(50):
        rng = random.Random(7000 + seed)
        g = random_graph(rng, max_vertices=6, max_edges=8, acyclic=True)
        w = random_weights(rng, g, normalized=bool(seed % 2))
        rep = boundary_representation(g)
        pi = partial_isometry_report(rep, w)  # raises if the two tests split
        assert pi.is_partial_isometry == pi.normalized
        outcomes.add(pi.is_partial_isometry)
    report(7, "partial-isometry criterion on 50 instances, both outcomes",
           outcomes == {True, False})


def test_criterion_8_uniqueness():
    """Every corner-classified corpus instance admits exactly one
    hereditary-range (corner) endomorphism on its depth-1 truncation -- the
    uniqueness half of the section bijection -- and at least one non-corner
    instance admits two distinct sections."""
    corner_count = 0
    ok = True
    instances = [(n, *graph_fixture(n)) for n in FIXTURES]
    instances += regression_graphs()
    for name, g, w in instances:
        cls = classify_system(g, w, 2)
        if not cls.is_corner:
            continue
        corner_count += 1
        m, _basis = truncated_transfer_matrix(g, w, 1)
        rep = enumerate_regular_endomorphisms(m)
        ok = ok and rep.status == "ok" and rep.corner_count() == 1
        tp = check_transfer_pair(rep.corner_endomorphisms[0], m)
        ok = ok and tp.is_corner
    two = enumerate_regular_endomorphisms(matrix_fixture("m_two_sections"))
    pair_ok = two.count() >= 2 and all(
        check_transfer_pair(ma, matrix_fixture("m_two_sections")).is_regular
        and not check_transfer_pair(ma, matrix_fixture("m_two_sections")).is_corner
        for ma in two.endomorphisms
    )
    ok = ok and corner_count >= 1 and pair_ok
    report(8, f"uniqueness: {corner_count} corner instances have a unique corner "
              "endomorphism; a non-corner instance has >= 2 sections", ok)


def test_criterion_9_negative_controls():
    """Deliberately corrupted inputs must fail with witnesses, proving the
    suites are non-vacuous."""
    ok = True
    # wrong weights in the representation identity
    g, w = graph_fixture("g_line")
    rep = boundary_representation(g)
    bad = WeightSystem({"e": Fraction(3)})
    ver = verify_representation(rep, w, 2, check_weights=bad)
    failed = [c for c in ver.checks if not c.passed]
    ok = ok and failed and all(c.witness for c in failed)
    # alpha replaced by the identity map
    gf, wf = graph_fixture("g_fork")
    rep2 = verify_transfer_identity(gf, wf, 2, alpha_fn=lambda a: a)
    ok = ok and (not rep2.passed) and rep2.witness is not None
    # a non-endomorphism matrix is rejected
    try:
        check_transfer_pair(PositiveMapMatrix([[1, 1], [0, 1]]), matrix_fixture("m_shift"))
        ok = False
    except NotAnEndomorphismError:
        pass
    report(9, "negative controls fail with witnesses", bool(ok))
