import random
from fractions import Fraction

import pytest

from transferops import linalg
from transferops.cpmaps import InternalConsistencyError, PositiveMapMatrix
from transferops.diagonal import DiagElement
from transferops.exel import (
    boundary_transfer_matrix,
    classify_system,
    compute_ideals,
    covariance_span_check,
    enumerate_regular_endomorphisms,
    multiplicative_domain_truncated,
    truncated_transfer_matrix,
    verify_transfer_identity,
)
from transferops.fixtures import graph_fixture, matrix_fixture, random_graph, random_weights
from transferops.graphs import WeightSystem, frontier_basis


class TestTransferIdentity:
    def test_line_depth2(self):
        g, w = graph_fixture("g_line")
        assert verify_transfer_identity(g, w, 2).passed

    def test_2loop_depth3(self):
        g, w = graph_fixture("g_2loop")
        assert verify_transfer_identity(g, w, 3).passed

    def test_identity_alpha_negative_control(self):
        g, w = graph_fixture("g_fork")
        rep = verify_transfer_identity(g, w, 2, alpha_fn=lambda a: a)
        assert not rep.passed and rep.witness is not None


class TestClassify:
    def test_loop_regular(self):
        g, w = graph_fixture("g_loop")
        cls = classify_system(g, w, 3)
        assert cls.is_regular and cls.is_exel_system

    def test_2loop_half_regular_not_corner(self):
        g, w = graph_fixture("g_2loop")
        cls = classify_system(g, w, 3)
        assert cls.is_regular and not cls.is_corner

    def test_2loop_unit_weights_witness_factor_2(self):
        g, _ = graph_fixture("g_2loop")
        w = WeightSystem({"e": Fraction(1), "f": Fraction(1)})
        cls = classify_system(g, w, 3)
        assert cls.is_exel_system and not cls.is_regular
        assert cls.witness["factor"] == "2"

    def test_line_regular_and_corner(self):
        g, w = graph_fixture("g_line")
        cls = classify_system(g, w, 2)
        assert cls.is_regular and cls.is_corner

    def test_fork_not_regular_all_vertices_reading_reported(self):
        g, w = graph_fixture("g_fork")
        cls = classify_system(g, w, 2)
        assert not cls.is_regular
        assert cls.normalization_all_vertices is False

    def test_methods_agree_on_random_instances(self):
        for seed in range(40):
            rng = random.Random(seed)
            g = random_graph(rng, max_vertices=4, max_edges=7)
            w = random_weights(rng, g, normalized=bool(seed % 2))
            cls = classify_system(g, w, 2)  # raises on method disagreement
            assert cls.is_exel_system

    def test_implication_chain(self):
        for seed in range(25):
            rng = random.Random(100 + seed)
            g = random_graph(rng, max_vertices=4, max_edges=6)
            w = random_weights(rng, g, normalized=bool(seed % 2))
            cls = classify_system(g, w, 2)
            if cls.is_corner:
                assert cls.is_regular
            if cls.is_regular:
                assert cls.is_exel_system


class TestIdeals:
    def test_line(self):
        g, w = graph_fixture("g_line")
        rep = compute_ideals(g, w, 2)
        assert [p.label() for p in rep.n_l] == ["w"]
        assert rep.brute_force_checked

    def test_fork(self):
        g, w = graph_fixture("g_fork")
        rep = compute_ideals(g, w, 2)
        assert sorted(p.label() for p in rep.n_l) == ["w1", "w2"]
        labels = [p.label() for p in rep.n_l_perp]
        assert "e" in labels and "f" in labels and "w1" not in labels

    def test_2loop_no_sources(self):
        g, w = graph_fixture("g_2loop")
        rep = compute_ideals(g, w, 2)
        assert rep.n_l == []
        assert len(rep.n_l_perp) == len(rep.j_xl)  # everything survives

    def test_closed_form_equals_brute_force_on_acyclic(self):
        for seed in range(20):
            rng = random.Random(seed)
            g = random_graph(rng, max_vertices=10, max_edges=12, acyclic=True)
            w = random_weights(rng, g)
            rep = compute_ideals(g, w, 3)  # raises on any disagreement
            assert rep.brute_force_checked


class TestCovarianceSpan:
    def test_line_depth2(self):
        rep = covariance_span_check(graph_fixture("g_line")[0], 2)
        assert rep.equal and rep.dimension == 1

    def test_2loop_depth1(self):
        rep = covariance_span_check(graph_fixture("g_2loop")[0], 1)
        assert rep.equal and rep.dimension == 2

    def test_2loop_depth2_full_refinement(self):
        # at depth 2 the span of {q_eta : |eta| >= 1} refines to the four
        # length-2 cylinders; equality still holds (oracle: path count)
        g, _ = graph_fixture("g_2loop")
        rep = covariance_span_check(g, 2)
        assert rep.equal
        assert rep.dimension == len([p for p in frontier_basis(g, 2)])

    def test_fork_depth1(self):
        rep = covariance_span_check(graph_fixture("g_fork")[0], 1)
        assert rep.equal and rep.dimension == 2

    def test_all_fixtures_depth3(self):
        for name in ["g_line", "g_loop", "g_2loop", "g_fork"]:
            rep = covariance_span_check(graph_fixture(name)[0], 3)
            assert rep.equal


class TestTruncatedMD:
    def test_line_full_algebra(self):
        g, w = graph_fixture("g_line")
        rep = multiplicative_domain_truncated(g, w, 2)
        assert rep.dimension == 2 and rep.corner_closed_form_checked

    def test_2loop_excludes_qe_minus_qf(self):
        g, w = graph_fixture("g_2loop")
        rep = multiplicative_domain_truncated(g, w, 2)
        # blocks are the sigma-fibers {ee,fe} and {ef,ff}; q_e - q_f is not
        # block-constant there
        assert rep.dimension == 2
        assert sorted(rep.blocks) == [["ee", "fe"], ["ef", "ff"]]
        assert rep.label == "depth-relative"

    def test_loop_identity_like_everything(self):
        g, w = graph_fixture("g_loop")
        rep = multiplicative_domain_truncated(g, w, 2)
        assert rep.dimension == 1  # the truncation is one-dimensional


class TestTruncatedSystem:
    def test_line_depth1_matrix(self):
        g, w = graph_fixture("g_line")
        m, basis = truncated_transfer_matrix(g, w, 1)
        assert [p.label() for p in basis] == ["w", "e"]
        assert m.rows == [[Fraction(0), Fraction(1)], [Fraction(0), Fraction(0)]]

    def test_boundary_matrix_oracle(self):
        # the boundary-function matrix and the frontier-basis matrix agree on
        # acyclic graphs once the frontier is the full boundary
        g, w = graph_fixture("g_fork")
        mb, pts = boundary_transfer_matrix(g, w)
        mt, basis = truncated_transfer_matrix(g, w, 1)
        assert sorted(p.label() for p in pts) == sorted(p.label() for p in basis)
        perm = {i: basis.index(p) for i, p in enumerate(pts)}
        for i in range(mb.n):
            for j in range(mb.n):
                assert mb[i, j] == mt[perm[i], perm[j]]


class TestEnumerateRegular:
    def test_identity_exactly_one(self):
        rep = enumerate_regular_endomorphisms(matrix_fixture("m_id3"))
        assert rep.status == "ok" and rep.count() == 1
        assert rep.endomorphisms[0].rows == matrix_fixture("m_id3").rows

    def test_shift_exactly_one(self):
        rep = enumerate_regular_endomorphisms(matrix_fixture("m_shift"))
        assert rep.status == "ok" and rep.count() == 1

    def test_two_sections(self):
        rep = enumerate_regular_endomorphisms(matrix_fixture("m_two_sections"))
        assert rep.status == "ok" and rep.count() == 2

    def test_image_not_ideal(self):
        rep = enumerate_regular_endomorphisms(matrix_fixture("m_nonideal"))
        assert rep.status == "image_not_ideal" and rep.count() == 0
        assert "no regular system" in rep.reason

    def test_corner_truncations_unique(self):
        for name in ["g_line", "g_loop"]:
            g, w = graph_fixture(name)
            assert classify_system(g, w, 2).is_corner
            m, _ = truncated_transfer_matrix(g, w, 1)
            rep = enumerate_regular_endomorphisms(m)
            assert rep.status == "ok" and rep.count() == 1

    def test_emitted_alphas_verify(self):
        ml = matrix_fixture("m_two_sections")
        from transferops.cpmaps import check_transfer_pair

        for ma in enumerate_regular_endomorphisms(ml).endomorphisms:
            rep = check_transfer_pair(ma, ml)
            assert rep.is_exel and rep.is_regular
