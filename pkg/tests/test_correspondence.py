import random
from fractions import Fraction

import pytest

from transferops import linalg
from transferops.cpmaps import PositiveMapMatrix, endomorphism_matrix, gns_kernel
from transferops.correspondence import (
    compact_operator_frame,
    exel_module_iso_check,
    full_gram_matrix,
    gns_correspondence,
    katsura_ideal,
    pair_gram_entry,
    quiver_dimension_check,
)
from transferops.fixtures import matrix_fixture, random_matrix


def exact_psd(sym):
    """Independent positivity oracle: exact LDL-style Schur reduction.  A
    rational symmetric matrix is PSD iff no pivot goes negative and every
    zero pivot has an all-zero row."""
    m = [row[:] for row in sym]
    n = len(m)
    for k in range(n):
        if m[k][k] < 0:
            return False
        if m[k][k] == 0:
            if any(m[k][j] for j in range(k, n)):
                return False
            continue
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            for j in range(k, n):
                m[i][j] -= f * m[k][j]
    return True


def nnz(m):
    return sum(1 for x in range(m.n) for y in range(m.n) if m[x, y])


class TestGnsCorrespondence:
    def test_m_half_dimension_3(self):
        assert gns_correspondence(matrix_fixture("m_half")).dimension() == 3

    def test_identity_dimension_n(self):
        m = PositiveMapMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        assert gns_correspondence(m).dimension() == 3

    def test_zero_dimension_0(self):
        assert gns_correspondence(PositiveMapMatrix([[0, 0], [0, 0]])).dimension() == 0

    def test_gram_transposed_indexing(self):
        m = matrix_fixture("m_half")
        # pair (x, y) carries M[y][x]: pair (1, 0) survives via M[0][1] = 1/2
        assert pair_gram_entry(m, (1, 0), (1, 0)) == Fraction(1, 2)
        assert pair_gram_entry(m, (0, 1), (0, 1)) == Fraction(0)

    def test_full_gram_rank_oracle_small(self):
        rng = random.Random(2)
        for _ in range(10):
            m = random_matrix(rng, max_n=4)
            corr = gns_correspondence(m)
            assert linalg.rank(full_gram_matrix(m)) == corr.dimension() == nnz(m)

    def test_gram_positivity_exact_ldl(self):
        rng = random.Random(4)
        for _ in range(10):
            m = random_matrix(rng, max_n=3)
            assert exact_psd(full_gram_matrix(m))

    def test_dim_equals_nnz_randomized(self):
        rng = random.Random(7)
        for _ in range(50):
            m = random_matrix(rng, max_n=6)
            assert gns_correspondence(m).dimension() == nnz(m)

    def test_left_kernel_is_zero_column_set(self):
        rng = random.Random(8)
        for _ in range(50):
            m = random_matrix(rng, max_n=6)
            corr = gns_correspondence(m)
            assert set(corr.left_kernel_support()) == set(gns_kernel(m).zero_columns)


class TestQuiverDimension:
    def test_m_half(self):
        rep = quiver_dimension_check(matrix_fixture("m_half"))
        assert rep.dimension == rep.edge_count == 3 and rep.actions_match

    def test_permutation(self):
        m = PositiveMapMatrix([[0, 1], [1, 0]])
        rep = quiver_dimension_check(m)
        assert rep.dimension == 2 and rep.actions_match

    def test_hundred_random_5x5(self):
        rng = random.Random(13)
        for _ in range(100):
            m = random_matrix(rng, max_n=5)
            rep = quiver_dimension_check(m)
            assert rep.dimension == rep.edge_count


class TestKatsura:
    def test_m_half_whole(self):
        assert katsura_ideal(matrix_fixture("m_half")).support == (0, 1)

    def test_zero_map(self):
        assert katsura_ideal(PositiveMapMatrix([[0, 0], [0, 0]])).support == ()

    def test_killer(self):
        assert katsura_ideal(matrix_fixture("m_killer")).support == (0,)


class TestExelModuleIso:
    def test_identity_system(self):
        ma = endomorphism_matrix(2, {0: 0, 1: 1})
        ml = PositiveMapMatrix([[1, 0], [0, 1]])
        rep = exel_module_iso_check(ma, ml)
        assert rep.isometric and rep.surjective and rep.dim_gns == rep.dim_exel_module == 2

    def test_corner_shift_system(self):
        ma = endomorphism_matrix(2, {1: 0})
        rep = exel_module_iso_check(ma, matrix_fixture("m_shift"))
        assert rep.isometric and rep.surjective
        assert rep.dim_gns == rep.dim_exel_module == 1

    def test_non_exel_rejected(self):
        ma = endomorphism_matrix(2, {1: 0})
        with pytest.raises(ValueError, match="not an Exel system"):
            exel_module_iso_check(ma, PositiveMapMatrix([[1, 0], [0, 1]]))

    def test_every_accepted_pair_passes(self):
        # the isomorphism has no side conditions: any Exel pair must pass
        from transferops.cpmaps import enumerate_regular_transfers

        for n, pm in [(2, {1: 0}), (3, {1: 0, 2: 2}), (3, {0: 0, 1: 1, 2: 2})]:
            ma = endomorphism_matrix(n, pm)
            for ml in enumerate_regular_transfers(ma):
                rep = exel_module_iso_check(ma, ml)
                assert rep.isometric and rep.surjective


class TestCompactFrame:
    def test_m_half_spans_module_maps(self):
        corr = gns_correspondence(matrix_fixture("m_half"))
        rep = compact_operator_frame(corr)
        assert len(rep.generators) == 9
        assert rep.span_dimension == rep.module_endo_dimension == 5

    def test_zero_empty(self):
        corr = gns_correspondence(PositiveMapMatrix([[0, 0], [0, 0]]))
        rep = compact_operator_frame(corr)
        assert rep.generators == [] and rep.span_dimension == 0

    def test_one_dimensional_single_projector(self):
        corr = gns_correspondence(PositiveMapMatrix([[1]]))
        rep = compact_operator_frame(corr)
        assert len(rep.generators) == 1 and rep.span_dimension == 1
