import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowrank import (
    Covector,
    Dyad,
    DyadicPerturbation,
    DimensionMismatch,
    GramMatrix,
    Operator,
    Vector,
    dyad_to_operator,
    gram,
    pair,
    principal_minor_sum,
    wedge_eval,
)
from lowrank.oracle import wedge_bruteforce

from conftest import random_covectors, random_vectors


def basis_vector(n, j):
    e = np.zeros(n)
    e[j] = 1.0
    return Vector(e)


def basis_covector(n, j):
    e = np.zeros(n)
    e[j] = 1.0
    return Covector(e)


class TestConstruction:
    def test_vector_rejects_nan(self):
        with pytest.raises(ValueError):
            Vector([1.0, np.nan])

    def test_vector_rejects_dimension_one(self):
        with pytest.raises(ValueError):
            Vector([1.0])

    def test_operator_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            Operator([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])

    def test_operator_rejects_inf(self):
        with pytest.raises(ValueError):
            Operator([[1.0, np.inf], [0.0, 1.0]])

    def test_dyad_rejects_mixed_dimensions(self):
        with pytest.raises(DimensionMismatch):
            Dyad(Vector([1.0, 0.0, 0.0]), Covector([1.0, 0.0]))

    def test_perturbation_needs_a_dyad(self):
        with pytest.raises(ValueError):
            DyadicPerturbation(())

    def test_perturbation_rejects_mixed_dimensions(self):
        d2 = Dyad(Vector([1.0, 0.0]), Covector([1.0, 0.0]))
        d3 = Dyad(Vector([1.0, 0.0, 0.0]), Covector([1.0, 0.0, 0.0]))
        with pytest.raises(DimensionMismatch):
            DyadicPerturbation((d2, d3))

    def test_coords_are_read_only(self):
        v = Vector([1.0, 2.0])
        with pytest.raises(ValueError):
            v.coords[0] = 5.0

    def test_input_array_is_copied(self):
        raw = np.array([1.0, 2.0])
        v = Vector(raw)
        raw[0] = 99.0
        assert v.coords[0] == 1.0


class TestPair:
    def test_dual_basis(self):
        assert pair(Covector([1.0, 0.0]), Vector([1.0, 0.0])) == 1.0

    def test_arithmetic(self):
        assert pair(Covector([2.0, 3.0]), Vector([1.0, 1.0])) == 5.0

    def test_zero_covector(self, rng):
        v = Vector(rng.standard_normal(6))
        assert pair(Covector(np.zeros(6)), v) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            pair(Covector([1.0, 0.0]), Vector([1.0, 0.0, 0.0]))

    @settings(max_examples=50, deadline=None)
    @given(
        data=st.lists(
            st.floats(min_value=-100, max_value=100), min_size=12, max_size=12
        ),
        alpha=st.floats(min_value=-10, max_value=10),
        beta=st.floats(min_value=-10, max_value=10),
    )
    def test_bilinear(self, data, alpha, beta):
        p = np.array(data[0:3])
        q = np.array(data[3:6])
        v = np.array(data[6:9])
        w = np.array(data[9:12])
        left = pair(Covector(alpha * p + beta * q), Vector(v))
        right = alpha * pair(Covector(p), Vector(v)) + beta * pair(Covector(q), Vector(v))
        assert left == pytest.approx(right, rel=1e-12, abs=1e-9)
        left_v = pair(Covector(p), Vector(alpha * v + beta * w))
        right_v = alpha * pair(Covector(p), Vector(v)) + beta * pair(Covector(p), Vector(w))
        assert left_v == pytest.approx(right_v, rel=1e-12, abs=1e-9)


class TestDyadToOperator:
    def test_off_diagonal(self):
        d = Dyad(Vector([1.0, 0.0]), Covector([0.0, 1.0]))
        assert np.array_equal(dyad_to_operator(d).entries, [[0.0, 1.0], [0.0, 0.0]])

    def test_corner(self):
        d = Dyad(Vector([1.0, 0.0]), Covector([1.0, 0.0]))
        assert np.array_equal(dyad_to_operator(d).entries, [[1.0, 0.0], [0.0, 0.0]])

    def test_action_matches_direct_evaluation(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 8))
            v = Vector(rng.standard_normal(n))
            p = Covector(rng.standard_normal(n))
            x = Vector(rng.standard_normal(n))
            via_matrix = dyad_to_operator(Dyad(v, p)).apply(x).coords
            direct = pair(p, x) * v.coords
            np.testing.assert_allclose(via_matrix, direct, rtol=1e-12, atol=1e-14)


class TestGram:
    def test_dual_bases_give_identity(self):
        dyads = DyadicPerturbation(
            (
                Dyad(basis_vector(2, 0), basis_covector(2, 0)),
                Dyad(basis_vector(2, 1), basis_covector(2, 1)),
            )
        )
        g = gram(dyads, [basis_vector(2, 0), basis_vector(2, 1)])
        assert np.array_equal(g.entries, np.eye(2))

    def test_repeated_covector(self):
        dyads = DyadicPerturbation(
            (
                Dyad(basis_vector(2, 0), basis_covector(2, 0)),
                Dyad(basis_vector(2, 1), basis_covector(2, 0)),
            )
        )
        g = gram(dyads, [basis_vector(2, 0), basis_vector(2, 1)])
        assert np.array_equal(g.entries, [[1.0, 0.0], [1.0, 0.0]])

    def test_matches_per_entry_pairing(self, rng):
        n, k = 5, 4
        dyads = DyadicPerturbation.from_arrays(
            rng.standard_normal((k, n)), rng.standard_normal((k, n))
        )
        images = random_vectors(rng, k, n)
        g = gram(dyads, images)
        for a in range(k):
            for b in range(k):
                assert g.entries[a, b] == pytest.approx(
                    pair(dyads.dyads[a].covector, images[b]), rel=1e-15
                )

    def test_length_mismatch(self, rng):
        dyads = DyadicPerturbation.from_arrays(
            rng.standard_normal((3, 4)), rng.standard_normal((3, 4))
        )
        with pytest.raises(DimensionMismatch):
            gram(dyads, random_vectors(rng, 2, 4))


class TestWedgeEval:
    def test_single_pairing(self):
        assert wedge_eval([basis_covector(3, 0)], [basis_vector(3, 0)]) == 1.0

    def test_determinant_orientation(self):
        covs = [basis_covector(2, 0), basis_covector(2, 1)]
        assert wedge_eval(covs, [basis_vector(2, 0), basis_vector(2, 1)]) == 1.0
        assert wedge_eval(covs, [basis_vector(2, 1), basis_vector(2, 0)]) == -1.0

    def test_repeated_covector_vanishes(self):
        covs = [basis_covector(2, 0), basis_covector(2, 0)]
        vecs = [basis_vector(2, 0), basis_vector(2, 1)]
        assert wedge_eval(covs, vecs) == 0.0

    def test_length_one_equals_pair(self, rng):
        p = Covector(rng.standard_normal(5))
        v = Vector(rng.standard_normal(5))
        assert wedge_eval([p], [v]) == pair(p, v)

    def test_matches_permutation_expansion(self, rng):
        for _ in range(25):
            covs = random_covectors(rng, 3, 5)
            vecs = random_vectors(rng, 3, 5)
            fast = wedge_eval(covs, vecs)
            brute = wedge_bruteforce(covs, vecs)
            scale = max(1.0, abs(brute))
            assert abs(fast - brute) <= 1e-11 * scale

    def test_swap_flips_sign_exactly(self, rng):
        covs = random_covectors(rng, 3, 6)
        vecs = random_vectors(rng, 3, 6)
        base = wedge_eval(covs, vecs)
        swapped_c = [covs[1], covs[0], covs[2]]
        swapped_v = [vecs[0], vecs[2], vecs[1]]
        assert wedge_eval(swapped_c, vecs) == pytest.approx(-base, rel=1e-12)
        assert wedge_eval(covs, swapped_v) == pytest.approx(-base, rel=1e-12)

    def test_dependent_family_vanishes(self, rng):
        for _ in range(15):
            n = 6
            covs = random_covectors(rng, 3, n)
            v1, v2 = random_vectors(rng, 2, n)
            v3 = Vector(2.0 * v1.coords - 0.5 * v2.coords)
            scale = np.prod([np.linalg.norm(c.coords) for c in covs]) * np.prod(
                [np.linalg.norm(v.coords) for v in (v1, v2, v3)]
            )
            assert abs(wedge_eval(covs, [v1, v2, v3])) <= 1e-12 * max(1.0, scale)

    def test_more_factors_than_dimensions_is_exactly_zero(self, rng):
        covs = random_covectors(rng, 3, 2)
        vecs = random_vectors(rng, 3, 2)
        assert wedge_eval(covs, vecs) == 0.0

    def test_empty_family_rejected(self):
        with pytest.raises(ValueError):
            wedge_eval([], [])

    def test_length_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            wedge_eval(random_covectors(rng, 2, 4), random_vectors(rng, 3, 4))


class TestPrincipalMinors:
    def test_reproduces_wedge_on_subfamilies(self, rng):
        n, k = 6, 4
        vecs = random_vectors(rng, k, n)
        dyads = DyadicPerturbation(
            tuple(Dyad(v, Covector(rng.standard_normal(n))) for v in vecs)
        )
        g = gram(dyads, vecs)
        import itertools
        import math

        for size in (1, 2, 3):
            expected = math.fsum(
                wedge_eval(
                    [dyads.dyads[j].covector for j in subset],
                    [vecs[j] for j in subset],
                )
                for subset in itertools.combinations(range(k), size)
            )
            got = principal_minor_sum(g, size)
            assert got == pytest.approx(expected, rel=1e-11, abs=1e-12)

    def test_oversized_minor_is_zero(self, rng):
        g = GramMatrix(rng.standard_normal((3, 3)))
        assert principal_minor_sum(g, 4) == 0.0

    def test_size_must_be_positive(self, rng):
        g = GramMatrix(rng.standard_normal((3, 3)))
        with pytest.raises(ValueError):
            principal_minor_sum(g, 0)


def test_perturbation_to_operator_matches_dyad_sum(rng):
    n, k = 5, 3
    dyads = DyadicPerturbation.from_arrays(
        rng.standard_normal((k, n)), rng.standard_normal((k, n))
    )
    total = sum(dyad_to_operator(d).entries for d in dyads.dyads)
    np.testing.assert_allclose(dyads.to_operator().entries, total, rtol=1e-14)
