import math

import numpy as np
import pytest

from bistochastic.constructors import (
    AnatomyPartition,
    anatomy_matrix,
    circulant_matrix,
    constant_circulant,
    contiguous_partition,
    dp_matrix,
    perfect_secrecy_matrix,
    product_matrix,
    tridiagonal_matrix,
)
from bistochastic.exceptions import (
    AlphaConstraintViolated,
    InvalidEpsilon,
    InvalidPartition,
    InvalidProbability,
    InvalidSize,
    NotADistribution,
)
from bistochastic.matrix import validate


class TestDP:
    def test_epsilon_zero_is_uniform(self):
        np.testing.assert_array_equal(dp_matrix(3, 0).entries, np.full((3, 3), 1 / 3))

    def test_epsilon_two(self):
        a = dp_matrix(3, 2).entries
        e2 = math.exp(2)
        assert a[0, 0] == pytest.approx(e2 / (2 + e2))
        assert a[0, 0] == pytest.approx(0.7869, abs=1e-4)
        assert a[0, 1] == pytest.approx(0.1065, abs=1e-4)

    def test_r12_eps1(self):
        a = dp_matrix(12, 1).entries
        # e / (11 + e) and 1 / (11 + e)
        assert a[0, 0] == pytest.approx(0.198150, abs=1e-6)
        assert a[3, 7] == pytest.approx(0.072895, abs=1e-6)

    @pytest.mark.parametrize("r", [0, 1, 2.5])
    def test_bad_size(self, r):
        with pytest.raises(InvalidSize):
            dp_matrix(r, 1.0)

    @pytest.mark.parametrize("eps", [-0.1, math.inf, math.nan])
    def test_bad_epsilon(self, eps):
        with pytest.raises(InvalidEpsilon):
            dp_matrix(3, eps)

    @pytest.mark.parametrize("r", [2, 3, 7, 12])
    def test_circulant_form(self, r):
        for eps in (0.0, 0.5, 2.0, 6.0):
            e = math.exp(eps)
            np.testing.assert_allclose(
                dp_matrix(r, eps).entries, constant_circulant(r, e / (r - 1 + e)).entries, rtol=0, atol=1e-15
            )

    def test_zero_equals_secrecy(self):
        for r in (2, 3, 12):
            assert dp_matrix(r, 0) == perfect_secrecy_matrix(r)


class TestSecrecy:
    def test_values(self):
        np.testing.assert_array_equal(perfect_secrecy_matrix(1).entries, [[1.0]])
        assert np.all(perfect_secrecy_matrix(12).entries == 1 / 12)

    def test_bad_size(self):
        with pytest.raises(InvalidSize):
            perfect_secrecy_matrix(0)


class TestAnatomy:
    def test_two_blocks(self):
        expected = [[0.5, 0.5, 0, 0], [0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5], [0, 0, 0.5, 0.5]]
        np.testing.assert_array_equal(anatomy_matrix([[0, 1], [2, 3]]).entries, expected)

    def test_single_class_is_secrecy(self):
        assert anatomy_matrix([list(range(5))]) == perfect_secrecy_matrix(5)

    def test_non_contiguous_classes(self):
        a = anatomy_matrix([[0, 2], [1, 3]]).entries
        assert a[0, 2] == 0.5 and a[0, 1] == 0

    @pytest.mark.parametrize("classes", [[[0, 1], [1, 2]], [[0, 2]], [[0], []], []])
    def test_invalid_partitions(self, classes):
        with pytest.raises(InvalidPartition):
            anatomy_matrix(classes)

    def test_idempotent(self):
        a = anatomy_matrix(AnatomyPartition([[0, 3, 4], [1], [2, 5]])).entries
        np.testing.assert_allclose(a @ a, a, atol=1e-15)

    def test_contiguous_partition_remainder(self):
        p = contiguous_partition(12, 5)
        assert [len(c) for c in p.classes] == [5, 7]
        assert [len(c) for c in contiguous_partition(12, 6).classes] == [6, 6]
        with pytest.raises(InvalidPartition):
            contiguous_partition(3, 4)


class TestCirculant:
    def test_identity(self):
        np.testing.assert_array_equal(circulant_matrix([1, 0, 0, 0]).entries, np.eye(4))

    def test_rotation_pattern(self):
        a = circulant_matrix([0.5, 0.3, 0.2]).entries
        np.testing.assert_allclose(a, [[0.5, 0.3, 0.2], [0.2, 0.5, 0.3], [0.3, 0.2, 0.5]])

    def test_uniform_first_row(self):
        np.testing.assert_allclose(circulant_matrix(np.full(6, 1 / 6)).entries, perfect_secrecy_matrix(6).entries)

    def test_not_a_distribution(self):
        with pytest.raises(NotADistribution):
            circulant_matrix([0.5, 0.6])

    def test_constant(self):
        a = constant_circulant(12, 0.9).entries
        assert np.all(np.diag(a) == 0.9)
        off = a[~np.eye(12, dtype=bool)]
        np.testing.assert_allclose(off, 0.1 / 11)
        np.testing.assert_array_equal(constant_circulant(4, 1.0).entries, np.eye(4))
        np.testing.assert_allclose(constant_circulant(4, 0.25).entries, 0.25)

    @pytest.mark.parametrize("p", [-0.1, 1.1])
    def test_bad_probability(self, p):
        with pytest.raises(InvalidProbability):
            constant_circulant(4, p)


class TestTridiagonal:
    def test_three_by_three(self):
        expected = [[0.9, 0.1, 0], [0.1, 0.8, 0.1], [0, 0.1, 0.9]]
        np.testing.assert_allclose(tridiagonal_matrix([0.1, 0.1]).entries, expected, atol=1e-15)

    def test_zero_alphas_identity(self):
        np.testing.assert_array_equal(tridiagonal_matrix([0.0] * 6).entries, np.eye(7))

    def test_varying_alphas(self):
        a = tridiagonal_matrix([0.2, 0.5, 0.3]).entries
        np.testing.assert_allclose(np.diag(a), [0.8, 0.3, 0.2, 0.7])
        assert np.array_equal(a, a.T)

    def test_constraint(self):
        with pytest.raises(AlphaConstraintViolated) as info:
            tridiagonal_matrix([0.3, 0.6, 0.5])
        assert info.value.index == 2
        with pytest.raises(AlphaConstraintViolated):
            tridiagonal_matrix([-0.1])

    def test_symmetric(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            al = rng.uniform(0, 0.5, size=int(rng.integers(1, 15)))
            a = tridiagonal_matrix(al).entries
            assert np.array_equal(a, a.T)


def test_all_constructors_validate_strictly():
    rng = np.random.default_rng(5)
    built = [
        dp_matrix(9, 1.7),
        perfect_secrecy_matrix(9),
        anatomy_matrix(contiguous_partition(9, 2)),
        circulant_matrix(rng.dirichlet(np.ones(9))),
        constant_circulant(9, 0.4),
        tridiagonal_matrix(rng.uniform(0, 0.5, 8)),
    ]
    for m in built:
        assert m.super_slack == 0
        validate(m.entries, tolerance=1e-12, super_slack=0.0)


def test_product_matrix_is_kronecker():
    a, b = dp_matrix(2, 1.0), dp_matrix(3, 0.5)
    np.testing.assert_allclose(product_matrix([a, b]).entries, np.kron(a.entries, b.entries))
