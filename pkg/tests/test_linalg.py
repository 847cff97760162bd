import numpy as np
import pytest

from oracles import random_orthogonal_qr
from ultradense.errors import DegenerateMatrix, InvalidDimension, InvalidMatrix
from ultradense.linalg import (
    is_orthogonal,
    nearest_orthogonal,
    orthogonality_error,
    random_orthogonal,
    svd,
)


def rotation_2d(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


class TestSvd:
    def test_identity(self):
        u, s, v = svd(np.eye(3))
        assert np.allclose(s, [1.0, 1.0, 1.0])
        assert np.allclose(u @ np.diag(s) @ v.T, np.eye(3))

    def test_diagonal(self):
        m = np.diag([3.0, 2.0])
        u, s, v = svd(m)
        assert np.allclose(s, [3.0, 2.0])
        # factors of a diagonal matrix are signed permutations
        assert np.allclose(np.abs(u), np.eye(2), atol=1e-12)
        assert np.allclose(np.abs(v), np.eye(2), atol=1e-12)
        assert np.allclose(u @ np.diag(s) @ v.T, m)

    def test_reconstruction_random(self):
        m = np.random.default_rng(7).standard_normal((5, 5))
        u, s, v = svd(m)
        err = np.linalg.norm(m - u @ np.diag(s) @ v.T)
        assert err <= 1e-10 * max(1.0, np.linalg.norm(m))

    def test_factor_invariants(self):
        for seed in range(10):
            m = np.random.default_rng(seed).standard_normal((6, 6))
            u, s, v = svd(m)
            assert orthogonality_error(u) <= 1e-10
            assert orthogonality_error(v) <= 1e-10
            assert np.all(s >= 0)
            assert np.all(np.diff(s) <= 0)

    def test_non_square_rejected(self):
        with pytest.raises(InvalidMatrix):
            svd(np.ones((2, 3)))

    def test_non_finite_rejected(self):
        m = np.eye(3)
        m[1, 1] = np.nan
        with pytest.raises(InvalidMatrix):
            svd(m)


class TestNearestOrthogonal:
    def test_fixed_point_on_orthogonal_input(self):
        r = rotation_2d(0.7)
        assert np.linalg.norm(nearest_orthogonal(r) - r) <= 1e-10
        q = random_orthogonal(6, seed=3)
        assert np.linalg.norm(nearest_orthogonal(q) - q) <= 1e-10

    def test_positive_diagonal_maps_to_identity(self):
        assert np.allclose(nearest_orthogonal(np.diag([2.0, 0.5])), np.eye(2), atol=1e-12)

    def test_result_is_orthogonal(self):
        for seed in range(20):
            m = np.random.default_rng(seed).standard_normal((4, 4))
            assert orthogonality_error(nearest_orthogonal(m)) <= 1e-10

    def test_idempotent(self):
        m = np.random.default_rng(5).standard_normal((5, 5))
        q1 = nearest_orthogonal(m)
        q2 = nearest_orthogonal(q1)
        assert np.linalg.norm(q2 - q1) <= 1e-10

    def test_closer_than_sampled_orthogonal_matrices(self):
        # small version of the minimality check; the full-scale one is in
        # the acceptance suite
        for seed in range(10):
            rng = np.random.default_rng(seed)
            m = rng.standard_normal((4, 4))
            best = np.linalg.norm(m - nearest_orthogonal(m))
            for _ in range(100):
                r = random_orthogonal_qr(4, rng)
                assert best <= np.linalg.norm(m - r)

    def test_rank_deficient_rejected(self):
        with pytest.raises(DegenerateMatrix):
            nearest_orthogonal(np.diag([3.0, 2.0, 0.0]))


class TestRandomOrthogonal:
    def test_one_dimensional(self):
        for seed in (0, 1, 2, 3):
            q = random_orthogonal(1, seed)
            assert q.shape == (1, 1)
            assert abs(abs(q[0, 0]) - 1.0) <= 1e-12

    def test_deterministic(self):
        a = random_orthogonal(4, seed=7)
        b = random_orthogonal(4, seed=7)
        assert np.array_equal(a, b)

    def test_orthogonality(self):
        assert orthogonality_error(random_orthogonal(8, seed=1)) <= 1e-10

    def test_seeds_differ(self):
        assert not np.allclose(random_orthogonal(4, 1), random_orthogonal(4, 2))

    def test_zero_dimension_rejected(self):
        with pytest.raises(InvalidDimension):
            random_orthogonal(0, seed=1)


class TestIsOrthogonal:
    def test_identity(self):
        assert is_orthogonal(np.eye(5), 1e-12)

    def test_scaled_identity_fails(self):
        # ||4I - I||_F over 2x2 is 3*sqrt(2) ~ 4.2426
        m = 2.0 * np.eye(2)
        assert not is_orthogonal(m, 1e-6)
        assert abs(orthogonality_error(m) - np.sqrt(2 * 9.0)) <= 1e-12

    def test_rotation(self):
        assert is_orthogonal(rotation_2d(0.3), 1e-12)


class TestIsometry:
    def test_distances_preserved(self):
        rng = np.random.default_rng(11)
        for q in (random_orthogonal(7, seed=2), nearest_orthogonal(rng.standard_normal((7, 7)))):
            for _ in range(50):
                a = rng.standard_normal(7)
                b = rng.standard_normal(7)
                before = np.linalg.norm(a - b)
                after = np.linalg.norm(q @ a - q @ b)
                assert abs(after - before) <= 1e-9 * (1.0 + before)
