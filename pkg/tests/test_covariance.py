import numpy as np
import pytest

from lppad.covariance import (
    FitError,
    covariance_statistics,
    safe_divide,
    solve_general,
    solve_p1,
    solve_p2,
)
from lppad.geometry import ValidRegion, canonical_neighborhood, valid_region


def oracle_statistics(plane, nbhd):
    """Naive double-loop evaluation of the averaged products."""
    region = valid_region(nbhd, *plane.shape)
    n = len(nbhd.offsets)
    r = np.zeros((n, n))
    count = 0
    for y in range(region.y_start, region.y_stop):
        for x in range(region.x_start, region.x_stop):
            count += 1
            for i, (dyi, dxi) in enumerate(nbhd.offsets):
                for j, (dyj, dxj) in enumerate(nbhd.offsets):
                    r[i, j] += plane[y + dyi, x + dxi] * plane[y + dyj, x + dxj]
    return r / count


class TestCovarianceStatistics:
    def test_zero_plane(self):
        r = covariance_statistics(np.zeros((8, 8)), canonical_neighborhood(2, 3))
        assert np.all(r == 0.0)

    def test_alternating_rows(self):
        plane = np.array([[(-1.0) ** y] * 6 for y in range(6)])
        r = covariance_statistics(plane, canonical_neighborhood(1, 1))
        assert r[0, 0] == 1.0
        assert r[1, 1] == 1.0
        assert r[0, 1] == -1.0

    def test_matches_double_loop_oracle(self):
        rng = np.random.default_rng(11)
        plane = rng.standard_normal((8, 8))
        nbhd = canonical_neighborhood(2, 3)
        r = covariance_statistics(plane, nbhd)
        expected = oracle_statistics(plane, nbhd)
        assert np.abs(r - expected).max() <= 1e-12 * np.abs(expected).max()

    def test_exact_symmetry(self):
        rng = np.random.default_rng(3)
        for h, w in [(1, 1), (2, 1), (3, 3), (4, 5)]:
            plane = rng.standard_normal((12, 13))
            r = covariance_statistics(plane, canonical_neighborhood(h, w))
            assert np.array_equal(r, r.T)

    def test_empty_region_raises(self):
        with pytest.raises(FitError):
            covariance_statistics(np.ones((2, 3)), canonical_neighborhood(2, 3))

    def test_translation_leaves_statistics_bitwise(self):
        # Same pixel content under the region, different absolute position.
        rng = np.random.default_rng(8)
        plane = rng.standard_normal((10, 10))
        nbhd = canonical_neighborhood(2, 3)
        region = valid_region(nbhd, 10, 10)
        framed = rng.standard_normal((14, 14))
        framed[2:12, 2:12] = plane
        shifted = ValidRegion(
            region.y_start + 2, region.y_stop + 2,
            region.x_start + 2, region.x_stop + 2,
        )
        r1 = covariance_statistics(plane, nbhd, region)
        r2 = covariance_statistics(framed, nbhd, shifted)
        assert np.array_equal(r1, r2)


class TestSafeDivide:
    def test_ordinary(self):
        assert safe_divide(1.0, 2.0) == 0.5

    def test_division_by_zero(self):
        assert safe_divide(1.0, 0.0) == 0.0

    def test_zero_over_zero(self):
        assert safe_divide(0.0, 0.0) == 0.0

    def test_overflow(self):
        assert safe_divide(1e308, 1e-308) == 0.0


class TestClosedFormSolvers:
    def test_p1_direct(self):
        r = np.array([[1.0, 0.9], [0.9, 1.0]])
        assert solve_p1(r)[0] == 0.9

    def test_p1_degenerate(self):
        r = np.array([[1.0, 1.0], [1.0, 0.0]])
        assert solve_p1(r)[0] == 0.0

    def test_p1_exact_ar1_covariances(self):
        # Column process with autocovariance 0.8**d plugged in exactly.
        r = np.array([[1.0, 0.8], [0.8, 1.0]])
        assert solve_p1(r)[0] == pytest.approx(0.8, abs=1e-15)

    def test_p2_diagonal(self):
        r = np.array([[1.0, 0.5, 0.25], [0.5, 1.0, 0.0], [0.25, 0.0, 1.0]])
        assert solve_p2(r).tolist() == [0.5, 0.25]

    def test_p2_degenerate(self):
        r = np.array([[1.0, 0.5, 0.5], [0.5, 1.0, 1.0], [0.5, 1.0, 1.0]])
        assert solve_p2(r).tolist() == [0.0, 0.0]

    def test_p2_matches_dense_solve(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            m = rng.standard_normal((3, 5))
            r = m @ m.T / 5 + 0.1 * np.eye(3)
            got = solve_p2(r)
            expected = np.linalg.solve(r[1:, 1:], r[0, 1:])
            assert np.abs(got - expected).max() <= 1e-12

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            solve_p1(np.eye(3))
        with pytest.raises(ValueError):
            solve_p2(np.eye(2))


class TestSolveGeneral:
    def test_identity_block(self):
        r = np.eye(4)
        r[0, 1:] = [0.3, 0.1, 0.2]
        r[1:, 0] = [0.3, 0.1, 0.2]
        assert solve_general(r, ridge=0.0) == pytest.approx([0.3, 0.1, 0.2])

    def test_ridge_perturbation_bound_p1(self):
        r = np.array([[1.0, 0.7], [0.7, 2.0]])
        ridge = 1e-7
        exact = solve_p1(r)[0]
        loaded = solve_general(r, ridge=ridge)[0]
        bound = ridge * abs(r[0, 1]) / (r[1, 1] * (r[1, 1] + ridge))
        assert abs(loaded - exact) <= bound * (1 + 1e-12)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            m = rng.standard_normal((7, 12))
            r = m @ m.T / 12
            got = solve_general(r, ridge=0.0)
            expected = np.linalg.solve(r[1:, 1:], r[0, 1:])
            scale = max(np.abs(expected).max(), 1.0)
            assert np.abs(got - expected).max() <= 1e-8 * scale

    def test_agrees_with_closed_forms_at_zero_ridge(self):
        rng = np.random.default_rng(23)
        plane = rng.standard_normal((16, 16))
        plane -= plane.mean()
        r1 = covariance_statistics(plane, canonical_neighborhood(1, 1))
        r2 = covariance_statistics(plane, canonical_neighborhood(2, 1))
        assert np.abs(solve_p1(r1) - solve_general(r1, 0.0)).max() <= 1e-10
        assert np.abs(solve_p2(r2) - solve_general(r2, 0.0)).max() <= 1e-10

    def test_not_positive_definite_raises(self):
        r = np.eye(3)
        r[1, 1] = -1.0
        with pytest.raises(FitError):
            solve_general(r, ridge=0.0)


class TestLeastSquaresOptimality:
    def test_perturbations_never_improve(self):
        rng = np.random.default_rng(31)
        nbhd = canonical_neighborhood(2, 3)
        region_cache = {}
        for _ in range(10):
            plane = rng.standard_normal((8, 8))
            plane -= plane.mean()
            r = covariance_statistics(plane, nbhd)
            a = solve_general(r, ridge=0.0)
            region = region_cache.setdefault((8, 8), valid_region(nbhd, 8, 8))
            windows = np.stack(
                [
                    plane[
                        region.y_start + dy : region.y_stop + dy,
                        region.x_start + dx : region.x_stop + dx,
                    ].ravel()
                    for dy, dx in nbhd.offsets
                ]
            )

            def mse(coeffs):
                err = windows[0] - coeffs @ windows[1:]
                return float(err @ err) / windows.shape[1]

            base = mse(a)
            for i in range(len(a)):
                for delta in (1e-3, -1e-3):
                    bumped = a.copy()
                    bumped[i] += delta
                    assert mse(bumped) >= base - 1e-15
