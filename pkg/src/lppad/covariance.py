"""Covariance-method least squares fit of prediction coefficients.

The statistics ``r_ij`` average products of pixel pairs over the set of base
coordinates whose neighborhood accesses stay inside the raster.  Minimizing
the mean squared prediction error over that set yields the normal equations

    sum_j a_j r_ij = r_0i        for i = 1..P,

solved in closed form for P in {1, 2} and by a ridge-stabilized Cholesky
factorization for general P.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .geometry import Neighborhood, ValidRegion, valid_region

#: Diagonal loading applied by default in the general solver.
DEFAULT_RIDGE = 1e-7


class FitError(Exception):
    """Raised when prediction coefficients cannot be estimated."""


def covariance_statistics(
    plane: np.ndarray, nbhd: Neighborhood, region: ValidRegion | None = None
) -> np.ndarray:
    """Symmetric matrix of averaged products ``r_ij`` for one channel plane.

    ``plane`` must already have its mean removed.  ``r_ij`` is the average of
    ``plane[(y, x) + h_i] * plane[(y, x) + h_j]`` over the valid region, which
    is computed from the plane's shape when not supplied.  Raises
    :class:`FitError` on an empty region, signaling the caller to fall back.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError(f"expected a 2-d channel plane, got shape {plane.shape}")
    if region is None:
        region = valid_region(nbhd, *plane.shape)
    if region.is_empty:
        raise FitError(
            f"no valid base coordinates for a {plane.shape} plane; raster too small"
        )
    windows = np.stack(
        [
            plane[
                region.y_start + dy : region.y_stop + dy,
                region.x_start + dx : region.x_stop + dx,
            ].ravel()
            for dy, dx in nbhd.offsets
        ]
    )
    r = windows @ windows.T / region.count
    # Mirror the upper triangle so r_ij == r_ji holds bit for bit.
    upper = np.triu(r)
    return upper + np.triu(r, 1).T


def safe_divide(num: float, den: float) -> float:
    """Quotient with non-finite results (0/0, x/0, overflow) mapped to 0."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        q = np.divide(num, den)
    return float(q) if np.isfinite(q) else 0.0


def solve_p1(r: np.ndarray) -> np.ndarray:
    """Closed-form single-coefficient fit ``a1 = r01 / r11``."""
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (2, 2):
        raise ValueError(f"P=1 fit needs a 2x2 statistics matrix, got {r.shape}")
    return np.array([safe_divide(r[0, 1], r[1, 1])])


def solve_p2(r: np.ndarray) -> np.ndarray:
    """Closed-form two-coefficient fit by Cramer's rule.

    Degenerate systems (zero determinant, as on constant input) fall back to
    zero coefficients through the safe divisions.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (3, 3):
        raise ValueError(f"P=2 fit needs a 3x3 statistics matrix, got {r.shape}")
    det = r[1, 1] * r[2, 2] - r[1, 2] ** 2
    a1 = safe_divide(r[0, 1] * r[2, 2] - r[0, 2] * r[1, 2], det)
    a2 = safe_divide(r[0, 2] * r[1, 1] - r[0, 1] * r[1, 2], det)
    return np.array([a1, a2])


def solve_general(r: np.ndarray, ridge: float = DEFAULT_RIDGE) -> np.ndarray:
    """Solve the normal equations for any P via Cholesky factorization.

    The predictor block ``r[1:, 1:]`` gets ``ridge`` added to its diagonal
    before factorization.  Raises :class:`FitError` when the loaded matrix
    still fails to factorize; callers fall back to zero coefficients.
    """
    r = np.asarray(r, dtype=np.float64)
    p = r.shape[0] - 1
    if p < 1 or r.shape != (p + 1, p + 1):
        raise ValueError(f"statistics matrix must be square and at least 2x2, got {r.shape}")
    lhs = r[1:, 1:] + ridge * np.eye(p)
    try:
        factor = cho_factor(lhs, lower=True)
    except np.linalg.LinAlgError as exc:
        raise FitError(f"normal equations not positive definite: {exc}") from exc
    return cho_solve(factor, r[0, 1:])
