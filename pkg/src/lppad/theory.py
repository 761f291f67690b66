"""Closed-form prediction error theory on a Gaussian process model.

Model the signal encountered while padding as a stationary zero-mean, unit
variance Gaussian process with Gaussian correlation ``kappa(d) =
exp(-d^2 / (2 sigma^2))``, where ``sigma`` acts as a feature size.  A padding
rule that predicts ``x[0]`` as ``sum_i a_i x[-i]`` then has a closed-form
normalized mean squared error

    NMSE = sum_ij a_i a_j kappa(j - i),    a_0 = -1,

which ranks the classic extrapolation rules against optimal linear
predictors of a given order across feature sizes.  The optimal predictors
solve a Toeplitz system, done here by Levinson recursion with a
ridge-regularized dense fallback when the recursion breaks down.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

from .pad import lagrange_coefficients

#: Methods with an error curve on the Gaussian process model.
THEORY_METHODS = ("zero", "repl", "extr2", "extr3", "lp1", "lp2", "lp3")

#: Reflection magnitude past which the Levinson recursion is abandoned.
LEVINSON_TOL = 1e-12

#: Diagonal loading for the dense fallback solve.
LEVINSON_RIDGE = 1e-10

#: Largest window generated by exact covariance factorization.
_EXACT_SAMPLER_LIMIT = 128


@dataclass(frozen=True)
class NmseCurve:
    """NMSE samples of one method over a feature size grid."""

    method: str
    sigma: np.ndarray
    nmse: np.ndarray
    stderr: np.ndarray | None = None


def gaussian_kernel(d, sigma: float):
    """Correlation ``exp(-d^2 / (2 sigma^2))`` at integer or real distance."""
    if sigma <= 0:
        raise ValueError(f"feature size must be positive, got {sigma}")
    d = np.asarray(d, dtype=np.float64)
    out = np.exp(-(d * d) / (2.0 * sigma * sigma))
    return float(out) if out.ndim == 0 else out


def theoretical_nmse(rule, sigma: float) -> float:
    """Quadratic form ``a K a`` of an extended rule ``(-1, a1..aP)``."""
    a = _as_rule(rule)
    idx = np.arange(len(a))
    k = gaussian_kernel(idx[:, None] - idx[None, :], sigma)
    return float(a @ k @ a)


def levinson_optimal(p: int, sigma: float) -> np.ndarray:
    """Optimal order-p predictor coefficients on the Gaussian process model.

    Solves the Toeplitz normal equations with autocorrelation ``kappa`` by
    Levinson recursion.  When a reflection coefficient reaches magnitude
    ``1 - LEVINSON_TOL`` (the system is numerically singular) the recursion
    is abandoned for a dense solve with ``LEVINSON_RIDGE`` diagonal loading,
    with a warning.
    """
    if p < 1:
        raise ValueError(f"predictor order must be positive, got {p}")
    r = gaussian_kernel(np.arange(p + 1), sigma)
    a = np.zeros(0)
    energy = r[0]
    for m in range(1, p + 1):
        acc = r[m] - np.dot(a, r[m - 1 : 0 : -1])
        if energy <= 0.0:
            return _levinson_fallback(p, r)
        k = acc / energy
        if abs(k) >= 1.0 - LEVINSON_TOL:
            return _levinson_fallback(p, r)
        a = np.concatenate([a - k * a[::-1], [k]])
        energy *= 1.0 - k * k
    return a


def _levinson_fallback(p: int, r: np.ndarray) -> np.ndarray:
    warnings.warn(
        f"Levinson recursion broke down at order {p}; "
        f"solving densely with ridge {LEVINSON_RIDGE:g}",
        RuntimeWarning,
        stacklevel=3,
    )
    idx = np.arange(1, p + 1)
    lhs = r[np.abs(idx[:, None] - idx[None, :])] + LEVINSON_RIDGE * np.eye(p)
    return np.linalg.solve(lhs, r[1 : p + 1])


def method_rule(method: str, sigma: float) -> np.ndarray:
    """Extended coefficient vector ``(-1, a1..aP)`` of a theory method.

    The classic rules are feature size independent (zero predicts 0,
    replication copies, extrN extrapolates polynomially); the ``lpP`` rules
    are the optimal order-P predictors at the given feature size.
    """
    if method == "zero":
        return np.array([-1.0])
    if method == "repl":
        return np.concatenate([[-1.0], lagrange_coefficients(1)])
    if method.startswith("extr"):
        return np.concatenate([[-1.0], lagrange_coefficients(int(method[4:]))])
    if method.startswith("lp") and method[2:].isdigit():
        return np.concatenate([[-1.0], levinson_optimal(int(method[2:]), sigma)])
    raise ValueError(f"unknown theory method {method!r}; supported: {', '.join(THEORY_METHODS)}")


def sample_gaussian_process(n: int, sigma: float, seed: int, draws: int | None = None):
    """Zero-mean unit-variance draws with Gaussian correlation ``kappa``.

    Short windows (n <= 128) are generated exactly by factorizing the
    covariance matrix.  Longer sequences convolve white noise with a
    discretized Gaussian and carry its normalized discrete autocorrelation,
    a close approximation of ``kappa`` once sigma spans a few samples.
    Returns shape ``(n,)``, or ``(draws, n)`` when ``draws`` is given.
    """
    if n < 1:
        raise ValueError(f"window length must be positive, got {n}")
    if sigma <= 0:
        raise ValueError(f"feature size must be positive, got {sigma}")
    rng = np.random.default_rng(seed)
    count = 1 if draws is None else draws
    if n <= _EXACT_SAMPLER_LIMIT:
        idx = np.arange(n)
        cov = gaussian_kernel(idx[:, None] - idx[None, :], sigma)
        eigval, eigvec = np.linalg.eigh(cov)
        factor = eigvec * np.sqrt(np.clip(eigval, 0.0, None))
        out = rng.standard_normal((count, n)) @ factor.T
    else:
        taps = int(np.ceil(8.0 * sigma)) | 1
        half = taps // 2
        kern = np.exp(-np.arange(-half, half + 1) ** 2 / (sigma * sigma))
        kern /= np.sqrt(np.sum(kern * kern))
        period = _fft.next_fast_len(n + taps)
        kpad = np.zeros(period)
        kpad[:taps] = kern
        noise = rng.standard_normal((count, period))
        spec = _fft.rfft(noise, axis=1) * _fft.rfft(kpad)
        out = _fft.irfft(spec, n=period, axis=1)[:, :n]
    return out[0] if draws is None else out


def empirical_nmse(rule, sigma: float, trials: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate and standard error of a rule's NMSE.

    Each trial draws one window of ``len(rule)`` consecutive process samples
    and evaluates the squared prediction error ``(a . window)^2``.
    """
    a = _as_rule(rule)
    if trials < 2:
        raise ValueError(f"need at least 2 trials, got {trials}")
    windows = sample_gaussian_process(len(a), sigma, seed, draws=trials)
    sq = (windows @ a) ** 2
    return float(sq.mean()), float(sq.std(ddof=1) / np.sqrt(trials))


def default_sigma_grid(points: int = 24, lo: float = 0.25, hi: float = 8.0) -> np.ndarray:
    """Log-spaced feature size grid used for the standard curves."""
    if points < 1 or lo <= 0 or hi < lo:
        raise ValueError(f"bad grid spec: {points} points in [{lo}, {hi}]")
    return np.geomspace(lo, hi, points)


def nmse_curves(
    sigmas: np.ndarray | None = None, methods: tuple[str, ...] | None = None
) -> list[NmseCurve]:
    """Theoretical NMSE curves for the requested methods."""
    grid = default_sigma_grid() if sigmas is None else np.asarray(sigmas, dtype=np.float64)
    out = []
    for method in methods or THEORY_METHODS:
        vals = np.array([theoretical_nmse(method_rule(method, s), s) for s in grid])
        out.append(NmseCurve(method=method, sigma=grid, nmse=vals))
    return out


def empirical_curves(
    sigmas: np.ndarray,
    methods: tuple[str, ...],
    trials: int,
    seed: int,
) -> list[NmseCurve]:
    """Monte-Carlo NMSE curves with per-point standard errors.

    Every (method, sigma) cell is seeded independently from ``seed`` and the
    cell's position, so results do not depend on evaluation order.
    """
    grid = np.asarray(sigmas, dtype=np.float64)
    out = []
    for mi, method in enumerate(methods):
        est = np.empty(len(grid))
        err = np.empty(len(grid))
        for si, s in enumerate(grid):
            est[si], err[si] = empirical_nmse(
                method_rule(method, s), s, trials, seed + 1009 * mi + si
            )
        out.append(NmseCurve(method=method, sigma=grid, nmse=est, stderr=err))
    return out


def write_curves_csv(curves: list[NmseCurve], path) -> None:
    """Write curves as ``method,sigma,nmse[,stderr]`` rows.

    ``path`` may be a filesystem path or an open text stream.  The stderr
    column appears when any curve carries standard errors; rows of purely
    theoretical curves leave it empty.  Values are written with 17
    significant digits so they round-trip through float64.
    """
    with_err = any(c.stderr is not None for c in curves)
    header = ["method", "sigma", "nmse"] + (["stderr"] if with_err else [])

    def emit(fh):
        writer = csv.writer(fh)
        writer.writerow(header)
        for c in curves:
            for i in range(len(c.sigma)):
                row = [c.method, f"{c.sigma[i]:.17g}", f"{c.nmse[i]:.17g}"]
                if with_err:
                    row.append("" if c.stderr is None else f"{c.stderr[i]:.17g}")
                writer.writerow(row)

    if hasattr(path, "write"):
        emit(path)
    else:
        with open(path, "w", newline="") as fh:
            emit(fh)


def _as_rule(rule) -> np.ndarray:
    a = np.asarray(rule, dtype=np.float64)
    if a.ndim != 1 or len(a) < 1 or a[0] != -1.0:
        raise ValueError(f"extended rule must be 1-d and start with -1, got {a!r}")
    return a
