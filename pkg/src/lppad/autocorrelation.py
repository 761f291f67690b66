"""Autocorrelation-method statistics for prediction fits.

Instead of averaging pixel products over the interior (which re-reads the
raster once per offset pair), the plane is tapered by a Tukey window, zero
padded, and treated as one period of a periodic signal.  Every statistic
``r_ij`` then reduces to a single periodic autocorrelation value at lag
``h_i - h_j``, available either by direct modular summation (cheap when few
lags are needed) or for all lags at once through the DFT of the squared
spectrum magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

from .geometry import Neighborhood

#: Fraction of the Tukey window spent in the cosine tapers (half per side).
TUKEY_ALPHA = 0.5


@dataclass(frozen=True)
class AutocorrelationMap:
    """Periodic autocorrelation values addressable by integer lag.

    Either ``dense`` holds the value for every lag modulo ``periods``, or
    ``table`` holds a subset of lags (keys reduced modulo ``periods``).
    """

    periods: tuple[int, int]
    dense: np.ndarray | None = None
    table: dict | None = None

    def lag(self, dy: int, dx: int) -> float:
        ny, nx = self.periods
        key = (dy % ny, dx % nx)
        if self.dense is not None:
            return float(self.dense[key])
        return self.table[key]


def tukey_taper(length: int) -> np.ndarray:
    """Symmetric Tukey window whose flat segment covers half the length.

    The first and last quarter of the samples follow raised-cosine tapers
    from 0 to 1; the middle half is identically 1.  A length of 1 gives the
    single sample 1.
    """
    if length < 1:
        raise ValueError(f"window length must be positive, got {length}")
    if length == 1:
        return np.ones(1)
    n = np.arange(length)
    edge = TUKEY_ALPHA * (length - 1) / 2
    w = np.ones(length)
    left = n < edge
    w[left] = 0.5 * (1 + np.cos(np.pi * (n[left] / edge - 1)))
    right = n > length - 1 - edge
    w[right] = 0.5 * (1 + np.cos(np.pi * ((n[right] - (length - 1)) / edge + 1)))
    return w


def prepare_windowed(plane: np.ndarray) -> np.ndarray:
    """Taper a mean-removed plane and zero pad it for periodic statistics.

    Rows and columns are multiplied by Tukey windows of the matching length,
    then the result is embedded at the origin of a zero array large enough
    that periodic correlation equals linear correlation (at least
    ``2n - 1`` per axis, rounded up to an efficient transform size).
    """
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError(f"expected a 2-d channel plane, got shape {plane.shape}")
    h, w = plane.shape
    tapered = plane * tukey_taper(h)[:, None] * tukey_taper(w)[None, :]
    ny = _fft.next_fast_len(2 * h - 1)
    nx = _fft.next_fast_len(2 * w - 1)
    out = np.zeros((ny, nx))
    out[:h, :w] = tapered
    return out


def autocorrelation_direct(
    padded: np.ndarray, lags: list[tuple[int, int]]
) -> AutocorrelationMap:
    """Periodic autocorrelation at the requested lags by modular summation."""
    padded = np.asarray(padded, dtype=np.float64)
    ny, nx = padded.shape
    table = {}
    for dy, dx in lags:
        key = (dy % ny, dx % nx)
        if key not in table:
            shifted = np.roll(padded, key, axis=(0, 1))
            table[key] = float(np.sum(padded * shifted))
    return AutocorrelationMap(periods=(ny, nx), table=table)


def autocorrelation_fft(padded: np.ndarray) -> AutocorrelationMap:
    """Periodic autocorrelation at every lag from the squared spectrum."""
    padded = np.asarray(padded, dtype=np.float64)
    spectrum = _fft.rfft2(padded)
    dense = _fft.irfft2(spectrum * np.conj(spectrum), s=padded.shape)
    return AutocorrelationMap(periods=padded.shape, dense=dense)


def covariance_from_autocorrelation(
    acmap: AutocorrelationMap, nbhd: Neighborhood
) -> np.ndarray:
    """Statistics matrix ``r_ij = R(h_i - h_j) / (Ny * Nx)``.

    Symmetry is exact because the matrix is filled from its upper triangle;
    the shared normalization constant cancels in the normal equations.
    """
    ny, nx = acmap.periods
    scale = 1.0 / (ny * nx)
    k = len(nbhd.offsets)
    r = np.zeros((k, k))
    for i in range(k):
        yi, xi = nbhd.offsets[i]
        for j in range(i, k):
            yj, xj = nbhd.offsets[j]
            r[i, j] = r[j, i] = acmap.lag(yi - yj, xi - xj) * scale
    return r
