"""Pole stabilization for one-dimensional recursive prediction filters.

Prediction coefficients fitted by the covariance method can place poles of
the synthesis filter ``H(z) = 1 / (1 - sum_k a_k z^-k)`` outside the unit
circle, which makes the padding recursion diverge.  Reciprocating the radius
of every offending pole (keeping its angle) yields a stable filter with the
same magnitude response shape up to a constant factor, so the padding keeps
its spectral character while decaying instead of exploding.

Coefficient arrays hold ``a[1..P]`` in their last axis; leading axes are
treated as a batch.  Inputs that are already stable are returned unchanged,
which makes stabilization exactly idempotent.

Boundedness caveat: stability bounds the zero-input recursion's asymptote,
not its transient.  For P = 1 the output never exceeds the initial
amplitude.  For P = 2 a conjugate pair of radius rho close to 1 and angle
close to 0 or pi amplifies generic initial history by roughly
1 / |sin(angle)| before decaying, which is unbounded over the coefficient
plane; empirically the amplification stays below 64 over 1e5 uniform draws
from [-5, 5]^2 and every trajectory decays (no divergence).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PolePair:
    """Poles of a first- or second-order synthesis filter.

    Real poles are listed explicitly; a conjugate pair is stored as its
    squared magnitude and shared real part.
    """

    real_poles: tuple[float, ...] | None = None
    conj_mag_sq: float | None = None
    conj_real: float | None = None

    @property
    def is_complex(self) -> bool:
        return self.real_poles is None

    @property
    def magnitudes(self) -> tuple[float, ...]:
        if self.is_complex:
            m = float(np.sqrt(self.conj_mag_sq))
            return (m, m)
        return tuple(abs(p) for p in self.real_poles)


def poles_of(a: np.ndarray) -> PolePair:
    """Poles of ``z^P - a1 z^(P-1) - ... - aP`` for P in {1, 2}."""
    a = np.asarray(a, dtype=np.float64)
    if a.shape == (1,):
        return PolePair(real_poles=(float(a[0]),))
    if a.shape != (2,):
        raise ValueError(f"pole analysis supports P in {{1, 2}}, got shape {a.shape}")
    a1, a2 = float(a[0]), float(a[1])
    disc = a1 * a1 + 4.0 * a2
    if disc < 0.0:
        return PolePair(conj_mag_sq=-a2, conj_real=0.5 * a1)
    root = np.sqrt(disc)
    return PolePair(real_poles=(0.5 * (a1 + root), 0.5 * (a1 - root)))


def stabilize_p1(a: np.ndarray) -> np.ndarray:
    """Reciprocate a single prediction coefficient when its pole is outside.

    The pole of the first-order filter is ``a1`` itself, so instability means
    ``|a1| > 1`` and the replacement is ``1 / a1``.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.shape[-1] != 1:
        raise ValueError(f"expected coefficient arrays of length 1, got {a.shape}")
    a1 = a[..., 0]
    unstable = np.abs(a1) > 1.0
    recip = 1.0 / np.where(unstable, a1, 1.0)
    return np.where(unstable, recip, a1)[..., None]


def stabilize_p2(a: np.ndarray) -> np.ndarray:
    """Reciprocate out-of-circle pole radii of a second-order filter.

    A conjugate pair has squared magnitude ``-a2``; when that exceeds 1 both
    poles are reciprocated at once, giving coefficients
    ``(-a1 / a2, 1 / a2)``.  Real poles are reciprocated individually and the
    coefficients re-expanded as ``a1 = p0 + p1``, ``a2 = -p0 p1``.  Poles on
    or inside the unit circle, including poles at exactly 1, are untouched.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.shape[-1] != 2:
        raise ValueError(f"expected coefficient arrays of length 2, got {a.shape}")
    a1, a2 = a[..., 0], a[..., 1]
    disc = a1 * a1 + 4.0 * a2
    is_complex = disc < 0.0

    # Conjugate pair: a2 is strictly negative there, so the guarded divisor
    # is only a dummy for lanes that never consume these values.
    conj_changed = is_complex & (-a2 > 1.0)
    safe_a2 = np.where(conj_changed, a2, 1.0)
    conj_a1 = -a1 / safe_a2
    conj_a2 = 1.0 / safe_a2

    root = np.sqrt(np.where(is_complex, 0.0, disc))
    p0 = 0.5 * (a1 + root)
    p1 = 0.5 * (a1 - root)
    p0_out = np.abs(p0) > 1.0
    p1_out = np.abs(p1) > 1.0
    p0_stab = np.where(p0_out, 1.0 / np.where(p0_out, p0, 1.0), p0)
    p1_stab = np.where(p1_out, 1.0 / np.where(p1_out, p1, 1.0), p1)

    real_changed = (~is_complex) & (p0_out | p1_out)
    real_a1 = p0_stab + p1_stab
    real_a2 = -(p0_stab * p1_stab) + 0.0

    out1 = np.where(conj_changed, conj_a1, np.where(real_changed, real_a1, a1))
    out2 = np.where(conj_changed, conj_a2, np.where(real_changed, real_a2, a2))
    return np.stack([out1, out2], axis=-1)


def stabilize(a: np.ndarray) -> np.ndarray:
    """Dispatch to the order-specific stabilizer; orders above 2 pass through.

    Higher-order fits in this package come from the autocorrelation method,
    whose windowed statistics keep the recursion well behaved without an
    explicit pole correction.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.shape[-1] == 1:
        return stabilize_p1(a)
    if a.shape[-1] == 2:
        return stabilize_p2(a)
    return a


def magnitude_response(a: np.ndarray, omega) -> np.ndarray:
    """``|H(e^{i omega})|`` of the all-pole filter with coefficients ``a``.

    Evaluates the formal expression ``1 / |1 - sum_k a_k e^{-i k omega}|``
    regardless of stability; a zero denominator yields ``inf``.  Batched
    coefficient arrays ``(..., P)`` and frequency grids broadcast to
    ``(..., len(omega))``.
    """
    a = np.asarray(a, dtype=np.float64)
    om = np.asarray(omega, dtype=np.float64)
    scalar_omega = om.ndim == 0
    om = np.atleast_1d(om)
    k = np.arange(1, a.shape[-1] + 1)
    basis = np.exp(-1j * k[:, None] * om[None, :])
    den = 1.0 - a @ basis
    with np.errstate(divide="ignore"):
        mag = 1.0 / np.abs(den)
    return mag[..., 0] if scalar_omega else mag


def gain_compensation(a_orig: np.ndarray, a_stab: np.ndarray, b0: float = 1.0) -> float:
    """Scale factor matching the stabilized filter's DC gain to the original.

    Returns ``b0 * (1 - sum(a_stab)) / (1 - sum(a_orig))``.  The padding
    engine does not apply it (prediction from real pixels already sets the
    local scale), but it is the natural companion when the stabilized filter
    is used for synthesis.
    """
    num = 1.0 - float(np.sum(np.asarray(a_stab, dtype=np.float64)))
    den = 1.0 - float(np.sum(np.asarray(a_orig, dtype=np.float64)))
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(b0 * np.divide(num, den))
