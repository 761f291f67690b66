"""Raster padding by per-channel linear prediction and classic baselines.

The engine treats a raster as independent channels.  For the linear
prediction methods each channel is reduced to zero mean, a prediction model
is fitted per padding direction on the original pixels only, and the border
is grown one pixel front at a time: every new front pixel is the conditional
expectation given the pixels already present, which includes fronts generated
earlier.  Vertical passes run first across the original width; the lateral
passes then sweep the full padded height, so the corner blocks are filled by
lateral prediction from vertically padded columns.

Near the lateral ends of a front the centered predictor rectangle would hang
outside the raster.  There the predicted pixel slides sideways under the
rectangle (the rectangle stays flush with the raster edge, coefficients are
reused), which keeps the front at full width; equivalently, the outermost
feasible centered prediction is replicated into the remaining corner cells
of that front.

Classic methods: ``zero`` and ``repl`` defer to constant and edge padding,
``extrN`` extrapolates one step ahead through the nearest N pixels with
binomial weights, recursively, reusing previously generated fronts.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from math import comb

import numpy as np

from .autocorrelation import (
    autocorrelation_direct,
    autocorrelation_fft,
    covariance_from_autocorrelation,
    prepare_windowed,
)
from .covariance import (
    DEFAULT_RIDGE,
    FitError,
    covariance_statistics,
    solve_general,
    solve_p1,
    solve_p2,
)
from .geometry import PASS_ORDER, Direction, Neighborhood, canonical_neighborhood, rotate
from .stabilize import stabilize

#: Canonical method names accepted everywhere a method can be named.
CANONICAL_METHODS = (
    "zero",
    "repl",
    "extr2",
    "extr3",
    "lp1x1cs",
    "lp2x1",
    "lp2x1cs",
    "lp2x3",
    "lp2x5",
    "lp3x3",
    "lp4x5",
    "lp6x7",
)

# Rectangle shape and fitting route per linear prediction method.  The "cs"
# variants fit by the covariance method and stabilize the result; the rest
# fit by the autocorrelation method, directly summed for the small shapes
# and through the FFT for the large ones.
_LP_METHODS = {
    "lp1x1cs": ((1, 1), "cov"),
    "lp2x1cs": ((2, 1), "cov"),
    "lp2x1": ((2, 1), "ac-direct"),
    "lp2x3": ((2, 3), "ac-direct"),
    "lp2x5": ((2, 5), "ac-fft"),
    "lp3x3": ((3, 3), "ac-fft"),
    "lp4x5": ((4, 5), "ac-fft"),
    "lp6x7": ((6, 7), "ac-fft"),
}

_EXTR_RE = re.compile(r"^extr(\d+)$")


@dataclass(frozen=True)
class PaddingMethod:
    """Parsed padding method.

    ``kind`` is one of ``zero``, ``repl``, ``extr``, ``lp``; ``order`` is the
    extrapolation point count for ``extr``; ``shape`` and ``fit`` describe
    the predictor rectangle and fitting route for ``lp``.
    """

    name: str
    kind: str
    order: int = 0
    shape: tuple[int, int] | None = None
    fit: str | None = None


def parse_method(name: str) -> PaddingMethod:
    """Resolve a method name.

    ``extrN`` is accepted for any N >= 0; ``extr0`` behaves exactly like
    ``zero`` and ``extr1`` exactly like ``repl``.  Unknown names raise
    ``ValueError`` listing the canonical methods.
    """
    if name == "zero":
        return PaddingMethod(name="zero", kind="zero")
    if name == "repl":
        return PaddingMethod(name="repl", kind="repl")
    m = _EXTR_RE.match(name)
    if m:
        return PaddingMethod(name=name, kind="extr", order=int(m.group(1)))
    if name in _LP_METHODS:
        shape, fit = _LP_METHODS[name]
        return PaddingMethod(name=name, kind="lp", shape=shape, fit=fit)
    raise ValueError(
        f"unknown padding method {name!r}; supported: {', '.join(CANONICAL_METHODS)}"
    )


@dataclass(frozen=True)
class PadAmounts:
    """Border widths in pixels per side."""

    top: int
    bottom: int
    left: int
    right: int

    def __post_init__(self) -> None:
        for side in ("top", "bottom", "left", "right"):
            v = getattr(self, side)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{side} amount must be a non-negative integer, got {v!r}")

    @classmethod
    def uniform(cls, n: int) -> "PadAmounts":
        return cls(n, n, n, n)


@dataclass(frozen=True)
class ARModel:
    """Fitted prediction model for one channel and direction.

    ``coefficients`` follow the canonical predictor order of the rectangle;
    ``neighborhood`` holds the spatial offsets after rotation to the model's
    direction; ``mean`` is the channel mean removed before fitting.
    """

    coefficients: np.ndarray
    mean: float
    neighborhood: Neighborhood


def lagrange_coefficients(n: int) -> np.ndarray:
    """One-step-ahead polynomial extrapolation weights, nearest point first.

    Fitting a degree ``n - 1`` polynomial through the last ``n`` samples and
    evaluating one step beyond gives the alternating binomial weights
    ``(-1)^(k-1) C(n, k)``; for n = 1, 2, 3 these are (1), (2, -1) and
    (3, -3, 1).
    """
    if n < 0:
        raise ValueError(f"point count must be non-negative, got {n}")
    return np.array([(-1.0) ** (k - 1) * comb(n, k) for k in range(1, n + 1)])


# Plane rotations taking each padding direction to the canonical downward
# frame and back.  Offsets transform exactly like geometry.rotate.
_TO_CANONICAL = {
    Direction.DOWN: lambda p: p,
    Direction.UP: lambda p: np.rot90(p, 2),
    Direction.RIGHT: lambda p: np.rot90(p, -1),
    Direction.LEFT: lambda p: np.rot90(p, 1),
}
_FROM_CANONICAL = {
    Direction.DOWN: lambda p: p,
    Direction.UP: lambda p: np.rot90(p, 2),
    Direction.RIGHT: lambda p: np.rot90(p, 1),
    Direction.LEFT: lambda p: np.rot90(p, -1),
}


def fit_direction(plane: np.ndarray, method: PaddingMethod | str, direction: Direction) -> ARModel:
    """Fit a linear prediction model for padding one channel toward a side.

    The plane is reduced to zero mean, rotated so the requested direction
    points down, and fitted with the method's route: covariance statistics
    with closed-form solve and pole stabilization for the "cs" methods,
    windowed periodic autocorrelation with a ridge-stabilized solve for the
    rest.  Fit breakdowns (empty interior, indefinite normal equations)
    propagate as :class:`FitError`.
    """
    m = parse_method(method) if isinstance(method, str) else method
    if m.kind != "lp":
        raise ValueError(f"method {m.name!r} has no prediction model to fit")
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError(f"expected a 2-d channel plane, got shape {plane.shape}")
    mean = float(plane.mean())
    canon = _TO_CANONICAL[direction](plane - mean)
    nbhd = canonical_neighborhood(*m.shape)
    if m.fit == "cov":
        r = covariance_statistics(canon, nbhd)
        a = solve_p1(r) if nbhd.order == 1 else solve_p2(r)
        a = stabilize(a)
    else:
        padded = prepare_windowed(canon)
        if m.fit == "ac-direct":
            offs = nbhd.offsets
            lags = [
                (offs[i][0] - offs[j][0], offs[i][1] - offs[j][1])
                for i in range(len(offs))
                for j in range(i, len(offs))
            ]
            acmap = autocorrelation_direct(padded, lags)
        else:
            acmap = autocorrelation_fft(padded)
        r = covariance_from_autocorrelation(acmap, nbhd)
        a = solve_general(r, ridge=DEFAULT_RIDGE)
    return ARModel(coefficients=a, mean=mean, neighborhood=rotate(nbhd, direction))


def fit_models(raster: np.ndarray, method: PaddingMethod | str) -> list[dict[Direction, ARModel]]:
    """Fit per-channel, per-direction models; empty dicts for non-lp methods.

    Fit breakdowns degrade to zero coefficients (prediction of the mean)
    with a warning, mirroring what :func:`pad` does internally.
    """
    m = parse_method(method) if isinstance(method, str) else method
    arr, _ = _as_planes(raster)
    out: list[dict[Direction, ARModel]] = []
    for ch in range(arr.shape[2]):
        models: dict[Direction, ARModel] = {}
        if m.kind == "lp":
            for d in PASS_ORDER:
                models[d] = _fit_or_fallback(arr[:, :, ch], m, d)
        out.append(models)
    return out


def _fit_or_fallback(plane: np.ndarray, m: PaddingMethod, d: Direction) -> ARModel:
    try:
        return fit_direction(plane, m, d)
    except FitError as exc:
        warnings.warn(
            f"{m.name}: fit toward {d.value} failed ({exc}); padding with the mean",
            RuntimeWarning,
            stacklevel=3,
        )
        nbhd = canonical_neighborhood(*m.shape)
        return ARModel(
            coefficients=np.zeros(nbhd.order),
            mean=float(np.asarray(plane, dtype=np.float64).mean()),
            neighborhood=rotate(nbhd, d),
        )


def pad(raster: np.ndarray, method: PaddingMethod | str, amounts) -> np.ndarray:
    """Pad a raster on all four sides with the given method.

    ``raster`` is ``(H, W)`` or ``(H, W, C)`` with finite values; ``amounts``
    is a :class:`PadAmounts`, a single integer for all sides, or a
    ``(top, bottom, left, right)`` tuple.  Returns a float64 raster of the
    padded size whose center block is the input, bit for bit.  Rasters too
    small to support a method's fit or prediction geometry degrade to mean
    padding for the affected passes, with a warning.
    """
    m = parse_method(method) if isinstance(method, str) else method
    amounts = _as_amounts(amounts)
    arr, squeezed = _as_planes(raster)
    if not np.isfinite(arr).all():
        raise ValueError("raster contains non-finite samples")
    h, w, channels = arr.shape
    t, b, l, r = amounts.top, amounts.bottom, amounts.left, amounts.right
    out = np.empty((h + t + b, w + l + r, channels))
    for ch in range(channels):
        plane = arr[:, :, ch]
        if m.kind == "zero":
            res = np.pad(plane, ((t, b), (l, r)))
        elif m.kind == "repl":
            res = np.pad(plane, ((t, b), (l, r)), mode="edge")
        elif m.kind == "extr":
            res = _pad_extr(plane, m.order, t, b, l, r)
        else:
            res = _pad_lp(plane, m, t, b, l, r)
        out[:, :, ch] = res
    out[t : t + h, l : l + w, :] = arr
    return out[:, :, 0] if squeezed else out


def _as_planes(raster) -> tuple[np.ndarray, bool]:
    arr = np.asarray(raster, dtype=np.float64)
    squeezed = arr.ndim == 2
    if squeezed:
        arr = arr[:, :, None]
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise ValueError(f"raster must be (H, W) or (H, W, C) and non-empty, got {arr.shape}")
    return arr, squeezed


def _as_amounts(amounts) -> PadAmounts:
    if isinstance(amounts, PadAmounts):
        return amounts
    if isinstance(amounts, (int, np.integer)):
        return PadAmounts.uniform(int(amounts))
    return PadAmounts(*amounts)


def _pad_extr(plane: np.ndarray, order: int, t: int, b: int, l: int, r: int) -> np.ndarray:
    ext = _extend_down_extr(plane, order, b)
    ext = np.rot90(_extend_down_extr(np.rot90(ext, 2), order, t), 2)
    ext = np.rot90(_extend_down_extr(np.rot90(ext, -1), order, r), 1)
    ext = np.rot90(_extend_down_extr(np.rot90(ext, 1), order, l), -1)
    return ext


def _extend_down_extr(plane: np.ndarray, order: int, n: int) -> np.ndarray:
    h, w = plane.shape
    out = np.empty((h + n, w))
    out[:h] = plane
    if n == 0:
        return out
    # Fewer rows than extrapolation points degrades to the available count.
    k = min(order, h)
    coeffs = lagrange_coefficients(k)
    for step in range(n):
        y = h + step
        if k == 0:
            out[y] = 0.0
            continue
        row = coeffs[0] * out[y - 1]
        for j in range(1, k):
            row = row + coeffs[j] * out[y - 1 - j]
        out[y] = row
    return out


def _pad_lp(plane: np.ndarray, m: PaddingMethod, t: int, b: int, l: int, r: int) -> np.ndarray:
    mean = float(plane.mean())
    centered = plane - mean
    coeffs = {d: _fit_or_fallback(plane, m, d).coefficients for d in PASS_ORDER}

    ext = _extend_down(centered, _pass_coeffs(coeffs, centered.shape, m, Direction.DOWN), m, b)
    canon = np.rot90(ext, 2)
    ext = np.rot90(_extend_down(canon, _pass_coeffs(coeffs, canon.shape, m, Direction.UP), m, t), 2)
    canon = np.rot90(ext, -1)
    ext = np.rot90(_extend_down(canon, _pass_coeffs(coeffs, canon.shape, m, Direction.RIGHT), m, r), 1)
    canon = np.rot90(ext, 1)
    ext = np.rot90(_extend_down(canon, _pass_coeffs(coeffs, canon.shape, m, Direction.LEFT), m, l), -1)
    return ext + mean


def _pass_coeffs(coeffs, canon_shape, m: PaddingMethod, d: Direction) -> np.ndarray | None:
    """Gate a directional pass on its prediction geometry.

    The pass frame must be at least as deep as the predictor rectangle and at
    least as wide, otherwise no corner shift keeps the rectangle inside and
    the pass degrades to mean padding.
    """
    rect_h, rect_w = m.shape
    if canon_shape[0] < rect_h or canon_shape[1] < rect_w:
        warnings.warn(
            f"{m.name}: raster too small to predict toward {d.value}; padding with the mean",
            RuntimeWarning,
            stacklevel=4,
        )
        return None
    return coeffs[d]


def _extend_down(
    plane: np.ndarray, coeffs: np.ndarray | None, m: PaddingMethod, n: int
) -> np.ndarray:
    """Grow the bottom of a zero-mean plane by n recursively predicted rows."""
    h, w = plane.shape
    out = np.empty((h + n, w))
    out[:h] = plane
    if n == 0:
        return out
    if coeffs is None:
        out[h:] = 0.0
        return out
    rect_h, rect_w = m.shape
    w2 = rect_w // 2
    core = w - 2 * w2
    for step in range(n):
        y = h + step
        acc = np.zeros(core)
        idx = 0
        for dy in range(rect_h):
            row = out[y - rect_h + dy]
            for dx in range(-w2, w2 + 1):
                acc += coeffs[idx] * row[w2 + dx : w2 + dx + core]
                idx += 1
        out[y, w2 : w - w2] = acc
        if w2:
            out[y, :w2] = acc[0]
            out[y, w - w2 :] = acc[-1]
    return out
