"""Downstream consequences of padding under a fixed linear convolution stack.

A small pipeline of 2-d convolutions stands in for a network: it is linear,
so the influence region of every output pixel is exactly its receptive field
and seam or border effects can be checked against provable ground truth
instead of statistics.  The tools here run such a pipeline over whole rasters
or overlapping tiles, crop output shells by switching trailing stages to
valid convolution, and report border-ring error profiles.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .pad import PaddingMethod, pad, parse_method

#: Stage policies: pad the stage input (size-preserving) or convolve valid.
POLICIES = ("pad", "valid")


@dataclass(frozen=True)
class ConvStage:
    """One convolution stage: an odd square kernel plus a padding policy."""

    kernel: np.ndarray
    policy: str = "pad"

    def __post_init__(self):
        k = np.asarray(self.kernel, dtype=np.float64)
        if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] % 2 == 0:
            raise ValueError(f"kernel must be odd and square, got shape {k.shape}")
        if not np.all(np.isfinite(k)):
            raise ValueError("kernel weights must be finite")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        k.setflags(write=False)
        object.__setattr__(self, "kernel", k)

    @property
    def radius(self) -> int:
        return self.kernel.shape[0] // 2


@dataclass(frozen=True)
class ConvPipeline:
    """Ordered convolution stages applied channel by channel."""

    stages: tuple[ConvStage, ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("pipeline needs at least one stage")
        object.__setattr__(self, "stages", tuple(self.stages))

    @property
    def receptive_radius(self) -> int:
        """Pixels of context feeding one output pixel, per side."""
        return sum(s.radius for s in self.stages)


def default_pipeline(seed: int = 0, stages: int = 3, size: int = 3) -> ConvPipeline:
    """Fixed random pipeline used throughout the tests: seeded kernels,
    each scaled to unit Euclidean norm, every stage padding."""
    rng = np.random.default_rng(seed)
    built = []
    for _ in range(stages):
        k = rng.standard_normal((size, size))
        k /= np.sqrt(np.sum(k * k))
        built.append(ConvStage(k))
    return ConvPipeline(tuple(built))


def convolve_valid(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Valid cross-correlation by slice accumulation.

    Every output pixel is the sum of kernel-weighted input pixels taken in a
    fixed tap order, so identical input windows produce bitwise identical
    outputs no matter what surrounds them.  That locality is what makes the
    stitching equalities below exact rather than approximate.
    """
    plane = np.asarray(plane, dtype=np.float64)
    k = np.asarray(kernel, dtype=np.float64)
    kh, kw = k.shape
    oh = plane.shape[0] - kh + 1
    ow = plane.shape[1] - kw + 1
    if oh < 1 or ow < 1:
        raise ValueError(
            f"plane {plane.shape} too small for a valid {kh}x{kw} convolution"
        )
    out = np.zeros((oh, ow))
    for i in range(kh):
        for j in range(kw):
            out += k[i, j] * plane[i : i + oh, j : j + ow]
    return out


def _crop_plan(pipeline: ConvPipeline, output_crop: int) -> tuple[str, ...]:
    """Effective per-stage policies once ``output_crop`` shells are consumed.

    Trailing padding stages flip to valid, last first, until the requested
    crop is used up.  The crop must decompose exactly into trailing stage
    radii; anything else cannot be realized by dropping padding alone.
    """
    if output_crop < 0:
        raise ValueError("output crop must be non-negative")
    policies = [s.policy for s in pipeline.stages]
    remaining = output_crop
    for i in range(len(policies) - 1, -1, -1):
        if remaining == 0:
            break
        if policies[i] != "pad":
            continue
        r = pipeline.stages[i].radius
        if r > remaining:
            raise ValueError(
                f"output crop {output_crop} does not align with stage radii"
            )
        policies[i] = "valid"
        remaining -= r
    if remaining > 0:
        raise ValueError(
            f"output crop {output_crop} exceeds the croppable radius of the pipeline"
        )
    return tuple(policies)


def run_pipeline(
    raster: np.ndarray,
    pipeline: ConvPipeline,
    method: PaddingMethod | str = "zero",
    output_crop: int = 0,
) -> np.ndarray:
    """Apply the pipeline to a raster, padding each stage input as configured.

    ``output_crop`` shrinks the nominal (size-preserving) output by that many
    border shells, realized by running the trailing stages without padding.
    """
    method = parse_method(method) if isinstance(method, str) else method
    arr = np.asarray(raster, dtype=np.float64)
    squeezed = arr.ndim == 2
    if squeezed:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError(f"raster must be (H, W) or (H, W, C), got shape {arr.shape}")
    policies = _crop_plan(pipeline, output_crop)
    planes = [arr[:, :, c] for c in range(arr.shape[2])]
    for stage, policy in zip(pipeline.stages, policies):
        r = stage.radius
        nxt = []
        for p in planes:
            if policy == "pad" and r > 0:
                p = pad(p, method, r)
            nxt.append(convolve_valid(p, stage.kernel))
        planes = nxt
    out = np.stack(planes, axis=-1)
    return out[:, :, 0] if squeezed else out


def _tile_starts(extent: int, tile: int, stride: int) -> list[int]:
    """Tile origins along one axis: a regular grid plus a shifted final tile
    flush with the far edge when the grid does not land there exactly."""
    if tile > extent:
        raise ValueError(f"tile size {tile} exceeds raster extent {extent}")
    starts = list(range(0, extent - tile + 1, stride))
    if starts[-1] + tile < extent:
        starts.append(extent - tile)
    return starts


def stitch_tiles(
    raster: np.ndarray,
    pipeline: ConvPipeline,
    method: PaddingMethod | str,
    tile: int,
    crop: int = 0,
) -> np.ndarray:
    """Run the pipeline tile by tile and assemble the cropped outputs.

    Tiles overlap by ``2 * crop`` so their cropped outputs abut exactly; each
    output pixel is written by exactly one tile (slabs are split at the next
    tile's boundary, never blended).  With ``crop`` equal to the receptive
    radius the result is bitwise the whole-image valid output.
    """
    arr = np.asarray(raster, dtype=np.float64)
    squeezed = arr.ndim == 2
    if squeezed:
        arr = arr[:, :, None]
    h, w, c = arr.shape
    stride = tile - 2 * crop
    if stride < 1:
        raise ValueError(f"tile {tile} must exceed twice the crop {crop}")
    ys = _tile_starts(h, tile, stride)
    xs = _tile_starts(w, tile, stride)
    out = np.empty((h - 2 * crop, w - 2 * crop, c))
    for yi, y0 in enumerate(ys):
        y_end = ys[yi + 1] if yi + 1 < len(ys) else h - 2 * crop
        for xi, x0 in enumerate(xs):
            x_end = xs[xi + 1] if xi + 1 < len(xs) else w - 2 * crop
            piece = run_pipeline(
                arr[y0 : y0 + tile, x0 : x0 + tile, :], pipeline, method, crop
            )
            out[y0:y_end, x0:x_end, :] = piece[: y_end - y0, : x_end - x0, :]
    return out[:, :, 0] if squeezed else out


def equivariance_deviation(
    raster: np.ndarray,
    pipeline: ConvPipeline,
    method: PaddingMethod | str,
    tile: int,
    crop: int = 0,
) -> np.ndarray:
    """Absolute difference between a stitched tiled run and the valid-only
    whole-image run, over the region where the latter is defined."""
    arr = np.asarray(raster, dtype=np.float64)
    stitched = stitch_tiles(arr, pipeline, method, tile, crop)
    all_valid = ConvPipeline(
        tuple(ConvStage(s.kernel, "valid") for s in pipeline.stages)
    )
    reference = run_pipeline(arr, all_valid, method)
    inset = pipeline.receptive_radius - crop
    if inset < 0:
        raise ValueError("crop exceeds the pipeline receptive radius")
    rh, rw = reference.shape[0], reference.shape[1]
    window = stitched[inset : inset + rh, inset : inset + rw]
    return np.abs(window - reference)


@dataclass(frozen=True)
class ShellReport:
    """Mean squared error split over concentric border rings.

    Shell 0 is the outermost ring; each shell is ``thickness`` pixels deep
    and the innermost remainder belongs to the deepest shell.
    """

    thickness: int
    pixel_counts: tuple[int, ...]
    mses: tuple[float, ...]

    def __post_init__(self):
        if len(self.pixel_counts) != len(self.mses) or not self.mses:
            raise ValueError("shell counts and MSEs must align and be non-empty")

    @property
    def total_mse(self) -> float:
        weights = np.asarray(self.pixel_counts, dtype=np.float64)
        return float(np.dot(weights, self.mses) / weights.sum())

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("shell_index,pixel_count,mse\n")
        for i, (n, m) in enumerate(zip(self.pixel_counts, self.mses)):
            buf.write(f"{i},{n},{m:.17g}\n")
        return buf.getvalue()


def shell_mse(
    output: np.ndarray,
    target: np.ndarray,
    thickness: int = 1,
    max_shells: int | None = None,
) -> ShellReport:
    """Per-shell MSE between two rasters of identical shape.

    A pixel's shell is its border distance divided by ``thickness``; passing
    ``max_shells`` lumps everything deeper into the last reported shell.
    """
    out = np.asarray(output, dtype=np.float64)
    tgt = np.asarray(target, dtype=np.float64)
    if out.shape != tgt.shape:
        raise ValueError(f"shape mismatch: {out.shape} vs {tgt.shape}")
    if thickness < 1:
        raise ValueError("shell thickness must be at least 1")
    h, w = out.shape[0], out.shape[1]
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    depth = np.minimum(np.minimum(yy, h - 1 - yy), np.minimum(xx, w - 1 - xx))
    shell = depth // thickness
    if max_shells is not None:
        if max_shells < 1:
            raise ValueError("max_shells must be at least 1")
        shell = np.minimum(shell, max_shells - 1)
    sq = (out - tgt) ** 2
    if sq.ndim == 3:
        sq = sq.sum(axis=2)
        samples_per_pixel = out.shape[2]
    else:
        samples_per_pixel = 1
    counts = []
    mses = []
    for s in range(int(shell.max()) + 1):
        mask = shell == s
        n = int(mask.sum())
        counts.append(n * samples_per_pixel)
        mses.append(float(sq[mask].sum() / (n * samples_per_pixel)))
    return ShellReport(thickness, tuple(counts), tuple(mses))
