"""Prediction neighborhood geometry.

A neighborhood is an ordered list of integer pixel offsets ``h[0..P]``.
``h[0]`` locates the predicted pixel and ``h[1..P]`` locate the predictor
pixels, all relative to an arbitrary base coordinate.  The canonical shapes
are downward causal: a ``height x width`` rectangle of predictors with the
predicted pixel one row below the rectangle, horizontally centered.  Shapes
for the other three padding directions are obtained by rotating the offsets
by a multiple of 90 degrees, corner shapes by sliding the predicted pixel
laterally under the rectangle.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Direction(enum.Enum):
    """Padding direction, named from the image's point of view."""

    DOWN = "down"
    UP = "up"
    RIGHT = "right"
    LEFT = "left"


#: Order in which directional passes run inside the padding engine.
PASS_ORDER = (Direction.DOWN, Direction.UP, Direction.RIGHT, Direction.LEFT)


@dataclass(frozen=True)
class Neighborhood:
    """Offsets ``h[0..P]``; index 0 is the predicted pixel."""

    offsets: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if len(self.offsets) < 2:
            raise ValueError("neighborhood needs a target and at least one predictor")
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError("neighborhood offsets must be pairwise distinct")

    @property
    def target(self) -> tuple[int, int]:
        return self.offsets[0]

    @property
    def predictors(self) -> tuple[tuple[int, int], ...]:
        return self.offsets[1:]

    @property
    def order(self) -> int:
        """Number of predictors P."""
        return len(self.offsets) - 1


@dataclass(frozen=True)
class ValidRegion:
    """Axis-aligned rectangle of base coordinates, half-open on both axes.

    Every neighborhood access from a base coordinate inside the region lands
    inside the raster.  Empty regions have zero-length spans.
    """

    y_start: int
    y_stop: int
    x_start: int
    x_stop: int

    @property
    def count(self) -> int:
        return max(0, self.y_stop - self.y_start) * max(0, self.x_stop - self.x_start)

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    @property
    def rows(self) -> slice:
        return slice(self.y_start, self.y_stop)

    @property
    def cols(self) -> slice:
        return slice(self.x_start, self.x_stop)


def canonical_neighborhood(height: int, width: int) -> Neighborhood:
    """Downward-causal rectangle of predictors, predicted pixel below it.

    The predictors fill rows ``0..height-1`` and columns ``-width//2 ..
    width//2`` in row-major order; the predicted pixel sits at
    ``(height, 0)``.  Width must be odd so the predicted pixel can be
    centered (any width is legal when it is 1).
    """
    if height < 1 or width < 1:
        raise ValueError(f"neighborhood shape {height}x{width} must be at least 1x1")
    if width % 2 == 0:
        raise ValueError(f"neighborhood width must be odd, got {width}")
    half = width // 2
    offsets = [(height, 0)]
    for r in range(height):
        for c in range(-half, half + 1):
            offsets.append((r, c))
    return Neighborhood(tuple(offsets))


# Offset maps sending the canonical "down" orientation to each direction.
_ROTATIONS = {
    Direction.DOWN: lambda dy, dx: (dy, dx),
    Direction.UP: lambda dy, dx: (-dy, -dx),
    Direction.RIGHT: lambda dy, dx: (-dx, dy),
    Direction.LEFT: lambda dy, dx: (dx, -dy),
}


def rotate(nbhd: Neighborhood, direction: Direction) -> Neighborhood:
    """Rotate a canonical (downward) neighborhood to pad toward ``direction``.

    Rotation is by the unique multiple of 90 degrees that maps the downward
    unit offset onto the direction's unit offset; the predictor ordering is
    preserved.
    """
    rot = _ROTATIONS[direction]
    return Neighborhood(tuple(rot(dy, dx) for dy, dx in nbhd.offsets))


def corner_variant(nbhd: Neighborhood, shift: int) -> Neighborhood:
    """Slide the predicted pixel of a canonical neighborhood sideways.

    The predictor rectangle is left untouched; only the predicted pixel's
    lateral offset moves by ``shift`` columns.  Used near raster corners so
    the recursive prediction front keeps its full width: the outermost front
    pixels are predicted from a rectangle that is no longer centered above
    them.  Shifts that would detach the predicted pixel from the rectangle's
    column span are rejected.
    """
    ty, tx = nbhd.target
    cols = [dx for _, dx in nbhd.predictors]
    new_tx = tx + shift
    if not (min(cols) <= new_tx <= max(cols)):
        raise ValueError(
            f"shift {shift} moves the predicted pixel outside the rectangle's "
            f"column span [{min(cols)}, {max(cols)}]"
        )
    return Neighborhood(((ty, new_tx),) + nbhd.predictors)


def valid_region(nbhd: Neighborhood, height: int, width: int) -> ValidRegion:
    """Base coordinates whose neighborhood accesses all stay in bounds.

    For each offset ``(dy, dx)`` the base must satisfy
    ``0 <= y + dy < height`` and ``0 <= x + dx < width``; the region is the
    intersection of those constraints, clamped to emptiness when no base
    coordinate satisfies all of them.
    """
    dys = [dy for dy, _ in nbhd.offsets]
    dxs = [dx for _, dx in nbhd.offsets]
    y_lo = max(-dy for dy in dys)
    y_hi = min(height - 1 - dy for dy in dys)
    x_lo = max(-dx for dx in dxs)
    x_hi = min(width - 1 - dx for dx in dxs)
    return ValidRegion(y_lo, max(y_lo, y_hi + 1), x_lo, max(x_lo, x_hi + 1))
