"""Depth-of-field anti-aliasing by circular filtering in the angular domain.

Each output view is the plain mean of the input views whose grid offset from
it lies within a disk of radius ``r`` (in views). Masks are clipped to the
grid and the divisor shrinks to the number of contributing views; nothing is
padded or reflected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lightfield import LightField

__all__ = ["CircularMask", "disk_offsets", "circular_mask", "filter_view", "render_all"]


def disk_offsets(r: int) -> list[tuple[int, int]]:
    """Integer offsets (ds, dt) with ds**2 + dt**2 <= r**2, sorted by (ds, dt)."""
    if r < 0:
        raise ValueError(f"radius must be non-negative, got {r}")
    r2 = r * r
    return [(ds, dt) for ds in range(-r, r + 1) for dt in range(-r, r + 1) if ds * ds + dt * dt <= r2]


@dataclass(frozen=True)
class CircularMask:
    radius: int
    center: tuple[int, int]
    members: tuple[tuple[int, int], ...]

    @property
    def count(self) -> int:
        return len(self.members)


def circular_mask(r: int, center: tuple[int, int], grid: tuple[int, int]) -> CircularMask:
    """Views of a ``grid = (cols, rows)`` array within distance ``r`` of ``center = (s0, t0)``."""
    cols, rows = grid
    s0, t0 = center
    if not (0 <= s0 < cols and 0 <= t0 < rows):
        raise IndexError(f"mask centre {center} outside {cols}x{rows} grid")
    members = tuple(
        (s0 + ds, t0 + dt)
        for ds, dt in disk_offsets(r)
        if 0 <= s0 + ds < cols and 0 <= t0 + dt < rows
    )
    return CircularMask(r, (s0, t0), members)


def filter_view(lf: LightField, r: int, center: tuple[int, int]) -> np.ndarray:
    mask = circular_mask(r, center, lf.grid)
    acc = np.zeros(lf.views.shape[2:], dtype=np.float64)
    for s, t in mask.members:
        acc += lf.views[s, t]
    return acc / mask.count


def render_all(lf: LightField, r: int) -> LightField:
    """Filter every view at its own grid position.

    The sum for each centre accumulates member views in ascending (s, t)
    order, the same order :func:`filter_view` uses, so both agree bit for bit.
    """
    src = lf.views
    cols, rows = lf.grid
    if r == 0:
        return LightField(src, lf.capture)
    acc = np.zeros_like(src)
    count = np.zeros((cols, rows), dtype=np.int64)
    for ds, dt in disk_offsets(r):
        # destination centres whose neighbour (s0+ds, t0+dt) is inside the grid
        s_lo, s_hi = max(0, -ds), min(cols, cols - ds)
        t_lo, t_hi = max(0, -dt), min(rows, rows - dt)
        if s_lo >= s_hi or t_lo >= t_hi:
            continue
        acc[s_lo:s_hi, t_lo:t_hi] += src[s_lo + ds : s_hi + ds, t_lo + dt : t_hi + dt]
        count[s_lo:s_hi, t_lo:t_hi] += 1
    out = acc / count[:, :, None, None, None]
    return LightField(out, lf.capture)
