"""Per-object texture and shape complexity: entropy, edge density, curvature spread.

Conventions shared with the rest of the package:

* luminance is BT.709 (0.2126 R + 0.7152 G + 0.0722 B) on [0, 1] RGB;
* the entropy histogram has 256 bins of 8-bit quantized luminance;
* edges come from a 3x3 Sobel operator, a pixel is an edge when the gradient
  magnitude reaches ``EDGE_THRESHOLD_FRACTION`` of the largest magnitude
  Sobel can produce on [0, 1] data (``4 * sqrt(2)``);
* the depth Hessian uses unit pixel spacing, so curvature values are only
  comparable between images of the same resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scene_maps import DepthMap, ObjectRegion

__all__ = [
    "LUMA_WEIGHTS",
    "EDGE_THRESHOLD_FRACTION",
    "SOBEL_MAX_MAGNITUDE",
    "GeometricFactors",
    "NormalizedGeometricFactors",
    "luminance",
    "sobel_magnitude",
    "edge_map",
    "entropy",
    "edge_density",
    "hessian_field",
    "mean_curvature",
    "curvature_std",
    "compute_geometric_factors",
    "normalize_factors",
]

LUMA_WEIGHTS = np.array([0.2126, 0.7152, 0.0722])
EDGE_THRESHOLD_FRACTION = 0.1
SOBEL_MAX_MAGNITUDE = 4.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class GeometricFactors:
    entropy_bits: float
    edge_density: float
    curvature_std: float


@dataclass(frozen=True)
class NormalizedGeometricFactors:
    entropy_norm: float
    edge_norm: float
    curvature_norm: float


def luminance(image: np.ndarray) -> np.ndarray:
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 2:
        return img
    return img @ LUMA_WEIGHTS


def sobel_magnitude(lum: np.ndarray, pad: bool = True) -> np.ndarray:
    """Sobel gradient magnitude.

    With ``pad`` the borders are edge-replicated and the output keeps the
    input shape; without it only the ``(H-2, W-2)`` interior is returned.
    """
    a = np.pad(lum, 1, mode="edge") if pad else np.asarray(lum, dtype=np.float64)
    gx = (a[:-2, 2:] + 2 * a[1:-1, 2:] + a[2:, 2:]) - (a[:-2, :-2] + 2 * a[1:-1, :-2] + a[2:, :-2])
    gy = (a[2:, :-2] + 2 * a[2:, 1:-1] + a[2:, 2:]) - (a[:-2, :-2] + 2 * a[:-2, 1:-1] + a[:-2, 2:])
    return np.hypot(gx, gy)


def edge_map(image: np.ndarray, threshold_fraction: float = EDGE_THRESHOLD_FRACTION) -> np.ndarray:
    return sobel_magnitude(luminance(image)) >= threshold_fraction * SOBEL_MAX_MAGNITUDE


def _check_region(image_shape: tuple[int, ...], region: ObjectRegion) -> None:
    if region.area < 1 or not region.mask.any():
        raise ValueError(f"object {region.label}: empty region")
    if region.mask.shape != tuple(image_shape[:2]):
        raise ValueError(f"object {region.label}: region {region.mask.shape} does not match image {image_shape[:2]}")


def entropy(image: np.ndarray, region: ObjectRegion) -> float:
    """Shannon entropy (bits) of the region's 256-bin luminance histogram."""
    _check_region(np.shape(image), region)
    levels = np.rint(np.clip(luminance(image)[region.mask], 0.0, 1.0) * 255.0).astype(np.int64)
    counts = np.bincount(levels, minlength=256)
    p = counts[counts > 0] / levels.size
    return float(-(p * np.log2(p)).sum()) + 0.0


def edge_density(image: np.ndarray, region: ObjectRegion,
                 threshold_fraction: float = EDGE_THRESHOLD_FRACTION) -> float:
    _check_region(np.shape(image), region)
    edges = edge_map(image, threshold_fraction)
    return float(np.count_nonzero(edges & region.mask)) / region.area


_QUADRANTS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def hessian_field(z: np.ndarray, mask: np.ndarray):
    """Per-pixel depth Hessian restricted to a region.

    Returns ``(z_uu, z_vv, z_uv, valid)`` where ``u`` runs along columns and
    ``v`` along rows. Stencils only read region pixels: central differences
    where both neighbours are in the region, else a one-sided second
    difference, else the pixel is marked invalid. The mixed term uses the
    symmetric cross difference, or failing that the first quadrant stencil
    (in ``_QUADRANTS`` order) fully inside the region.
    """
    h, w = z.shape
    zp = np.pad(np.asarray(z, dtype=np.float64), 2)
    mp = np.pad(np.asarray(mask, dtype=bool), 2)

    def zs(dr, dc):
        return zp[2 + dr : 2 + dr + h, 2 + dc : 2 + dc + w]

    def ms(dr, dc):
        return mp[2 + dr : 2 + dr + h, 2 + dc : 2 + dc + w]

    def second(axis):
        step = (lambda k: (0, k)) if axis == "u" else (lambda k: (k, 0))
        central = ms(*step(-1)) & ms(*step(1))
        forward = ms(*step(1)) & ms(*step(2))
        backward = ms(*step(-1)) & ms(*step(-2))
        out = np.where(
            central,
            zs(*step(1)) - 2 * zs(0, 0) + zs(*step(-1)),
            np.where(
                forward,
                zs(*step(2)) - 2 * zs(*step(1)) + zs(0, 0),
                zs(0, 0) - 2 * zs(*step(-1)) + zs(*step(-2)),
            ),
        )
        return out, central | forward | backward

    z_uu, ok_u = second("u")
    z_vv, ok_v = second("v")

    cross = ms(1, 1) & ms(1, -1) & ms(-1, 1) & ms(-1, -1)
    z_uv = np.where(cross, (zs(1, 1) - zs(1, -1) - zs(-1, 1) + zs(-1, -1)) / 4.0, 0.0)
    ok_uv = cross.copy()
    for dr, dc in _QUADRANTS:
        avail = ~ok_uv & ms(dr, 0) & ms(0, dc) & ms(dr, dc)
        quad = dr * dc * (zs(dr, dc) - zs(dr, 0) - zs(0, dc) + zs(0, 0))
        z_uv = np.where(avail, quad, z_uv)
        ok_uv |= avail

    valid = mask & ok_u & ok_v & ok_uv
    return z_uu, z_vv, z_uv, valid


def mean_curvature(z: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Mean of the two Hessian eigenvalues (trace / 2) at each valid region pixel."""
    z_uu, z_vv, _, valid = hessian_field(z, mask)
    return 0.5 * (z_uu + z_vv)[valid]


def curvature_std(depth: DepthMap, region: ObjectRegion) -> float:
    _check_region(depth.shape, region)
    c = mean_curvature(depth.values, region.mask)
    if c.size == 0:
        raise ValueError(f"object {region.label}: region too small for second differences")
    return float(np.std(c))


def compute_geometric_factors(image: np.ndarray, depth: DepthMap, region: ObjectRegion) -> GeometricFactors:
    return GeometricFactors(
        entropy_bits=entropy(image, region),
        edge_density=edge_density(image, region),
        curvature_std=curvature_std(depth, region),
    )


def _minmax(values: np.ndarray) -> np.ndarray:
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.full(values.shape, 0.5)
    return (values - lo) / (hi - lo)


def normalize_factors(all_objects: list[GeometricFactors]) -> list[NormalizedGeometricFactors]:
    """Min-max normalize each factor across one scene's objects.

    When every object shares a value (including the single-object case)
    that factor maps to 0.5 for all of them.
    """
    if not all_objects:
        raise ValueError("normalize_factors needs at least one object")
    s = _minmax(np.array([g.entropy_bits for g in all_objects], dtype=np.float64))
    e = _minmax(np.array([g.edge_density for g in all_objects], dtype=np.float64))
    c = _minmax(np.array([g.curvature_std for g in all_objects], dtype=np.float64))
    return [NormalizedGeometricFactors(float(a), float(b), float(d)) for a, b, d in zip(s, e, c)]
