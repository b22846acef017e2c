"""Object placement relative to the display's DoF slab ``|z| <= d_phi / 2``.

Distances are expressed in DoF units (divided by ``d_phi``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scene_maps import DepthMap, ObjectRegion

__all__ = [
    "PositionFactors",
    "in_dof",
    "dof_overlap",
    "dof_distance",
    "object_span",
    "compute_position_factors",
]


@dataclass(frozen=True)
class PositionFactors:
    dof_overlap: float
    d_min: float
    d_max: float
    span_l: float


def _check_dphi(d_phi: float) -> None:
    if not d_phi > 0:
        raise ValueError(f"d_phi must be positive, got {d_phi}")


def in_dof(z, d_phi: float):
    """Slab membership test; works on scalars and arrays."""
    return np.abs(z) <= d_phi / 2


def dof_overlap(region: ObjectRegion, depth: DepthMap, d_phi: float) -> float:
    """Fraction of the object's pixels lying inside the DoF slab."""
    _check_dphi(d_phi)
    z = depth.values[region.mask]
    return float(np.count_nonzero(in_dof(z, d_phi))) / z.size


def dof_distance(extreme_z: float, d_phi: float) -> float:
    """Distance from a depth extreme to the nearer slab boundary, in DoF units."""
    _check_dphi(d_phi)
    half = d_phi / 2
    return min(abs(extreme_z - half), abs(extreme_z + half)) / d_phi


def object_span(region: ObjectRegion, d_phi: float) -> float:
    _check_dphi(d_phi)
    return abs(region.z_max - region.z_min) / d_phi


def compute_position_factors(region: ObjectRegion, depth: DepthMap, d_phi: float) -> PositionFactors:
    return PositionFactors(
        dof_overlap=dof_overlap(region, depth, d_phi),
        d_min=dof_distance(region.z_min, d_phi),
        d_max=dof_distance(region.z_max, d_phi),
        span_l=object_span(region, d_phi),
    )
