"""Depth and segmentation maps, and per-object regions with depth extremes.

Depth is always held as signed meters from the screen plane: negative in
front of the screen, positive behind it. Objects are defined by label alone,
so disconnected pixels sharing a label form a single object.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .imageio import read_pfm, read_png
from .lightfield import DepthSpec, SegmentationSpec

__all__ = [
    "DepthMap",
    "SegmentationMap",
    "ObjectRegion",
    "extract_objects",
    "load_depth",
    "load_segmentation",
    "labels_from_rgb",
]


@dataclass(frozen=True, eq=False)
class DepthMap:
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError(f"depth map must be 2D, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("depth map contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True, eq=False)
class SegmentationMap:
    labels: np.ndarray
    background_label: int | None = None
    exclude: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        lab = np.array(self.labels, dtype=np.int64)
        if lab.ndim != 2:
            raise ValueError(f"segmentation map must be 2D, got shape {lab.shape}")
        lab.flags.writeable = False
        object.__setattr__(self, "labels", lab)

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def excluded(self) -> set[int]:
        out = set(self.exclude)
        if self.background_label is not None:
            out.add(self.background_label)
        return out


@dataclass(frozen=True, eq=False)
class ObjectRegion:
    label: int
    mask: np.ndarray
    area: int
    z_min: float
    z_max: float

    @property
    def pixels(self) -> tuple[np.ndarray, np.ndarray]:
        """(rows, cols) of the region's pixels."""
        return np.nonzero(self.mask)


def labels_from_rgb(rgb: np.ndarray) -> np.ndarray:
    """Pack an HxWx3 integer colour image into 0xRRGGBB labels."""
    rgb = np.asarray(rgb)
    if rgb.ndim == 2:
        return rgb.astype(np.int64)
    if rgb.dtype != np.uint8:
        raise ValueError("colour segmentation maps must be 8-bit")
    r, g, b = (rgb[:, :, i].astype(np.int64) for i in range(3))
    return (r << 16) | (g << 8) | b


def extract_objects(seg: SegmentationMap, depth: DepthMap) -> list[ObjectRegion]:
    """One region per distinct non-excluded label, sorted by label."""
    if seg.shape != depth.shape:
        raise ValueError(f"segmentation {seg.shape} and depth {depth.shape} dimensions differ")
    skip = seg.excluded()
    regions = []
    for label in np.unique(seg.labels):
        label = int(label)
        if label in skip:
            continue
        mask = seg.labels == label
        z = depth.values[mask]
        regions.append(ObjectRegion(label, mask, int(mask.sum()), float(z.min()), float(z.max())))
    if not regions:
        raise ValueError("no objects left after excluding background labels")
    return regions


def load_depth(spec: DepthSpec) -> DepthMap:
    path = Path(spec.path)
    if not path.is_file():
        raise FileNotFoundError(f"depth map not found: {path}")
    if spec.encoding == "pfm":
        raw = read_pfm(path)
        if raw.ndim == 3:
            raw = raw[:, :, 0]
        z = raw * spec.scale + spec.offset
    else:
        raw = read_png(path)
        if raw.ndim == 3:
            raw = raw[:, :, 0]
        if raw.dtype != np.uint16:
            raise ValueError(f"{path}: png16 depth must be a 16-bit PNG, got {raw.dtype}")
        z = raw.astype(np.float64) * spec.scale + spec.offset
    if spec.convention == "camera_distance":
        z = z - spec.screen_distance_m
    return DepthMap(z)


def load_segmentation(spec: SegmentationSpec) -> SegmentationMap:
    path = Path(spec.path)
    if not path.is_file():
        raise FileNotFoundError(f"segmentation map not found: {path}")
    return SegmentationMap(labels_from_rgb(read_png(path)), spec.background, spec.exclude)
