"""Depth-of-field aware scene complexity (DASC) score.

Per object the normalized geometric factors are averaged into ``nu`` and
weighted by the fraction of the object outside the DoF slab and by a
placement weight ``psi`` chosen from which depth extremes leave the slab:

========== ============================ =========================
case       extremes outside the slab    weight
========== ============================ =========================
INSIDE     none                         contribution is ``-nu*l``
FRONT_OUT  front (``z_min``) only       ``d_min``
BACK_OUT   back (``z_max``) only        ``d_max``
BOTH_OUT   both                         ``d_min + d_max``
========== ============================ =========================

The INSIDE contribution ``(1 - w) * nu * (-l / (1 - w))`` is evaluated as
``-nu * l`` so fully-inside objects (``w = 1``) do not divide by zero. The
scene score is the mean contribution, so it lies in ``[-1, inf)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import geometric_factors as gf
from .geometric_factors import GeometricFactors, NormalizedGeometricFactors
from .imageio import read_png, to_unit_float
from .lightfield import Manifest, load_manifest
from .position_factors import PositionFactors, compute_position_factors, in_dof
from .scene_maps import DepthMap, SegmentationMap, extract_objects, load_depth, load_segmentation

__all__ = [
    "PsiCase",
    "ObjectTerm",
    "DascResult",
    "nu",
    "psi_case",
    "aggregate",
    "scene_terms",
    "compute_dasc",
    "compute_dasc_arrays",
    "factors_csv",
]


class PsiCase(str, Enum):
    INSIDE = "INSIDE"
    FRONT_OUT = "FRONT_OUT"
    BACK_OUT = "BACK_OUT"
    BOTH_OUT = "BOTH_OUT"


@dataclass(frozen=True)
class ObjectTerm:
    label: int
    nu: float
    case: PsiCase
    psi: float | None
    position: PositionFactors
    raw: GeometricFactors | None = None
    normalized: NormalizedGeometricFactors | None = None

    @property
    def contribution(self) -> float:
        if self.case is PsiCase.INSIDE:
            return -self.nu * self.position.span_l
        return (1.0 - self.position.dof_overlap) * self.nu * self.psi


@dataclass(frozen=True)
class DascResult:
    score_f: float
    terms: tuple[ObjectTerm, ...]
    scene: str = ""
    d_phi: float | None = None

    @property
    def object_count(self) -> int:
        return len(self.terms)

    @property
    def contributions(self) -> list[float]:
        return [t.contribution for t in self.terms]

    def to_dict(self) -> dict:
        per_object = []
        for t in self.terms:
            factors = asdict(t.position)
            if t.raw is not None:
                factors.update(asdict(t.raw))
            if t.normalized is not None:
                factors.update(asdict(t.normalized))
            per_object.append({
                "label": t.label,
                "factors": factors,
                "nu": t.nu,
                "case": t.case.value,
                "psi": t.psi,
                "contribution": t.contribution,
            })
        return {
            "scene": self.scene,
            "f": self.score_f,
            "m": self.object_count,
            "d_phi_m": self.d_phi,
            "settings": {
                "luminance": "BT.709",
                "edge_detector": "sobel3x3",
                "edge_threshold_fraction": gf.EDGE_THRESHOLD_FRACTION,
                "curvature_units": "meters per pixel^2",
            },
            "per_object": per_object,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def nu(factors: NormalizedGeometricFactors) -> float:
    return (factors.curvature_norm + factors.edge_norm + factors.entropy_norm) / 3.0


def psi_case(z_min: float, z_max: float, pos: PositionFactors, d_phi: float) -> tuple[PsiCase, float | None]:
    """Classify an object by slab membership of its depth extremes.

    Returns the case and its weight. For INSIDE the weight is ``-l / (1 - w)``,
    or ``None`` when ``w == 1`` where only the fused contribution is defined.
    """
    if z_min > z_max:
        raise ValueError(f"z_min {z_min} exceeds z_max {z_max}")
    if not d_phi > 0:
        raise ValueError("d_phi must be positive")
    front_in = bool(in_dof(z_min, d_phi))
    back_in = bool(in_dof(z_max, d_phi))
    if front_in and back_in:
        outside = 1.0 - pos.dof_overlap
        return PsiCase.INSIDE, (-pos.span_l / outside if outside > 0 else None)
    if not front_in and not back_in:
        return PsiCase.BOTH_OUT, pos.d_min + pos.d_max
    if not front_in:
        return PsiCase.FRONT_OUT, pos.d_min
    return PsiCase.BACK_OUT, pos.d_max


def aggregate(terms: list[ObjectTerm], scene: str = "", d_phi: float | None = None) -> DascResult:
    """Mean of per-object contributions, summed in label order."""
    if not terms:
        raise ValueError("cannot aggregate a scene without objects")
    ordered = tuple(sorted(terms, key=lambda t: t.label))
    total = math.fsum(t.contribution for t in ordered)
    return DascResult(total / len(ordered), ordered, scene, d_phi)


def scene_terms(image: np.ndarray, seg: SegmentationMap, depth: DepthMap, d_phi: float) -> list[ObjectTerm]:
    regions = extract_objects(seg, depth)
    if np.shape(image)[:2] != depth.shape:
        raise ValueError(f"image {np.shape(image)[:2]} and depth {depth.shape} dimensions differ")
    raw = [gf.compute_geometric_factors(image, depth, r) for r in regions]
    norm = gf.normalize_factors(raw)
    terms = []
    for region, g, n in zip(regions, raw, norm):
        pos = compute_position_factors(region, depth, d_phi)
        case, psi = psi_case(region.z_min, region.z_max, pos, d_phi)
        terms.append(ObjectTerm(region.label, nu(n), case, psi, pos, g, n))
    return terms


def compute_dasc_arrays(image: np.ndarray, seg: SegmentationMap, depth: DepthMap, d_phi: float,
                        scene: str = "") -> DascResult:
    return aggregate(scene_terms(image, seg, depth, d_phi), scene, d_phi)


def _central_image(manifest: Manifest) -> np.ndarray:
    if manifest.central_view is not None:
        path = manifest.central_view
    else:
        path = manifest.view_path(manifest.grid_cols // 2, manifest.grid_rows // 2)
    img = read_png(path)
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    return to_unit_float(img)


def compute_dasc(manifest: str | Path | Manifest) -> DascResult:
    """Full pipeline from a scene manifest: central view, depth and segmentation."""
    m = manifest if isinstance(manifest, Manifest) else load_manifest(manifest)
    if m.depth is None:
        raise ValueError(f"{m.path}: manifest has no 'depth' entry")
    if m.segmentation is None:
        raise ValueError(f"{m.path}: manifest has no 'segmentation' entry")
    image = _central_image(m)
    depth = load_depth(m.depth)
    seg = load_segmentation(m.segmentation)
    return compute_dasc_arrays(image, seg, depth, m.display.dof_range_m, m.scene)


_CSV_FIELDS = [
    "scene", "label",
    "entropy_bits", "edge_density", "curvature_std",
    "entropy_norm", "edge_norm", "curvature_norm",
    "dof_overlap", "d_min", "d_max", "span_l",
    "nu", "case", "contribution",
]


def factors_csv(result: DascResult) -> str:
    """Per-object raw, normalized and position factors as CSV text."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for t in result.terms:
        row = {"scene": result.scene, "label": t.label, "nu": repr(t.nu), "case": t.case.value,
               "contribution": repr(t.contribution)}
        for part in (t.raw, t.normalized, t.position):
            if part is not None:
                row.update({k: repr(v) for k, v in asdict(part).items()})
        writer.writerow(row)
    return buf.getvalue()
