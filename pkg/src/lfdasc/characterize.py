"""Dataset heterogeneity features for a light field.

SI
    std of the Sobel gradient magnitude over a view's luminance (interior
    pixels only, so borders add no artificial gradient).
TI
    std of the luminance difference between horizontally adjacent views
    ``(s, t)`` and ``(s + 1, t)``.
CF
    Hasler-Suesstrunk colourfulness on [0, 1] RGB.
contrast
    RMS contrast, the population std of luminance.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .geometric_factors import luminance, sobel_magnitude
from .lightfield import LightField

__all__ = [
    "CharacterizationReport",
    "spatial_information",
    "temporal_information",
    "colorfulness",
    "contrast",
    "characterize",
]


def spatial_information(view: np.ndarray) -> float:
    lum = luminance(view)
    if lum.size == 0:
        raise ValueError("empty view")
    if min(lum.shape) < 3:
        return 0.0
    return float(np.std(sobel_magnitude(lum, pad=False)))


def temporal_information(view_a: np.ndarray, view_b: np.ndarray) -> float:
    if np.shape(view_a) != np.shape(view_b):
        raise ValueError(f"view shapes differ: {np.shape(view_a)} vs {np.shape(view_b)}")
    return float(np.std(luminance(view_b) - luminance(view_a)))


def colorfulness(view: np.ndarray) -> float:
    img = np.asarray(view, dtype=np.float64)
    r, g, b = img[..., 0], img[..., 1], img[..., 2]
    rg = r - g
    yb = 0.5 * (r + g) - b
    spread = np.hypot(rg.std(), yb.std())
    centre = np.hypot(rg.mean(), yb.mean())
    return float(spread + 0.3 * centre)


def contrast(view: np.ndarray) -> float:
    return float(np.std(luminance(view)))


@dataclass(frozen=True)
class CharacterizationReport:
    scene: str
    si: dict[tuple[int, int], float]
    ti: dict[tuple[int, int], float]
    cf: float
    contrast: float

    @property
    def si_max(self) -> float:
        return max(self.si.values())

    @property
    def si_mean(self) -> float:
        return float(np.mean(list(self.si.values())))

    @property
    def ti_max(self) -> float:
        return max(self.ti.values()) if self.ti else 0.0

    @property
    def ti_mean(self) -> float:
        return float(np.mean(list(self.ti.values()))) if self.ti else 0.0

    def to_csv(self) -> str:
        """Long-format CSV: one row per SI/TI item followed by summary rows."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scene", "feature", "s", "t", "value"])
        for (s, t), v in sorted(self.si.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            w.writerow([self.scene, "SI", s, t, repr(v)])
        for (s, t), v in sorted(self.ti.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            w.writerow([self.scene, "TI", s, t, repr(v)])
        for name, v in (("SI_max", self.si_max), ("SI_mean", self.si_mean),
                        ("TI_max", self.ti_max), ("TI_mean", self.ti_mean),
                        ("CF", self.cf), ("contrast", self.contrast)):
            w.writerow([self.scene, name, "", "", repr(v)])
        return buf.getvalue()


def characterize(lf: LightField, scene: str = "") -> CharacterizationReport:
    """SI for every view, TI for each (s, s+1) pair, CF and contrast on the centre view.

    TI keys are the left view of each pair.
    """
    cols, rows = lf.grid
    si = {(s, t): spatial_information(lf.views[s, t]) for t in range(rows) for s in range(cols)}
    ti = {(s, t): temporal_information(lf.views[s, t], lf.views[s + 1, t])
          for t in range(rows) for s in range(cols - 1)}
    centre = lf.views[lf.center]
    return CharacterizationReport(scene, si, ti, colorfulness(centre), contrast(centre))
