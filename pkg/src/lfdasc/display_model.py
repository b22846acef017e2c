"""Display and capture geometry, plus the analytic depth-of-field model.

Angles cross the public API in degrees and are converted to radians exactly
once, inside each function that needs trigonometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

__all__ = [
    "DisplayParams",
    "CaptureParams",
    "feature_size",
    "dof_half_depth",
    "capture_angular_resolution",
    "optimal_radius",
    "round_half_up",
]


@dataclass(frozen=True)
class DisplayParams:
    """Light field display parameters.

    Defaults describe the Holovizio-class display used in the reference study:
    0.95 deg angular resolution, 1.2 mm screen pixel, 3 m viewing distance,
    70 deg field of view, 1280 px and an operational DoF range of 0.2 m.

    ``dof_range_m`` is deliberately independent of :func:`dof_half_depth`; the
    tabulated operational value drives the metric, the analytic one is only a
    diagnostic.
    """

    angular_resolution_deg: float = 0.95
    pixel_size_m: float = 1.2e-3
    viewer_distance_m: float = 3.0
    fov_deg: float = 70.0
    spatial_resolution_px: int = 1280
    dof_range_m: float = 0.2

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"DisplayParams.{f.name} must be positive, got {value!r}")
        if self.angular_resolution_deg >= self.fov_deg:
            raise ValueError("angular_resolution_deg must be smaller than fov_deg")


@dataclass(frozen=True)
class CaptureParams:
    """Capture geometry of a densely sampled light field."""

    view_spacing_m: float = 3.77e-3
    viewer_distance_m: float = 3.0
    baseline_m: float = 2.64
    view_resolution_px: int = 1280
    grid_rows: int = 1
    grid_cols: int = 1

    def __post_init__(self) -> None:
        if not self.view_spacing_m > 0:
            raise ValueError("view_spacing_m must be positive")
        if not self.viewer_distance_m > 0:
            raise ValueError("viewer_distance_m must be positive")
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise ValueError("grid dimensions must be at least 1x1")
        if self.baseline_m < self.view_spacing_m:
            raise ValueError("baseline_m must be at least view_spacing_m")


def feature_size(display: DisplayParams, z: float) -> float:
    """Smallest feature the display reproduces at signed depth ``z`` (meters)."""
    return display.pixel_size_m + abs(z) * math.tan(math.radians(display.angular_resolution_deg))


def dof_half_depth(display: DisplayParams) -> float:
    """Largest ``|z|`` at which the feature size is still at most twice the pixel size.

    The full analytic DoF range is twice this value. For the default display
    it is about 0.145 m, against the operational 0.2 m stored in
    ``display.dof_range_m``.
    """
    return display.pixel_size_m / math.tan(math.radians(display.angular_resolution_deg))


def capture_angular_resolution(capture: CaptureParams) -> float:
    """Angular sampling of the capture grid in degrees: ``atan(b / z_f)``."""
    return math.degrees(math.atan(capture.view_spacing_m / capture.viewer_distance_m))


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def optimal_radius(alpha_s: float, alpha_c: float) -> int:
    """Display-optimal circular filter radius in views.

    ``0.5 * floor(alpha_s / alpha_c)`` rounded half up, so 0.95/0.072 gives
    ``0.5 * 13 = 6.5 -> 7``.
    """
    if not alpha_c > 0:
        raise ValueError("alpha_c must be positive (invalid capture geometry)")
    if not alpha_s > 0:
        raise ValueError("alpha_s must be positive")
    ratio = alpha_s / alpha_c
    nearest = round(ratio)
    # integer ratios may land one ulp below after scaling both angles
    steps = nearest if math.isclose(ratio, nearest, rel_tol=1e-9) else math.floor(ratio)
    return round_half_up(0.5 * steps)
