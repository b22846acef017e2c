"""Light field data model and manifest-driven loading.

A scene is described by a JSON manifest sitting next to its files::

    {
      "scene": "toys",
      "grid": {"rows": 9, "cols": 9},
      "pattern": "view_{t:02d}_{s:02d}.png",
      "capture": {"view_spacing_m": 0.00377, "viewer_distance_m": 3.0, "baseline_m": 2.64},
      "display": {"dof_range_m": 0.2},
      "depth": {"path": "depth.pfm", "encoding": "pfm"},
      "segmentation": {"path": "seg.png", "background": [0, 0, 0], "exclude": []}
    }

``pattern`` is a ``str.format`` template with integer fields ``t`` (row) and
``s`` (column). Relative paths resolve against the manifest's directory.
``depth`` accepts ``"encoding": "png16"`` with ``scale``/``offset`` (meters per
code value, meters), and ``"convention": "camera_distance"`` with
``screen_distance_m`` when stored depth is measured from the camera rather
than signed from the screen plane. An optional ``central_view`` path names the
image used for texture factors; otherwise the grid's centre view is used.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from .display_model import CaptureParams, DisplayParams
from .imageio import quantize, read_png, to_unit_float, write_png

__all__ = [
    "ManifestError",
    "MissingViewError",
    "DepthSpec",
    "SegmentationSpec",
    "Manifest",
    "LightField",
    "load_manifest",
    "load_light_field",
    "get_view",
    "write_views",
    "DEFAULT_PATTERN",
]

log = logging.getLogger(__name__)

DEFAULT_PATTERN = "view_{t:02d}_{s:02d}.png"


class ManifestError(ValueError):
    """Manifest is malformed or references something invalid."""


class MissingViewError(FileNotFoundError):
    def __init__(self, s: int, t: int, path: Path):
        super().__init__(f"missing view (s={s}, t={t}): {path}")
        self.s, self.t, self.path = s, t, path


@dataclass(frozen=True)
class DepthSpec:
    path: Path
    encoding: str = "pfm"
    scale: float = 1.0
    offset: float = 0.0
    convention: str = "signed"
    screen_distance_m: float = 0.0


@dataclass(frozen=True)
class SegmentationSpec:
    path: Path
    background: int | None = None
    exclude: tuple[int, ...] = ()


@dataclass(frozen=True)
class Manifest:
    path: Path
    scene: str
    grid_rows: int
    grid_cols: int
    pattern: str
    capture: CaptureParams
    display: DisplayParams
    depth: DepthSpec | None = None
    segmentation: SegmentationSpec | None = None
    central_view: Path | None = None

    @property
    def root(self) -> Path:
        return self.path.parent

    def view_path(self, s: int, t: int) -> Path:
        return self.root / self.pattern.format(s=s, t=t)

    def view_paths(self) -> list[tuple[int, int, Path]]:
        """All (s, t, path) triples, row-major (t outer, s inner)."""
        return [(s, t, self.view_path(s, t)) for t in range(self.grid_rows) for s in range(self.grid_cols)]


def pack_label(value: Any) -> int:
    """RGB triple or integer label to a single integer (0xRRGGBB for triples)."""
    if isinstance(value, (list, tuple)):
        if len(value) != 3:
            raise ManifestError(f"colour label must have 3 components, got {value!r}")
        r, g, b = (int(v) for v in value)
        return (r << 16) | (g << 8) | b
    return int(value)


def _require(doc: dict, key: str, where: str) -> Any:
    if key not in doc:
        raise ManifestError(f"{where}: missing required field '{key}'")
    return doc[key]


def _dataclass_overrides(cls, doc: dict, where: str, **base) -> Any:
    known = {f.name for f in fields(cls)}
    unknown = set(doc) - known
    if unknown:
        raise ManifestError(f"{where}: unknown field(s) {sorted(unknown)}")
    try:
        return cls(**{**base, **doc})
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"{where}: {exc}") from exc


def load_manifest(manifest_path: str | Path) -> Manifest:
    path = Path(manifest_path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ManifestError(f"{path}: top level must be an object")

    grid = doc.get("grid", {"rows": 1, "cols": 1})
    try:
        rows, cols = int(_require(grid, "rows", "grid")), int(_require(grid, "cols", "grid"))
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"{path}: grid: {exc}") from exc
    if rows < 1 or cols < 1:
        raise ManifestError(f"{path}: grid must be at least 1x1, got {rows}x{cols}")

    pattern = doc.get("pattern", DEFAULT_PATTERN)
    try:
        names = {pattern.format(s=s, t=t) for t in range(rows) for s in range(cols)}
    except (KeyError, IndexError, ValueError) as exc:
        raise ManifestError(f"{path}: pattern {pattern!r} is not a valid (s, t) template") from exc
    if len(names) != rows * cols:
        raise ManifestError(f"{path}: pattern {pattern!r} does not yield {rows * cols} distinct names")

    capture = _dataclass_overrides(
        CaptureParams, dict(doc.get("capture", {})), "capture", grid_rows=rows, grid_cols=cols
    )
    if (capture.grid_rows, capture.grid_cols) != (rows, cols):
        raise ManifestError("capture: grid_rows/grid_cols disagree with grid")
    display = _dataclass_overrides(DisplayParams, dict(doc.get("display", {})), "display")

    root = path.parent
    depth = None
    if "depth" in doc:
        d = dict(doc["depth"])
        d["path"] = root / _require(d, "path", "depth")
        depth = _dataclass_overrides(DepthSpec, d, "depth")
        if depth.encoding not in ("pfm", "png16"):
            raise ManifestError(f"depth.encoding must be 'pfm' or 'png16', got {depth.encoding!r}")
        if depth.convention not in ("signed", "camera_distance"):
            raise ManifestError(f"depth.convention must be 'signed' or 'camera_distance', got {depth.convention!r}")

    seg = None
    if "segmentation" in doc:
        d = dict(doc["segmentation"])
        d["path"] = root / _require(d, "path", "segmentation")
        bg = d.get("background")
        d["background"] = None if bg is None else pack_label(bg)
        d["exclude"] = tuple(pack_label(v) for v in d.get("exclude", ()))
        seg = _dataclass_overrides(SegmentationSpec, d, "segmentation")

    central = doc.get("central_view")
    return Manifest(
        path=path,
        scene=str(doc.get("scene", path.parent.name)),
        grid_rows=rows,
        grid_cols=cols,
        pattern=pattern,
        capture=capture,
        display=display,
        depth=depth,
        segmentation=seg,
        central_view=None if central is None else root / central,
    )


@dataclass(frozen=True, eq=False)
class LightField:
    """Views indexed ``views[s, t]`` -> (height, width, 3) float64 RGB in [0, 1].

    ``s`` is the grid column, ``t`` the grid row. The array is read-only.
    """

    views: np.ndarray
    capture: CaptureParams = field(default_factory=CaptureParams)

    def __post_init__(self) -> None:
        v = np.asarray(self.views, dtype=np.float64)
        if v.ndim != 5 or v.shape[-1] != 3:
            raise ValueError(f"views must have shape (S, T, H, W, 3), got {v.shape}")
        if (v.shape[0], v.shape[1]) != (self.capture.grid_cols, self.capture.grid_rows):
            raise ValueError(
                f"view grid {v.shape[0]}x{v.shape[1]} (cols x rows) does not match capture "
                f"{self.capture.grid_cols}x{self.capture.grid_rows}"
            )
        if v is self.views:
            v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "views", v)

    @classmethod
    def from_array(cls, views: np.ndarray, capture: CaptureParams | None = None) -> "LightField":
        """Wrap an (S, T, H, W, 3) array, filling the capture grid from its shape."""
        views = np.asarray(views, dtype=np.float64)
        base = capture or CaptureParams()
        capture = CaptureParams(
            view_spacing_m=base.view_spacing_m,
            viewer_distance_m=base.viewer_distance_m,
            baseline_m=base.baseline_m,
            view_resolution_px=base.view_resolution_px,
            grid_rows=views.shape[1],
            grid_cols=views.shape[0],
        )
        return cls(views, capture)

    @property
    def grid(self) -> tuple[int, int]:
        """(cols, rows) i.e. extents along s and t."""
        return self.views.shape[0], self.views.shape[1]

    @property
    def image_shape(self) -> tuple[int, int]:
        return self.views.shape[2], self.views.shape[3]

    @property
    def center(self) -> tuple[int, int]:
        return self.views.shape[0] // 2, self.views.shape[1] // 2


def _decode_view(s: int, t: int, path: Path) -> np.ndarray:
    if not path.is_file():
        raise MissingViewError(s, t, path)
    img = read_png(path)
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    return to_unit_float(img)


def load_light_field(manifest_path: "str | Path | Manifest", workers: int | None = None) -> LightField:
    manifest = manifest_path if isinstance(manifest_path, Manifest) else load_manifest(manifest_path)
    entries = manifest.view_paths()
    for s, t, p in entries:
        if not p.is_file():
            raise MissingViewError(s, t, p)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        images = list(pool.map(lambda e: _decode_view(*e), entries))

    h, w = images[0].shape[:2]
    views = np.empty((manifest.grid_cols, manifest.grid_rows, h, w, 3), dtype=np.float64)
    for (s, t, p), img in zip(entries, images):
        if img.shape[:2] != (h, w):
            raise ValueError(f"view (s={s}, t={t}) {p} is {img.shape[1]}x{img.shape[0]}, expected {w}x{h}")
        views[s, t] = img
    log.debug("loaded %d views of %dx%d from %s", len(entries), w, h, manifest.path)
    return LightField(views, manifest.capture)


def get_view(lf: LightField, s: int, t: int) -> np.ndarray:
    cols, rows = lf.grid
    if not (0 <= s < cols and 0 <= t < rows):
        raise IndexError(f"view index (s={s}, t={t}) outside {cols}x{rows} grid")
    return lf.views[s, t]


def write_views(lf: LightField, outdir: str | Path, pattern: str = DEFAULT_PATTERN, bit_depth: int = 8) -> list[Path]:
    """Quantize and write every view as PNG. Returns the written paths, row-major."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cols, rows = lf.grid
    written = []
    for t in range(rows):
        for s in range(cols):
            p = outdir / pattern.format(s=s, t=t)
            write_png(p, quantize(lf.views[s, t], bit_depth))
            written.append(p)
    return written
