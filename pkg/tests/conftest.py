import json
from pathlib import Path

import numpy as np
import pytest

from lfdasc.imageio import quantize, write_pfm, write_png


def write_scene(root: Path, views: np.ndarray, depth: np.ndarray | None = None,
                seg_rgb: np.ndarray | None = None, background=(0, 0, 0), scene="synthetic",
                bit_depth=8, extra=None) -> Path:
    """Write an (S, T, H, W, 3) float light field plus maps and a manifest; return the manifest path."""
    root.mkdir(parents=True, exist_ok=True)
    cols, rows = views.shape[:2]
    pattern = "view_{t:02d}_{s:02d}.png"
    for s in range(cols):
        for t in range(rows):
            write_png(root / pattern.format(s=s, t=t), quantize(views[s, t], bit_depth))
    doc = {
        "scene": scene,
        "grid": {"rows": rows, "cols": cols},
        "pattern": pattern,
        "capture": {"view_spacing_m": 0.00377, "viewer_distance_m": 3.0, "baseline_m": 2.64},
        "display": {"dof_range_m": 0.2},
    }
    if depth is not None:
        write_pfm(root / "depth.pfm", depth)
        doc["depth"] = {"path": "depth.pfm", "encoding": "pfm"}
    if seg_rgb is not None:
        write_png(root / "seg.png", seg_rgb.astype(np.uint8))
        doc["segmentation"] = {"path": "seg.png", "background": list(background)}
    if extra:
        doc.update(extra)
    manifest = root / "manifest.json"
    manifest.write_text(json.dumps(doc, indent=2))
    return manifest


def parallax_light_field(cols=5, rows=5, h=32, w=32, seed=0, disparity=1):
    """Textured light field whose content shifts ``disparity`` px per view step."""
    rng = np.random.default_rng(seed)
    base = rng.random((h + 2 * disparity * cols, w + 2 * disparity * cols, 3))
    views = np.empty((cols, rows, h, w, 3))
    for s in range(cols):
        for t in range(rows):
            dy, dx = disparity * t, disparity * s
            views[s, t] = base[dy:dy + h, dx:dx + w]
    return views


@pytest.fixture
def scene_writer(tmp_path):
    def _write(name="scene", **kw):
        return write_scene(tmp_path / name, **kw)
    return _write
