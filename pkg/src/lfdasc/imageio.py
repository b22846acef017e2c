"""PNG and PFM reading/writing used by the loaders.

PNG decoding goes through OpenCV because Pillow cannot read 16-bit RGB.
Images are returned in RGB channel order.
"""

from __future__ import annotations

import re
from pathlib import Path

import cv2
import numpy as np

__all__ = ["read_png", "write_png", "read_pfm", "write_pfm", "to_unit_float", "quantize"]


def read_png(path: str | Path) -> np.ndarray:
    """Decode a PNG keeping its bit depth. Returns HxW or HxWx3 (RGB), alpha dropped."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"image not found: {path}")
    img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if img is None:
        raise ValueError(f"cannot decode image: {path}")
    if img.ndim == 3:
        if img.shape[2] == 4:
            img = img[:, :, :3]
        img = img[:, :, ::-1]
    return np.ascontiguousarray(img)


def write_png(path: str | Path, image: np.ndarray) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    img = image
    if img.ndim == 3:
        img = np.ascontiguousarray(img[:, :, ::-1])
    if not cv2.imwrite(str(path), img):
        raise OSError(f"cannot write image: {path}")


def to_unit_float(img: np.ndarray) -> np.ndarray:
    """Integer samples to float64 in [0, 1] using the dtype's full range."""
    if img.dtype == np.uint8:
        return img.astype(np.float64) / 255.0
    if img.dtype == np.uint16:
        return img.astype(np.float64) / 65535.0
    if np.issubdtype(img.dtype, np.floating):
        return img.astype(np.float64)
    raise ValueError(f"unsupported sample type {img.dtype}")


def quantize(img: np.ndarray, bit_depth: int = 8) -> np.ndarray:
    """Float [0, 1] to 8- or 16-bit integers with round-to-nearest."""
    if bit_depth == 8:
        top, dtype = 255.0, np.uint8
    elif bit_depth == 16:
        top, dtype = 65535.0, np.uint16
    else:
        raise ValueError("bit_depth must be 8 or 16")
    return np.rint(np.clip(img, 0.0, 1.0) * top).astype(dtype)


_PFM_DIMS = re.compile(rb"^\s*(\d+)\s+(\d+)\s*$")


def read_pfm(path: str | Path) -> np.ndarray:
    """Read a grayscale or colour PFM. Rows are flipped to top-to-bottom order."""
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.readline().strip()
        if header == b"Pf":
            channels = 1
        elif header == b"PF":
            channels = 3
        else:
            raise ValueError(f"{path}: not a PFM file")
        m = _PFM_DIMS.match(fh.readline())
        if m is None:
            raise ValueError(f"{path}: malformed PFM dimensions")
        width, height = int(m.group(1)), int(m.group(2))
        scale = float(fh.readline().strip())
        endian = "<" if scale < 0 else ">"
        data = np.fromfile(fh, dtype=endian + "f4")
    expected = width * height * channels
    if data.size != expected:
        raise ValueError(f"{path}: expected {expected} samples, found {data.size}")
    shape = (height, width, channels) if channels == 3 else (height, width)
    return np.flipud(data.reshape(shape)).astype(np.float64)


def write_pfm(path: str | Path, data: np.ndarray) -> None:
    """Write float32 little-endian PFM."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arr = np.asarray(data, dtype="<f4")
    if arr.ndim == 2:
        header = b"Pf"
    elif arr.ndim == 3 and arr.shape[2] == 3:
        header = b"PF"
    else:
        raise ValueError("PFM data must be HxW or HxWx3")
    height, width = arr.shape[:2]
    with open(path, "wb") as fh:
        fh.write(header + b"\n")
        fh.write(f"{width} {height}\n".encode())
        fh.write(b"-1.0\n")
        fh.write(np.ascontiguousarray(np.flipud(arr)).tobytes())
