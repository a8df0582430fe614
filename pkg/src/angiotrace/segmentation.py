"""Global thresholding (Otsu) and binary morphology.

Morphology uses centered symmetric structuring elements; pixels outside
the image count as background for both erosion tests and dilation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import ndimage

from .errors import DegenerateHistogram
from .raster import BinaryMask, FloatImage, GrayImage, as_mask

ERODE, DILATE, OPEN, CLOSE = "erode", "dilate", "open", "close"


@dataclass(frozen=True)
class StructuringElement:
    shape: str                          # "square" | "disk"
    radius: int
    offsets: Tuple[Tuple[int, int], ...]  # (dx, dy) members, includes (0, 0)


def square_se(radius: int) -> StructuringElement:
    offs = tuple((dx, dy)
                 for dy in range(-radius, radius + 1)
                 for dx in range(-radius, radius + 1))
    return StructuringElement("square", radius, offs)


def disk_se(radius: int) -> StructuringElement:
    offs = tuple((dx, dy)
                 for dy in range(-radius, radius + 1)
                 for dx in range(-radius, radius + 1)
                 if dx * dx + dy * dy <= radius * radius)
    return StructuringElement("disk", radius, offs)


# ---------------------------------------------------------------------------
# Otsu
# ---------------------------------------------------------------------------

def histogram256(image: GrayImage) -> np.ndarray:
    """256-bin counts of a uint8 image."""
    return np.bincount(np.asarray(image, dtype=np.uint8).ravel(), minlength=256)


def quantize256(image: FloatImage) -> GrayImage:
    """Min-max quantize a real-valued image to 256 gray levels.

    Constant images quantize to all-zero.
    """
    arr = np.asarray(image, dtype=np.float64)
    lo, hi = float(arr.min()), float(arr.max())
    if hi <= lo:
        return np.zeros(arr.shape, dtype=np.uint8)
    return np.floor((arr - lo) / (hi - lo) * 255.0 + 0.5).astype(np.uint8)


def otsu_from_histogram(counts: np.ndarray) -> int:
    """Threshold t in [0, 255] maximizing between-class variance.

    Classes split as background <= t < foreground; ties keep the smallest t.
    """
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if np.count_nonzero(counts) < 2:
        raise DegenerateHistogram("image has fewer than two distinct gray levels")
    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(counts)
    mu0_sum = np.cumsum(counts * levels)
    mu_total = mu0_sum[-1]
    w1 = total - w0
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = np.where(w0 > 0, mu0_sum / w0, 0.0)
        mu1 = np.where(w1 > 0, (mu_total - mu0_sum) / w1, 0.0)
    sigma_b = np.where((w0 > 0) & (w1 > 0), w0 * w1 * (mu0 - mu1) ** 2, -1.0)
    return int(np.argmax(sigma_b))    # argmax takes the first (smallest) maximizer


def otsu_threshold(image) -> int:
    """Otsu threshold of a GrayImage, or of a FloatImage after 256-bin quantization."""
    arr = np.asarray(image)
    if arr.dtype != np.uint8:
        arr = quantize256(arr)
    return otsu_from_histogram(histogram256(arr))


def binarize(image, t: int) -> BinaryMask:
    """Foreground where pixel > t (strict)."""
    return np.asarray(image) > t


# ---------------------------------------------------------------------------
# Morphology
# ---------------------------------------------------------------------------

def _shift(mask: BinaryMask, dx: int, dy: int) -> BinaryMask:
    """mask translated so that out[y, x] = mask[y + dy, x + dx]; outside = False."""
    h, w = mask.shape
    out = np.zeros_like(mask)
    ys = slice(max(0, dy), min(h, h + dy))
    xs = slice(max(0, dx), min(w, w + dx))
    yd = slice(max(0, -dy), min(h, h - dy))
    xd = slice(max(0, -dx), min(w, w - dx))
    out[yd, xd] = mask[ys, xs]
    return out


def erode(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    mask = as_mask(mask)
    out = np.ones_like(mask)
    for dx, dy in se.offsets:
        out &= _shift(mask, dx, dy)
    return out


def dilate(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    mask = as_mask(mask)
    out = np.zeros_like(mask)
    for dx, dy in se.offsets:
        out |= _shift(mask, -dx, -dy)
    return out


def morphology(mask: BinaryMask, se: StructuringElement, kind: str) -> BinaryMask:
    if kind == ERODE:
        return erode(mask, se)
    if kind == DILATE:
        return dilate(mask, se)
    if kind == OPEN:
        return dilate(erode(mask, se), se)
    if kind == CLOSE:
        # evaluate on a virtually padded domain so the dilation can extend
        # past the frame; otherwise closing loses border pixels and stops
        # being extensive
        r = se.radius
        padded = np.pad(as_mask(mask), r, constant_values=False)
        closed = erode(dilate(padded, se), se)
        return closed[r:-r, r:-r]
    raise ValueError(f"unknown morphology kind {kind!r}")


_STRUCTURE_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCTURE_8 = np.ones((3, 3), dtype=bool)


def remove_small_components(mask: BinaryMask, min_size: int,
                            connectivity: int = 8) -> BinaryMask:
    """Drop connected components with area < min_size; others stay bit-identical."""
    if min_size < 0:
        raise ValueError("min_size must be >= 0")
    mask = as_mask(mask)
    if min_size == 0:
        return mask.copy()
    structure = _STRUCTURE_8 if connectivity == 8 else _STRUCTURE_4
    labels, n = ndimage.label(mask, structure=structure)
    if n == 0:
        return mask.copy()
    areas = np.bincount(labels.ravel())
    keep = areas >= min_size
    keep[0] = False
    return keep[labels]


def connected_components(mask: BinaryMask, connectivity: int = 8):
    """Label map and component count (0 = background)."""
    structure = _STRUCTURE_8 if connectivity == 8 else _STRUCTURE_4
    labels, n = ndimage.label(as_mask(mask), structure=structure)
    return labels, int(n)
