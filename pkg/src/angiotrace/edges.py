"""Canny contour detection.

Gaussian smoothing, 3x3 Sobel gradients, non-maximum suppression along
the quantized gradient direction, and two-level hysteresis where the
thresholds are fractions of the per-image maximum gradient magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidThresholdOrder, NonPositiveSigma
from .filtering import convolve, gaussian_kernel
from .raster import BinaryMask, FloatImage, GrayImage, as_float

_SOBEL_X = np.array([[-1, 0, 1],
                     [-2, 0, 2],
                     [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


@dataclass(frozen=True)
class GradientField:
    gx: FloatImage
    gy: FloatImage
    magnitude: FloatImage
    direction: FloatImage        # atan2(gy, gx), in (-pi, pi]


def sobel_gradients(image) -> GradientField:
    """3x3 Sobel pair with edge-replicated borders."""
    img = as_float(image)
    gx = ndimage.correlate(img, _SOBEL_X, mode="nearest")
    gy = ndimage.correlate(img, _SOBEL_Y, mode="nearest")
    mag = np.hypot(gx, gy)
    return GradientField(gx=gx, gy=gy, magnitude=mag, direction=np.arctan2(gy, gx))


# neighbor offsets (dy, dx) per direction bin: 0, 45, 90, 135 degrees
_BIN_OFFSETS = ((0, 1), (1, 1), (-1, 0), (1, -1))


def _quantize_direction(direction: np.ndarray) -> np.ndarray:
    """Map angles to bins {0: 0deg, 1: 45deg, 2: 90deg, 3: 135deg}.

    Nearest bin; exact 22.5-degree ties round toward the lower bin.
    The image y axis points down, so a 45-degree gradient (gx > 0, gy > 0)
    steps toward the (1, 1)/(-1, -1) pixel offsets and a 135-degree one
    toward (1, -1)/(-1, 1).
    """
    deg = np.mod(np.degrees(direction), 180.0)
    bins = np.zeros(deg.shape, dtype=np.int8)
    bins[(deg > 22.5) & (deg <= 67.5)] = 1
    bins[(deg > 67.5) & (deg <= 112.5)] = 2
    bins[(deg > 112.5) & (deg <= 157.5)] = 3
    return bins


def _nms(magnitude: np.ndarray, bins: np.ndarray) -> np.ndarray:
    """Keep gradient-direction local maxima; plateau of two keeps one pixel."""
    h, w = magnitude.shape
    padded = np.pad(magnitude, 1, mode="edge")
    keep = np.zeros((h, w), dtype=bool)
    for b, (dy, dx) in enumerate(_BIN_OFFSETS):
        fwd = padded[1 + dy: h + 1 + dy, 1 + dx: w + 1 + dx]
        bwd = padded[1 - dy: h + 1 - dy, 1 - dx: w + 1 - dx]
        sel = bins == b
        keep |= sel & (magnitude > fwd) & (magnitude >= bwd)
    return keep


def canny(image: GrayImage, sigma: float = 1.0,
          low: float = 0.15, high: float = 0.4) -> BinaryMask:
    """Canny edges as a binary mask of 1-px curves.

    ``low`` and ``high`` are fractions of the maximum gradient magnitude of
    the smoothed image. Pixels at or above ``high * max`` seed the edge set;
    pixels at or above ``low * max`` survive when 8-connected to a seed.
    """
    if not (0.0 < low < high <= 1.0):
        raise InvalidThresholdOrder(f"need 0 < low < high <= 1, got low={low} high={high}")
    if sigma <= 0:
        raise NonPositiveSigma(f"sigma must be > 0, got {sigma}")

    smoothed = convolve(as_float(image), gaussian_kernel(sigma))
    grad = sobel_gradients(smoothed)
    peak = float(grad.magnitude.max())
    if peak == 0.0:
        return np.zeros(grad.magnitude.shape, dtype=bool)

    bins = _quantize_direction(grad.direction)
    thin = _nms(grad.magnitude, bins)

    weak = thin & (grad.magnitude >= low * peak)
    strong = thin & (grad.magnitude >= high * peak)
    if not strong.any():
        return np.zeros_like(weak)
    labels, _ = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    kept_labels = np.unique(labels[strong])
    return np.isin(labels, kept_labels) & weak
