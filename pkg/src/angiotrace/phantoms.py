"""Synthetic test images: bars, tubes, and a full fake angiogram.

Used by the test suite and the demo scripts; ground truth (centerline,
width) is known by construction.
"""

from __future__ import annotations

import numpy as np

from .raster import GrayImage


def vertical_bar(size: int = 128, width: int = 7, dark: int = 80,
                 bright: int = 180) -> GrayImage:
    """Dark vertical bar of the given width centered in a bright field."""
    img = np.full((size, size), bright, dtype=np.uint8)
    c = size // 2
    half = width // 2
    img[:, c - half: c - half + width] = dark
    return img


def horizontal_tube(size: int = 128, width: int = 7, row: int = None,
                    dark: int = 80, bright: int = 180) -> GrayImage:
    """Dark horizontal tube crossing the full image width.

    Returns (image, center_row). The tube spans every column, so the
    thinned centerline covers any interior trace window.
    """
    img = np.full((size, size), bright, dtype=np.uint8)
    row = size // 2 if row is None else row
    half = width // 2
    img[row - half: row - half + width, :] = dark
    return img


def tube_mask(size: int = 128, width: int = 7, angle: int = 0) -> np.ndarray:
    """Boolean tube mask at 0, 45, or 90 degrees through the image center."""
    c = size // 2
    yy, xx = np.mgrid[0:size, 0:size]
    half = width // 2
    if angle == 0:
        return np.abs(yy - c) <= half
    if angle == 90:
        return np.abs(xx - c) <= half
    if angle == 45:
        # perpendicular width ~ (2k+1)/sqrt(2); k=4 approximates width 7
        return np.abs(xx - yy) <= half + 1
    raise ValueError("angle must be 0, 45, or 90")


def gaussian_blob(size: int = 64, center=(32, 32), sigma: float = 4.0,
                  amplitude: float = 1.0) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size]
    cx, cy = center
    return amplitude * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * sigma ** 2))


def random_blob_mask(rng: np.random.Generator, size: int = 32,
                     smooth: int = 2, density: float = 0.5) -> np.ndarray:
    """Random blobby mask via box-smoothed noise thresholding."""
    from scipy import ndimage
    noise = rng.random((size, size))
    smoothed = ndimage.uniform_filter(noise, size=2 * smooth + 1)
    return smoothed > np.quantile(smoothed, 1.0 - density)


def synthetic_angiogram(size: int = 512, seed: int = 7) -> GrayImage:
    """Fake coronary frame: bright field, mild noise, dark curved vessels."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    base = 170.0 + 20.0 * (xx + yy) / (2 * size)       # gentle illumination ramp
    img = base + rng.normal(0.0, 3.0, (size, size))

    def stamp(points, width):
        for i in range(len(points) - 1):
            (x0, y0), (x1, y1) = points[i], points[i + 1]
            steps = int(max(abs(x1 - x0), abs(y1 - y0))) + 1
            for t in np.linspace(0.0, 1.0, steps):
                cx, cy = x0 + t * (x1 - x0), y0 + t * (y1 - y0)
                r = width / 2.0
                x_lo, x_hi = int(cx - r - 1), int(cx + r + 2)
                y_lo, y_hi = int(cy - r - 1), int(cy + r + 2)
                sl = np.s_[max(0, y_lo):min(size, y_hi), max(0, x_lo):min(size, x_hi)]
                dy = yy[sl] - cy
                dx = xx[sl] - cx
                inside = dx ** 2 + dy ** 2 <= r ** 2
                img[sl][inside] = np.minimum(img[sl][inside], 80.0)

    main = [(60, 40), (140, 150), (200, 290), (300, 420), (430, 470)]
    branch = [(140, 150), (260, 180), (380, 240), (470, 330)]
    small = [(200, 290), (150, 380), (110, 470)]
    stamp(main, 12)
    stamp(branch, 8)
    stamp(small, 5)
    return np.clip(img, 0, 255).astype(np.uint8)
