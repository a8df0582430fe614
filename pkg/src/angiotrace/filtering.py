"""Noise suppression and vessel enhancement.

Median filtering, normalized Gaussian masks, scale-normalized Hessian
fields computed with analytic derivative-of-Gaussian kernels, and the
multiscale vesselness filter (Frangi-style eigenvalue analysis) with
per-pixel magnitude, orientation, and best responding scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .errors import EvenSize, EvenWindow, NonPositiveSigma
from .raster import FloatImage, GrayImage, as_float

DARK_ON_BRIGHT = "dark-on-bright"
BRIGHT_ON_DARK = "bright-on-dark"


# ---------------------------------------------------------------------------
# Gaussian kernels
# ---------------------------------------------------------------------------

def default_kernel_size(sigma: float) -> int:
    """Smallest odd integer >= 6 * sigma (at least 1)."""
    size = max(1, math.ceil(6.0 * sigma))
    return size if size % 2 == 1 else size + 1


@dataclass(frozen=True)
class GaussianKernel:
    """Normalized 2D Gaussian mask g(x, y) evaluated on an odd square lattice."""

    size: int
    sigma: float
    coefficients: np.ndarray


def gaussian_kernel(sigma: float, size: Optional[int] = None) -> GaussianKernel:
    """Build a normalized Gaussian mask.

    Coefficients are proportional to
    ``exp(-((x - xc)^2 + (y - yc)^2) / (2 sigma^2))`` and normalized to sum 1.
    If ``size`` is omitted it defaults to the smallest odd integer >= 6 sigma.
    """
    if sigma <= 0:
        raise NonPositiveSigma(f"sigma must be > 0, got {sigma}")
    if size is None:
        size = default_kernel_size(sigma)
    if size < 1 or size % 2 == 0:
        raise EvenSize(f"kernel size must be odd and >= 1, got {size}")
    r = size // 2
    ax = np.arange(-r, r + 1, dtype=np.float64)
    xx, yy = np.meshgrid(ax, ax)
    coeff = np.exp(-(xx ** 2 + yy ** 2) / (2.0 * sigma ** 2))
    coeff /= coeff.sum()
    return GaussianKernel(size=size, sigma=sigma, coefficients=coeff)


def convolve(image, kernel: GaussianKernel) -> FloatImage:
    """2D convolution with edge replication at the borders."""
    img = as_float(image)
    return ndimage.convolve(img, kernel.coefficients, mode="nearest")


def median_filter(image: GrayImage, window: int) -> GrayImage:
    """Median of the window x window replicated-border neighborhood."""
    if window < 1 or window % 2 == 0:
        raise EvenWindow(f"median window must be odd and >= 1, got {window}")
    if window == 1:
        return np.asarray(image, dtype=np.uint8).copy()
    return ndimage.median_filter(np.asarray(image, dtype=np.uint8),
                                 size=window, mode="nearest")


# ---------------------------------------------------------------------------
# Scale-space Hessian
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HessianField:
    """Scale-normalized second derivatives (each multiplied by sigma^2)."""

    sigma: float
    dxx: FloatImage
    dyy: FloatImage
    dxy: FloatImage


def _derivative_kernels(sigma: float):
    """Sampled 1D Gaussian and its first/second derivatives.

    The samples are corrected so that discrete moments match the continuous
    ones exactly: sum(g) = 1, sum(g1 * x) = -1, sum(g2 * x^2) = 2 with
    sum(g1) = sum(g2) = 0. This keeps responses to quadratic inputs exact.
    """
    size = max(3, default_kernel_size(sigma))
    r = size // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-x ** 2 / (2.0 * sigma ** 2))
    g /= g.sum()
    g1 = -x / sigma ** 2 * g
    g1 -= g1.mean()                       # enforce zero DC
    s1 = np.sum(g1 * x)
    g1 *= -1.0 / s1                        # d/dx of a ramp -> slope
    g2 = (x ** 2 / sigma ** 4 - 1.0 / sigma ** 2) * g
    g2 -= g2.mean()
    s2 = np.sum(g2 * x ** 2)
    g2 *= 2.0 / s2                         # d2/dx2 of x^2 -> 2
    return g, g1, g2


def hessian_at_scale(image, sigma: float) -> HessianField:
    """Second-derivative field at one scale, multiplied by sigma^2.

    Separable convolution with analytic derivative-of-Gaussian kernels;
    borders are edge-replicated.
    """
    if sigma <= 0:
        raise NonPositiveSigma(f"sigma must be > 0, got {sigma}")
    img = as_float(image)
    g, g1, g2 = _derivative_kernels(sigma)
    s2 = sigma ** 2

    def sep(kx, ky):
        out = ndimage.correlate1d(img, kx, axis=1, mode="nearest")
        return ndimage.correlate1d(out, ky, axis=0, mode="nearest")

    dxx = sep(g2, g) * s2
    dyy = sep(g, g2) * s2
    dxy = sep(g1, g1) * s2
    return HessianField(sigma=sigma, dxx=dxx, dyy=dyy, dxy=dxy)


# ---------------------------------------------------------------------------
# Multiscale vesselness
# ---------------------------------------------------------------------------

DEFAULT_SCALES = (1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0)

AUTO = "auto"


@dataclass(frozen=True)
class FrangiParams:
    scales: Sequence[float] = DEFAULT_SCALES
    beta: float = 0.5
    c: object = AUTO               # "auto" -> half the max Frobenius norm per scale
    polarity: str = DARK_ON_BRIGHT

    def __post_init__(self):
        scales = tuple(float(s) for s in self.scales)
        if not scales:
            raise ValueError("scales must be non-empty")
        if any(s <= 0 for s in scales):
            raise NonPositiveSigma("all scales must be > 0")
        if any(b >= a for a, b in zip(scales[1:], scales[:-1])):
            raise ValueError("scales must be strictly increasing")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if self.c != AUTO and float(self.c) <= 0:
            raise ValueError("c must be > 0 or 'auto'")
        if self.polarity not in (DARK_ON_BRIGHT, BRIGHT_ON_DARK):
            raise ValueError(f"unknown polarity {self.polarity!r}")
        object.__setattr__(self, "scales", scales)


@dataclass(frozen=True)
class VesselnessMap:
    magnitude: FloatImage          # in [0, 1]
    orientation: FloatImage        # radians in [0, pi)
    best_scale: FloatImage         # member of params.scales per pixel


def _eigen_small(dxx, dyy, dxy):
    """Eigenvalue of smaller |.| (ties -> smaller signed value) and both."""
    half_trace = 0.5 * (dxx + dyy)
    root = np.sqrt((0.5 * (dxx - dyy)) ** 2 + dxy ** 2)
    lam_hi = half_trace + root    # larger signed value
    lam_lo = half_trace - root    # smaller signed value
    lam1 = np.where(np.abs(lam_hi) < np.abs(lam_lo), lam_hi, lam_lo)
    lam2 = np.where(np.abs(lam_hi) < np.abs(lam_lo), lam_lo, lam_hi)
    return lam1, lam2


def _orientation_of_small(dxx, dyy, dxy, lam1):
    """Angle of the eigenvector of the smaller-|.| eigenvalue, in [0, pi).

    Two valid eigenvector expressions exist per row of (H - lam I); the one
    with the larger norm is numerically stable and is selected per pixel.
    """
    vx_a, vy_a = lam1 - dyy, dxy
    vx_b, vy_b = dxy, lam1 - dxx
    na = vx_a ** 2 + vy_a ** 2
    nb = vx_b ** 2 + vy_b ** 2
    vx = np.where(na >= nb, vx_a, vx_b)
    vy = np.where(na >= nb, vy_a, vy_b)
    degenerate = (na == 0) & (nb == 0)
    vx = np.where(degenerate, 1.0, vx)
    vy = np.where(degenerate, 0.0, vy)
    theta = np.mod(np.arctan2(vy, vx), np.pi)
    # atan2 of (-v) can land exactly on pi; fold it back to 0
    theta = np.where(theta >= np.pi, 0.0, theta)
    return theta


def frangi_vesselness(image, params: FrangiParams = FrangiParams()) -> VesselnessMap:
    """Multiscale vesselness: per-pixel max response over scales.

    Per scale, with |lam1| <= |lam2|: the response is
    ``exp(-Rb^2 / (2 beta^2)) * (1 - exp(-S^2 / (2 c^2)))`` where
    ``Rb = |lam1| / |lam2|`` and ``S = sqrt(lam1^2 + lam2^2)``; it is zero
    where the polarity test fails (dark-on-bright requires lam2 > 0) or
    lam2 == 0. Ties across scales keep the first maximal scale.
    """
    img = as_float(image)
    # subtract the minimum so a constant image yields an exactly-zero
    # Hessian and adding a constant offset cannot change the result
    img = img - img.min()
    magnitude = np.zeros(img.shape, dtype=np.float64)
    orientation = None
    best_scale = np.full(img.shape, params.scales[0], dtype=np.float64)

    for sigma in params.scales:
        h = hessian_at_scale(img, sigma)
        lam1, lam2 = _eigen_small(h.dxx, h.dyy, h.dxy)
        s_norm = np.sqrt(lam1 ** 2 + lam2 ** 2)
        if params.c == AUTO:
            c = 0.5 * float(s_norm.max())
            if c <= 0:
                c = 1e-6
        else:
            c = float(params.c)
        with np.errstate(divide="ignore", invalid="ignore"):
            rb2 = np.where(lam2 != 0, (lam1 / np.where(lam2 == 0, 1.0, lam2)) ** 2, 0.0)
        resp = np.exp(-rb2 / (2.0 * params.beta ** 2)) * \
            (1.0 - np.exp(-s_norm ** 2 / (2.0 * c ** 2)))
        if params.polarity == DARK_ON_BRIGHT:
            ok = lam2 > 0
        else:
            ok = lam2 < 0
        resp = np.where(ok, resp, 0.0)

        theta = _orientation_of_small(h.dxx, h.dyy, h.dxy, lam1)
        if orientation is None:
            # zero-response pixels keep the first scale's orientation
            orientation = theta
            better = resp > 0
        else:
            better = resp > magnitude
            orientation = np.where(better, theta, orientation)
        magnitude = np.where(better, resp, magnitude)
        best_scale = np.where(better, sigma, best_scale)

    return VesselnessMap(magnitude=magnitude, orientation=orientation, best_scale=best_scale)
