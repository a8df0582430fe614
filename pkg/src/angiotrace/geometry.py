"""Centerline geometry: natural cubic splines, path length, distance
transform, and radius estimation.

The spline is parametric over chord length and solved per coordinate via
the classical tridiagonal system in the interior second derivatives, with
both endpoint second derivatives pinned to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .errors import (DuplicateConsecutivePoints, EmptyPath,
                     ParameterOutOfRange, TooFewPoints)
from .raster import BinaryMask, FloatImage, as_mask


@dataclass(frozen=True)
class CubicSpline:
    """Parametric natural cubic interpolant through ordered 2D points."""

    points: np.ndarray             # (n, 2) control points
    knots: np.ndarray              # (n,) chord-length parameters
    second_x: np.ndarray           # (n,) second derivatives of x(t) at knots
    second_y: np.ndarray           # (n,) second derivatives of y(t) at knots


def solve_tridiagonal(sub: np.ndarray, diag: np.ndarray, sup: np.ndarray,
                      rhs: np.ndarray) -> np.ndarray:
    """Thomas algorithm for a tridiagonal system.

    ``sub`` has length n-1 (below the diagonal), ``diag`` length n,
    ``sup`` length n-1.
    """
    n = len(diag)
    c = np.array(sup, dtype=np.float64)
    d = np.array(rhs, dtype=np.float64)
    b = np.array(diag, dtype=np.float64)
    for i in range(1, n):
        m = sub[i - 1] / b[i - 1]
        b[i] -= m * c[i - 1]
        d[i] -= m * d[i - 1]
    x = np.empty(n, dtype=np.float64)
    x[-1] = d[-1] / b[-1]
    for i in range(n - 2, -1, -1):
        x[i] = (d[i] - c[i] * x[i + 1]) / b[i]
    return x


def _natural_system(t: np.ndarray, v: np.ndarray):
    """Tridiagonal system in the n-2 interior second derivatives."""
    h = np.diff(t)
    n = len(t)
    sub = h[1:-1] / 6.0
    diag = (h[:-1] + h[1:]) / 3.0
    sup = h[1:-1] / 6.0
    rhs = (v[2:] - v[1:-1]) / h[1:] - (v[1:-1] - v[:-2]) / h[:-1]
    return sub, diag, sup, rhs


def _solve_seconds(t: np.ndarray, v: np.ndarray) -> np.ndarray:
    n = len(t)
    m = np.zeros(n, dtype=np.float64)
    if n > 2:
        sub, diag, sup, rhs = _natural_system(t, v)
        m[1:-1] = solve_tridiagonal(sub, diag, sup, rhs)
    return m


def fit_natural_spline(points: Sequence[Tuple[float, float]]) -> CubicSpline:
    """Fit a natural cubic spline with chord-length parametrization.

    Two points degenerate to a straight segment. Consecutive points must
    be distinct.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise TooFewPoints("need at least 2 (x, y) control points")
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if np.any(steps == 0):
        raise DuplicateConsecutivePoints("consecutive control points must be distinct")
    knots = np.concatenate(([0.0], np.cumsum(steps)))
    return CubicSpline(points=pts, knots=knots,
                       second_x=_solve_seconds(knots, pts[:, 0]),
                       second_y=_solve_seconds(knots, pts[:, 1]))


def _eval_axis(t: float, knots: np.ndarray, v: np.ndarray, m: np.ndarray) -> float:
    i = int(np.searchsorted(knots, t, side="right")) - 1
    i = min(max(i, 0), len(knots) - 2)
    h = knots[i + 1] - knots[i]
    a = (knots[i + 1] - t) / h
    b = (t - knots[i]) / h
    return (a * v[i] + b * v[i + 1]
            + ((a ** 3 - a) * m[i] + (b ** 3 - b) * m[i + 1]) * h ** 2 / 6.0)


def eval_spline(spline: CubicSpline, t: float) -> Tuple[float, float]:
    """Evaluate the curve at parameter t; exact at knots."""
    if t < spline.knots[0] or t > spline.knots[-1]:
        raise ParameterOutOfRange(f"t={t} outside [{spline.knots[0]}, {spline.knots[-1]}]")
    return (_eval_axis(t, spline.knots, spline.points[:, 0], spline.second_x),
            _eval_axis(t, spline.knots, spline.points[:, 1], spline.second_y))


def spline_second_derivative(spline: CubicSpline, t: float) -> Tuple[float, float]:
    """Second derivative of (x(t), y(t)); linear between knot values."""
    if t < spline.knots[0] or t > spline.knots[-1]:
        raise ParameterOutOfRange(f"t={t} outside knot range")
    k = spline.knots
    i = int(np.searchsorted(k, t, side="right")) - 1
    i = min(max(i, 0), len(k) - 2)
    h = k[i + 1] - k[i]
    a = (k[i + 1] - t) / h
    b = (t - k[i]) / h
    return (a * spline.second_x[i] + b * spline.second_x[i + 1],
            a * spline.second_y[i] + b * spline.second_y[i + 1])


def sample_spline(spline: CubicSpline, step: float = 0.1) -> np.ndarray:
    """Dense (k, 2) samples at roughly ``step`` parameter spacing."""
    total = spline.knots[-1] - spline.knots[0]
    n = max(2, int(np.ceil(total / step)) + 1)
    ts = np.linspace(spline.knots[0], spline.knots[-1], n)
    return np.array([eval_spline(spline, t) for t in ts])


# ---------------------------------------------------------------------------
# Lengths, distances, radii
# ---------------------------------------------------------------------------

def path_length(trace: Sequence[Tuple[float, float]]) -> float:
    """Sum of Euclidean distances between consecutive points."""
    pts = np.asarray(trace, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise EmptyPath("need at least one point")
    if pts.shape[0] == 1:
        return 0.0
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


def distance_transform(mask: BinaryMask) -> FloatImage:
    """Exact Euclidean distance to the nearest background pixel.

    Background pixels map to 0 and the image border counts as background.
    """
    mask = as_mask(mask)
    padded = np.pad(mask, 1, constant_values=False)
    dist = ndimage.distance_transform_edt(padded)
    return dist[1:-1, 1:-1]


@dataclass(frozen=True)
class RadiusProfile:
    """Arc-length samples of the local maximal-inscribed-disk radius."""

    samples: Tuple[Tuple[float, float], ...]   # (arc length, radius)
    off_mask: bool = False                     # any sample fell on background

    def radii(self) -> np.ndarray:
        return np.array([r for _, r in self.samples])


def estimate_radius(path_pixels: Sequence[Tuple[int, int]], mask: BinaryMask,
                    step: float = 1.0) -> RadiusProfile:
    """Radius profile along a pixel trace.

    The radius at each arc-length sample is the distance-transform value at
    the nearest trace pixel. Samples landing on background get radius 0 and
    set the ``off_mask`` flag.
    """
    pts = np.asarray(path_pixels, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise EmptyPath("path has no pixels")
    dist = distance_transform(mask)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1) if len(pts) > 1 else np.array([])
    arc = np.concatenate(([0.0], np.cumsum(seg)))
    total = arc[-1]
    targets = np.arange(0.0, total + step / 2, step) if total > 0 else np.array([0.0])
    samples = []
    off = False
    for s in targets:
        idx = int(np.argmin(np.abs(arc - s)))
        x, y = int(round(pts[idx, 0])), int(round(pts[idx, 1]))
        r = float(dist[y, x])
        if r == 0.0:
            off = True
        samples.append((float(s), r))
    return RadiusProfile(samples=tuple(samples), off_mask=off)
