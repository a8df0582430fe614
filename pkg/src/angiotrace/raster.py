"""Core raster types, PGM/PNG I/O, and overlay rendering.

Images are plain numpy arrays with fixed conventions:

* ``GrayImage``  -- 2D ``uint8``, values in [0, 255]
* ``FloatImage`` -- 2D ``float64``, every value finite
* ``BinaryMask`` -- 2D ``bool``

Arrays are indexed ``[y, x]`` (row-major); coordinates in the public API
are ``(x, y)`` with the origin at the top-left, x rightward, y downward.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CorruptFile, IoFailure, OutOfBounds, UnsupportedFormat, ZeroDimension

GrayImage = np.ndarray
FloatImage = np.ndarray
BinaryMask = np.ndarray

PathLike = Union[str, Path]


def as_gray(data) -> GrayImage:
    """Validate/convert an array to the GrayImage convention."""
    arr = np.asarray(data)
    if arr.ndim != 2:
        raise ZeroDimension(f"expected a 2D array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ZeroDimension(f"zero-sized image {arr.shape}")
    if arr.dtype != np.uint8:
        if np.any((arr < 0) | (arr > 255)):
            raise ValueError("gray values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def as_float(data) -> FloatImage:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ZeroDimension(f"expected a non-empty 2D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("FloatImage values must be finite")
    return arr


def as_mask(data) -> BinaryMask:
    arr = np.asarray(data)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ZeroDimension(f"expected a non-empty 2D array, got shape {arr.shape}")
    return arr.astype(bool)


@dataclass(frozen=True)
class OverlayLayer:
    """One compositing layer: a mask or an ordered pixel list with color/opacity."""

    kind: str                      # "mask" | "path" | "points"
    payload: object                # BinaryMask or sequence of (x, y)
    color: tuple = (255, 0, 0)
    opacity: float = 1.0


# ---------------------------------------------------------------------------
# I/O
# ---------------------------------------------------------------------------

_PGM_HEADER = re.compile(rb"^P5\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s")


def _read_pgm(raw: bytes) -> GrayImage:
    m = _PGM_HEADER.match(raw)
    if m is None:
        raise CorruptFile("not a valid binary PGM (P5) header")
    width, height, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise UnsupportedFormat(f"only 8-bit PGM supported (maxval 255, got {maxval})")
    if width < 1 or height < 1:
        raise ZeroDimension(f"zero-dimension PGM {width}x{height}")
    pixels = raw[m.end():]
    if len(pixels) < width * height:
        raise CorruptFile("PGM pixel data truncated")
    data = np.frombuffer(pixels[: width * height], dtype=np.uint8)
    return data.reshape(height, width).copy()


def _write_pgm(gray: GrayImage, path: Path) -> None:
    h, w = gray.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    try:
        path.write_bytes(header + gray.tobytes())
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def load_image(path: PathLike) -> GrayImage:
    """Load an 8-bit grayscale PGM (P5) or PNG as a GrayImage.

    RGB PNG input is converted with integer-rounded Rec. 601 luminance.
    Grayscale pixel values are preserved bit-exactly.
    """
    path = Path(path)
    if not path.is_file():
        raise IoFailure(f"file not found: {path}")
    raw = path.read_bytes()
    if raw[:2] == b"P5":
        return _read_pgm(raw)
    if raw[:8] == b"\x89PNG\r\n\x1a\n":
        try:
            with Image.open(path) as im:
                im.load()
                if im.mode == "L":
                    arr = np.asarray(im, dtype=np.uint8)
                elif im.mode in ("RGB", "RGBA", "P", "LA"):
                    rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
                    lum = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
                    arr = np.floor(lum + 0.5).clip(0, 255).astype(np.uint8)
                else:
                    raise UnsupportedFormat(f"unsupported PNG mode {im.mode}")
        except UnidentifiedImageError as exc:
            raise CorruptFile(f"corrupt PNG: {exc}") from exc
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ZeroDimension("zero-dimension PNG")
        return arr.copy()
    if raw[:2] in (b"P2", b"P3", b"P6"):
        raise UnsupportedFormat("only binary grayscale PGM (P5) is supported")
    raise CorruptFile("unrecognized image header")


def _float_to_gray(img: FloatImage) -> GrayImage:
    # min-max rescale to [0, 255]; constant images map to 0
    lo, hi = float(img.min()), float(img.max())
    if hi <= lo:
        return np.zeros(img.shape, dtype=np.uint8)
    scaled = (img - lo) / (hi - lo) * 255.0
    return np.floor(scaled + 0.5).astype(np.uint8)


def save_image(image, path: PathLike) -> None:
    """Write a GrayImage, BinaryMask, or FloatImage as PGM or PNG.

    Masks are encoded two-level {0, 255}; FloatImages are min-max rescaled.
    The GrayImage/PGM round trip is bit-exact.
    """
    path = Path(path)
    arr = np.asarray(image)
    if arr.dtype == bool:
        gray = np.where(arr, 255, 0).astype(np.uint8)
    elif arr.dtype == np.uint8:
        gray = arr
    else:
        gray = _float_to_gray(as_float(arr))
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        _write_pgm(gray, path)
    elif suffix == ".png":
        try:
            Image.fromarray(gray, mode="L").save(path)
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
    else:
        raise UnsupportedFormat(f"unsupported output extension {suffix!r}")


def save_rgb(rgb: np.ndarray, path: PathLike) -> None:
    """Write an (h, w, 3) uint8 RGB array as PNG."""
    path = Path(path)
    if path.suffix.lower() != ".png":
        raise UnsupportedFormat("RGB output must be PNG")
    try:
        Image.fromarray(rgb.astype(np.uint8), mode="RGB").save(path)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


# ---------------------------------------------------------------------------
# Overlay rendering
# ---------------------------------------------------------------------------

def to_rgb(gray: GrayImage) -> np.ndarray:
    """Expand a GrayImage to (h, w, 3) uint8 RGB."""
    return np.repeat(as_gray(gray)[:, :, None], 3, axis=2)


def _layer_mask(layer: OverlayLayer, shape) -> BinaryMask:
    h, w = shape
    if layer.kind == "mask":
        mask = as_mask(layer.payload)
        if mask.shape != (h, w):
            raise OutOfBounds(f"mask layer shape {mask.shape} != base {(h, w)}")
        return mask
    if layer.kind in ("path", "points"):
        mask = np.zeros((h, w), dtype=bool)
        for x, y in layer.payload:
            xi, yi = int(x), int(y)
            if not (0 <= xi < w and 0 <= yi < h):
                raise OutOfBounds(f"layer coordinate ({x}, {y}) outside {w}x{h}")
            mask[yi, xi] = True
        return mask
    raise ValueError(f"unknown layer kind {layer.kind!r}")


def render_overlay(base: GrayImage, layers: Iterable[OverlayLayer]) -> np.ndarray:
    """Alpha-composite layers over the gray base, in list order.

    Per channel: ``out = round(alpha * layer + (1 - alpha) * base)`` with
    round-half-up. An empty layer list returns the RGB expansion of base.
    """
    out = to_rgb(base).astype(np.float64)
    for layer in layers:
        mask = _layer_mask(layer, base.shape)
        alpha = float(layer.opacity)
        color = np.asarray(layer.color, dtype=np.float64)
        out[mask] = alpha * color + (1.0 - alpha) * out[mask]
        out[mask] = np.floor(out[mask] + 0.5)
    return np.floor(out + 0.5).clip(0, 255).astype(np.uint8)
