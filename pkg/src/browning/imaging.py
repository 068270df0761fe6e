"""Raster types, image I/O, resizing, Gaussian low-pass filtering, the
red/green weighted grayscale transform and gray-level histograms.

All rasters are immutable numpy ``uint8`` arrays in row-major order:
``(height, width, 3)`` for RGB and ``(height, width)`` for gray levels and
binary masks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError


class ImageError(Exception):
    """Base class for image loading and saving failures."""


class ImageNotFoundError(ImageError):
    pass


class UnsupportedFormatError(ImageError):
    pass


class CorruptImageError(ImageError):
    pass


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    arr.setflags(write=False)
    return arr


def round_half_away(x):
    """Round to the nearest integer, halves away from zero."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _quantize(values: np.ndarray) -> np.ndarray:
    return np.clip(round_half_away(values), 0, 255).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class RgbImage:
    pixels: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 3 or p.shape[2] != 3:
            raise ValueError(f"RGB pixels must have shape (H, W, 3), got {p.shape}")
        if p.shape[0] == 0 or p.shape[1] == 0:
            raise ValueError("image dimensions must be positive")
        if p.dtype != np.uint8:
            if p.min() < 0 or p.max() > 255:
                raise ValueError("channel values must lie in [0, 255]")
        object.__setattr__(self, "pixels", _frozen(p))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        return isinstance(other, RgbImage) and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class GrayImage:
    pixels: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 2:
            raise ValueError(f"gray pixels must have shape (H, W), got {p.shape}")
        if p.shape[0] == 0 or p.shape[1] == 0:
            raise ValueError("image dimensions must be positive")
        if p.dtype != np.uint8:
            if p.min() < 0 or p.max() > 255:
                raise ValueError("gray levels must lie in [0, 255]")
        object.__setattr__(self, "pixels", _frozen(p))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        return isinstance(other, GrayImage) and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Segmentation result: 1 marks defect (foreground), 0 healthy/background."""

    pixels: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 2:
            raise ValueError(f"mask must have shape (H, W), got {p.shape}")
        if p.size and not np.isin(p, (0, 1)).all():
            raise ValueError("mask values must be 0 or 1")
        object.__setattr__(self, "pixels", _frozen(p))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def ones(self) -> int:
        return int(np.count_nonzero(self.pixels))

    def __eq__(self, other):
        return isinstance(other, BinaryMask) and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class Histogram:
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.shape != (256,):
            raise ValueError(f"histogram needs 256 bins, got shape {c.shape}")
        if (c < 0).any():
            raise ValueError("histogram counts must be non-negative")
        c = np.ascontiguousarray(c, dtype=np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        return isinstance(other, Histogram) and np.array_equal(self.counts, other.counts)


@dataclass(frozen=True)
class WeightPair:
    """Red and green coefficients of ``gray = a*R + b*G``; blue is always zero."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a >= 0 and self.b >= 0):
            raise ValueError(f"weights must be non-negative, got ({self.a}, {self.b})")

    @classmethod
    def parse(cls, text: str) -> "WeightPair":
        """Parse ``"A,B"``."""
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'A,B', got {text!r}")
        return cls(float(parts[0]), float(parts[1]))

    def __str__(self):
        return f"{self.a:g},{self.b:g}"


# --------------------------------------------------------------------------
# I/O
# --------------------------------------------------------------------------

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _sniff(path: Path) -> str:
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head.startswith(_PNG_MAGIC):
        return "png"
    if head[:2] in (b"P5", b"P6"):
        return "pnm"
    raise UnsupportedFormatError(f"{path}: not a PNG or binary PPM/PGM file")


def _decode(path: Path) -> Image.Image:
    if not path.is_file():
        raise ImageNotFoundError(f"{path}: no such file")
    _sniff(path)
    try:
        im = Image.open(path)
        im.load()
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise CorruptImageError(f"{path}: {exc}") from exc
    if im.mode not in ("RGB", "RGBA", "L", "P", "1"):
        raise UnsupportedFormatError(f"{path}: unsupported pixel mode {im.mode}")
    return im


def load_image(path) -> RgbImage:
    """Decode an 8-bit PNG or binary PPM/PGM into an RGB image.

    Gray inputs are replicated across the three channels.
    """
    im = _decode(Path(path))
    return RgbImage(np.asarray(im.convert("RGB")))


def load_gray(path) -> GrayImage:
    im = _decode(Path(path))
    if im.mode not in ("L", "1"):
        raise UnsupportedFormatError(f"{path}: expected a gray image, got {im.mode}")
    return GrayImage(np.asarray(im.convert("L")))


def load_mask(path) -> BinaryMask:
    """Read a mask written by :func:`save_mask` (any non-zero value is 1)."""
    gray = load_gray(path)
    return BinaryMask((gray.pixels > 0).astype(np.uint8))


def _write(im: Image.Image, path) -> None:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".png":
        im.save(path, format="PNG", optimize=False, compress_level=1)
    elif suffix in (".ppm", ".pgm", ".pnm"):
        im.save(path, format="PPM")
    else:
        raise UnsupportedFormatError(f"{path}: can only write .png, .ppm or .pgm")


def save_image(img: RgbImage | GrayImage, path) -> None:
    mode = "RGB" if isinstance(img, RgbImage) else "L"
    _write(Image.fromarray(np.asarray(img.pixels), mode=mode), path)


def save_mask(mask: BinaryMask, path) -> None:
    """Write a mask as an 8-bit image with values {0, 255}."""
    _write(Image.fromarray(mask.pixels * np.uint8(255), mode="L"), path)


# --------------------------------------------------------------------------
# Geometry and filtering
# --------------------------------------------------------------------------


def _bilinear_axis(n_in: int, n_out: int):
    scale = n_in / n_out
    src = (np.arange(n_out) + 0.5) * scale - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    i0 = np.floor(src).astype(np.intp)
    i1 = np.minimum(i0 + 1, n_in - 1)
    return i0, i1, src - i0


def resize_bilinear(img: RgbImage, new_width: int, new_height: int) -> RgbImage:
    """Bilinear resize with pixel-center alignment and edge clamping."""
    if new_width <= 0 or new_height <= 0:
        raise ValueError(f"target size must be positive, got {new_width}x{new_height}")
    if (new_width, new_height) == (img.width, img.height):
        return img
    src = img.pixels.astype(np.float64)
    y0, y1, fy = _bilinear_axis(img.height, new_height)
    x0, x1, fx = _bilinear_axis(img.width, new_width)
    fy = fy[:, None, None]
    fx = fx[None, :, None]
    r0, r1 = src[y0], src[y1]
    top = r0[:, x0] * (1 - fx) + r0[:, x1] * fx
    bottom = r1[:, x0] * (1 - fx) + r1[:, x1] * fx
    return RgbImage(_quantize(top * (1 - fy) + bottom * fy))


def gaussian_radius(sigma: float) -> int:
    # integer offsets d with |d| <= 3*sigma
    return int(math.floor(3.0 * sigma + 1e-12))


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 2-D Gaussian evaluated at integer offsets within 3 sigma."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    r = gaussian_radius(sigma)
    d = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-(d[:, None] ** 2 + d[None, :] ** 2) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_lowpass(img: GrayImage, sigma: float) -> GrayImage:
    """Spatial Gaussian smoothing with edge replication.

    The kernel is applied as two 1-D passes, which is the same operator as
    :func:`gaussian_kernel` up to floating-point rounding.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    r = gaussian_radius(sigma)
    if r == 0:
        return img
    d = np.arange(-r, r + 1, dtype=np.float64)
    k1 = np.exp(-(d**2) / (2.0 * sigma * sigma))
    k1 /= k1.sum()

    padded = np.pad(img.pixels.astype(np.float64), r, mode="edge")
    h, w = img.height, img.width
    rows = np.zeros((h + 2 * r, w))
    for i, wt in enumerate(k1):
        rows += wt * padded[:, i : i + w]
    out = np.zeros((h, w))
    for i, wt in enumerate(k1):
        out += wt * rows[i : i + h, :]
    return GrayImage(_quantize(out))


# --------------------------------------------------------------------------
# Grayscale transform and histogram
# --------------------------------------------------------------------------


def weighted_gray_values(img: RgbImage, w: WeightPair) -> np.ndarray:
    """Unclamped, unrounded ``a*R + b*G`` as float64."""
    px = img.pixels
    return w.a * px[..., 0].astype(np.float64) + w.b * px[..., 1].astype(np.float64)


def weighted_grayscale(img: RgbImage, w: WeightPair) -> GrayImage:
    """``clamp(round(a*R + b*G), 0, 255)``; the blue channel is never read."""
    return GrayImage(_quantize(weighted_gray_values(img, w)))


def compute_histogram(img: GrayImage) -> Histogram:
    return Histogram(np.bincount(img.pixels.ravel(), minlength=256))


def write_histogram_csv(h: Histogram, path_or_file) -> None:
    """Dump ``level,count`` rows (with header) for external plotting."""
    lines = ["level,count"] + [f"{v},{c}" for v, c in enumerate(h.counts.tolist())]
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        Path(path_or_file).write_text(text)


__all__ = [
    "BinaryMask",
    "CorruptImageError",
    "GrayImage",
    "Histogram",
    "ImageError",
    "ImageNotFoundError",
    "RgbImage",
    "UnsupportedFormatError",
    "WeightPair",
    "compute_histogram",
    "gaussian_kernel",
    "gaussian_lowpass",
    "load_gray",
    "load_image",
    "load_mask",
    "resize_bilinear",
    "round_half_away",
    "save_image",
    "save_mask",
    "weighted_gray_values",
    "weighted_grayscale",
    "write_histogram_csv",
]
