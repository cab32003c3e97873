"""Word-image container, channel planes and color-space conversions.

All conversions are pure functions returning float-valued planes; nothing
here quantizes (thresholding quantizes internally, avoiding double
rounding for the HSV/Lab planes).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

PLANE_TAGS = ("R", "G", "B", "H", "S", "V", "L", "a", "b", "Intensity")

# sRGB -> XYZ (D65 white, linear light), rows X/Y/Z
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# normalize by the matrix's own white (its row sums, ~(0.95047, 1, 1.08883))
# so that pure white lands exactly on L=100, a=b=0 and L never exceeds 100
_D65_WHITE = _SRGB_TO_XYZ.sum(axis=1)
_LAB_EPS = (6.0 / 29.0) ** 3
_LAB_SLOPE = 1.0 / (3.0 * (6.0 / 29.0) ** 2)


@dataclass(frozen=True)
class WordImage:
    """RGB raster of one cropped word; the unit of annotation."""

    id: str
    pixels: np.ndarray  # (h, w, 3) uint8, treated as immutable

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"pixels must be (h, w, 3), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if px.dtype != np.uint8:
            arr = np.asarray(px)
            if arr.min() < 0 or arr.max() > 255:
                raise ValueError("channel values must lie in [0, 255]")
            px = arr.astype(np.uint8)
        px = np.ascontiguousarray(px).copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def from_file(cls, path: str | Path, image_id: str | None = None) -> "WordImage":
        """Decode PNG/BMP/JPEG; channel order normalized to RGB, alpha dropped."""
        path = Path(path)
        with Image.open(path) as im:
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
        return cls(id=image_id if image_id is not None else path.stem, pixels=arr)


@dataclass(frozen=True)
class GrayPlane:
    """One real-valued plane extracted from a WordImage."""

    values: np.ndarray  # (h, w) float64
    tag: str

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError(f"plane must be 2-D, got shape {vals.shape}")
        if not np.isfinite(vals).all():
            raise ValueError("plane values must be finite")
        if self.tag not in PLANE_TAGS:
            raise ValueError(f"unknown plane tag {self.tag!r}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class BinaryMask:
    """Foreground/background bit grid; 1 = foreground."""

    bits: np.ndarray  # (h, w) uint8 of {0, 1}

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {bits.shape}")
        if bits.size and bits.max() > 1:
            raise ValueError("mask bits must be 0 or 1")
        bits = bits.copy()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def foreground_count(self) -> int:
        return int(self.bits.sum())


def split_rgb(img: WordImage) -> tuple[GrayPlane, GrayPlane, GrayPlane]:
    """Channel planes of the image, tagged R, G, B."""
    px = img.pixels.astype(np.float64)
    return (
        GrayPlane(px[:, :, 0], "R"),
        GrayPlane(px[:, :, 1], "G"),
        GrayPlane(px[:, :, 2], "B"),
    )


def to_hsv(img: WordImage) -> tuple[GrayPlane, GrayPlane, GrayPlane]:
    """Hexcone HSV: H in [0, 360), S in [0, 1], V in [0, 1].

    Achromatic pixels (r = g = b) get H = 0 and S = 0.
    """
    px = img.pixels
    r = px[:, :, 0].astype(np.float64)
    g = px[:, :, 1].astype(np.float64)
    b = px[:, :, 2].astype(np.float64)
    mx = np.max(px, axis=2).astype(np.float64)
    mn = np.min(px, axis=2).astype(np.float64)
    delta = mx - mn

    v = mx / 255.0
    s = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)

    safe = np.where(delta > 0, delta, 1.0)
    is_r = (delta > 0) & (r == mx)
    is_g = (delta > 0) & (g == mx) & ~is_r
    is_b = (delta > 0) & ~is_r & ~is_g
    h = np.zeros_like(mx)
    h = np.where(is_r, np.mod((g - b) / safe, 6.0), h)
    h = np.where(is_g, (b - r) / safe + 2.0, h)
    h = np.where(is_b, (r - g) / safe + 4.0, h)
    h = h * 60.0
    return GrayPlane(h, "H"), GrayPlane(s, "S"), GrayPlane(v, "V")


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _LAB_EPS, np.cbrt(t), _LAB_SLOPE * t + 4.0 / 29.0)


def to_lab(img: WordImage) -> tuple[GrayPlane, GrayPlane, GrayPlane]:
    """CIE L*a*b* under sRGB companding and D65 white; L in [0, 100]."""
    c = img.pixels.astype(np.float64) / 255.0
    linear = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _SRGB_TO_XYZ.T
    fxyz = _lab_f(xyz / _D65_WHITE)
    fx, fy, fz = fxyz[:, :, 0], fxyz[:, :, 1], fxyz[:, :, 2]
    lum = 116.0 * fy - 16.0
    return (
        GrayPlane(lum, "L"),
        GrayPlane(500.0 * (fx - fy), "a"),
        GrayPlane(200.0 * (fy - fz), "b"),
    )


def intensity(img: WordImage) -> GrayPlane:
    """Luma plane 0.299 r + 0.587 g + 0.114 b.

    Computed as (299 r + 587 g + 114 b) / 1000: the integer numerator is
    exact, so gray pixels map to exactly their value.
    """
    px = img.pixels.astype(np.float64)
    return GrayPlane(
        (299.0 * px[:, :, 0] + 587.0 * px[:, :, 1] + 114.0 * px[:, :, 2]) / 1000.0,
        "Intensity",
    )
