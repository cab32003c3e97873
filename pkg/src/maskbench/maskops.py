"""Polygon mask refinement, component labeling, overlay and mask files.

Masks persist as an 8-bit indexed PNG whose pixel value is the component
label (0 = background), plus a UTF-8 JSON sidecar (same basename,
`.mask.json`, schema version 1) carrying component count, polarity, the
producing method descriptor and the polygon edit history.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import _kernels
from .errors import (
    CorruptMaskFile,
    DegeneratePolygon,
    DimensionMismatch,
    StorageError,
)
from .raster import BinaryMask, WordImage

MASK_FORMAT_VERSION = 1
MAX_COMPONENTS = 255  # label fits one PNG byte; far beyond any word image

# saturated tints, channels 0/255 only; component k uses (k-1) % 6
COMPONENT_COLORS = (
    (255, 0, 0),
    (0, 255, 0),
    (0, 0, 255),
    (255, 255, 0),
    (255, 0, 255),
    (0, 255, 255),
)

EDIT_KINDS = ("add", "delete")


@dataclass(frozen=True)
class Polygon:
    """Simple vertex list; must span nonzero area."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise DegeneratePolygon(f"polygon needs >= 3 vertices, got {len(verts)}")
        px, py = verts[0]
        anchor = next(((x, y) for x, y in verts if (x, y) != (px, py)), None)
        if anchor is None:
            raise DegeneratePolygon("polygon vertices all coincide")
        qx, qy = anchor
        if all((qx - px) * (y - py) - (x - px) * (qy - py) == 0.0 for x, y in verts):
            raise DegeneratePolygon("polygon vertices are collinear (zero area)")
        object.__setattr__(self, "vertices", verts)


@dataclass(frozen=True)
class EditOp:
    """One ADD PATCH / DELETE PATCH step."""

    kind: str
    polygon: Polygon
    sequence: int

    def __post_init__(self):
        if self.kind not in EDIT_KINDS:
            raise ValueError(f"edit kind must be one of {EDIT_KINDS}, got {self.kind!r}")
        if self.sequence < 1:
            raise ValueError("edit sequence numbers start at 1")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "sequence": self.sequence,
            "vertices": [[x, y] for x, y in self.polygon.vertices],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EditOp":
        return cls(
            kind=d["kind"],
            polygon=Polygon(tuple((v[0], v[1]) for v in d["vertices"])),
            sequence=int(d["sequence"]),
        )


@dataclass(frozen=True)
class SegMask:
    """Foreground components labeled 1..N in reading order."""

    labels: np.ndarray  # (h, w) int32
    component_count: int

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int32)
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    def binary(self) -> BinaryMask:
        return BinaryMask((self.labels > 0).astype(np.uint8))


def rasterize(poly: Polygon, width: int, height: int) -> BinaryMask:
    """Pixels whose center lies inside the polygon under the even-odd rule."""
    if width < 1 or height < 1:
        raise ValueError("raster dimensions must be >= 1")
    vx = np.array([v[0] for v in poly.vertices], dtype=np.float64)
    vy = np.array([v[1] for v in poly.vertices], dtype=np.float64)
    return BinaryMask(_kernels.rasterize_polygon(vx, vy, width, height))


def apply_patch(mask: BinaryMask, op: EditOp) -> BinaryMask:
    """add: union with the rasterized polygon; delete: subtract it."""
    patch = rasterize(op.polygon, mask.width, mask.height)
    if op.kind == "add":
        bits = mask.bits | patch.bits
    else:
        bits = mask.bits & (1 - patch.bits)
    return BinaryMask(bits.astype(np.uint8))


def label_components(mask: BinaryMask) -> SegMask:
    """8-connected components, numbered 1..N in reading order.

    Reading order: smaller minimum column first, ties by smaller minimum
    row, then by first pixel in scan order (a data-determined tiebreak so
    the numbering is unique).
    """
    raw, n = _kernels.label_connected(mask.bits)
    if n == 0:
        return SegMask(labels=np.zeros(mask.bits.shape, dtype=np.int32), component_count=0)
    ys, xs = np.nonzero(raw)
    labs = raw[ys, xs]
    w = mask.bits.shape[1]
    big = np.iinfo(np.int64).max
    min_col = np.full(n + 1, big, dtype=np.int64)
    min_row = np.full(n + 1, big, dtype=np.int64)
    min_scan = np.full(n + 1, big, dtype=np.int64)
    np.minimum.at(min_col, labs, xs)
    np.minimum.at(min_row, labs, ys)
    np.minimum.at(min_scan, labs, ys * w + xs)
    order = np.lexsort((min_scan[1:], min_row[1:], min_col[1:]))
    remap = np.zeros(n + 1, dtype=np.int32)
    remap[order + 1] = np.arange(1, n + 1, dtype=np.int32)
    return SegMask(labels=remap[raw], component_count=n)


def overlay(img: WordImage, mask: SegMask) -> WordImage:
    """Tint each component's pixels 50% toward its fixed color.

    Channels round toward the tint color, so a pixel is left unchanged
    only when it already equals its component color exactly. Background
    pixels pass through untouched.
    """
    if (img.height, img.width) != (mask.height, mask.width):
        raise DimensionMismatch(
            f"image is {img.width}x{img.height}, mask is {mask.width}x{mask.height}"
        )
    palette = np.zeros((mask.component_count + 1, 3), dtype=np.int32)
    for k in range(1, mask.component_count + 1):
        palette[k] = COMPONENT_COLORS[(k - 1) % len(COMPONENT_COLORS)]
    colors = palette[mask.labels]
    px = img.pixels.astype(np.int32)
    blended = (px + colors + (colors > px)) // 2
    out = np.where((mask.labels > 0)[:, :, None], blended, px).astype(np.uint8)
    return WordImage(id=img.id, pixels=out)


def _sidecar_path(path: Path) -> Path:
    name = path.name
    if name.endswith(".mask.png"):
        return path.with_name(name[: -len(".png")] + ".json")
    return path.with_name(path.stem + ".mask.json")


def save_mask(
    mask: SegMask,
    path: str | Path,
    *,
    polarity: str = "normal",
    method: str = "",
    edits: tuple[EditOp, ...] | list[EditOp] = (),
) -> Path:
    """Write the indexed-PNG mask plus its JSON sidecar atomically."""
    if mask.component_count > MAX_COMPONENTS:
        raise StorageError(
            f"mask has {mask.component_count} components; format supports {MAX_COMPONENTS}"
        )
    path = Path(path)
    sidecar = _sidecar_path(path)
    indexed = mask.labels.astype(np.uint8)
    im = Image.fromarray(indexed, mode="P")
    pal = []
    for k in range(256):
        if k == 0:
            pal.extend((0, 0, 0))
        else:
            pal.extend(COMPONENT_COLORS[(k - 1) % len(COMPONENT_COLORS)])
    im.putpalette(pal)
    meta = {
        "version": MASK_FORMAT_VERSION,
        "width": mask.width,
        "height": mask.height,
        "component_count": mask.component_count,
        "polarity": polarity,
        "method": method,
        "edits": [op.to_dict() for op in edits],
    }
    try:
        tmp_png = path.with_name(path.name + ".tmp")
        im.save(tmp_png, format="PNG")
        os.replace(tmp_png, path)
        tmp_json = sidecar.with_name(sidecar.name + ".tmp")
        tmp_json.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        os.replace(tmp_json, sidecar)
    except OSError as exc:
        raise StorageError(f"could not write mask {path}: {exc}") from exc
    return path


def read_mask_sidecar(path: str | Path) -> dict:
    """Parse and sanity-check the sidecar of a saved mask."""
    sidecar = _sidecar_path(Path(path))
    try:
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorruptMaskFile(f"missing sidecar {sidecar}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorruptMaskFile(f"unreadable sidecar {sidecar}: {exc}") from exc
    if meta.get("version") != MASK_FORMAT_VERSION:
        raise CorruptMaskFile(f"unsupported mask format version {meta.get('version')!r}")
    return meta


def load_mask(path: str | Path) -> SegMask:
    """Load and fully re-validate a persisted mask.

    The stored labels must equal what label_components produces from the
    foreground, which enforces contiguity (no label gaps), per-component
    connectivity and reading order in one check.
    """
    path = Path(path)
    meta = read_mask_sidecar(path)
    try:
        with Image.open(path) as im:
            if im.mode not in ("P", "L"):
                raise CorruptMaskFile(f"mask PNG must be indexed 8-bit, got mode {im.mode}")
            stored = np.asarray(im, dtype=np.int32)
    except OSError as exc:
        raise CorruptMaskFile(f"unreadable mask PNG {path}: {exc}") from exc
    if stored.ndim != 2:
        raise CorruptMaskFile("mask PNG must be single-channel")
    h, w = stored.shape
    if (meta["width"], meta["height"]) != (w, h):
        raise CorruptMaskFile(
            f"sidecar says {meta['width']}x{meta['height']}, PNG is {w}x{h}"
        )
    expected = label_components(BinaryMask((stored > 0).astype(np.uint8)))
    if expected.component_count != int(meta["component_count"]):
        raise CorruptMaskFile(
            f"sidecar says {meta['component_count']} components, "
            f"mask has {expected.component_count}"
        )
    if not np.array_equal(expected.labels, stored):
        raise CorruptMaskFile("stored labels violate contiguity/connectivity/ordering")
    return expected
