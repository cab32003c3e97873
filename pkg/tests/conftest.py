import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))

from maskbench.raster import BinaryMask, WordImage


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_image(rng: np.random.Generator, height=None, width=None, image_id="img") -> WordImage:
    h = int(height) if height else int(rng.integers(2, 24))
    w = int(width) if width else int(rng.integers(2, 40))
    return WordImage(image_id, rng.integers(0, 256, (h, w, 3), dtype=np.uint8))


def k_color_image(rng: np.random.Generator, k: int, height=8, width=12, image_id="img") -> WordImage:
    """Image whose pixels are drawn from exactly k distinct colors."""
    while True:
        colors = rng.integers(0, 256, (k, 3), dtype=np.uint8)
        if len({tuple(c) for c in colors}) == k:
            break
    idx = rng.integers(0, k, (height, width))
    # force every color to appear
    flat = idx.ravel()
    flat[:k] = np.arange(k)
    return WordImage(image_id, colors[idx])


def random_mask(rng: np.random.Generator, height: int, width: int, density=0.4) -> BinaryMask:
    return BinaryMask((rng.random((height, width)) < density).astype(np.uint8))


def random_polygon_vertices(rng: np.random.Generator, width: int, height: int, max_vertices=8):
    """Random simple-ish polygon spilling slightly past the raster."""
    n = int(rng.integers(3, max_vertices + 1))
    cx = rng.uniform(0, width)
    cy = rng.uniform(0, height)
    angles = np.sort(rng.uniform(0, 2 * np.pi, n))
    radii = rng.uniform(1.0, max(width, height) * 0.7, n)
    verts = [(cx + r * np.cos(a), cy + r * np.sin(a)) for r, a in zip(radii, angles)]
    return tuple((float(x), float(y)) for x, y in verts)


def glyph_image(texts_mask: np.ndarray, dark=(20, 20, 20), light=(235, 235, 235), image_id="glyph") -> WordImage:
    """Two-tone image from a stencil: 1 = dark glyph pixel on light ground."""
    h, w = texts_mask.shape
    px = np.empty((h, w, 3), dtype=np.uint8)
    px[texts_mask == 1] = dark
    px[texts_mask == 0] = light
    return WordImage(image_id, px)


def block_glyph_stencil(width=48, height=16, blocks=3) -> np.ndarray:
    """Simple stencil: `blocks` separated rectangles, like block letters."""
    stencil = np.zeros((height, width), dtype=np.uint8)
    span = width // blocks
    for b in range(blocks):
        x0 = b * span + 2
        x1 = min(b * span + span - 3, width - 1)
        stencil[3 : height - 3, x0 : x1 + 1] = 1
    return stencil


def write_png(path: Path, image: WordImage):
    Image.fromarray(np.asarray(image.pixels), mode="RGB").save(path, format="PNG")


def write_manifest(path: Path, rows):
    """rows: iterable of (image_id, relative_path, truth)."""
    lines = [f"{i}\t{p}\t{t}" for i, p, t in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture
def tiny_dataset(tmp_path):
    """Three small synthetic word images plus a manifest."""
    rng = make_rng(1234)
    root = tmp_path / "data"
    root.mkdir()
    rows = []
    truths = ["CAT", "DOG", "BIRD"]
    for i, truth in enumerate(truths):
        stencil = block_glyph_stencil(width=30 + 6 * i, height=12, blocks=len(truth))
        img = glyph_image(stencil, image_id=f"w{i:03d}")
        write_png(root / f"w{i:03d}.png", img)
        rows.append((f"w{i:03d}", f"w{i:03d}.png", truth))
    manifest = root / "manifest.tsv"
    write_manifest(manifest, rows)
    return root, manifest
