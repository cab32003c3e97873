"""Pure NumPy/Python implementations of the hot kernels.

Used when the compiled extension is unavailable (or forced via
MASKBENCH_KERNELS=pure). Arithmetic is written expression-for-expression
identical to the compiled kernels so both backends produce the same bits.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

BACKEND = "pure"

_STRUCT8 = np.ones((3, 3), dtype=bool)


def otsu_argmax(hist: np.ndarray) -> int:
    """Threshold t in 0..254 maximizing between-class variance of the
    256-bin histogram (classes: value <= t vs value > t), lowest t on ties.
    Returns -1 when no split leaves both classes non-empty.
    """
    hist = np.asarray(hist, dtype=np.int64)
    bins = np.arange(256, dtype=np.int64)
    n = int(hist.sum())
    total = int((hist * bins).sum())
    c0 = np.cumsum(hist)[:255]
    s0 = np.cumsum(hist * bins)[:255]
    valid = np.flatnonzero((c0 > 0) & (c0 < n))
    if valid.size == 0:
        return -1
    c0v = c0[valid]
    s0v = s0[valid]
    c1v = n - c0v
    mu0 = s0v / c0v
    mu1 = (total - s0v) / c1v
    d = mu0 - mu1
    var = c0v.astype(np.float64) * c1v.astype(np.float64) * d * d
    return int(valid[np.argmax(var)])


def kmeans_assign(pixels: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-centroid assignment (squared Euclidean, ties to lowest index).

    Returns (labels int32[n], dmin float64[n]).
    """
    pixels = np.ascontiguousarray(pixels, dtype=np.float64)
    centroids = np.ascontiguousarray(centroids, dtype=np.float64)
    n = pixels.shape[0]
    k = centroids.shape[0]
    dists = np.empty((n, k), dtype=np.float64)
    for j in range(k):
        dx = pixels[:, 0] - centroids[j, 0]
        dy = pixels[:, 1] - centroids[j, 1]
        dz = pixels[:, 2] - centroids[j, 2]
        dists[:, j] = dx * dx + dy * dy + dz * dz
    labels = np.argmin(dists, axis=1).astype(np.int32)
    dmin = dists[np.arange(n), labels]
    return labels, np.ascontiguousarray(dmin)


def rasterize_polygon(vx: np.ndarray, vy: np.ndarray, width: int, height: int) -> np.ndarray:
    """Even-odd scanline fill sampled at pixel centers (x+0.5, y+0.5)."""
    vx = np.asarray(vx, dtype=np.float64)
    vy = np.asarray(vy, dtype=np.float64)
    m = vx.shape[0]
    out = np.zeros((height, width), dtype=np.uint8)
    centers = np.arange(width, dtype=np.float64) + 0.5
    for row in range(height):
        yc = float(row) + 0.5
        xs = []
        for i in range(m):
            j = i + 1 if i + 1 < m else 0
            y1 = vy[i]
            y2 = vy[j]
            if (y1 > yc) != (y2 > yc):
                t = (yc - y1) / (y2 - y1)
                xs.append(vx[i] + t * (vx[j] - vx[i]))
        if not xs:
            continue
        cross = np.sort(np.asarray(xs, dtype=np.float64))
        # inside <=> an odd number of crossings lie strictly right of the center
        le = np.searchsorted(cross, centers, side="right")
        out[row] = ((cross.size - le) & 1).astype(np.uint8)
    return out


def label_connected(bits: np.ndarray) -> tuple[np.ndarray, int]:
    """8-connected components; raw label numbering is arbitrary."""
    labels, n = ndimage.label(np.asarray(bits, dtype=np.uint8), structure=_STRUCT8)
    return labels.astype(np.int32, copy=False), int(n)


def levenshtein(a: np.ndarray, b: np.ndarray) -> int:
    """Unit-cost edit distance between two code-point sequences."""
    sa = np.asarray(a, dtype=np.int32).tolist()
    sb = np.asarray(b, dtype=np.int32).tolist()
    la, lb = len(sa), len(sb)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        ca = sa[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ca == sb[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[lb]
