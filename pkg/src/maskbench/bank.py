"""The 16-candidate segmentation bank.

Fixed candidate order: 1-3 Otsu on R/G/B, 4-6 Otsu on H/S/V, 7-9 Otsu on
L/a/b, 10-15 the six RGB-cluster masks ({1},{2},{3},{1u2},{1u3},{2u3}),
16 gradient-weighted threshold on intensity. Candidate index 0 is reserved
for "none acceptable" and never appears in the bank itself.

Polarity "normal" keeps the raw masks (bit = 1 on the bright side of each
threshold / inside each cluster subset); "inverted" complements every mask
after generation. Degenerate sub-results stay in the bank, flagged, so
indices 1..16 are stable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .raster import BinaryMask, GrayPlane, WordImage, intensity, split_rgb, to_hsv, to_lab

BANK_SIZE = 16
POLARITIES = ("normal", "inverted")
CLUSTER_SUBSETS = ((1,), (2,), (3,), (1, 2), (1, 3), (2, 3))

KMEANS_MAX_ITER = 100


@dataclass(frozen=True)
class ThresholdResult:
    threshold: float
    mask: BinaryMask
    degenerate: bool = False


@dataclass(frozen=True)
class ClusterModel:
    """Three RGB clusters fit by Lloyd's algorithm with deterministic seeding."""

    centroids: np.ndarray  # (3, 3) float64
    assignment: np.ndarray  # (h, w) int32, labels 1..3
    inertia: float
    inertia_log: tuple[float, ...]
    empty_clusters: tuple[int, ...] = ()
    degenerate: bool = False  # fewer than 3 distinct colors in the image

    def __post_init__(self):
        object.__setattr__(self, "centroids", np.ascontiguousarray(self.centroids, dtype=np.float64))
        object.__setattr__(self, "assignment", np.ascontiguousarray(self.assignment, dtype=np.int32))


@dataclass(frozen=True)
class CandidateBank:
    """All 16 candidates for one image plus how each was produced."""

    image_id: str
    candidates: tuple[BinaryMask, ...]
    methods: tuple[str, ...]
    degenerate: tuple[bool, ...]
    polarity: str

    def __post_init__(self):
        if len(self.candidates) != BANK_SIZE or len(self.methods) != BANK_SIZE:
            raise ValueError(f"bank must hold exactly {BANK_SIZE} candidates")
        if self.polarity not in POLARITIES:
            raise ValueError(f"unknown polarity {self.polarity!r}")

    def candidate(self, index: int) -> BinaryMask:
        """Candidate by its 1-based bank index (0 means 'none' and has no mask)."""
        if not 1 <= index <= BANK_SIZE:
            raise IndexError(f"candidate index must be in 1..{BANK_SIZE}, got {index}")
        return self.candidates[index - 1]


def quantize_plane(plane: GrayPlane) -> tuple[np.ndarray, bool]:
    """Affine rescale to 0..255 and round to integer bins (min->0, max->255).

    A constant plane maps to all-zero bins and is reported degenerate.
    """
    vals = plane.values
    vmin = float(vals.min())
    vmax = float(vals.max())
    if vmin == vmax:
        return np.zeros(vals.shape, dtype=np.uint8), True
    scaled = (vals - vmin) * (255.0 / (vmax - vmin))
    return np.rint(scaled).astype(np.uint8), False


def otsu_threshold(plane: GrayPlane) -> ThresholdResult:
    """Threshold maximizing between-class variance over the 256-bin histogram.

    The mask is 1 where the quantized value exceeds the threshold; ties
    break to the lowest maximizing threshold. Constant planes yield the
    all-zero mask with threshold 0 and the degenerate flag set.
    """
    q, degenerate = quantize_plane(plane)
    if degenerate:
        return ThresholdResult(0.0, BinaryMask(np.zeros(q.shape, dtype=np.uint8)), True)
    hist = np.bincount(q.ravel(), minlength=256).astype(np.int64)
    t = _kernels.otsu_argmax(hist)
    mask = (q > t).astype(np.uint8)
    return ThresholdResult(float(t), BinaryMask(mask), False)


def rats_threshold(plane: GrayPlane) -> ThresholdResult:
    """Gradient-weighted mean threshold on the raw plane values.

    T = sum(w * v) / sum(w) with w the central-difference gradient magnitude
    (borders replicated); mask is 1 where v > T. A zero-gradient plane is
    degenerate: all-zero mask, threshold 0.
    """
    v = plane.values
    gx = np.empty_like(v)
    gy = np.empty_like(v)
    gx[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / 2.0
    gx[:, 0] = (v[:, min(1, v.shape[1] - 1)] - v[:, 0]) / 2.0
    gx[:, -1] = (v[:, -1] - v[:, max(v.shape[1] - 2, 0)]) / 2.0
    gy[1:-1, :] = (v[2:, :] - v[:-2, :]) / 2.0
    gy[0, :] = (v[min(1, v.shape[0] - 1), :] - v[0, :]) / 2.0
    gy[-1, :] = (v[-1, :] - v[max(v.shape[0] - 2, 0), :]) / 2.0
    w = np.hypot(gx, gy)
    wsum = float(w.sum())
    if wsum == 0.0:
        return ThresholdResult(0.0, BinaryMask(np.zeros(v.shape, dtype=np.uint8)), True)
    t = float((w * v).sum()) / wsum
    return ThresholdResult(t, BinaryMask((v > t).astype(np.uint8)), False)


def _farthest_point_init(flat: np.ndarray) -> tuple[np.ndarray, bool]:
    """Deterministic 3-centroid seeding.

    First centroid at the darkest pixel (luma, scan order on ties), the
    next two at the pixels farthest from the ones already chosen. Whenever
    the image holds >= 3 distinct colors the seeds are 3 distinct colors,
    which is what guarantees exact recovery of 3-color images.
    """
    # integer luma weights: exact, so ordering ties are genuine color ties
    lum = 299.0 * flat[:, 0] + 587.0 * flat[:, 1] + 114.0 * flat[:, 2]
    c0 = flat[int(np.argmin(lum))]
    _, d0 = _kernels.kmeans_assign(flat, c0[None, :])
    c1 = flat[int(np.argmax(d0))]
    _, d1 = _kernels.kmeans_assign(flat, np.stack([c0, c1]))
    far = int(np.argmax(d1))
    c2 = flat[far]
    degenerate = float(d1[far]) == 0.0
    return np.stack([c0, c1, c2]), degenerate


def fit_three_clusters(img: WordImage, seed: int = 0) -> ClusterModel:
    """Lloyd's algorithm on raw RGB values, k = 3, deterministic seeding.

    Iterates until assignments are stable or 100 iterations. The seed is
    accepted for interface stability but unused: initialization is fully
    deterministic so an annotator reloading an image sees identical
    candidates. Images with fewer than 3 distinct colors come back flagged
    degenerate with the surplus clusters empty.
    """
    del seed
    h, w = img.height, img.width
    if h * w < 3:
        raise ValueError("clustering needs an image with at least 3 pixels")
    flat = img.pixels.reshape(-1, 3).astype(np.float64)

    centroids, degenerate = _farthest_point_init(flat)
    labels = None
    inertia_log: list[float] = []
    for _ in range(KMEANS_MAX_ITER):
        new_labels, dmin = _kernels.kmeans_assign(flat, centroids)
        inertia_log.append(float(np.sum(dmin)))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        updated = centroids.copy()
        for j in range(3):
            sel = labels == j
            if sel.any():
                updated[j] = flat[sel].mean(axis=0)
        centroids = updated

    assert labels is not None
    counts = np.bincount(labels, minlength=3)
    empty = tuple(int(j) + 1 for j in range(3) if counts[j] == 0)
    return ClusterModel(
        centroids=centroids,
        assignment=(labels + 1).astype(np.int32).reshape(h, w),
        inertia=inertia_log[-1],
        inertia_log=tuple(inertia_log),
        empty_clusters=empty,
        degenerate=degenerate,
    )


def cluster_masks(model: ClusterModel) -> list[BinaryMask]:
    """The six masks {1},{2},{3},{1u2},{1u3},{2u3}, in that order."""
    out = []
    for subset in CLUSTER_SUBSETS:
        bits = np.isin(model.assignment, subset).astype(np.uint8)
        out.append(BinaryMask(bits))
    return out


def invert_mask(m: BinaryMask) -> BinaryMask:
    """Per-pixel complement."""
    return BinaryMask((1 - m.bits).astype(np.uint8))


def build_bank(img: WordImage, polarity: str = "normal", seed: int = 0) -> CandidateBank:
    """All 16 candidates for one image, in the frozen bank order.

    Deterministic for a given (img, polarity, seed). Degenerate
    sub-results are kept (flagged) so indexing is stable.
    """
    if polarity not in POLARITIES:
        raise ValueError(f"unknown polarity {polarity!r}")

    candidates: list[BinaryMask] = []
    methods: list[str] = []
    degenerate: list[bool] = []

    planes = list(split_rgb(img)) + list(to_hsv(img)) + list(to_lab(img))
    for plane in planes:
        res = otsu_threshold(plane)
        candidates.append(res.mask)
        methods.append(f"otsu:{plane.tag}:t={int(res.threshold)}")
        degenerate.append(res.degenerate)

    model = fit_three_clusters(img, seed)
    for subset, mask in zip(CLUSTER_SUBSETS, cluster_masks(model)):
        candidates.append(mask)
        methods.append("cluster:{" + ",".join(str(i) for i in subset) + "}")
        degenerate.append(all(i in model.empty_clusters for i in subset))

    res = rats_threshold(intensity(img))
    candidates.append(res.mask)
    methods.append(f"rats:t={res.threshold:.1f}")
    degenerate.append(res.degenerate)

    if polarity == "inverted":
        candidates = [invert_mask(m) for m in candidates]

    return CandidateBank(
        image_id=img.id,
        candidates=tuple(candidates),
        methods=tuple(methods),
        degenerate=tuple(degenerate),
        polarity=polarity,
    )
