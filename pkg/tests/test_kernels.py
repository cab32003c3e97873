"""Cross-backend checks: the compiled kernels and the NumPy fallback must
produce identical results."""

import numpy as np
import pytest

from maskbench._kernels import _fallback

native = pytest.importorskip(
    "maskbench._kernels._native", reason="compiled kernels not built"
)

from conftest import make_rng, random_polygon_vertices


BACKENDS = (native, _fallback)


class TestOtsuArgmax:
    def test_random_histograms_identical(self):
        rng = make_rng(101)
        for _ in range(300):
            hist = rng.integers(0, 50, 256).astype(np.int64)
            hist[rng.integers(0, 256, 200)] = 0  # plenty of empty bins
            if (hist > 0).sum() < 2:
                continue
            assert native.otsu_argmax(hist) == _fallback.otsu_argmax(hist)

    def test_two_spike_histogram(self):
        hist = np.zeros(256, dtype=np.int64)
        hist[30] = 10
        hist[203] = 5
        assert native.otsu_argmax(hist) == _fallback.otsu_argmax(hist)

    def test_degenerate_single_bin(self):
        hist = np.zeros(256, dtype=np.int64)
        hist[99] = 12
        assert native.otsu_argmax(hist) == _fallback.otsu_argmax(hist) == -1


class TestKmeansAssign:
    def test_random_pixels_identical(self):
        rng = make_rng(102)
        for _ in range(50):
            n = int(rng.integers(3, 200))
            pixels = rng.integers(0, 256, (n, 3)).astype(np.float64)
            centroids = rng.uniform(0, 255, (3, 3))
            ln, dn = native.kmeans_assign(pixels, centroids)
            lp, dp = _fallback.kmeans_assign(pixels, centroids)
            assert np.array_equal(ln, lp)
            assert np.array_equal(dn, dp)

    def test_tie_breaks_to_lowest_index(self):
        pixels = np.array([[10.0, 0.0, 0.0]])
        centroids = np.array([[20.0, 0.0, 0.0], [0.0, 0.0, 0.0], [20.0, 0.0, 0.0]])
        for impl in BACKENDS:
            labels, _ = impl.kmeans_assign(pixels, centroids)
            assert labels[0] == 0


class TestRasterize:
    def test_random_polygons_identical(self):
        rng = make_rng(103)
        for _ in range(60):
            verts = random_polygon_vertices(rng, 20, 20)
            vx = np.array([v[0] for v in verts])
            vy = np.array([v[1] for v in verts])
            a = native.rasterize_polygon(vx, vy, 20, 20)
            b = _fallback.rasterize_polygon(vx, vy, 20, 20)
            assert np.array_equal(a, b)

    def test_degenerate_offscreen(self):
        vx = np.array([100.0, 110.0, 105.0])
        vy = np.array([100.0, 100.0, 110.0])
        for impl in BACKENDS:
            assert impl.rasterize_polygon(vx, vy, 8, 8).sum() == 0


class TestLabelConnected:
    def canonical(self, labels, n):
        """Map raw labels to first-appearance order for comparison."""
        out = np.zeros_like(labels)
        remap = {}
        for v in labels.ravel():
            if v and v not in remap:
                remap[v] = len(remap) + 1
        for old, new in remap.items():
            out[labels == old] = new
        return out, n

    def test_random_masks_same_components(self):
        rng = make_rng(104)
        for _ in range(60):
            bits = (rng.random((15, 15)) < 0.4).astype(np.uint8)
            ln, nn = native.label_connected(bits)
            lp, np_ = _fallback.label_connected(bits)
            assert nn == np_
            a, _ = self.canonical(ln, nn)
            b, _ = self.canonical(lp, np_)
            assert np.array_equal(a, b)

    def test_empty_and_full(self):
        for bits in (np.zeros((4, 4), dtype=np.uint8), np.ones((4, 4), dtype=np.uint8)):
            ln, nn = native.label_connected(bits)
            lp, np_ = _fallback.label_connected(bits)
            assert nn == np_
            assert np.array_equal((ln > 0), (lp > 0))

    def test_worst_case_label_count(self):
        # isolated pixels two apart: the densest provisional labeling
        bits = np.zeros((21, 21), dtype=np.uint8)
        bits[::2, ::2] = 1
        ln, nn = native.label_connected(bits)
        lp, np_ = _fallback.label_connected(bits)
        assert nn == np_ == 11 * 11


class TestLevenshtein:
    def test_random_pairs_identical(self):
        rng = make_rng(105)
        for _ in range(200):
            a = rng.integers(60, 80, int(rng.integers(0, 15))).astype(np.int32)
            b = rng.integers(60, 80, int(rng.integers(0, 15))).astype(np.int32)
            assert native.levenshtein(a, b) == _fallback.levenshtein(a, b)

    def test_empty_cases(self):
        empty = np.array([], dtype=np.int32)
        abc = np.array([97, 98, 99], dtype=np.int32)
        for impl in BACKENDS:
            assert impl.levenshtein(empty, empty) == 0
            assert impl.levenshtein(empty, abc) == 3
            assert impl.levenshtein(abc, empty) == 3
