# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels. Mirrors _fallback.py expression-for-expression;
compiled with -ffp-contract=off so float results match the NumPy path."""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()

BACKEND = "native"


def otsu_argmax(hist):
    cdef const cnp.int64_t[::1] h = np.ascontiguousarray(hist, dtype=np.int64)
    cdef long long n = 0, total = 0
    cdef int i
    for i in range(256):
        n += h[i]
        total += i * h[i]
    cdef long long c0 = 0, s0 = 0, c1, s1
    cdef double mu0, mu1, d, var
    cdef double best = 0.0
    cdef int best_t = -1
    cdef int t
    for t in range(255):
        c0 += h[t]
        s0 += t * h[t]
        if c0 == 0 or c0 == n:
            continue
        c1 = n - c0
        s1 = total - s0
        mu0 = (<double> s0) / (<double> c0)
        mu1 = (<double> s1) / (<double> c1)
        d = mu0 - mu1
        var = (<double> c0) * (<double> c1) * d * d
        if best_t < 0 or var > best:
            best = var
            best_t = t
    return best_t


def kmeans_assign(pixels, centroids):
    cdef const double[:, ::1] p = np.ascontiguousarray(pixels, dtype=np.float64)
    cdef const double[:, ::1] c = np.ascontiguousarray(centroids, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t k = c.shape[0]
    labels = np.empty(n, dtype=np.int32)
    dmin = np.empty(n, dtype=np.float64)
    cdef cnp.int32_t[::1] lv = labels
    cdef double[::1] dv = dmin
    cdef Py_ssize_t i, j
    cdef double dx, dy, dz, dist, best
    cdef int bj
    for i in range(n):
        best = 0.0
        bj = -1
        for j in range(k):
            dx = p[i, 0] - c[j, 0]
            dy = p[i, 1] - c[j, 1]
            dz = p[i, 2] - c[j, 2]
            dist = dx * dx + dy * dy + dz * dz
            if bj < 0 or dist < best:
                best = dist
                bj = <int> j
        lv[i] = bj
        dv[i] = best
    return labels, dmin


def rasterize_polygon(vx, vy, int width, int height):
    cdef const double[::1] xv = np.ascontiguousarray(vx, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(vy, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[0]
    out = np.zeros((height, width), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] ov = out
    cdef double* cross = <double*> malloc(m * sizeof(double))
    if cross == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j, nc, a, b
    cdef int row, col
    cdef double yc, y1, y2, t, x, key, xc
    cdef Py_ssize_t ptr
    try:
        for row in range(height):
            yc = (<double> row) + 0.5
            nc = 0
            for i in range(m):
                j = i + 1 if i + 1 < m else 0
                y1 = yv[i]
                y2 = yv[j]
                if (y1 > yc) != (y2 > yc):
                    t = (yc - y1) / (y2 - y1)
                    cross[nc] = xv[i] + t * (xv[j] - xv[i])
                    nc += 1
            if nc == 0:
                continue
            # insertion sort; crossing counts are tiny
            for a in range(1, nc):
                key = cross[a]
                b = a - 1
                while b >= 0 and cross[b] > key:
                    cross[b + 1] = cross[b]
                    b -= 1
                cross[b + 1] = key
            ptr = 0
            for col in range(width):
                xc = (<double> col) + 0.5
                while ptr < nc and cross[ptr] <= xc:
                    ptr += 1
                if (nc - ptr) & 1:
                    ov[row, col] = 1
    finally:
        free(cross)
    return out


cdef inline int _find(cnp.int32_t* parent, int x) nogil:
    cdef int root = x
    while parent[root] != root:
        root = parent[root]
    cdef int cur = x, nxt
    while parent[cur] != root:
        nxt = parent[cur]
        parent[cur] = root
        cur = nxt
    return root


def label_connected(bits):
    """Two-pass union-find 8-connected labeling; raw numbering arbitrary."""
    cdef const cnp.uint8_t[:, ::1] b = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef Py_ssize_t h = b.shape[0]
    cdef Py_ssize_t w = b.shape[1]
    out = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] ov = out
    # at most ceil(w/2) provisional labels per row (a new label needs an
    # empty west neighbor), plus slack for the unused index 0
    cdef Py_ssize_t cap = h * ((w + 1) // 2) + 2
    parent_arr = np.zeros(cap, dtype=np.int32)
    cdef cnp.int32_t[::1] pv = parent_arr
    cdef cnp.int32_t* parent = &pv[0]
    cdef int next_label = 1
    cdef Py_ssize_t r, c
    cdef int lbl, nb, root_a, root_b
    for r in range(h):
        for c in range(w):
            if b[r, c] == 0:
                continue
            lbl = 0
            if c > 0 and ov[r, c - 1] != 0:
                lbl = _find(parent, ov[r, c - 1])
            if r > 0:
                if c > 0 and ov[r - 1, c - 1] != 0:
                    nb = _find(parent, ov[r - 1, c - 1])
                    if lbl == 0 or nb < lbl:
                        if lbl != 0:
                            parent[lbl] = nb
                        lbl = nb
                    elif nb != lbl:
                        parent[nb] = lbl
                if ov[r - 1, c] != 0:
                    nb = _find(parent, ov[r - 1, c])
                    if lbl == 0 or nb < lbl:
                        if lbl != 0:
                            parent[lbl] = nb
                        lbl = nb
                    elif nb != lbl:
                        parent[nb] = lbl
                if c + 1 < w and ov[r - 1, c + 1] != 0:
                    nb = _find(parent, ov[r - 1, c + 1])
                    if lbl == 0 or nb < lbl:
                        if lbl != 0:
                            parent[lbl] = nb
                        lbl = nb
                    elif nb != lbl:
                        parent[nb] = lbl
            if lbl == 0:
                lbl = next_label
                parent[lbl] = lbl
                next_label += 1
            ov[r, c] = lbl
    # compact roots to 1..n in scan order of first appearance
    remap_arr = np.zeros(next_label, dtype=np.int32)
    cdef cnp.int32_t[::1] remap = remap_arr
    cdef int n = 0
    cdef int root
    for r in range(h):
        for c in range(w):
            if ov[r, c] == 0:
                continue
            root = _find(parent, ov[r, c])
            if remap[root] == 0:
                n += 1
                remap[root] = n
            ov[r, c] = remap[root]
    return out, n


def levenshtein(a, b):
    cdef const cnp.int32_t[::1] sa = np.ascontiguousarray(a, dtype=np.int32)
    cdef const cnp.int32_t[::1] sb = np.ascontiguousarray(b, dtype=np.int32)
    cdef Py_ssize_t la = sa.shape[0]
    cdef Py_ssize_t lb = sb.shape[0]
    if la == 0:
        return int(lb)
    if lb == 0:
        return int(la)
    cdef int* prev = <int*> malloc((lb + 1) * sizeof(int))
    cdef int* cur = <int*> malloc((lb + 1) * sizeof(int))
    if prev == NULL or cur == NULL:
        if prev != NULL:
            free(prev)
        if cur != NULL:
            free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef int cost, best, cand
    cdef int* tmp
    try:
        for j in range(lb + 1):
            prev[j] = <int> j
        for i in range(1, la + 1):
            cur[0] = <int> i
            for j in range(1, lb + 1):
                cost = 0 if sa[i - 1] == sb[j - 1] else 1
                best = prev[j] + 1
                cand = cur[j - 1] + 1
                if cand < best:
                    best = cand
                cand = prev[j - 1] + cost
                if cand < best:
                    best = cand
                cur[j] = best
            tmp = prev
            prev = cur
            cur = tmp
        return int(prev[lb])
    finally:
        free(prev)
        free(cur)
