"""Hot-kernel dispatch: compiled extension when built, NumPy fallback otherwise.

Set MASKBENCH_KERNELS=pure or =native to force a backend.
"""

import os

_forced = os.environ.get("MASKBENCH_KERNELS", "").strip().lower()

if _forced == "pure":
    from . import _fallback as _impl
elif _forced == "native":
    from . import _native as _impl  # type: ignore[attr-defined]
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as _impl

BACKEND = _impl.BACKEND
otsu_argmax = _impl.otsu_argmax
kmeans_assign = _impl.kmeans_assign
rasterize_polygon = _impl.rasterize_polygon
label_connected = _impl.label_connected
levenshtein = _impl.levenshtein

__all__ = [
    "BACKEND",
    "otsu_argmax",
    "kmeans_assign",
    "rasterize_polygon",
    "label_connected",
    "levenshtein",
]
