"""maskbench: pixel-level word-image segmentation, annotation and OCR scoring.

Subsystems: raster (image/planes/color spaces), bank (the 16-candidate
segmentation bank), maskops (polygon edits, component labeling, mask
files), store (manifests + annotation records), recognize (padding and
the external-recognizer adapter), evaluation (recognition rate and
normalized edit distance), service/cli (HTTP API and batch commands).
Hot pixel kernels live in _kernels with a compiled and a NumPy backend.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
