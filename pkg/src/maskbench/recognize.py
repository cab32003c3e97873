"""Margin padding and the external-recognizer adapter.

Binarized words are padded with background margins of half the image
height (top and bottom) and half the width (left and right) before being
handed to a recognizer; characters touching the crop boundary otherwise
recognize poorly. Recognition itself is an external command; results are
always rendered black-on-white first because some engines silently flip
polarity on unpadded inputs.
"""

from __future__ import annotations

import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import StorageError
from .raster import BinaryMask

OCR_DPI = 300

EXIT_OK = "ok"
EXIT_ENGINE_ERROR = "engine_error"
EXIT_TIMEOUT = "timeout"


@dataclass(frozen=True)
class PaddedImage:
    """A mask surrounded by background margins of half its size per side."""

    base: BinaryMask
    pad_rows: int
    pad_cols: int

    @cached_property
    def padded(self) -> BinaryMask:
        bits = np.pad(
            self.base.bits,
            ((self.pad_rows, self.pad_rows), (self.pad_cols, self.pad_cols)),
            mode="constant",
        )
        return BinaryMask(bits)

    @property
    def width(self) -> int:
        return self.base.width + 2 * self.pad_cols

    @property
    def height(self) -> int:
        return self.base.height + 2 * self.pad_rows


def pad(mask: BinaryMask) -> PaddedImage:
    """Zero-pad by ceil(H/2) rows and ceil(W/2) columns per side.

    Even dimensions double exactly (H x W -> 2H x 2W); odd ones gain one
    extra row/column rather than under-padding.
    """
    return PaddedImage(
        base=mask,
        pad_rows=(mask.height + 1) // 2,
        pad_cols=(mask.width + 1) // 2,
    )


def render_for_ocr(p: PaddedImage, path: str | Path) -> Path:
    """Write the padded mask as black-text-on-white 8-bit PNG, 300 DPI."""
    path = Path(path)
    gray = np.where(p.padded.bits == 1, 0, 255).astype(np.uint8)
    try:
        Image.fromarray(gray, mode="L").save(path, format="PNG", dpi=(OCR_DPI, OCR_DPI))
    except OSError as exc:
        raise StorageError(f"could not write {path}: {exc}") from exc
    return path


@dataclass(frozen=True)
class AdapterConfig:
    """External recognizer invocation: command template, timeout, tag.

    The template is split shell-style; any `{input}` placeholder token is
    replaced with the image path. The engine must print the recognized
    text on stdout.
    """

    command: str
    timeout: float = 30.0
    engine_tag: str = "external"


@dataclass(frozen=True)
class OcrResult:
    image_id: str
    text: str
    engine_tag: str
    exit_status: str  # ok | engine_error | timeout

    def __post_init__(self):
        if self.exit_status != EXIT_OK and self.text:
            raise ValueError("failed recognitions must carry empty text")


def recognize(path: str | Path, config: AdapterConfig, image_id: str = "") -> OcrResult:
    """Run the adapter on one rendered image. Never raises: engine
    failures and timeouts come back as flagged results."""
    argv = [
        arg.replace("{input}", str(path)) if "{input}" in arg else arg
        for arg in shlex.split(config.command)
    ]
    tag = config.engine_tag
    try:
        proc = subprocess.run(
            argv,
            capture_output=True,
            timeout=config.timeout,
        )
    except subprocess.TimeoutExpired:
        return OcrResult(image_id=image_id, text="", engine_tag=tag, exit_status=EXIT_TIMEOUT)
    except (OSError, ValueError):
        return OcrResult(image_id=image_id, text="", engine_tag=tag, exit_status=EXIT_ENGINE_ERROR)
    if proc.returncode != 0:
        return OcrResult(image_id=image_id, text="", engine_tag=tag, exit_status=EXIT_ENGINE_ERROR)
    text = proc.stdout.decode("utf-8", errors="replace").rstrip("\r\n")
    return OcrResult(image_id=image_id, text=text, engine_tag=tag, exit_status=EXIT_OK)


def recognize_many(
    jobs: list[tuple[str, str | Path]],
    config: AdapterConfig,
    workers: int = 1,
) -> list[OcrResult]:
    """Recognize (image_id, path) pairs, optionally in parallel; results
    come back in input order, one per job."""
    if workers <= 1:
        return [recognize(p, config, image_id=i) for i, p in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(recognize, p, config, image_id=i) for i, p in jobs]
        return [f.result() for f in futures]
