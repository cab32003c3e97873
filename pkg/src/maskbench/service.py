"""Local annotation service backing the browser UI.

Every mutation maps to exactly one store operation; the working mask for
an image is always derived from its persisted record (selected candidate
plus edit history), so the HTTP layer holds no authoritative state of its
own. Candidate banks are cached per (image, polarity) purely as a
speed-up.
"""

from __future__ import annotations

import io
import json
import threading
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import uvicorn
from fastapi import FastAPI, HTTPException, Response
from fastapi.staticfiles import StaticFiles
from PIL import Image
from pydantic import BaseModel

from . import maskops
from .bank import BANK_SIZE, POLARITIES, CandidateBank, build_bank
from .errors import (
    DegeneratePolygon,
    InvariantViolation,
    LockHeld,
    MaskbenchError,
    UnknownImage,
)
from .raster import BinaryMask, WordImage
from .store import AnnotationStore, DatasetManifest, load_manifest

API_PREFIX = "/api/v1"

ANNOTATION_SUBDIR = "annotations"


@dataclass
class ServiceConfig:
    dataset_root: Path
    manifest_name: str = "manifest.tsv"
    host: str = "127.0.0.1"
    port: int = 8765
    read_only: bool = False
    allow_remote: bool = False
    ui_dir: Path | None = None
    seed: int = 0


class _SelectionBody(BaseModel):
    candidate: int
    polarity: str = "normal"


class _PatchBody(BaseModel):
    kind: str
    vertices: list[list[float]]


class _ServiceState:
    def __init__(self, config: ServiceConfig):
        self.config = config
        root = Path(config.dataset_root)
        if not root.is_dir():
            raise MaskbenchError(f"dataset root {root} does not exist")
        manifest_path = root / config.manifest_name
        if not manifest_path.is_file():
            raise MaskbenchError(f"dataset root {root} has no {config.manifest_name}")
        self.manifest: DatasetManifest = load_manifest(manifest_path)
        self.store = AnnotationStore(
            root / ANNOTATION_SUBDIR, self.manifest, read_only=config.read_only
        )
        self._banks: dict[tuple[str, str], CandidateBank] = {}
        self._bank_lock = threading.Lock()
        self._image_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._image_locks_guard = threading.Lock()

    def close(self):
        self.store.close()

    def image_lock(self, image_id: str) -> threading.Lock:
        with self._image_locks_guard:
            return self._image_locks[image_id]

    def word_image(self, image_id: str) -> WordImage:
        entry = self.manifest.entry(image_id)
        return WordImage.from_file(entry.image_path, image_id=image_id)

    def bank(self, image_id: str, polarity: str) -> CandidateBank:
        key = (image_id, polarity)
        with self._bank_lock:
            cached = self._banks.get(key)
        if cached is not None:
            return cached
        built = build_bank(self.word_image(image_id), polarity, self.config.seed)
        with self._bank_lock:
            self._banks[key] = built
        return built

    def working_mask(self, image_id: str) -> BinaryMask | None:
        """Mask implied by the record: selected candidate plus patches."""
        rec = self.store.record(image_id)
        if rec.selected_candidate == 0 and not rec.edits:
            return None
        if rec.selected_candidate >= 1:
            mask = self.bank(image_id, rec.polarity).candidate(rec.selected_candidate)
        else:
            entry_img = self.word_image(image_id)
            mask = BinaryMask(np.zeros((entry_img.height, entry_img.width), dtype=np.uint8))
        for op in rec.edits:
            mask = maskops.apply_patch(mask, op)
        return mask


def _png_response(array: np.ndarray, mode: str = "L") -> Response:
    buf = io.BytesIO()
    Image.fromarray(array, mode=mode).save(buf, format="PNG")
    return Response(content=buf.getvalue(), media_type="image/png")


def _record_json(rec) -> dict:
    return rec.to_dict()


def create_app(config: ServiceConfig) -> FastAPI:
    state = _ServiceState(config)
    app = FastAPI(title="maskbench annotation service")
    app.state.service = state

    def _check_polarity(polarity: str):
        if polarity not in POLARITIES:
            raise HTTPException(status_code=422, detail=f"polarity must be one of {POLARITIES}")

    def _guard_write():
        if config.read_only:
            raise HTTPException(status_code=403, detail="service is read-only")

    def _known(image_id: str):
        if image_id not in state.manifest:
            raise HTTPException(status_code=404, detail=f"unknown image {image_id!r}")

    @app.get(API_PREFIX + "/images")
    def list_images():
        return [
            {"image_id": e.image_id, "status": state.store.record(e.image_id).status}
            for e in state.manifest.entries
        ]

    @app.get(API_PREFIX + "/images/{image_id}")
    def get_image(image_id: str):
        _known(image_id)
        return _png_response(np.asarray(state.word_image(image_id).pixels), mode="RGB")

    @app.get(API_PREFIX + "/images/{image_id}/bank")
    def get_bank(image_id: str, polarity: str = "normal"):
        _known(image_id)
        _check_polarity(polarity)
        bank = state.bank(image_id, polarity)
        return {
            "image_id": image_id,
            "polarity": polarity,
            "candidates": [
                {
                    "index": k,
                    "method": bank.methods[k - 1],
                    "degenerate": bank.degenerate[k - 1],
                    "url": f"{API_PREFIX}/images/{image_id}/bank/{k}?polarity={polarity}",
                }
                for k in range(1, BANK_SIZE + 1)
            ],
        }

    @app.get(API_PREFIX + "/images/{image_id}/bank/{index}")
    def get_candidate(image_id: str, index: int, polarity: str = "normal"):
        _known(image_id)
        _check_polarity(polarity)
        if not 1 <= index <= BANK_SIZE:
            raise HTTPException(status_code=422, detail=f"candidate index must be 1..{BANK_SIZE}")
        mask = state.bank(image_id, polarity).candidate(index)
        return _png_response((mask.bits * 255).astype(np.uint8))

    @app.post(API_PREFIX + "/images/{image_id}/selection")
    def post_selection(image_id: str, body: _SelectionBody):
        _guard_write()
        _known(image_id)
        _check_polarity(body.polarity)
        if not 0 <= body.candidate <= BANK_SIZE:
            raise HTTPException(
                status_code=422, detail=f"candidate must be in 0..{BANK_SIZE}"
            )
        with state.image_lock(image_id):
            rec = state.store.set_selection(image_id, body.candidate, body.polarity)
        return _record_json(rec)

    @app.post(API_PREFIX + "/images/{image_id}/patch")
    def post_patch(image_id: str, body: _PatchBody):
        _guard_write()
        _known(image_id)
        if body.kind not in maskops.EDIT_KINDS:
            raise HTTPException(status_code=422, detail="kind must be 'add' or 'delete'")
        try:
            poly = maskops.Polygon(tuple((v[0], v[1]) for v in body.vertices))
        except DegeneratePolygon as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        with state.image_lock(image_id):
            rec = state.store.add_edit(image_id, body.kind, poly)
        return {
            "record": _record_json(rec),
            "mask_url": f"{API_PREFIX}/images/{image_id}/mask",
        }

    @app.get(API_PREFIX + "/images/{image_id}/mask")
    def get_working_mask(image_id: str):
        _known(image_id)
        mask = state.working_mask(image_id)
        if mask is None:
            raise HTTPException(status_code=404, detail="no working mask for this image")
        return _png_response((mask.bits * 255).astype(np.uint8))

    @app.get(API_PREFIX + "/images/{image_id}/overlay")
    def get_overlay(image_id: str):
        _known(image_id)
        mask = state.working_mask(image_id)
        if mask is None:
            raise HTTPException(status_code=404, detail="no working mask for this image")
        seg = maskops.label_components(mask)
        tinted = maskops.overlay(state.word_image(image_id), seg)
        return _png_response(np.asarray(tinted.pixels), mode="RGB")

    @app.post(API_PREFIX + "/images/{image_id}/commit")
    def post_commit(image_id: str):
        _guard_write()
        _known(image_id)
        with state.image_lock(image_id):
            rec = state.store.record(image_id)
            mask = state.working_mask(image_id)
            if mask is None:
                raise HTTPException(
                    status_code=409,
                    detail="nothing to save: candidate 0 and no edits",
                )
            seg = maskops.label_components(mask)
            method = None
            if rec.selected_candidate >= 1:
                bank = state.bank(image_id, rec.polarity)
                method = bank.methods[rec.selected_candidate - 1]
            try:
                rec = state.store.commit_annotation(rec, seg, method=method)
            except InvariantViolation as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
        return _record_json(rec)

    @app.post(API_PREFIX + "/images/{image_id}/skip")
    def post_skip(image_id: str):
        _guard_write()
        _known(image_id)
        with state.image_lock(image_id):
            rec = state.store.mark_skipped(image_id)
        return _record_json(rec)

    @app.get(API_PREFIX + "/images/{image_id}/annotation")
    def get_annotation(image_id: str):
        _known(image_id)
        rec = state.store.record(image_id)
        return _record_json(rec)

    if config.ui_dir is not None:
        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def serve(config: ServiceConfig):
    """Run the service until interrupted. Refuses non-loopback binds
    unless explicitly allowed."""
    loopback = config.host in ("127.0.0.1", "::1", "localhost")
    if not loopback and not config.allow_remote:
        raise MaskbenchError(
            f"refusing to listen on {config.host} without --allow-remote"
        )
    app = create_app(config)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    finally:
        app.state.service.close()
