"""Dataset manifests and per-image annotation session state.

The manifest is a UTF-8 text file, one entry per line:
`image_id <TAB> relative/path.png <TAB> ground truth text` (the text may
contain spaces; the first two tabs delimit). Annotation records persist
as one `<image_id>.ann.json` sidecar per image next to the saved mask;
a dataset-level index is rebuilt when the store opens. One writing
session per dataset, enforced with an advisory lock file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from .errors import (
    InvariantViolation,
    LockHeld,
    ManifestParseError,
    MissingImage,
    StorageError,
    UnknownImage,
)
from .maskops import EditOp, SegMask, load_mask, save_mask

RECORD_VERSION = 1
STATUSES = ("untagged", "skipped", "tagged")
LOCK_NAME = ".maskbench.lock"


@dataclass(frozen=True)
class ManifestEntry:
    image_id: str
    image_path: Path
    ground_truth: str


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    entries: tuple[ManifestEntry, ...]
    _by_id: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        by_id = {e.image_id: e for e in self.entries}
        object.__setattr__(self, "_by_id", by_id)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._by_id

    def entry(self, image_id: str) -> ManifestEntry:
        try:
            return self._by_id[image_id]
        except KeyError:
            raise UnknownImage(f"image {image_id!r} is not in the manifest") from None


def load_manifest(path: str | Path, require_images: bool = True) -> DatasetManifest:
    """Parse and validate a manifest file; entry order is file order."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestParseError(f"cannot read manifest {path}: {exc}") from exc

    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t", 2)
        if len(parts) != 3:
            raise ManifestParseError(
                f"{path}:{lineno}: expected 'id<TAB>path<TAB>truth', got {line!r}"
            )
        image_id, rel, truth = parts
        if not image_id:
            raise ManifestParseError(f"{path}:{lineno}: empty image_id")
        if image_id in seen:
            raise ManifestParseError(f"{path}:{lineno}: duplicate image_id {image_id!r}")
        seen.add(image_id)
        img_path = (path.parent / rel).resolve()
        if require_images and not img_path.is_file():
            raise MissingImage(f"{path}:{lineno}: entry {image_id!r} points at missing {img_path}")
        entries.append(ManifestEntry(image_id=image_id, image_path=img_path, ground_truth=truth))
    return DatasetManifest(name=path.stem, entries=tuple(entries))


@dataclass(frozen=True)
class SessionCursor:
    manifest: DatasetManifest
    position: int = 0

    def __post_init__(self):
        if not 0 <= self.position < max(len(self.manifest), 1):
            raise ValueError(f"cursor position {self.position} out of range")

    @property
    def current(self) -> ManifestEntry:
        return self.manifest.entries[self.position]


def advance(cursor: SessionCursor, direction: str) -> SessionCursor:
    """Move one entry forward or back, clamped at the dataset ends."""
    if direction not in ("next", "prev"):
        raise ValueError(f"direction must be 'next' or 'prev', got {direction!r}")
    step = 1 if direction == "next" else -1
    pos = min(max(cursor.position + step, 0), len(cursor.manifest) - 1)
    return SessionCursor(manifest=cursor.manifest, position=pos)


@dataclass(frozen=True)
class AnnotationRecord:
    image_id: str
    status: str = "untagged"
    polarity: str = "normal"
    selected_candidate: int = 0
    edits: tuple[EditOp, ...] = ()
    mask_path: str | None = None
    updated_at: str | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if not 0 <= self.selected_candidate <= 16:
            raise ValueError("selected_candidate must be in 0..16")
        seqs = [op.sequence for op in self.edits]
        if any(b <= a for a, b in zip(seqs, seqs[1:])):
            raise ValueError("edit sequence numbers must strictly increase")
        if self.status == "tagged":
            if self.mask_path is None or (self.selected_candidate < 1 and not self.edits):
                raise InvariantViolation(
                    f"record {self.image_id!r} tagged without mask or without "
                    "a selected candidate / edits"
                )

    def to_dict(self) -> dict:
        return {
            "version": RECORD_VERSION,
            "image_id": self.image_id,
            "status": self.status,
            "polarity": self.polarity,
            "selected_candidate": self.selected_candidate,
            "edits": [op.to_dict() for op in self.edits],
            "mask_path": self.mask_path,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnnotationRecord":
        if d.get("version") != RECORD_VERSION:
            raise StorageError(f"unsupported record version {d.get('version')!r}")
        return cls(
            image_id=d["image_id"],
            status=d["status"],
            polarity=d.get("polarity", "normal"),
            selected_candidate=int(d.get("selected_candidate", 0)),
            edits=tuple(EditOp.from_dict(e) for e in d.get("edits", ())),
            mask_path=d.get("mask_path"),
            updated_at=d.get("updated_at"),
        )


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


class SessionLock:
    """Advisory write lock: O_EXCL-created file holding the owner pid."""

    def __init__(self, root: Path):
        self.path = Path(root) / LOCK_NAME
        self._held = False

    def acquire(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise LockHeld(f"dataset lock {self.path} is held by another session") from None
        with os.fdopen(fd, "w") as fh:
            fh.write(str(os.getpid()))
        self._held = True

    def release(self):
        if self._held:
            try:
                self.path.unlink()
            except OSError:
                pass
            self._held = False

    def __enter__(self):
        self.acquire()
        return self

    def __exit__(self, *exc):
        self.release()


class AnnotationStore:
    """Record and mask persistence for one dataset.

    Writing stores hold the dataset lock for their lifetime; read-only
    stores skip it. Open as a context manager or call close().
    """

    def __init__(self, root: str | Path, manifest: DatasetManifest, read_only: bool = False):
        self.root = Path(root)
        self.manifest = manifest
        self.read_only = read_only
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = SessionLock(self.root)
        if not read_only:
            self._lock.acquire()
        self._records: dict[str, AnnotationRecord] = {}
        self._load_index()

    def close(self):
        self._lock.release()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _record_path(self, image_id: str) -> Path:
        return self.root / f"{image_id}.ann.json"

    def _mask_path(self, image_id: str) -> Path:
        return self.root / f"{image_id}.mask.png"

    def _load_index(self):
        for p in sorted(self.root.glob("*.ann.json")):
            try:
                rec = AnnotationRecord.from_dict(json.loads(p.read_text(encoding="utf-8")))
            except (OSError, json.JSONDecodeError, KeyError) as exc:
                raise StorageError(f"unreadable annotation record {p}: {exc}") from exc
            if rec.image_id in self.manifest:
                self._records[rec.image_id] = rec

    def _check_known(self, image_id: str):
        if image_id not in self.manifest:
            raise UnknownImage(f"image {image_id!r} is not in the manifest")

    def _persist(self, rec: AnnotationRecord) -> AnnotationRecord:
        if self.read_only:
            raise StorageError("store is read-only")
        path = self._record_path(rec.image_id)
        tmp = path.with_name(path.name + ".tmp")
        try:
            tmp.write_text(json.dumps(rec.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
            os.replace(tmp, path)
        except OSError as exc:
            raise StorageError(f"could not persist record for {rec.image_id!r}: {exc}") from exc
        self._records[rec.image_id] = rec
        return rec

    def record(self, image_id: str) -> AnnotationRecord:
        """Current record; a fresh untagged one if never touched."""
        self._check_known(image_id)
        return self._records.get(image_id, AnnotationRecord(image_id=image_id))

    def set_selection(self, image_id: str, candidate: int, polarity: str = "normal") -> AnnotationRecord:
        """Pick a bank candidate (0 = none). Resets the edit history, since
        edits apply on top of the selected candidate.

        Re-selecting on a tagged image keeps it tagged (the committed mask
        stays on disk) unless the new choice is 0, which withdraws the
        segmentation and demotes the record to untagged. Selecting on a
        skipped image un-skips it.
        """
        self._check_known(image_id)
        if not 0 <= candidate <= 16:
            raise InvariantViolation(f"candidate index {candidate} out of range 0..16")
        old = self.record(image_id)
        if old.status == "tagged":
            status = "tagged" if candidate >= 1 else "untagged"
        else:
            status = "untagged"
        rec = replace(
            old,
            status=status,
            polarity=polarity,
            selected_candidate=candidate,
            edits=(),
            updated_at=_utcnow(),
        )
        return self._persist(rec)

    def add_edit(self, image_id: str, kind: str, polygon) -> AnnotationRecord:
        """Append an ADD PATCH / DELETE PATCH step to the record."""
        self._check_known(image_id)
        old = self.record(image_id)
        seq = old.edits[-1].sequence + 1 if old.edits else 1
        rec = replace(
            old,
            edits=old.edits + (EditOp(kind=kind, polygon=polygon, sequence=seq),),
            updated_at=_utcnow(),
        )
        return self._persist(rec)

    def commit_annotation(
        self, record: AnnotationRecord, mask: SegMask, method: str | None = None
    ) -> AnnotationRecord:
        """Persist the final mask and flip the record to tagged.

        `method` is the producing candidate's descriptor token (e.g.
        `otsu:R:t=142`), stored in the mask sidecar.
        """
        self._check_known(record.image_id)
        if record.selected_candidate < 1 and not record.edits:
            raise InvariantViolation(
                f"cannot tag {record.image_id!r}: candidate 0 with no edits "
                "produces no mask"
            )
        mask_path = self._mask_path(record.image_id)
        if method is None:
            method = f"candidate:{record.selected_candidate}"
        save_mask(
            mask,
            mask_path,
            polarity=record.polarity,
            method=method,
            edits=record.edits,
        )
        rec = replace(
            record,
            status="tagged",
            mask_path=mask_path.name,
            updated_at=_utcnow(),
        )
        return self._persist(rec)

    def mark_skipped(self, image_id: str) -> AnnotationRecord:
        """Explicit skip: flips untagged records to skipped, leaves others."""
        self._check_known(image_id)
        old = self.record(image_id)
        if old.status != "untagged":
            return old
        return self._persist(replace(old, status="skipped", updated_at=_utcnow()))

    def reload_annotation(self, image_id: str) -> tuple[AnnotationRecord, SegMask | None]:
        """Stored record plus the saved mask when the image is tagged."""
        rec = self.record(image_id)
        if rec.status != "tagged" or rec.mask_path is None:
            return rec, None
        return rec, load_mask(self.root / rec.mask_path)

    def counts(self) -> dict[str, int]:
        out = {"untagged": 0, "skipped": 0, "tagged": 0}
        for entry in self.manifest.entries:
            out[self.record(entry.image_id).status] += 1
        return out
