"""Word recognition rate and the per-word-normalized total edit distance.

A word counts as correct when truth and hypothesis match after trimming
and collapsing whitespace (case-sensitive unless the case-insensitive
flag is set). The distance metric is unit-cost Levenshtein divided by
the normalized truth length, summed over the dataset.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DuplicateResult, EmptyTruth
from .recognize import EXIT_OK, OcrResult


def normalize_text(s: str, case_insensitive: bool = False) -> str:
    """Trim, collapse whitespace runs to single spaces, optionally casefold."""
    out = " ".join(s.split())
    return out.lower() if case_insensitive else out


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance over Unicode scalar values, unit costs."""
    ca = np.array([ord(ch) for ch in a], dtype=np.int32)
    cb = np.array([ord(ch) for ch in b], dtype=np.int32)
    return int(_kernels.levenshtein(ca, cb))


def normalized_distance(truth: str, hyp: str, case_insensitive: bool = False) -> float:
    """edit_distance(truth', hyp') / len(truth') on normalized strings."""
    t = normalize_text(truth, case_insensitive)
    h = normalize_text(hyp, case_insensitive)
    if not t:
        raise EmptyTruth(f"ground truth {truth!r} normalizes to empty")
    return edit_distance(t, h) / len(t)


@dataclass(frozen=True)
class WordOutcome:
    image_id: str
    truth: str
    hypothesis: str
    correct: bool
    norm_edit_distance: float

    def to_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "truth": self.truth,
            "hypothesis": self.hypothesis,
            "correct": self.correct,
            "norm_edit_distance": self.norm_edit_distance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WordOutcome":
        return cls(
            image_id=d["image_id"],
            truth=d["truth"],
            hypothesis=d["hypothesis"],
            correct=bool(d["correct"]),
            norm_edit_distance=float(d["norm_edit_distance"]),
        )


@dataclass(frozen=True)
class EvalReport:
    dataset_name: str
    n_images: int
    word_recognition_rate: float  # percentage
    total_edit_distance: float
    rows: tuple[WordOutcome, ...]

    def to_dict(self) -> dict:
        return {
            "dataset_name": self.dataset_name,
            "n_images": self.n_images,
            "word_recognition_rate": self.word_recognition_rate,
            "total_edit_distance": self.total_edit_distance,
            "rows": [r.to_dict() for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        return cls(
            dataset_name=d["dataset_name"],
            n_images=int(d["n_images"]),
            word_recognition_rate=float(d["word_recognition_rate"]),
            total_edit_distance=float(d["total_edit_distance"]),
            rows=tuple(WordOutcome.from_dict(r) for r in d["rows"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls.from_dict(json.loads(text))


def score_dataset(manifest, results: list[OcrResult], case_insensitive: bool = False) -> EvalReport:
    """Score one result per manifest entry, rows in manifest order.

    Entries without a result, and results flagged engine_error/timeout,
    score against the empty hypothesis so rates always cover the full set.
    """
    by_id: dict[str, OcrResult] = {}
    for res in results:
        if res.image_id in by_id:
            raise DuplicateResult(f"two results for image {res.image_id!r}")
        by_id[res.image_id] = res

    rows = []
    for entry in manifest.entries:
        res = by_id.get(entry.image_id)
        hyp = res.text if res is not None and res.exit_status == EXIT_OK else ""
        t = normalize_text(entry.ground_truth, case_insensitive)
        h = normalize_text(hyp, case_insensitive)
        rows.append(
            WordOutcome(
                image_id=entry.image_id,
                truth=entry.ground_truth,
                hypothesis=hyp,
                correct=t == h,
                norm_edit_distance=normalized_distance(entry.ground_truth, hyp, case_insensitive),
            )
        )
    n = len(rows)
    correct = sum(1 for r in rows if r.correct)
    return EvalReport(
        dataset_name=manifest.name,
        n_images=n,
        word_recognition_rate=100.0 * correct / n if n else 0.0,
        total_edit_distance=math.fsum(r.norm_edit_distance for r in rows),
        rows=tuple(rows),
    )


def render_table(reports: list[EvalReport], fmt: str = "text") -> str:
    """Dataset-level table, one row per report.

    "text": aligned columns Algorithm / Edit distance measure / Word
    recognition rate, one decimal. "csv": machine-readable summary with
    full-precision values (header dataset,n,wrr,total_edit_distance).
    """
    if not reports:
        raise ValueError("need at least one report to render")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dataset", "n", "wrr", "total_edit_distance"])
        for rep in reports:
            writer.writerow(
                [rep.dataset_name, rep.n_images, repr(rep.word_recognition_rate), repr(rep.total_edit_distance)]
            )
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown table format {fmt!r}")
    headers = ("Algorithm", "Edit distance measure", "Word recognition rate")
    body = [
        (rep.dataset_name, f"{rep.total_edit_distance:.1f}", f"{rep.word_recognition_rate:.1f}")
        for rep in reports
    ]
    widths = [max(len(h), *(len(row[i]) for row in body)) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    lines.append("  ".join("-" * w for w in widths))
    for row in body:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines) + "\n"


def render_rows_csv(report: EvalReport) -> str:
    """Per-image rows as CSV (second file of the report output)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["image_id", "truth", "hypothesis", "correct", "norm_edit_distance"])
    for r in report.rows:
        writer.writerow([r.image_id, r.truth, r.hypothesis, int(r.correct), repr(r.norm_edit_distance)])
    return buf.getvalue()
