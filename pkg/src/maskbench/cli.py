"""maskbench command line: batch candidates, padding, evaluation, service."""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

import click
import numpy as np
from PIL import Image

from .bank import BANK_SIZE, POLARITIES, build_bank
from .errors import MaskbenchError
from .evaluation import EvalReport, render_rows_csv, render_table, score_dataset
from .maskops import load_mask
from .raster import WordImage
from .recognize import AdapterConfig, OcrResult, pad, recognize_many, render_for_ocr
from .service import ServiceConfig, serve
from .store import load_manifest


@click.group()
def main():
    """Pixel-level word segmentation, annotation and recognition scoring."""


def _candidate_png(path: Path, bits: np.ndarray):
    Image.fromarray((bits * 255).astype(np.uint8), mode="L").save(path, format="PNG")


@main.command()
@click.argument("manifest_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False, path_type=Path))
@click.option("--polarity", type=click.Choice(POLARITIES), default="normal")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--keep-going", is_flag=True, help="Continue past unreadable images.")
def candidates(manifest_path: Path, out_dir: Path, polarity: str, seed: int, keep_going: bool):
    """Write the 16 candidate masks and a bank descriptor per image."""
    manifest = load_manifest(manifest_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for entry in manifest.entries:
        try:
            img = WordImage.from_file(entry.image_path, image_id=entry.image_id)
        except (OSError, ValueError) as exc:
            failures += 1
            msg = f"{entry.image_id}: unreadable image ({exc})"
            if not keep_going:
                raise click.ClickException(msg)
            click.echo(msg, err=True)
            continue
        bank = build_bank(img, polarity, seed)
        for k in range(1, BANK_SIZE + 1):
            _candidate_png(out_dir / f"{entry.image_id}.cand{k:02d}.png", bank.candidate(k).bits)
        descriptor = {
            "image_id": entry.image_id,
            "polarity": bank.polarity,
            "seed": seed,
            "methods": list(bank.methods),
            "degenerate": list(bank.degenerate),
        }
        (out_dir / f"{entry.image_id}.bank.json").write_text(
            json.dumps(descriptor, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        flagged = sum(bank.degenerate)
        click.echo(f"{entry.image_id}: {BANK_SIZE} candidates ({flagged} degenerate)")
    if failures:
        click.echo(f"{failures} image(s) skipped as unreadable", err=True)


@main.command("pad")
@click.argument("mask_files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False, path_type=Path))
def pad_cmd(mask_files: tuple[Path, ...], out_dir: Path):
    """Pad saved masks with background margins and render them for OCR."""
    out_dir.mkdir(parents=True, exist_ok=True)
    for mask_file in mask_files:
        seg = load_mask(mask_file)
        stem = mask_file.name
        if stem.endswith(".mask.png"):
            stem = stem[: -len(".mask.png")]
        else:
            stem = mask_file.stem
        out_path = out_dir / f"{stem}.ocr.png"
        render_for_ocr(pad(seg.binary()), out_path)
        click.echo(f"{mask_file} -> {out_path}")


@main.command()
@click.argument("manifest_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--masks", "masks_dir", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--adapter", required=True, help="Recognizer command template with {input}.")
@click.option("--timeout", type=float, default=30.0, show_default=True)
@click.option("--engine-tag", default="external", show_default=True)
@click.option("--out", "out_base", required=True, type=click.Path(path_type=Path))
@click.option("--lenient", is_flag=True, help="Score missing masks as empty hypotheses.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--case-insensitive", is_flag=True)
@click.option("--work-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Where rendered OCR inputs go (default: temp dir).")
def evaluate(
    manifest_path: Path,
    masks_dir: Path,
    adapter: str,
    timeout: float,
    engine_tag: str,
    out_base: Path,
    lenient: bool,
    jobs: int,
    case_insensitive: bool,
    work_dir: Path | None,
):
    """Pad, render, recognize and score every manifest entry."""
    manifest = load_manifest(manifest_path)
    if not manifest.entries:
        raise click.UsageError("manifest has no entries")

    missing = [e.image_id for e in manifest.entries if not (masks_dir / f"{e.image_id}.mask.png").is_file()]
    if missing and not lenient:
        raise click.ClickException(
            f"{len(missing)} mask(s) missing (e.g. {missing[0]!r}); rerun with --lenient to score them as empty"
        )
    for image_id in missing:
        click.echo(f"{image_id}: no mask, scoring empty hypothesis", err=True)

    config = AdapterConfig(command=adapter, timeout=timeout, engine_tag=engine_tag)
    with tempfile.TemporaryDirectory(prefix="maskbench-ocr-") as tmp:
        render_dir = work_dir if work_dir is not None else Path(tmp)
        render_dir.mkdir(parents=True, exist_ok=True)
        todo = []
        for entry in manifest.entries:
            if entry.image_id in missing:
                continue
            seg = load_mask(masks_dir / f"{entry.image_id}.mask.png")
            out_png = render_dir / f"{entry.image_id}.ocr.png"
            render_for_ocr(pad(seg.binary()), out_png)
            todo.append((entry.image_id, out_png))
        results = recognize_many(todo, config, workers=jobs)

    report = score_dataset(manifest, results, case_insensitive=case_insensitive)
    _write_report_artifacts(report, out_base)
    click.echo(render_table([report], "text"), nl=False)


def _report_base(out_base: Path) -> Path:
    if out_base.suffix == ".json":
        return out_base.with_suffix("")
    return out_base


def _write_report_artifacts(report: EvalReport, out_base: Path):
    base = _report_base(out_base)
    base.parent.mkdir(parents=True, exist_ok=True)
    base.with_suffix(".json").write_text(report.to_json(), encoding="utf-8")
    base.with_suffix(".csv").write_text(render_table([report], "csv"), encoding="utf-8")
    Path(str(base) + ".rows.csv").write_text(render_rows_csv(report), encoding="utf-8")
    base.with_suffix(".txt").write_text(render_table([report], "text"), encoding="utf-8")


@main.command()
@click.argument("report_files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--format", "fmt", type=click.Choice(["text", "csv"]), default="text", show_default=True)
def report(report_files: tuple[Path, ...], fmt: str):
    """Render one combined table from saved report JSON artifacts."""
    reports = [EvalReport.from_json(p.read_text(encoding="utf-8")) for p in report_files]
    click.echo(render_table(reports, fmt), nl=False)


@main.command("serve")
@click.option("--root", "dataset_root", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--manifest-name", default="manifest.tsv", show_default=True)
@click.option("--listen", default="127.0.0.1:8765", show_default=True, help="host:port")
@click.option("--read-only", is_flag=True)
@click.option("--allow-remote", is_flag=True, help="Permit non-loopback binds.")
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False, path_type=Path), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
def serve_cmd(dataset_root, manifest_name, listen, read_only, allow_remote, ui_dir, seed):
    """Run the annotation HTTP service for a dataset."""
    host, _, port_str = listen.rpartition(":")
    if not host or not port_str.isdigit():
        raise click.UsageError(f"--listen must look like host:port, got {listen!r}")
    config = ServiceConfig(
        dataset_root=dataset_root,
        manifest_name=manifest_name,
        host=host,
        port=int(port_str),
        read_only=read_only,
        allow_remote=allow_remote,
        ui_dir=ui_dir,
        seed=seed,
    )
    try:
        serve(config)
    except MaskbenchError as exc:
        raise click.ClickException(str(exc))
    except OSError as exc:
        raise click.ClickException(f"cannot bind {listen}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
