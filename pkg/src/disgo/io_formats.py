"""Input bundles and report emission.

Both inputs are UTF-8 JSON documents with schema_version "1":

ground truth:
  {"schema_version": "1", "images": [
     {"image_id": "...",
      "words": [{"id": 1, "text": "...",
                 "box": {"cx":.., "cy":.., "w":.., "h":.., "theta_deg":..}}],
      "annotations": [{"annotator_id": 1,
                       "blocks": [[1, 2], [3]],
                       "translations": [["ref a", "ref b"], ["ref"]]}]}]}

predictions:
  {"schema_version": "1", "images": [
     {"image_id": "...",
      "words": [{"text": "...", "box": {...}, "gt_word_id": 3}],
      "blocks": [[1, 2], [3]],          # 1-based prediction word indices
      "mt": ["translation per block"]}]}

Validation failures raise SchemaError carrying a JSON-pointer-style path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, IO

from .geometry import WordBox
from .metrics import ErrorCounts, EvalReport

SCHEMA_VERSION = "1"

_GT_IMAGE_KEYS = {"image_id", "words", "annotations"}
_GT_WORD_KEYS = {"id", "text", "box"}
_ANNOTATION_KEYS = {"annotator_id", "blocks", "translations"}
_PRED_IMAGE_KEYS = {"image_id", "words", "blocks", "mt"}
_PRED_WORD_KEYS = {"text", "box", "gt_word_id"}
_BOX_KEYS = {"cx", "cy", "w", "h", "theta_deg"}


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class GtWord:
    id: int
    text: str
    box: WordBox | None


@dataclass
class GtAnnotation:
    annotator_id: int
    blocks: list[tuple[int, ...]]
    translations: list[list[str]] | None = None


@dataclass
class GtImage:
    image_id: str
    words: list[GtWord]
    annotations: list[GtAnnotation]


@dataclass
class PredWord:
    text: str
    box: WordBox | None = None
    gt_word_id: int | None = None


@dataclass
class PredImage:
    image_id: str
    words: list[PredWord]
    blocks: list[tuple[int, ...]] = field(default_factory=list)
    mt: list[str] | None = None


def _require(obj: Any, path: str, kind: type, what: str):
    if not isinstance(obj, kind) or (kind is int and isinstance(obj, bool)):
        raise SchemaError(path, f"expected {what}, got {type(obj).__name__}")
    return obj


def _check_keys(obj: dict, allowed: set[str], path: str, strict: bool,
                warnings: list[str]) -> None:
    extra = set(obj) - allowed
    if extra:
        msg = f"unknown fields {sorted(extra)}"
        if strict:
            raise SchemaError(path, msg)
        warnings.append(f"{path}: {msg}")


def _parse_box(obj: Any, path: str, strict: bool, warnings: list[str]) -> WordBox:
    _require(obj, path, dict, "object")
    _check_keys(obj, _BOX_KEYS, path, strict, warnings)
    for key in ("cx", "cy", "w", "h", "theta_deg"):
        if key not in obj:
            raise SchemaError(f"{path}/{key}", "missing")
        _require(obj[key], f"{path}/{key}", (int, float), "number")
    try:
        return WordBox(cx=float(obj["cx"]), cy=float(obj["cy"]),
                       w=float(obj["w"]), h=float(obj["h"]),
                       theta=float(obj["theta_deg"]))
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def _parse_document(stream: IO | str, strict: bool, warnings: list[str]) -> list:
    if hasattr(stream, "read"):
        data = stream.read()
    else:
        data = stream
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("/", f"not valid JSON: {exc}") from exc
    _require(doc, "/", dict, "object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError("/schema_version",
                          f"expected {SCHEMA_VERSION!r}, got {doc.get('schema_version')!r}")
    _check_keys(doc, {"schema_version", "images"}, "/", strict, warnings)
    return _require(doc.get("images", []), "/images", list, "array")


def _check_partition(blocks: list[tuple[int, ...]], universe: set[int],
                     path: str) -> None:
    seen: set[int] = set()
    for bi, block in enumerate(blocks):
        for loc in block:
            if loc in seen:
                raise SchemaError(f"{path}/{bi}", f"id {loc} appears twice")
            seen.add(loc)
    if seen != universe:
        missing = sorted(universe - seen)
        extra = sorted(seen - universe)
        raise SchemaError(path, f"blocks must partition ids: missing {missing}, unknown {extra}")


def parse_ground_truth(stream: IO | str, strict: bool = True,
                       warnings: list[str] | None = None) -> list[GtImage]:
    warnings = warnings if warnings is not None else []
    images = []
    for i, img in enumerate(_parse_document(stream, strict, warnings)):
        path = f"/images/{i}"
        _require(img, path, dict, "object")
        _check_keys(img, _GT_IMAGE_KEYS, path, strict, warnings)
        image_id = _require(img.get("image_id"), f"{path}/image_id", str, "string")

        words = []
        raw_words = _require(img.get("words", []), f"{path}/words", list, "array")
        for wi, word in enumerate(raw_words):
            wpath = f"{path}/words/{wi}"
            _require(word, wpath, dict, "object")
            _check_keys(word, _GT_WORD_KEYS, wpath, strict, warnings)
            wid = _require(word.get("id"), f"{wpath}/id", int, "integer")
            text = _require(word.get("text"), f"{wpath}/text", str, "string")
            if not text.strip():
                raise SchemaError(f"{wpath}/text", "GT word text must be non-empty")
            box = None
            if "box" in word and word["box"] is not None:
                box = _parse_box(word["box"], f"{wpath}/box", strict, warnings)
            words.append(GtWord(id=wid, text=text, box=box))
        ids = [w.id for w in words]
        if sorted(ids) != list(range(1, len(words) + 1)):
            raise SchemaError(f"{path}/words", f"word ids must be 1..{len(words)} with no gaps")
        universe = set(ids)

        annotations = []
        raw_anns = _require(img.get("annotations", []), f"{path}/annotations",
                            list, "array")
        for ai, ann in enumerate(raw_anns):
            apath = f"{path}/annotations/{ai}"
            _require(ann, apath, dict, "object")
            _check_keys(ann, _ANNOTATION_KEYS, apath, strict, warnings)
            ann_id = _require(ann.get("annotator_id"), f"{apath}/annotator_id",
                              int, "integer")
            blocks = []
            for bi, block in enumerate(_require(ann.get("blocks"), f"{apath}/blocks",
                                                list, "array")):
                _require(block, f"{apath}/blocks/{bi}", list, "array")
                if not block:
                    raise SchemaError(f"{apath}/blocks/{bi}", "empty block")
                blocks.append(tuple(_require(loc, f"{apath}/blocks/{bi}/{li}", int, "integer")
                                    for li, loc in enumerate(block)))
            _check_partition(blocks, universe, f"{apath}/blocks")
            translations = None
            if ann.get("translations") is not None:
                raw_tr = _require(ann["translations"], f"{apath}/translations",
                                  list, "array")
                if len(raw_tr) != len(blocks):
                    raise SchemaError(f"{apath}/translations",
                                      f"{len(raw_tr)} entries for {len(blocks)} blocks")
                translations = []
                for ti, refs in enumerate(raw_tr):
                    _require(refs, f"{apath}/translations/{ti}", list, "array")
                    translations.append([
                        _require(r, f"{apath}/translations/{ti}/{ri}", str, "string")
                        for ri, r in enumerate(refs)])
            annotations.append(GtAnnotation(annotator_id=ann_id, blocks=blocks,
                                            translations=translations))
        if len({a.annotator_id for a in annotations}) != len(annotations):
            raise SchemaError(f"{path}/annotations", "duplicate annotator_id")
        images.append(GtImage(image_id=image_id, words=words, annotations=annotations))
    _check_unique_ids(images)
    return images


def parse_predictions(stream: IO | str, strict: bool = True,
                      warnings: list[str] | None = None) -> list[PredImage]:
    warnings = warnings if warnings is not None else []
    images = []
    for i, img in enumerate(_parse_document(stream, strict, warnings)):
        path = f"/images/{i}"
        _require(img, path, dict, "object")
        _check_keys(img, _PRED_IMAGE_KEYS, path, strict, warnings)
        image_id = _require(img.get("image_id"), f"{path}/image_id", str, "string")

        words = []
        raw_words = _require(img.get("words", []), f"{path}/words", list, "array")
        for wi, word in enumerate(raw_words):
            wpath = f"{path}/words/{wi}"
            _require(word, wpath, dict, "object")
            _check_keys(word, _PRED_WORD_KEYS, wpath, strict, warnings)
            text = _require(word.get("text", ""), f"{wpath}/text", str, "string")
            box = None
            if "box" in word and word["box"] is not None:
                box = _parse_box(word["box"], f"{wpath}/box", strict, warnings)
            gt_word_id = None
            if word.get("gt_word_id") is not None:
                gt_word_id = _require(word["gt_word_id"], f"{wpath}/gt_word_id",
                                      int, "integer")
            words.append(PredWord(text=text, box=box, gt_word_id=gt_word_id))

        blocks = []
        raw_blocks = _require(img.get("blocks", []), f"{path}/blocks", list, "array")
        for bi, block in enumerate(raw_blocks):
            _require(block, f"{path}/blocks/{bi}", list, "array")
            blocks.append(tuple(_require(loc, f"{path}/blocks/{bi}/{li}", int, "integer")
                                for li, loc in enumerate(block)))
        if raw_blocks:
            _check_partition(blocks, set(range(1, len(words) + 1)), f"{path}/blocks")

        mt = None
        if img.get("mt") is not None:
            mt = [_require(t, f"{path}/mt/{ti}", str, "string")
                  for ti, t in enumerate(_require(img["mt"], f"{path}/mt", list, "array"))]
            if len(mt) != len(blocks):
                raise SchemaError(f"{path}/mt",
                                  f"{len(mt)} entries for {len(blocks)} blocks")
        images.append(PredImage(image_id=image_id, words=words, blocks=blocks, mt=mt))
    _check_unique_ids(images)
    return images


def _check_unique_ids(images: list) -> None:
    seen = set()
    for img in images:
        if img.image_id in seen:
            raise SchemaError("/images", f"duplicate image_id {img.image_id!r}")
        seen.add(img.image_id)


def _fmt_pct(rate: float | None) -> str:
    return "n/a" if rate is None else f"{100.0 * rate:.2f}%"


def report_to_dict(report: EvalReport, timestamp: str | None = None) -> dict:
    wers = report.corpus_wers()
    out = {
        "schema_version": SCHEMA_VERSION,
        "mode": report.mode,
        "config": report.config,
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(),
        "corpus": {
            "counts": _counts_dict(report.corpus),
            "wers": {k: v for k, v in wers.items() if v is not None},
        },
        "images": [
            {
                "image_id": rec.image_id,
                "counts": _counts_dict(rec.counts),
                "location_codes": {str(k): v for k, v in sorted(rec.location_codes.items())},
                "g_locations": rec.g_locations,
                "p_locations": rec.p_locations,
                "warnings": rec.warnings,
            }
            for rec in report.images
        ],
        "warnings": report.warnings,
    }
    if report.bleu is not None:
        out["bleu"] = report.bleu
    return out


def _counts_dict(c: ErrorCounts) -> dict:
    return {"C": c.C, "D": c.D, "I": c.I, "S": c.S, "GO": c.GO, "GS": c.GS,
            "G": c.G, "P": c.P}


def emit_report(report: EvalReport, format: str = "machine",
                timestamp: str | None = None) -> bytes:
    """machine: stable-key-ordered JSON; text: corpus summary block."""
    if format == "machine":
        doc = report_to_dict(report, timestamp)
        return (json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    if format == "text":
        return _emit_text(report).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


def _emit_text(report: EvalReport) -> str:
    c = report.corpus
    g = c.G
    lines = [
        f"mode = {report.mode}",
        f"G = C+S+D = {g}",
        f"P = C+S+I = {c.P}",
        f"WER(DIS) = (D+I+S)/G = {_fmt_pct(_safe(c.D + c.I + c.S, g))}",
        f"WER(GO)  = (GO+GS)/(C+S) = {_fmt_pct(_safe(c.GO + c.GS, c.C + c.S))}",
        f"WER(e2e) = (D+I+S+GO)/G = {_fmt_pct(_safe(c.D + c.I + c.S + c.GO, g))}",
        f"   C': {c.C - c.GO}/{g}={_fmt_pct(_safe(c.C - c.GO, g))}",
        f"    D: {c.D}/{g}={_fmt_pct(_safe(c.D, g))}",
        f"    I: {c.I}/{g}={_fmt_pct(_safe(c.I, g))}",
        f"    S: {c.S}/{g}={_fmt_pct(_safe(c.S, g))}",
        f"   GO: {c.GO}/{g}={_fmt_pct(_safe(c.GO, g))}",
    ]
    if report.mode == "detection":
        lines.append(f"WER(detection) = (D+I)/G = {_fmt_pct(_safe(c.D + c.I, g))}")
    if report.mode == "recognition":
        lines.append(f"WER(recognition) = (S+D)/G = {_fmt_pct(_safe(c.S + c.D, g))}")
    if report.mode == "grouping":
        lines.append(f"WER(grouping&ordering) = GO/G = {_fmt_pct(_safe(c.GO, g))}")
    if report.bleu is not None:
        lines.append(f"BLEU = {report.bleu['score']:.2f}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def _safe(numer: int, denom: int) -> float | None:
    return None if denom <= 0 else numer / denom
