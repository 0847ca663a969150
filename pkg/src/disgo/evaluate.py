"""Corpus evaluation: per-image scoring in every mode, plus aggregation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import bleu as bleu_mod
from .alignment import (
    C as CODE_C,
    D as CODE_D,
    DEFAULT_EPSILON_DETECTION,
    DEFAULT_EPSILON_E2E,
    S as CODE_S,
    LocationMap,
    TextCompare,
    Word,
    build_location_map,
    build_location_map_textual,
)
from .blocks import BestGt, Block, BlockAnnotation, best_gt, mt_superblocks
from .io_formats import GtImage, PredImage
from .metrics import ErrorCounts, EvalReport, ImageRecord, aggregate, count_errors

MODES = ("e2e", "detection", "recognition", "grouping", "bleu")


@dataclass(frozen=True)
class EvalConfig:
    mode: str = "e2e"
    epsilon: float | None = None  # per-mode default when None
    case_fold: bool = False
    normalize: bool = True
    textual_fallback: bool = False
    max_ref_combos: int = bleu_mod.DEFAULT_MAX_REF_COMBOS
    jobs: int = 1

    def resolved_epsilon(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return DEFAULT_EPSILON_DETECTION if self.mode == "detection" \
            else DEFAULT_EPSILON_E2E

    def text_compare(self) -> TextCompare:
        return TextCompare(case_fold=self.case_fold, normalize=self.normalize)

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "epsilon": self.resolved_epsilon(),
            "case_fold": self.case_fold,
            "normalize": self.normalize,
            "textual_fallback": self.textual_fallback,
            "max_ref_combos": self.max_ref_combos,
        }


@dataclass
class _ImageResult:
    record: ImageRecord
    bleu_stats: bleu_mod.BleuStats | None = None


def _gt_words(img: GtImage) -> list[Word]:
    return [Word(index=w.id, text=w.text, box=w.box) for w in img.words]


def _pred_words(img: PredImage) -> list[Word]:
    return [Word(index=i + 1, text=w.text, box=w.box)
            for i, w in enumerate(img.words)]


def _with_block_text(words: list[Word], blocks: list[tuple[int, ...]]) -> list[Word]:
    by_index = {w.index: w for w in words}
    out = {w.index: w for w in words}
    for block in blocks:
        text = " ".join(by_index[i].text for i in block if i in by_index)
        for i in block:
            if i in by_index:
                w = by_index[i]
                out[i] = Word(index=w.index, text=w.text, box=w.box, block_text=text)
    return [out[w.index] for w in words]


def _pred_location_blocks(pred: PredImage, lm: LocationMap,
                          warnings: list[str]) -> list[Block]:
    """Prediction blocks re-expressed as signed location tuples."""
    if pred.blocks:
        raw = pred.blocks
    else:
        raw = [(i,) for i in range(1, len(pred.words) + 1)]
        if pred.words:
            warnings.append(
                f"image {pred.image_id}: prediction has no blocks, "
                f"treating each word as its own block")
    return [tuple(lm.p_locations[i] for i in block) for block in raw]


def _annotations(img: GtImage) -> list[BlockAnnotation]:
    return [BlockAnnotation(annotator_id=a.annotator_id, blocks=list(a.blocks),
                            translations=a.translations)
            for a in img.annotations]


def _align(gt: GtImage, pred: PredImage, config: EvalConfig,
           compare_text: bool = True) -> LocationMap:
    gt_words = _gt_words(gt)
    pred_words = _pred_words(pred)
    if config.textual_fallback:
        gt_blocks = gt.annotations[0].blocks if gt.annotations else []
        gt_words = _with_block_text(gt_words, gt_blocks)
        pred_words = _with_block_text(pred_words, pred.blocks)
        lm = build_location_map_textual(gt_words, pred_words,
                                        epsilon=config.resolved_epsilon(),
                                        text_compare=config.text_compare())
        lm.warnings.append("textual fallback alignment is approximate")
        return lm
    return build_location_map(gt_words, pred_words,
                              epsilon=config.resolved_epsilon(),
                              text_compare=config.text_compare(),
                              compare_text=compare_text)


def _go_analysis(gt: GtImage, pred: PredImage, lm: LocationMap,
                 warnings: list[str]) -> BestGt:
    annotations = _annotations(gt)
    if not annotations:
        if gt.words:
            warnings.append(
                f"image {gt.image_id}: no block annotations, GO errors skipped")
        return BestGt(blocks=[], translations=[], go_set=set())
    pred_blocks = _pred_location_blocks(pred, lm, warnings)
    return best_gt(annotations, pred_blocks, lm)


def _record(image_id: str, lm: LocationMap, counts: ErrorCounts,
            warnings: list[str]) -> ImageRecord:
    codes = {loc: code for loc, code in enumerate(lm.error_codes) if loc > 0}
    return ImageRecord(image_id=image_id, counts=counts, location_codes=codes,
                       g_locations=lm.g_locations[1:],
                       p_locations=lm.p_locations[1:],
                       warnings=warnings + lm.warnings)


def _empty_prediction(image_id: str) -> PredImage:
    return PredImage(image_id=image_id, words=[], blocks=[])


def _evaluate_image(gt: GtImage, pred: PredImage, config: EvalConfig) -> _ImageResult:
    warnings: list[str] = []
    mode = config.mode

    if mode == "recognition":
        return _ImageResult(record=_recognition_record(gt, pred, config))

    if mode == "detection":
        lm = _align(gt, pred, config, compare_text=False)
        return _ImageResult(record=_record(gt.image_id, lm, count_errors(lm), warnings))

    lm = _align(gt, pred, config)
    best = _go_analysis(gt, pred, lm, warnings)
    for loc in best.go_set:
        lm.go_flags[loc] = True
    counts = count_errors(lm, best.go_set)

    if mode == "grouping" and counts.S + counts.D + counts.I > 0:
        warnings.append(
            f"image {gt.image_id}: grouping mode expects identical words, "
            f"found {counts.S} S / {counts.D} D / {counts.I} I")

    result = _ImageResult(record=_record(gt.image_id, lm, counts, warnings))
    if mode == "bleu":
        if pred.mt is None and pred.blocks:
            raise ValueError(
                f"image {gt.image_id}: bleu mode needs mt output per prediction block")
        pred_blocks = [tuple(lm.p_locations[i] for i in block)
                       for block in pred.blocks]
        supers = mt_superblocks(best, pred_blocks, lm, mt_outputs=pred.mt or [])
        stats = bleu_mod.BleuStats()
        for sb in supers:
            stats = stats + bleu_mod.superblock_stats(
                sb, max_ref_combos=config.max_ref_combos)
        result.bleu_stats = stats
    return result


def _recognition_record(gt: GtImage, pred: PredImage,
                        config: EvalConfig) -> ImageRecord:
    """1:1 pairing by GT word id; empty or missing outputs are deletions."""
    compare = config.text_compare()
    by_gt_id: dict[int, str] = {}
    for i, w in enumerate(pred.words):
        if w.gt_word_id is None:
            raise ValueError(
                f"image {pred.image_id}: recognition mode requires gt_word_id "
                f"on every predicted word (word {i + 1})")
        if w.gt_word_id in by_gt_id:
            raise ValueError(
                f"image {pred.image_id}: duplicate gt_word_id {w.gt_word_id}")
        by_gt_id[w.gt_word_id] = w.text
    valid_ids = {w.id for w in gt.words}
    unknown = sorted(set(by_gt_id) - valid_ids)
    if unknown:
        raise ValueError(f"image {pred.image_id}: unknown gt_word_id {unknown}")

    codes: dict[int, str] = {}
    for w in gt.words:
        out = by_gt_id.get(w.id)
        if out is None or compare.key(out) == "":
            codes[w.id] = CODE_D
        elif compare.key(out) == compare.key(w.text):
            codes[w.id] = CODE_C
        else:
            codes[w.id] = CODE_S
    tally = {CODE_C: 0, CODE_S: 0, CODE_D: 0}
    for code in codes.values():
        tally[code] += 1
    counts = ErrorCounts(C=tally[CODE_C], S=tally[CODE_S], D=tally[CODE_D])
    g_locs = [w.id if codes[w.id] != CODE_D else -w.id for w in gt.words]
    return ImageRecord(image_id=gt.image_id, counts=counts,
                       location_codes=codes, g_locations=g_locs,
                       p_locations=[], warnings=[])


def evaluate_corpus(gt_images: list[GtImage], pred_images: list[PredImage],
                    config: EvalConfig) -> EvalReport:
    """Score every image and micro-average; images run in parallel when
    jobs > 1 and the report is identical regardless of worker count."""
    if config.mode not in MODES:
        raise ValueError(f"unknown mode {config.mode!r}")

    preds = {img.image_id: img for img in pred_images}
    corpus_warnings: list[str] = []
    tasks: list[tuple[GtImage, PredImage]] = []
    for gt in sorted(gt_images, key=lambda im: im.image_id):
        pred = preds.pop(gt.image_id, None)
        if pred is None:
            corpus_warnings.append(
                f"image {gt.image_id}: no prediction, scoring all deletions")
            pred = _empty_prediction(gt.image_id)
        tasks.append((gt, pred))
    for leftover in sorted(preds):
        corpus_warnings.append(
            f"image {leftover}: prediction has no ground truth, "
            f"scoring all insertions")
        tasks.append((GtImage(image_id=leftover, words=[], annotations=[]),
                      preds[leftover]))
    tasks.sort(key=lambda pair: pair[0].image_id)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(
                lambda pair: _evaluate_image(pair[0], pair[1], config), tasks))
    else:
        results = [_evaluate_image(gt, pred, config) for gt, pred in tasks]

    records = [r.record for r in results]
    corpus = aggregate([r.counts for r in records])
    report = EvalReport(mode=config.mode, images=records, corpus=corpus,
                        config=config.as_dict(), warnings=corpus_warnings)

    if config.mode == "bleu":
        stats = bleu_mod.BleuStats()
        for r in results:
            if r.bleu_stats is not None:
                stats = stats + r.bleu_stats
        score = bleu_mod.corpus_bleu(stats)
        report.bleu = {
            "score": score.score,
            "bp": score.bp,
            "precisions": list(score.precisions),
            "effective_order": score.effective_order,
            "hits": stats.hits,
            "totals": stats.totals,
            "c": stats.c,
            "r": stats.r,
        }
        report.warnings.extend(stats.warnings)
    return report
