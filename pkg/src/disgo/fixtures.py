"""Deterministic synthetic corruption of a ground-truth image.

perturb() starts from the identity prediction and applies controlled
deletions, substitutions, insertions (non-overlapping decoy boxes), and
block shuffles/splits. Every draw comes from streams derived from the
seed, laid out so that raising one rate can only grow the matching error
count: per-word uniforms are drawn up front, and decoys are placed
sequentially from their own stream.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .geometry import WordBox, iou
from .io_formats import GtImage, PredImage, PredWord

DECOY_TEXT = "@@ins@@"  # never collides with a real GT spelling
_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789"
_MAX_PLACEMENT_ATTEMPTS = 1000


@dataclass(frozen=True)
class PerturbSpec:
    del_rate: float = 0.0
    ins_rate: float = 0.0
    sub_rate: float = 0.0
    shuffle_blocks: bool = False
    split_blocks: bool = False
    seed: int = 0

    def __post_init__(self):
        for name in ("del_rate", "ins_rate", "sub_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {rate}")


def _stream(spec: PerturbSpec, purpose: str) -> random.Random:
    return random.Random(f"{spec.seed}:{purpose}")


def _corrupt(text: str, pos_frac: float, char_frac: float) -> str:
    """Flip one character to a different one; guarantees an S, not a C."""
    pos = min(int(pos_frac * len(text)), len(text) - 1)
    original = text[pos]
    choices = [c for c in _ALPHABET if c != original.lower()]
    replacement = choices[min(int(char_frac * len(choices)), len(choices) - 1)]
    return text[:pos] + replacement + text[pos + 1:]


def perturb(gt_image: GtImage, spec: PerturbSpec) -> tuple[PredImage, list[str]]:
    """Controlled prediction for one GT image, plus any placement warnings."""
    words = gt_image.words
    for w in words:
        if w.box is None:
            raise ValueError(f"image {gt_image.image_id}: perturb needs word boxes")
    n = len(words)
    warnings: list[str] = []

    del_rng = _stream(spec, "del")
    del_draws = [del_rng.random() for _ in range(n)]
    sub_rng = _stream(spec, "sub")
    sub_draws = [(sub_rng.random(), sub_rng.random(), sub_rng.random())
                 for _ in range(n)]

    survivors: dict[int, PredWord] = {}
    for i, word in enumerate(words):
        if del_draws[i] < spec.del_rate:
            continue
        u, pos_frac, char_frac = sub_draws[i]
        text = word.text
        if u < spec.sub_rate:
            text = _corrupt(text, pos_frac, char_frac)
        survivors[word.id] = PredWord(text=text, box=word.box)

    # prediction word order: surviving GT ids ascending, decoys appended
    order = sorted(survivors)
    pred_index = {wid: k + 1 for k, wid in enumerate(order)}
    pred_words = [survivors[wid] for wid in order]

    blocks: list[tuple[int, ...]] = []
    source = gt_image.annotations[0].blocks if gt_image.annotations else \
        [tuple(w.id for w in words)] if words else []
    shuffle_rng = _stream(spec, "shuffle")
    for block in source:
        kept = [pred_index[wid] for wid in block if wid in pred_index]
        if not kept:
            continue
        if spec.shuffle_blocks:
            shuffle_rng.shuffle(kept)
        if spec.split_blocks and len(kept) > 1:
            half = len(kept) // 2
            blocks.append(tuple(kept[:half]))
            blocks.append(tuple(kept[half:]))
        else:
            blocks.append(tuple(kept))

    n_ins = math.ceil(spec.ins_rate * n)
    decoys = _place_decoys(words, n_ins, _stream(spec, "ins"))
    if len(decoys) < n_ins:
        warnings.append(
            f"image {gt_image.image_id}: placed {len(decoys)}/{n_ins} decoy boxes")
    for box in decoys:
        pred_words.append(PredWord(text=DECOY_TEXT, box=box))
        blocks.append((len(pred_words),))

    return PredImage(image_id=gt_image.image_id, words=pred_words,
                     blocks=blocks), warnings


def _place_decoys(words, n_ins: int, rng: random.Random) -> list[WordBox]:
    if n_ins == 0:
        return []
    if not words:
        return [WordBox(cx=100.0 * (k + 1), cy=0.0, w=40.0, h=16.0)
                for k in range(n_ins)]
    xs = [w.box.cx for w in words]
    ys = [w.box.cy for w in words]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 100.0)
    x0, x1 = min(xs) - span, max(xs) + span
    y0, y1 = min(ys) - span, max(ys) + span
    mean_w = sum(w.box.w for w in words) / len(words)
    mean_h = sum(w.box.h for w in words) / len(words)

    placed: list[WordBox] = []
    for _ in range(n_ins):
        for _attempt in range(_MAX_PLACEMENT_ATTEMPTS):
            box = WordBox(cx=rng.uniform(x0, x1), cy=rng.uniform(y0, y1),
                          w=mean_w, h=mean_h)
            others = [w.box for w in words] + placed
            if all(iou(box, other) < 1e-5 for other in others):
                placed.append(box)
                break
        else:
            return placed
    return placed
