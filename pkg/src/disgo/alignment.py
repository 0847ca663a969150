"""Location map construction: signed location IDs and C/S/D/I codes.

Each GT word owns location 1..|G|. Every predicted word is assigned a
location by an optimal IoU matching; predictions that match nothing get
fresh negative locations |G|+1, |G|+2, ... in prediction order. A negative
g_location marks a deletion, a negative p_location marks an insertion.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

import numpy as np

from .assignment import linear_sum_assign
from .geometry import WordBox, iou

# error codes
C = "C"
S = "S"
D = "D"
I = "I"

DEFAULT_EPSILON_E2E = 1e-5
DEFAULT_EPSILON_DETECTION = 0.5

# weight of the block-string tie-breaker in textual-fallback scoring
_TIEBREAK_DELTA = 1e-6


@dataclass(frozen=True)
class TextCompare:
    """How word spellings are compared when labeling C vs S."""

    case_fold: bool = False
    normalize: bool = True

    def key(self, text: str) -> str:
        if self.normalize:
            text = unicodedata.normalize("NFC", text)
        if self.case_fold:
            text = text.casefold()
        return text


@dataclass(frozen=True)
class Word:
    """One word on an image: 1-based index, text, optional rotated box."""

    index: int
    text: str
    box: WordBox | None = None
    block_text: str | None = None


@dataclass
class LocationMap:
    """Signed locations plus a base error code per |location|.

    Arrays are 1-indexed with a dummy slot 0. go_flags starts all false;
    grouping/ordering analysis flips flags later without touching codes.
    """

    g_locations: list[int]
    p_locations: list[int]
    error_codes: list[str | None]
    go_flags: list[bool] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.go_flags:
            self.go_flags = [False] * len(self.error_codes)

    @property
    def num_gt(self) -> int:
        return len(self.g_locations) - 1

    @property
    def num_pred(self) -> int:
        return len(self.p_locations) - 1

    def code_at(self, location: int) -> str:
        return self.error_codes[abs(location)]

    def counts(self) -> dict[str, int]:
        tally = {C: 0, S: 0, D: 0, I: 0}
        for code in self.error_codes[1:]:
            tally[code] += 1
        return tally


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over codepoints."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1,
                           cur[j - 1] + 1,
                           prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def string_iou(g_text: str, p_text: str) -> float:
    """1 - edit_distance/max_len on NFC-normalized codepoints."""
    g = unicodedata.normalize("NFC", g_text)
    p = unicodedata.normalize("NFC", p_text)
    longest = max(len(g), len(p))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(g, p) / longest


def _validate_words(words: list[Word], side: str) -> None:
    seen = set()
    for w in words:
        if w.index in seen:
            raise ValueError(f"duplicate {side} word index {w.index}")
        seen.add(w.index)
    expected = set(range(1, len(words) + 1))
    if seen != expected:
        raise ValueError(f"{side} word indices must be 1..{len(words)} with no gaps")


def _finish_map(gt: list[Word], pred: list[Word],
                matched: dict[int, tuple[int, float]],
                epsilon: float, compare: TextCompare,
                warnings: list[str] | None = None) -> LocationMap:
    """Common tail of map construction given candidate (p -> g, score) matches."""
    n_g, n_p = len(gt), len(pred)
    g_locations = [0] + list(range(1, n_g + 1))
    p_locations: list[int | None] = [None] * (n_p + 1)
    error_codes: list[str | None] = [None] * (n_g + 1)

    for p_idx, (g_idx, score) in matched.items():
        if score <= epsilon:
            continue
        p_word = pred[p_idx - 1]
        g_word = gt[g_idx - 1]
        if compare.key(p_word.text) == "":
            # blank recognition output: the GT word counts as deleted and
            # the empty prediction falls through to an insertion
            continue
        p_locations[p_idx] = g_idx
        if compare.key(g_word.text) == compare.key(p_word.text):
            error_codes[g_idx] = C
        else:
            error_codes[g_idx] = S

    for g_idx in range(1, n_g + 1):
        if error_codes[g_idx] is None:
            error_codes[g_idx] = D
            g_locations[g_idx] = -g_idx

    for p_idx in range(1, n_p + 1):
        if p_locations[p_idx] is None:
            next_loc = len(error_codes)  # starts at |G|+1
            p_locations[p_idx] = -next_loc
            error_codes.append(I)

    return LocationMap(g_locations=g_locations, p_locations=p_locations,
                       error_codes=error_codes,
                       warnings=list(warnings or []))


def build_location_map(gt: list[Word], pred: list[Word],
                       epsilon: float = DEFAULT_EPSILON_E2E,
                       text_compare: TextCompare | None = None,
                       compare_text: bool = True) -> LocationMap:
    """Optimal IoU matching of predictions onto GT locations.

    compare_text=False is detection mode: any matched pair is C, so only
    D and I remain.
    """
    compare = text_compare or TextCompare()
    _validate_words(gt, "GT")
    _validate_words(pred, "prediction")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must be in [0, 1), got {epsilon}")

    matched: dict[int, tuple[int, float]] = {}
    if gt and pred:
        mat = np.zeros((len(gt), len(pred)))
        for i, g in enumerate(gt):
            for j, p in enumerate(pred):
                if g.box is None or p.box is None:
                    raise ValueError("all words need boxes for IoU alignment")
                mat[i, j] = iou(g.box, p.box)
        result = linear_sum_assign(mat, maximize=True)
        matched = {j + 1: (i + 1, mat[i, j]) for i, j in result.pairs}

    if not compare_text:
        compare = _AlwaysEqual(compare)
    return _finish_map(gt, pred, matched, epsilon, compare)


class _AlwaysEqual(TextCompare):
    """Detection-mode comparison: every non-empty spelling matches."""

    def __init__(self, base: TextCompare):
        object.__setattr__(self, "case_fold", base.case_fold)
        object.__setattr__(self, "normalize", base.normalize)

    def key(self, text: str) -> str:
        # no recognition is run, so even empty spellings count as matches
        return "<any>"


def build_location_map_textual(gt: list[Word], pred: list[Word],
                               epsilon: float = DEFAULT_EPSILON_E2E,
                               text_compare: TextCompare | None = None) -> LocationMap:
    """Annotation-free alignment on spellings instead of boxes.

    Primary score is string IoU of the words; ties are broken by string
    IoU of the enclosing block strings, folded in as a tiny additive term
    so the assignment solver resolves them. Approximate by design.
    """
    compare = text_compare or TextCompare()
    _validate_words(gt, "GT")
    _validate_words(pred, "prediction")

    warnings: list[str] = []
    matched: dict[int, tuple[int, float]] = {}
    if gt and pred:
        primary = np.zeros((len(gt), len(pred)))
        composite = np.zeros((len(gt), len(pred)))
        missing_block = False
        for i, g in enumerate(gt):
            for j, p in enumerate(pred):
                score = string_iou(g.text, p.text)
                primary[i, j] = score
                if g.block_text is not None and p.block_text is not None:
                    tie = string_iou(g.block_text, p.block_text)
                else:
                    missing_block = True
                    tie = 0.0
                composite[i, j] = score + _TIEBREAK_DELTA * tie
        if missing_block:
            warnings.append(
                "textual fallback: block membership missing, ties broken by index order")
        result = linear_sum_assign(composite, maximize=True)
        matched = {j + 1: (i + 1, primary[i, j]) for i, j in result.pairs}

    return _finish_map(gt, pred, matched, epsilon, compare, warnings)
