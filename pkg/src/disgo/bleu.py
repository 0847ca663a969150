"""Superblock BLEU: n-gram precisions that never cross block boundaries.

Each superblock plays the role of one sentence in corpus BLEU, except that
n-grams are collected per block inside the superblock, and multiple
references per GT block expand into a cross-product of reference
combinations. Scores follow the case-insensitive convention with
effective-order weights and exp smoothing.
"""

from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from itertools import islice, product

from .blocks import SuperBlock

MAX_ORDER = 4
DEFAULT_MAX_REF_COMBOS = 256

_PUNCT_CATEGORIES = ("P", "S")  # Unicode punctuation and symbols


@dataclass
class BleuStats:
    """Addable n-gram tallies; corpus stats are field-wise sums."""

    hits: list[int] = field(default_factory=lambda: [0] * MAX_ORDER)
    totals: list[int] = field(default_factory=lambda: [0] * MAX_ORDER)
    c: int = 0
    r: int = 0
    warnings: list[str] = field(default_factory=list)

    def __add__(self, other: "BleuStats") -> "BleuStats":
        return BleuStats(
            hits=[a + b for a, b in zip(self.hits, other.hits)],
            totals=[a + b for a, b in zip(self.totals, other.totals)],
            c=self.c + other.c,
            r=self.r + other.r,
            warnings=self.warnings + other.warnings,
        )


@dataclass(frozen=True)
class BleuScore:
    score: float  # 0..100
    bp: float
    precisions: tuple[float, ...]
    effective_order: int


def tokenize(s: str, split_punctuation: bool = False) -> list[str]:
    """Case-folded, NFC-normalized whitespace tokens."""
    s = unicodedata.normalize("NFC", s).lower()
    if split_punctuation:
        out = []
        for ch in s:
            if unicodedata.category(ch)[0] in _PUNCT_CATEGORIES:
                out.append(f" {ch} ")
            else:
                out.append(ch)
        s = "".join(out)
    return s.split()


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def block_ngrams(blocks: list[list[str]], n: int) -> Counter:
    """Multiset of n-grams, collected within each block only."""
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    total: Counter = Counter()
    for tokens in blocks:
        total.update(_ngrams(tokens, n))
    return total


def superblock_stats(sb: SuperBlock,
                     max_ref_combos: int = DEFAULT_MAX_REF_COMBOS,
                     split_punctuation: bool = False) -> BleuStats:
    """Clipped n-gram hits of the superblock's MT output against the
    cross-product of its per-GT-block reference choices."""
    stats = BleuStats()

    cand_blocks = []
    for block, output in zip(sb.pred_blocks, sb.mt_outputs):
        if not output:
            raise ValueError("MT output missing for a non-empty predicted block")
        cand_blocks.append(tokenize(output, split_punctuation))
    stats.c = sum(len(b) for b in cand_blocks)

    ref_choices = []
    for refs in sb.gt_translations:
        if not refs:
            raise ValueError("GT block without any reference translation")
        ref_choices.append(refs)
    combos = list(islice(product(*ref_choices), max_ref_combos)) if ref_choices else []
    full_size = math.prod(len(r) for r in ref_choices) if ref_choices else 0
    if full_size > max_ref_combos:
        stats.warnings.append(
            f"reference cross-product truncated: {full_size} -> {max_ref_combos}")

    combo_tokens = [[tokenize(ref, split_punctuation) for ref in combo]
                    for combo in combos]

    for idx in range(MAX_ORDER):
        n = idx + 1
        cand = block_ngrams(cand_blocks, n)
        stats.totals[idx] = sum(cand.values())
        if not cand or not combo_tokens:
            continue
        hits = 0
        max_counts: Counter = Counter()
        for combo in combo_tokens:
            ref_grams = block_ngrams(combo, n)
            for gram in cand:
                if ref_grams[gram] > max_counts[gram]:
                    max_counts[gram] = ref_grams[gram]
        for gram, count in cand.items():
            hits += min(count, max_counts[gram])
        stats.hits[idx] = hits

    if combo_tokens:
        lengths = sorted(sum(len(t) for t in combo) for combo in combo_tokens)
        # best match: closest to the candidate length, ties to the shorter
        stats.r = min(lengths, key=lambda ln: (abs(ln - stats.c), ln))
    else:
        stats.r = 0  # empty GT side contributes no reference length
    return stats


def corpus_bleu(stats: list[BleuStats] | BleuStats) -> BleuScore:
    """Score from summed stats: effective order, exp smoothing, brevity."""
    if isinstance(stats, BleuStats):
        total = stats
    else:
        total = BleuStats()
        for s in stats:
            total = total + s

    if total.c == 0:
        return BleuScore(score=0.0, bp=0.0, precisions=(), effective_order=0)

    effective_order = 0
    for idx in range(MAX_ORDER):
        if total.totals[idx] > 0:
            effective_order = idx + 1
    if effective_order == 0:
        return BleuScore(score=0.0, bp=0.0, precisions=(), effective_order=0)

    precisions = []
    smooth = 1.0
    for idx in range(effective_order):
        if total.hits[idx] > 0:
            precisions.append(total.hits[idx] / total.totals[idx])
        else:
            smooth *= 2.0
            precisions.append(1.0 / (smooth * total.totals[idx]))

    bp = 1.0 if total.c > total.r else math.exp(1.0 - total.r / total.c)
    log_mean = math.fsum(math.log(p) for p in precisions) / effective_order
    return BleuScore(score=100.0 * bp * math.exp(log_mean), bp=bp,
                     precisions=tuple(precisions), effective_order=effective_order)
