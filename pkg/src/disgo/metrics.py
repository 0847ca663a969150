"""Error tallies and the WER family derived from them.

C stores the pre-GO correct count; GO is the subset of those converted by
grouping/ordering analysis, GS the converted subset of the substitutions.
Corpus rates are micro-averages: sum counts first, divide once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .alignment import C as CODE_C, D as CODE_D, I as CODE_I, S as CODE_S, LocationMap


@dataclass(frozen=True)
class ErrorCounts:
    C: int = 0
    D: int = 0
    I: int = 0
    S: int = 0
    GO: int = 0
    GS: int = 0

    def __post_init__(self):
        for name in ("C", "D", "I", "S", "GO", "GS"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.GO > self.C:
            raise ValueError("GO counts converted C locations, so GO <= C")
        if self.GS > self.S:
            raise ValueError("GS counts converted S locations, so GS <= S")

    @property
    def G(self) -> int:
        return self.C + self.S + self.D

    @property
    def P(self) -> int:
        return self.C + self.S + self.I

    def __add__(self, other: "ErrorCounts") -> "ErrorCounts":
        return ErrorCounts(C=self.C + other.C, D=self.D + other.D,
                           I=self.I + other.I, S=self.S + other.S,
                           GO=self.GO + other.GO, GS=self.GS + other.GS)


def count_errors(lm: LocationMap, go_set: set[int] | None = None) -> ErrorCounts:
    """Tally base codes; split the GO set by the base code underneath."""
    go_set = go_set or set()
    base = lm.counts()
    for loc in go_set:
        if loc <= 0 or loc >= len(lm.error_codes):
            raise ValueError(f"GO location {loc} outside the map")
    go = sum(1 for loc in go_set if lm.error_codes[loc] == CODE_C)
    gs = sum(1 for loc in go_set if lm.error_codes[loc] == CODE_S)
    return ErrorCounts(C=base[CODE_C], D=base[CODE_D], I=base[CODE_I],
                       S=base[CODE_S], GO=go, GS=gs)


def _rate(numer: int, denom: int) -> float | None:
    """None marks an undefined rate (zero denominator)."""
    if denom <= 0:
        return None
    return numer / denom


def wer_e2e(c: ErrorCounts) -> float | None:
    """DISGO: (D+I+S+GO)/G. May exceed 1."""
    return _rate(c.D + c.I + c.S + c.GO, c.G)


def wer_dis(c: ErrorCounts) -> float | None:
    return _rate(c.D + c.I + c.S, c.G)


def wer_go(c: ErrorCounts) -> float | None:
    """Frequency of grouping/ordering mistakes among matched locations."""
    return _rate(c.GO + c.GS, c.C + c.S)


def wer_detection(c: ErrorCounts) -> float | None:
    return _rate(c.D + c.I, c.G)


def wer_recognition(c: ErrorCounts) -> float | None:
    return _rate(c.S + c.D, c.G)


def wer_grouping(c: ErrorCounts) -> float | None:
    return _rate(c.GO, c.G)


def aggregate(per_image: list[ErrorCounts]) -> ErrorCounts:
    total = ErrorCounts()
    for counts in per_image:
        total = total + counts
    return total


@dataclass
class ImageRecord:
    image_id: str
    counts: ErrorCounts
    location_codes: dict[int, str] = field(default_factory=dict)
    g_locations: list[int] = field(default_factory=list)
    p_locations: list[int] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class EvalReport:
    mode: str
    images: list[ImageRecord]
    corpus: ErrorCounts
    config: dict = field(default_factory=dict)
    bleu: dict | None = None
    warnings: list[str] = field(default_factory=list)

    def corpus_wers(self) -> dict[str, float | None]:
        c = self.corpus
        return {
            "wer_dis": wer_dis(c),
            "wer_go": wer_go(c),
            "wer_e2e": wer_e2e(c),
            "wer_detection": wer_detection(c),
            "wer_recognition": wer_recognition(c),
            "wer_grouping": wer_grouping(c),
        }
