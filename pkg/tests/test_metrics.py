import pytest

from disgo.alignment import build_location_map
from disgo.metrics import (
    ErrorCounts,
    aggregate,
    count_errors,
    wer_detection,
    wer_dis,
    wer_e2e,
    wer_go,
    wer_grouping,
    wer_recognition,
)

from conftest import gt_words

LARGE = ErrorCounts(C=2390, D=1921, I=94, S=627, GO=533, GS=157)


class TestErrorCounts:
    def test_derived_totals(self):
        assert LARGE.G == 4938
        assert LARGE.P == 3111

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ErrorCounts(C=-1)

    def test_rejects_go_exceeding_c(self):
        with pytest.raises(ValueError):
            ErrorCounts(C=1, GO=2)

    def test_rejects_gs_exceeding_s(self):
        with pytest.raises(ValueError):
            ErrorCounts(S=0, GS=1)

    def test_addition(self):
        total = ErrorCounts(C=1, D=2) + ErrorCounts(C=3, I=4)
        assert total == ErrorCounts(C=4, D=2, I=4)


class TestCountErrors:
    def test_scene7(self, scene7):
        gt, pred, _, _ = scene7
        lm = build_location_map(gt, pred)
        counts = count_errors(lm, {7})
        assert counts == ErrorCounts(C=5, D=2, I=2, S=0, GO=1, GS=0)

    def test_identity(self):
        words = gt_words(4)
        lm = build_location_map(words, words)
        assert count_errors(lm) == ErrorCounts(C=4)

    def test_go_split_by_base_code(self):
        words = gt_words(3)
        pred = [type(w)(index=w.index, text=w.text if w.index != 2 else "oops",
                        box=w.box) for w in words]
        lm = build_location_map(words, pred)
        counts = count_errors(lm, {1, 2})  # base C at 1, base S at 2
        assert counts.GO == 1
        assert counts.GS == 1

    def test_go_location_outside_map_rejected(self):
        words = gt_words(2)
        lm = build_location_map(words, words)
        with pytest.raises(ValueError):
            count_errors(lm, {9})


class TestWerFormulas:
    def test_large_corpus_e2e(self):
        assert abs(wer_e2e(LARGE) - 0.6430) < 0.0005

    def test_large_corpus_dis(self):
        assert abs(wer_dis(LARGE) - 0.535) < 0.0005

    def test_large_corpus_go(self):
        assert abs(wer_go(LARGE) - 690 / 3017) < 1e-12
        assert abs(wer_go(LARGE) - 0.229) < 0.0005

    def test_large_corpus_recognition(self):
        counts = ErrorCounts(C=4938 - 1410 - 34, S=1410, D=34)
        assert abs(wer_recognition(counts) - 0.292) < 0.0005

    def test_identity_is_zero(self):
        counts = ErrorCounts(C=10)
        assert wer_e2e(counts) == 0.0
        assert wer_dis(counts) == 0.0
        assert wer_go(counts) == 0.0
        assert wer_grouping(counts) == 0.0

    def test_scene7_arithmetic(self):
        counts = ErrorCounts(C=5, D=2, I=2, S=0, GO=1)
        assert abs(wer_e2e(counts) - 5 / 7) < 1e-12

    def test_detection(self):
        counts = ErrorCounts(C=8, D=1, I=1)
        assert wer_detection(counts) == 2 / 9

    def test_undefined_rates(self):
        empty = ErrorCounts()
        assert wer_e2e(empty) is None
        assert wer_go(empty) is None

    def test_e2e_at_least_dis(self):
        for counts in [LARGE, ErrorCounts(C=5, D=2, I=2, GO=1),
                       ErrorCounts(C=3, S=1)]:
            assert wer_e2e(counts) >= wer_dis(counts)
        no_go = ErrorCounts(C=5, D=1)
        assert wer_e2e(no_go) == wer_dis(no_go)


class TestAggregate:
    def test_empty(self):
        assert aggregate([]) == ErrorCounts()

    def test_micro_not_macro(self):
        a = ErrorCounts(C=2, D=1)   # G=3, rate 1/3
        b = ErrorCounts(C=0, D=1)   # G=1, rate 1
        corpus = aggregate([a, b])
        assert wer_e2e(corpus) == 0.5

    def test_large_corpus_roundtrip(self):
        parts = [ErrorCounts(C=2390, D=1921), ErrorCounts(I=94, S=627, GS=157),
                 ErrorCounts(C=533, GO=533)]
        # field-wise identity regardless of how the corpus is split
        total = aggregate(parts)
        assert total.D == 1921 and total.I == 94 and total.S == 627
        assert total.GO == 533 and total.GS == 157
