"""Acceptance suite: one test per criterion, each printing a PASS line."""

import itertools
import math
import random
import time

import numpy as np
from scipy.stats import qmc

from disgo.assignment import linear_sum_assign
from disgo.blocks import BlockAnnotation, best_gt, eq_classes, exhaustive_best_gt, num_allowed_definitions
from disgo.evaluate import EvalConfig, evaluate_corpus
from disgo.fixtures import PerturbSpec, perturb
from disgo.geometry import WordBox, box_vertices, iou
from disgo.io_formats import (
    GtAnnotation,
    GtImage,
    GtWord,
    parse_ground_truth,
    parse_predictions,
)
from disgo.metrics import ErrorCounts, wer_dis, wer_e2e, wer_go, wer_recognition
from disgo.alignment import build_location_map
from disgo.blocks import go_errors, leaders, filter_block

from conftest import caution_image, caution_prediction, scene7_image, scene7_prediction, grid_box, gt_json
from test_assignment import brute_force


def test_criterion_1_corpus_bleu():
    start = time.perf_counter()
    gt = parse_ground_truth(gt_json([caution_image(), scene7_image()]))
    pred = parse_predictions(gt_json([caution_prediction(), scene7_prediction()]))
    report = evaluate_corpus(gt, pred, EvalConfig(mode="bleu"))
    elapsed = time.perf_counter() - start
    assert report.bleu["hits"] == [7, 2, 0, 0]
    assert report.bleu["totals"] == [10, 6, 3, 0]
    assert report.bleu["c"] == 10
    assert report.bleu["r"] == 8
    assert abs(report.bleu["score"] - 33.88) < 0.01
    assert elapsed < 1.0
    print(f"\nPASS criterion 1: corpus BLEU {report.bleu['score']:.2f} "
          f"(hits {report.bleu['hits']}, totals {report.bleu['totals']}, "
          f"c={report.bleu['c']}, r={report.bleu['r']}) in {elapsed:.3f}s")


def test_criterion_2_scene7_golden(scene7):
    gt_words, pred_words, annotation, _ = scene7
    lm = build_location_map(gt_words, pred_words)
    codes = {loc: code for loc, code in enumerate(lm.error_codes) if loc > 0}
    assert codes[3] == "D" and codes[5] == "D"
    assert codes[8] == "I" and codes[9] == "I"
    assert lm.g_locations[3] == -3 and lm.g_locations[5] == -5

    gt_blocks = [(1, 2, -3, 4, -5), (6, 7)]
    pred_blocks = [(1, 2, 4, 7), (6,), (-8, -9)]
    assert leaders([filter_block(b) for b in gt_blocks]) == \
        {1: 0, 2: 1, 4: 2, 6: 0, 7: 6}
    assert leaders([filter_block(b) for b in pred_blocks]) == \
        {1: 0, 2: 1, 4: 2, 7: 4, 6: 0}
    go = go_errors(gt_blocks, pred_blocks, lm)
    assert go == {7}

    counts = ErrorCounts(C=5, D=2, I=2, S=0, GO=1)
    assert abs(wer_e2e(counts) - 5 / 7) < 1e-9
    print("\nPASS criterion 2: seven-word scene golden (D@{3,5}, I@{8,9}, GO={7}, "
          "WER(e2e)=5/7)")


def test_criterion_3_equivalence_classes():
    a = BlockAnnotation(1, [(1,), (2, 3), (4, 5)])
    b = BlockAnnotation(2, [(1, 2, 3), (5, 4)])
    classes = eq_classes([a, b])
    assert [set(c.location_set) for c in classes] == [{1, 2, 3}, {4, 5}]
    assert [c.num_alternatives for c in classes] == [2, 2]
    assert num_allowed_definitions(classes) == 4

    # per-class minimization equals exhaustive enumeration over all 4 combos
    from conftest import gt_words
    words = gt_words(5)
    lm = build_location_map(words, words)
    rng = random.Random(0)
    for _ in range(20):
        locs = [1, 2, 3, 4, 5]
        rng.shuffle(locs)
        cut = rng.randint(1, 4)
        pred = [tuple(locs[:cut]), tuple(locs[cut:])]
        fast = best_gt([a, b], pred, lm)
        slow = exhaustive_best_gt([a, b], pred, lm)
        assert len(fast.go_set) == len(slow)
    print("\nPASS criterion 3: equivalence classes (EQ {{1,2,3},{4,5}}, E=[2,2], "
          "K'=4, per-class == exhaustive)")


def test_criterion_4_wer_arithmetic():
    counts = ErrorCounts(C=2390, D=1921, I=94, S=627, GO=533, GS=157)
    assert counts.G == 4938
    dis = 100 * wer_dis(counts)
    go = 100 * wer_go(counts)
    e2e = 100 * wer_e2e(counts)
    assert abs(dis - 53.5) < 0.05
    assert abs(go - 22.9) < 0.05
    assert abs(e2e - 64.30) < 0.05
    print(f"\nPASS criterion 4: large-corpus WER arithmetic (DIS {dis:.2f}%, "
          f"GO {go:.2f}%, e2e {e2e:.2f}%)")


def test_criterion_5_recognition_arithmetic():
    counts = ErrorCounts(C=4938 - 1410 - 34, S=1410, D=34)
    rate = 100 * wer_recognition(counts)
    assert abs(rate - 29.2) < 0.05
    print(f"\nPASS criterion 5: large-corpus recognition WER {rate:.2f}%")


def test_criterion_6_assignment_oracle():
    start = time.perf_counter()
    rng = random.Random(2024)
    for _ in range(1000):
        n_rows = rng.randint(1, 6)
        n_cols = rng.randint(1, 6)
        m = [[rng.random() for _ in range(n_cols)] for _ in range(n_rows)]
        result = linear_sum_assign(m)
        value, _ = brute_force(m)
        assert abs(result.objective - value) < 1e-9
    for _ in range(100):
        n_rows = rng.randint(1, 4)
        n_cols = rng.randint(1, 4)
        m = [[rng.choice([0.0, 0.5, 1.0]) for _ in range(n_cols)]
             for _ in range(n_rows)]
        result = linear_sum_assign(m)
        value, pairs = brute_force(m)
        assert abs(result.objective - value) < 1e-9
        assert result.pairs == pairs
        assert linear_sum_assign(m) == result  # rerun: identical
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    print(f"\nPASS criterion 6: 1000 random + 100 tie-engineered matrices "
          f"match brute force in {elapsed:.2f}s")


def test_criterion_7_iou_monte_carlo_oracle():
    sampler = qmc.Sobol(d=2, seed=7)
    points = sampler.random_base2(m=20)  # 2^20 ~ 1.05M low-discrepancy samples
    rng = random.Random(314)
    worst = 0.0
    for _ in range(200):
        a = _random_box(rng, 0.0, 0.0)
        b = _random_box(rng, rng.uniform(-2, 2), rng.uniform(-2, 2))
        expected = _mc_iou(a, b, points)
        got = iou(a, b)
        worst = max(worst, abs(got - expected))
        assert abs(got - expected) < 1e-3
    print(f"\nPASS criterion 7: 200 rotated pairs within 1e-3 of the "
          f"2^20-sample estimate (worst {worst:.2e})")


def test_criterion_8_identity_property():
    gt_images = [_synthetic_image(f"img{k:02d}", n_words=6, seed=k)
                 for k in range(50)]
    preds = []
    for img in gt_images:
        pred, warnings = perturb(img, PerturbSpec(seed=1))
        assert not warnings
        # single reference per block doubles as the MT output
        pred.mt = [refs[0] for refs in img.annotations[0].translations]
        preds.append(pred)

    report = evaluate_corpus(gt_images, preds, EvalConfig(mode="bleu"))
    for name, value in report.corpus_wers().items():
        assert value == 0.0, f"{name} nonzero on identity prediction"
    assert abs(report.bleu["score"] - 100.0) < 1e-9
    print("\nPASS criterion 8: 50 identity images score 0 on every WER "
          "and BLEU 100")


def test_criterion_9_monotonicity():
    images = [_synthetic_image(f"mono{k}", n_words=100, seed=100 + k)
              for k in range(5)]

    def corpus_count(spec_for, field):
        total = 0
        for img in images:
            pred, _ = perturb(img, spec_for(img))
            report = evaluate_corpus([img], [pred], EvalConfig(mode="e2e"))
            total += getattr(report.corpus, field)
        return total

    for seed in range(5):
        for field, rate_name in (("D", "del_rate"), ("I", "ins_rate"),
                                 ("S", "sub_rate")):
            previous = -1
            for rate in (0.15, 0.45, 0.75):
                spec = PerturbSpec(seed=seed, **{rate_name: rate})
                count = corpus_count(lambda img: spec, field)
                assert count > previous, \
                    f"{field} not strictly increasing at {rate_name}={rate}"
                previous = count
    print("\nPASS criterion 9: corpus D/I/S strictly increase with their "
          "rates across 5 seeds")


def _random_box(rng: random.Random, cx: float, cy: float) -> WordBox:
    return WordBox(cx + rng.uniform(-1, 1), cy + rng.uniform(-1, 1),
                   rng.uniform(1, 6), rng.uniform(1, 6),
                   rng.uniform(-180, 180))


def _mc_iou(a: WordBox, b: WordBox, unit_points: np.ndarray) -> float:
    va, vb = np.array(box_vertices(a)), np.array(box_vertices(b))
    lo = np.maximum(va.min(axis=0), vb.min(axis=0))
    hi = np.minimum(va.max(axis=0), vb.max(axis=0))
    if np.any(hi <= lo):
        return 0.0
    pts = lo + unit_points * (hi - lo)
    region = float(np.prod(hi - lo))

    def inside(box: WordBox) -> np.ndarray:
        rad = math.radians(box.theta)
        rel = pts - [box.cx, box.cy]
        x = rel[:, 0] * math.cos(rad) + rel[:, 1] * math.sin(rad)
        y = -rel[:, 0] * math.sin(rad) + rel[:, 1] * math.cos(rad)
        return (np.abs(x) <= box.w / 2) & (np.abs(y) <= box.h / 2)

    inter = region * float(np.mean(inside(a) & inside(b)))
    return inter / (a.area + b.area - inter)


def _synthetic_image(image_id: str, n_words: int, seed: int) -> GtImage:
    rng = random.Random(seed)
    words = [GtWord(id=i, text=f"tok{i}x{rng.randint(0, 9)}",
                    box=grid_box(i, row=i % 5))
             for i in range(1, n_words + 1)]
    ids = list(range(1, n_words + 1))
    blocks = []
    while ids:
        size = rng.randint(1, min(4, len(ids)))
        blocks.append(tuple(ids[:size]))
        ids = ids[size:]
    translations = [[" ".join(f"ref{loc}" for loc in block)] for block in blocks]
    return GtImage(image_id=image_id, words=words,
                   annotations=[GtAnnotation(annotator_id=1, blocks=blocks,
                                             translations=translations)])
