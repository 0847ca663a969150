import json

import pytest

from disgo import BlockAnnotation, Word
from disgo.geometry import WordBox


def grid_box(i: int, row: int = 0) -> WordBox:
    """Well-separated boxes on a grid so self-IoU is 1 and cross-IoU is 0."""
    return WordBox(cx=100.0 * i, cy=100.0 * row, w=50.0, h=20.0)


def gt_words(n: int, prefix: str = "w") -> list[Word]:
    return [Word(index=i, text=f"{prefix}{i}", box=grid_box(i))
            for i in range(1, n + 1)]


@pytest.fixture
def scene7():
    """The hypothetical scene: 7 GT words in blocks (1 2 3 4 5)(6 7);
    predictions hit GT 1,2,4,6,7 plus two boxes overlapping nothing."""
    gt = gt_words(7)
    matched = [1, 2, 4, 6, 7]
    pred = [Word(index=k + 1, text=f"w{g}", box=grid_box(g))
            for k, g in enumerate(matched)]
    pred.append(Word(index=6, text="x8", box=grid_box(20)))
    pred.append(Word(index=7, text="x9", box=grid_box(21)))
    annotation = BlockAnnotation(annotator_id=1, blocks=[(1, 2, 3, 4, 5), (6, 7)])
    # prediction blocks by prediction word index: (w1 w2 w4 w7)(w6)(x8 x9)
    pred_index_blocks = [(1, 2, 3, 5), (4,), (6, 7)]
    return gt, pred, annotation, pred_index_blocks


def gt_json(images: list[dict]) -> str:
    return json.dumps({"schema_version": "1", "images": images})


def box_json(box: WordBox) -> dict:
    return {"cx": box.cx, "cy": box.cy, "w": box.w, "h": box.h,
            "theta_deg": box.theta}


def caution_image() -> dict:
    """Three-word Spanish sign, one annotator, blocks (1)(2 3) with one
    reference translation per block."""
    return {
        "image_id": "caution",
        "words": [
            {"id": 1, "text": "PRECAUCION", "box": box_json(grid_box(1))},
            {"id": 2, "text": "NIÑOS", "box": box_json(grid_box(2))},
            {"id": 3, "text": "JUGANDO", "box": box_json(grid_box(3))},
        ],
        "annotations": [
            {"annotator_id": 1, "blocks": [[1], [2, 3]],
             "translations": [["caution"], ["children playing"]]},
        ],
    }


def caution_prediction() -> dict:
    return {
        "image_id": "caution",
        "words": [
            {"text": "PRECAUCION", "box": box_json(grid_box(1))},
            {"text": "NIÑOS", "box": box_json(grid_box(2))},
            {"text": "JUGANDO", "box": box_json(grid_box(3))},
        ],
        "blocks": [[1, 2, 3]],
        "mt": ["caution children playing"],
    }


def scene7_image() -> dict:
    return {
        "image_id": "scene7",
        "words": [
            {"id": i, "text": f"w{i}", "box": box_json(grid_box(i))}
            for i in range(1, 8)
        ],
        "annotations": [
            {"annotator_id": 1, "blocks": [[1, 2, 3, 4, 5], [6, 7]],
             "translations": [["i love you dearly", "i am very fond of you"],
                              ["fine", "all right", "yes"]]},
        ],
    }


def scene7_prediction() -> dict:
    matched = [1, 2, 4, 6, 7]
    words = [{"text": f"w{g}", "box": box_json(grid_box(g))} for g in matched]
    words.append({"text": "x8", "box": box_json(grid_box(20))})
    words.append({"text": "x9", "box": box_json(grid_box(21))})
    return {
        "image_id": "scene7",
        "words": words,
        "blocks": [[1, 2, 3, 5], [4], [6, 7]],
        "mt": ["i love yes", "fine", "the the the"],
    }
