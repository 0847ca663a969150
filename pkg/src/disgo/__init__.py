"""Scene-text OCR evaluation: DISGO word error rates and superblock BLEU."""

from .alignment import (
    LocationMap,
    TextCompare,
    Word,
    build_location_map,
    build_location_map_textual,
    string_iou,
)
from .assignment import AssignmentResult, linear_sum_assign
from .bleu import BleuScore, BleuStats, block_ngrams, corpus_bleu, superblock_stats, tokenize
from .blocks import (
    BestGt,
    Block,
    BlockAnnotation,
    EqClass,
    SuperBlock,
    best_gt,
    eq_classes,
    filter_block,
    go_errors,
    leaders,
    mt_superblocks,
    num_allowed_definitions,
)
from .evaluate import EvalConfig, evaluate_corpus
from .fixtures import PerturbSpec, perturb
from .geometry import WordBox, box_vertices, iou
from .io_formats import emit_report, parse_ground_truth, parse_predictions
from .metrics import (
    ErrorCounts,
    EvalReport,
    aggregate,
    count_errors,
    wer_detection,
    wer_dis,
    wer_e2e,
    wer_go,
    wer_grouping,
    wer_recognition,
)

__version__ = "0.1.0"
