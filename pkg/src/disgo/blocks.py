"""Reading-order blocks: GO errors, annotator equivalence classes, bestGT,
and superblock construction for MT scoring.

A block is an ordered tuple of signed location IDs. Grouping/ordering
correctness of a location is judged purely by its leader: the location
immediately before it in its block, or 0 at a block start.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .alignment import LocationMap

Block = tuple[int, ...]


@dataclass(frozen=True)
class BlockAnnotation:
    """One annotator's partition of GT locations into ordered blocks."""

    annotator_id: int
    blocks: list[Block]
    translations: list[list[str]] | None = None  # per block, may be None

    def __post_init__(self):
        seen = set()
        for b in self.blocks:
            for loc in b:
                key = abs(loc)
                if key in seen:
                    raise ValueError(
                        f"annotator {self.annotator_id}: location {key} in two blocks")
                seen.add(key)
        if self.translations is not None and len(self.translations) != len(self.blocks):
            raise ValueError(
                f"annotator {self.annotator_id}: translations not aligned to blocks")

    def covered(self) -> frozenset[int]:
        return frozenset(abs(loc) for b in self.blocks for loc in b)


@dataclass
class EqClass:
    class_id: int
    location_set: frozenset[int]
    per_annotator: dict[int, list[Block]]
    alternatives: list[tuple[int, tuple[Block, ...]]]  # (annotator_id, blocks)

    @property
    def num_alternatives(self) -> int:
        return len(self.alternatives)


@dataclass
class BestGt:
    blocks: list[Block]
    translations: list[list[str]]  # aligned to blocks; [] when absent
    go_set: set[int]


@dataclass
class SuperBlock:
    gt_blocks: list[Block]
    pred_blocks: list[Block]
    gt_translations: list[list[str]]  # per gt_block
    mt_outputs: list[str]  # per pred_block


def filter_block(block: Block) -> Block:
    """Drop negative locations (deletions/insertions carry no order info)."""
    return tuple(loc for loc in block if loc > 0)


def leaders(blocks: list[Block]) -> dict[int, int]:
    """Map each positive location to its within-block predecessor (0 at start).

    Blocks must already be filtered to positive locations.
    """
    out: dict[int, int] = {}
    for block in blocks:
        prev = 0
        for loc in block:
            if loc in out:
                raise ValueError(f"location {loc} appears in more than one block")
            out[loc] = prev
            prev = loc
    return out


def go_errors(gt_blocks: list[Block], pred_blocks: list[Block],
              lm: LocationMap) -> set[int]:
    """Positive locations whose GT leader differs from their predicted leader."""
    gt_lead = leaders([filter_block(b) for b in gt_blocks])
    pred_lead = leaders([filter_block(b) for b in pred_blocks])
    if set(gt_lead) != set(pred_lead):
        raise ValueError(
            f"filtered GT and prediction blocks cover different locations: "
            f"{sorted(set(gt_lead) ^ set(pred_lead))}")
    return {loc for loc, lead in gt_lead.items() if pred_lead[loc] != lead}


class _UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        root = self.parent.setdefault(x, x)
        if root != x:
            root = self.find(root)
            self.parent[x] = root
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def eq_classes(annotations: list[BlockAnnotation]) -> list[EqClass]:
    """Finest partition where co-blocked locations (any annotator) merge.

    Alternatives per class are the distinct per-annotator superblock
    definitions, first seen by lowest annotator_id.
    """
    if not annotations:
        raise ValueError("need at least one block annotation")
    coverage = annotations[0].covered()
    for ann in annotations[1:]:
        if ann.covered() != coverage:
            raise ValueError(
                f"annotator {ann.annotator_id} covers a different location set")

    uf = _UnionFind()
    for ann in annotations:
        for block in ann.blocks:
            members = [abs(loc) for loc in block]
            for loc in members[1:]:
                uf.union(members[0], loc)
    for loc in coverage:
        uf.find(loc)

    roots: dict[int, set[int]] = {}
    for loc in coverage:
        roots.setdefault(uf.find(loc), set()).add(loc)

    classes = []
    ordered = sorted(annotations, key=lambda a: a.annotator_id)
    for class_id, root in enumerate(sorted(roots)):
        members = frozenset(roots[root])
        per_annotator = {}
        alternatives: list[tuple[int, tuple[Block, ...]]] = []
        for ann in ordered:
            chosen = tuple(b for b in ann.blocks
                           if members.issuperset(abs(loc) for loc in b))
            per_annotator[ann.annotator_id] = list(chosen)
            if chosen not in (alt for _, alt in alternatives):
                alternatives.append((ann.annotator_id, chosen))
        classes.append(EqClass(class_id=class_id, location_set=members,
                               per_annotator=per_annotator,
                               alternatives=alternatives))
    return classes


def num_allowed_definitions(classes: list[EqClass]) -> int:
    """K': the product of per-class alternative counts."""
    k = 1
    for cls in classes:
        k *= cls.num_alternatives
    return k


def _negate_deleted(block: Block, lm: LocationMap) -> Block:
    return tuple(lm.g_locations[abs(loc)] for loc in block)


def best_gt(annotations: list[BlockAnnotation], pred_blocks: list[Block],
            lm: LocationMap) -> BestGt:
    """Choose, independently per EQ class, the annotator block definition
    minimizing GO errors against the prediction; equivalent to exhaustive
    search over all K' combinations because leaders never cross blocks.
    """
    classes = eq_classes(annotations)
    by_id = {a.annotator_id: a for a in annotations}
    pred_lead = leaders([filter_block(b) for b in pred_blocks])

    chosen_blocks: list[Block] = []
    chosen_refs: list[list[str]] = []
    go_set: set[int] = set()
    for cls in classes:
        best = None
        for ann_id, alt in cls.alternatives:
            signed = [_negate_deleted(b, lm) for b in alt]
            lead = leaders([filter_block(b) for b in signed])
            errors = {loc for loc, ld in lead.items()
                      if pred_lead.get(loc, ld) != ld}
            if best is None or len(errors) < len(best[2]):
                best = (ann_id, signed, errors, alt)
        ann_id, signed, errors, alt = best
        go_set |= errors
        ann = by_id[ann_id]
        for original, block in zip(alt, signed):
            chosen_blocks.append(block)
            if ann.translations is not None:
                chosen_refs.append(list(ann.translations[ann.blocks.index(original)]))
            else:
                chosen_refs.append([])
    return BestGt(blocks=chosen_blocks, translations=chosen_refs, go_set=go_set)


def exhaustive_best_gt(annotations: list[BlockAnnotation],
                       pred_blocks: list[Block], lm: LocationMap) -> set[int]:
    """Oracle: materialize all K' block definitions and take the minimum
    GO set. Exponential; for tests and small K' only.
    """
    classes = eq_classes(annotations)
    pred_lead = leaders([filter_block(b) for b in pred_blocks])
    best_set = None
    for combo in product(*(cls.alternatives for cls in classes)):
        blocks = [
            _negate_deleted(b, lm) for _, alt in combo for b in alt
        ]
        lead = leaders([filter_block(b) for b in blocks])
        errors = {loc for loc, ld in lead.items() if pred_lead.get(loc, ld) != ld}
        if best_set is None or len(errors) < len(best_set):
            best_set = errors
    return best_set


def mt_superblocks(best: BestGt, pred_blocks: list[Block], lm: LocationMap,
                   mt_outputs: list[str] | None = None) -> list[SuperBlock]:
    """EQ classes between bestGT and the prediction, over signed locations.

    A negative location rides along with the positive locations of its own
    block; an all-negative prediction block (pure insertions) or an
    all-deleted GT block each form their own class.
    """
    if mt_outputs is not None and len(mt_outputs) != len(pred_blocks):
        raise ValueError("mt outputs not aligned to prediction blocks")

    uf = _UnionFind()
    all_locs: set[int] = set()
    for block in list(best.blocks) + list(pred_blocks):
        members = [abs(loc) for loc in block]
        all_locs.update(members)
        for loc in members[1:]:
            uf.union(members[0], loc)

    roots: dict[int, set[int]] = {}
    for loc in all_locs:
        roots.setdefault(uf.find(loc), set()).add(loc)

    supers = []
    for root in sorted(roots):
        members = roots[root]
        gt_sel = [i for i, b in enumerate(best.blocks)
                  if b and members.issuperset(abs(loc) for loc in b)]
        pred_sel = [i for i, b in enumerate(pred_blocks)
                    if b and members.issuperset(abs(loc) for loc in b)]
        supers.append(SuperBlock(
            gt_blocks=[best.blocks[i] for i in gt_sel],
            pred_blocks=[pred_blocks[i] for i in pred_sel],
            gt_translations=[best.translations[i] for i in gt_sel],
            mt_outputs=[mt_outputs[i] for i in pred_sel] if mt_outputs is not None
            else ["" for _ in pred_sel],
        ))
    return supers
