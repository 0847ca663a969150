"""Optimal 1:1 bipartite assignment with deterministic tie-breaking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment as _lsa

# Two matchings whose totals differ by less than this (relative to the
# matrix scale) count as ties and are resolved lexicographically.
_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class AssignmentResult:
    pairs: list[tuple[int, int]]
    objective: float


def linear_sum_assign(cost, maximize: bool = True) -> AssignmentResult:
    """Optimal matching on the smaller side of a rectangular matrix.

    Among equally optimal matchings, returns the lexicographically
    smallest pair list ordered by (row, col).
    """
    mat = np.asarray(cost, dtype=float)
    if mat.ndim != 2 or mat.shape[0] == 0 or mat.shape[1] == 0:
        raise ValueError(f"cost matrix must be 2-D and non-empty, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError("cost matrix contains non-finite entries")

    # note: per-row shifts are NOT optimum-preserving on rectangular
    # matrices (unmatched rows), so maximization is delegated as-is
    rows, cols = _lsa(mat, maximize=maximize)
    optimum = float(mat[rows, cols].sum())
    tol = _TIE_RTOL * max(1.0, float(np.abs(mat).max())) * min(mat.shape)

    pairs = _lexicographic_refine(mat, optimum, tol, maximize)
    return AssignmentResult(pairs=pairs, objective=float(mat[tuple(zip(*pairs))].sum()))


def _best_total(mat: np.ndarray, maximize: bool) -> float:
    r, c = _lsa(mat, maximize=maximize)
    return float(mat[r, c].sum())


def _lexicographic_refine(mat: np.ndarray, optimum: float, tol: float,
                          maximize: bool) -> list[tuple[int, int]]:
    """Fix row/column choices greedily, keeping the total optimal.

    Row-major when rows <= cols so every row is matched; otherwise the
    matched rows themselves are part of the lexicographic choice, so we
    walk rows in order and also allow skipping a row when some optimal
    matching leaves it out.
    """
    n_rows, n_cols = mat.shape
    k = min(n_rows, n_cols)
    pairs: list[tuple[int, int]] = []
    row_ids = list(range(n_rows))
    col_ids = list(range(n_cols))
    sub = mat
    acc = 0.0

    def close(total: float) -> bool:
        return (total >= optimum - tol) if maximize else (total <= optimum + tol)

    while len(pairs) < k:
        placed = False
        # try matching the first remaining row to each column in order
        for cj in range(sub.shape[1]):
            cand = acc + float(sub[0, cj])
            rest = np.delete(np.delete(sub, 0, axis=0), cj, axis=1)
            if rest.size == 0 or min(rest.shape) == 0:
                total = cand
            else:
                # quick bound before solving the reduced problem
                if maximize:
                    bound = cand + float(rest.max(axis=1).sum())
                    if not close(bound):
                        continue
                total = cand + _best_total(rest, maximize)
            if close(total):
                pairs.append((row_ids[0], col_ids[cj]))
                acc = cand
                row_ids = row_ids[1:]
                col_ids = col_ids[:cj] + col_ids[cj + 1:]
                sub = np.delete(np.delete(sub, 0, axis=0), cj, axis=1)
                placed = True
                break
        if not placed:
            # rows exceed columns: some optimal matching skips this row
            row_ids = row_ids[1:]
            sub = sub[1:, :]
    pairs.sort()
    return pairs
