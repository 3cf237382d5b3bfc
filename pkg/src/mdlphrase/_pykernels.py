"""Vectorised numpy versions of the cover kernels.

Used when the compiled extension is unavailable.  Semantics are shared with
``_ckernels.pyx``: all occurrence counting and replacement is greedy,
left-to-right and non-overlapping.
"""
from __future__ import annotations

import numpy as np

__all__ = ["count_pairs", "count_pair", "replace_pair", "expand_symbol"]


def _greedy_keep(match: np.ndarray) -> np.ndarray:
    """Thin runs of consecutive ``True`` to every other position.

    Consecutive matches of the same bigram can only come from a run of one
    repeated symbol; the greedy scan takes offsets 0, 2, 4, ... of each run.
    """
    if not match.any():
        return match
    idx = np.arange(match.size)
    starts = match.copy()
    starts[1:] &= ~match[:-1]
    run_start = np.maximum.accumulate(np.where(starts, idx, 0))
    return match & ((idx - run_start) % 2 == 0)


def count_pairs(cover: np.ndarray):
    """Greedy non-overlapping counts of all adjacent pairs.

    Returns ``(left, right, count)`` int64 arrays.  Pair order is
    unspecified (sorted here; grouped by left symbol in the compiled kernel).
    """
    cover = np.asarray(cover, dtype=np.int64)
    if cover.size < 2:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy()
    a, b = cover[:-1], cover[1:]
    eq = a == b
    keep = ~eq | _greedy_keep(eq)
    base = np.int64(cover.max()) + 1
    keys, counts = np.unique(a[keep] * base + b[keep], return_counts=True)
    return keys // base, keys % base, counts.astype(np.int64)


def _matches(cover: np.ndarray, left: int, right: int) -> np.ndarray:
    m = (cover[:-1] == left) & (cover[1:] == right)
    if left == right:
        m = _greedy_keep(m)
    return m


def count_pair(cover: np.ndarray, left: int, right: int) -> int:
    cover = np.asarray(cover, dtype=np.int64)
    if cover.size < 2:
        return 0
    return int(_matches(cover, left, right).sum())


def replace_pair(cover: np.ndarray, left: int, right: int, new: int):
    """Replace each greedy occurrence of ``(left, right)`` with ``new``.

    Returns the rewritten cover and the number of replacements.
    """
    cover = np.asarray(cover, dtype=np.int64)
    if cover.size < 2:
        return cover.copy(), 0
    m = _matches(cover, left, right)
    pos = np.flatnonzero(m)
    out = cover.copy()
    out[pos] = new
    drop = np.zeros(cover.size, dtype=bool)
    drop[pos + 1] = True
    return out[~drop], int(pos.size)


def expand_symbol(cover: np.ndarray, symbol: int, expansion: np.ndarray) -> np.ndarray:
    """Replace every ``symbol`` in the cover by the token run ``expansion``."""
    cover = np.asarray(cover, dtype=np.int64)
    expansion = np.asarray(expansion, dtype=np.int64)
    mask = cover == symbol
    if not mask.any():
        return cover.copy()
    reps = np.where(mask, expansion.size, 1)
    out = np.repeat(cover, reps)
    starts = (np.cumsum(reps) - reps)[mask]
    out[starts[:, None] + np.arange(expansion.size)] = expansion
    return out
