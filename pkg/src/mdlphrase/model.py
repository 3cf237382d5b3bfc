"""Pattern set, cover and usage bookkeeping for the miner.

Symbols are plain ints: ``0 .. n_vocab-1`` are base tokens and pattern ``k``
is symbol ``n_vocab + k``.  Pattern ids are never reused, so a pruned
pattern leaves a hole in the symbol space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .encoding import UsageTable, pattern_length
from .preprocess import TokenSequence

__all__ = ["CorruptionError", "Pattern", "ModelState", "decode"]


class CorruptionError(ValueError):
    """A cover refers to a pattern that does not exist."""


@dataclass
class Pattern:
    id: int
    left: int
    right: int
    expansion: tuple[int, ...]
    created_at_step: int
    delta_bits: float = 0.0

    def __len__(self) -> int:
        return len(self.expansion)


def _xlogx_sum(u: np.ndarray) -> float:
    u = u[u > 0].astype(np.float64)
    return float(np.sum(u * np.log2(u)))


class ModelState:
    """Current cover of a token sequence together with its pattern set.

    Keeps the aggregates the encoding needs (cover length, ``sum u log u``,
    pattern count, pattern usage, summed pattern lengths) in step with the
    cover.  Aggregates are recomputed from the usage vector on every commit.
    """

    def __init__(self, sequence: TokenSequence):
        if len(sequence) == 0:
            raise ValueError("empty corpus")
        self.sequence = sequence
        self.n_tokens = len(sequence)
        self.n_vocab = sequence.n_vocab
        self.cover = sequence.tokens.copy()
        token_bits = -np.log2(sequence.frequency / self.n_tokens)
        cap = max(16, self.n_vocab * 2)
        self.usage = np.zeros(cap, dtype=np.int64)
        self.usage[: self.n_vocab] = sequence.frequency
        self.lengths = np.zeros(cap, dtype=np.int64)
        self.lengths[: self.n_vocab] = 1
        self.costs = np.zeros(cap, dtype=np.float64)
        self.costs[: self.n_vocab] = token_bits
        self.patterns: dict[int, Pattern] = {}
        self.registry: list[Pattern] = []
        self._pattern_bits: dict[int, float] = {}
        self.refresh()

    # symbol helpers -------------------------------------------------

    def pattern_symbol(self, pattern_id: int) -> int:
        return self.n_vocab + pattern_id

    def pattern_id(self, symbol: int) -> int:
        return symbol - self.n_vocab

    def is_pattern(self, symbol: int) -> bool:
        return symbol >= self.n_vocab

    def is_live(self, symbol: int) -> bool:
        if 0 <= symbol < self.n_vocab:
            return True
        return (symbol - self.n_vocab) in self.patterns

    def flatten(self, symbol: int) -> tuple[int, ...]:
        if symbol < self.n_vocab:
            return (symbol,)
        return self.registry[symbol - self.n_vocab].expansion

    def pattern_bits_of(self, pattern_id: int) -> float:
        return self._pattern_bits[pattern_id]

    def count_bigram(self, left: int, right: int) -> int:
        return kernels.count_pair(self.cover, left, right)

    def usage_table(self) -> UsageTable:
        used = np.flatnonzero(self.usage)
        return UsageTable(
            usage={int(s): int(self.usage[s]) for s in used},
            total_usage=self.cover_len,
            pattern_usage_total=self.pattern_usage,
        )

    def pattern_usage_of(self, pattern_id: int) -> int:
        return int(self.usage[self.pattern_symbol(pattern_id)])

    # aggregates -----------------------------------------------------

    def refresh(self) -> None:
        """Recompute every cached aggregate from the usage vector."""
        self.cover_len = int(self.cover.size)
        self.entropy_sum = _xlogx_sum(self.usage)
        self.n_patterns = len(self.patterns)
        # pruned patterns keep zero usage, so the tail sum covers live ones
        self.pattern_usage = int(self.usage[self.n_vocab :].sum())
        self.pattern_bits = math.fsum(self._pattern_bits[k] for k in self.patterns)

    def _grow(self, needed: int) -> None:
        if needed <= self.usage.size:
            return
        cap = max(needed, self.usage.size * 2)
        for name in ("usage", "lengths", "costs"):
            old = getattr(self, name)
            new = np.zeros(cap, dtype=old.dtype)
            new[: old.size] = old
            setattr(self, name, new)

    # commits --------------------------------------------------------

    def add_pattern(self, left: int, right: int, step: int, delta_bits: float = 0.0) -> Pattern:
        """Mint a pattern for ``(left, right)`` and rewrite the cover."""
        pid = len(self.registry)
        sym = self.pattern_symbol(pid)
        self._grow(sym + 1)
        pattern = Pattern(
            id=pid,
            left=left,
            right=right,
            expansion=self.flatten(left) + self.flatten(right),
            created_at_step=step,
            delta_bits=delta_bits,
        )
        self.cover, count = kernels.replace_pair(self.cover, left, right, sym)
        self.usage[left] -= count
        self.usage[right] -= count
        self.usage[sym] = count
        self.lengths[sym] = self.lengths[left] + self.lengths[right]
        self.costs[sym] = self.costs[left] + self.costs[right]
        self.registry.append(pattern)
        self.patterns[pid] = pattern
        self._pattern_bits[pid] = pattern_length(int(self.lengths[sym]), float(self.costs[sym]))
        self.refresh()
        return pattern

    def remove_pattern(self, pattern_id: int) -> int:
        """Drop a pattern, expanding its uses into base tokens.

        Returns how many cover positions were expanded.
        """
        pattern = self.patterns.pop(pattern_id)
        sym = self.pattern_symbol(pattern_id)
        used = int(self.usage[sym])
        if used:
            expansion = np.asarray(pattern.expansion, dtype=np.int64)
            self.cover = kernels.expand_symbol(self.cover, sym, expansion)
            np.add.at(self.usage, expansion, used)
        self.usage[sym] = 0
        del self._pattern_bits[pattern_id]
        self.refresh()
        return used

    # checks ---------------------------------------------------------

    def recount_usage(self) -> np.ndarray:
        return np.bincount(self.cover, minlength=self.usage.size)

    def check(self) -> None:
        """Assert losslessness and usage consistency (for tests and debugging)."""
        if not np.array_equal(self.recount_usage(), self.usage):
            raise AssertionError("usage table out of sync with cover")
        if not np.array_equal(decode(self.cover, self.patterns, self.n_vocab), self.sequence.tokens):
            raise AssertionError("cover does not decode to the input")

    def expansion_tokens(self, pattern_id: int) -> list[str]:
        return self.sequence.token_strings(self.patterns[pattern_id].expansion)


def decode(
    cover: Sequence[int] | np.ndarray,
    patterns: Mapping[int, Pattern] | Iterable[Pattern],
    n_vocab: int,
) -> np.ndarray:
    """Flatten a cover back to base token ids.

    ``patterns`` may be keyed by pattern id or be a plain iterable.  Children
    that are themselves missing from ``patterns`` are resolved through the
    stored flattened expansion.
    """
    if not isinstance(patterns, Mapping):
        patterns = {p.id: p for p in patterns}
    out: list[int] = []
    seen: dict[int, tuple[int, ...]] = {}
    for sym in np.asarray(cover, dtype=np.int64).tolist():
        if sym < n_vocab:
            out.append(sym)
            continue
        pid = sym - n_vocab
        if pid not in seen:
            pattern = patterns.get(pid)
            if pattern is None:
                raise CorruptionError(f"cover references unknown pattern {pid}")
            seen[pid] = _flatten(pattern, patterns, n_vocab)
        out.extend(seen[pid])
    return np.asarray(out, dtype=np.int64)


def _flatten(pattern: Pattern, patterns: Mapping[int, Pattern], n_vocab: int) -> tuple[int, ...]:
    parts: list[int] = []
    for child in (pattern.left, pattern.right):
        if child < n_vocab:
            parts.append(child)
        elif child - n_vocab in patterns:
            parts.extend(_flatten(patterns[child - n_vocab], patterns, n_vocab))
        else:
            # child was pruned; the stored expansion is authoritative
            return pattern.expansion
    result = tuple(parts)
    if result != pattern.expansion:
        raise CorruptionError(f"pattern {pattern.id} expansion disagrees with its children")
    return result
