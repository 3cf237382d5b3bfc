"""Description lengths (in bits) for the pattern model and the covered data.

All quantities use base-2 logarithms and are real valued.  The model state is
duck-typed: anything exposing the aggregates of :class:`mdlphrase.model.ModelState`
can be measured here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Union

__all__ = [
    "RISSANEN_C0",
    "AddPattern",
    "RemovePattern",
    "UsageTable",
    "universal_int_length",
    "log_binomial",
    "composition_length",
    "code_length",
    "data_length",
    "model_length",
    "total_length",
    "delta_gain",
]

RISSANEN_C0 = 2.865064
_LOG2_C0 = math.log2(RISSANEN_C0)
_LN2 = math.log(2.0)
# below this, binomials are evaluated exactly with big integers
_EXACT_COMB_LIMIT = 2000


class EncodingError(ValueError):
    """Raised when a length is requested outside its domain."""


def universal_int_length(n: int) -> float:
    """Rissanen's universal code length for a positive integer.

    ``log2(c0)`` plus the positive terms of ``log2 n + log2 log2 n + ...``.

    >>> round(universal_int_length(1), 4)
    1.5186
    >>> round(universal_int_length(2), 4)
    2.5186
    """
    if n < 1:
        raise EncodingError(f"universal code needs a positive integer, got {n}")
    bits = _LOG2_C0
    x = math.log2(n)
    while x > 0:
        bits += x
        x = math.log2(x)
    return bits


def log_binomial(n: int, k: int) -> float:
    """``log2 C(n, k)``; exact for small ``n``, log-gamma beyond."""
    if k < 0 or n < 0 or k > n:
        raise EncodingError(f"binomial C({n}, {k}) is undefined")
    if k == 0 or k == n:
        return 0.0
    if n <= _EXACT_COMB_LIMIT:
        return math.log2(math.comb(n, k))
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) / _LN2


def composition_length(total: int, parts: int) -> float:
    """Bits to index the usage vector of ``parts`` patterns summing to ``total``.

    Strict compositions when every part can be positive; once unused patterns
    make that impossible (``total < parts``) weak compositions are indexed.
    """
    if parts < 1:
        raise EncodingError("no parts to compose")
    if total >= parts:
        return log_binomial(total - 1, parts - 1)
    return log_binomial(total + parts - 1, parts - 1)


def _usage_count_length(total: int, parts: int) -> float:
    # usage(P) itself; shifted by one only in the degenerate all-unused case
    return universal_int_length(total if total >= parts else total + 1)


def _xlogx(u: int) -> float:
    return u * math.log2(u) if u > 0 else 0.0


@dataclass(frozen=True)
class UsageTable:
    """Snapshot of cover usages: the code table before code lengths."""

    usage: Mapping[int, int]
    total_usage: int
    pattern_usage_total: int


def code_length(symbol: int, table: UsageTable) -> float:
    """Shannon-optimal code length of ``symbol`` under the cover usages."""
    u = table.usage.get(symbol, 0)
    if u <= 0:
        raise EncodingError(f"symbol {symbol} is unused and carries no code")
    return -math.log2(u / table.total_usage)


@dataclass(frozen=True)
class AddPattern:
    """Hypothetical merge of the bigram ``(left, right)`` into a new pattern.

    ``count`` is the number of greedy non-overlapping occurrences in the
    cover; it is computed from the cover when omitted.
    """

    left: int
    right: int
    count: Optional[int] = None


@dataclass(frozen=True)
class RemovePattern:
    """Hypothetical removal of a pattern, expanding its uses to base tokens."""

    pattern_id: int


Change = Union[AddPattern, RemovePattern]


def _static_data_bits(state) -> float:
    n = state.n_tokens
    if n < 1:
        raise EncodingError("empty corpus")
    return universal_int_length(n)


def _static_model_bits(state) -> float:
    return universal_int_length(state.n_vocab) + log_binomial(
        state.n_tokens - 1, state.n_vocab - 1
    )


def _dynamic_data_bits(cover_len: int, entropy_sum: float) -> float:
    if cover_len == 0:
        return 0.0
    return cover_len * math.log2(cover_len) - entropy_sum


def _dynamic_model_bits(n_patterns: int, pattern_usage: int, pattern_bits: float) -> float:
    bits = universal_int_length(n_patterns + 1)
    if n_patterns > 0:
        bits += _usage_count_length(pattern_usage, n_patterns)
        bits += composition_length(pattern_usage, n_patterns)
        bits += pattern_bits
    return bits


def data_length(state) -> float:
    """``L(S | P)``: length prefix plus the Shannon-coded cover."""
    return _static_data_bits(state) + _dynamic_data_bits(state.cover_len, state.entropy_sum)


def model_length(state) -> float:
    """``L(P)``: vocabulary, token frequencies, pattern count, usages and patterns."""
    return _static_model_bits(state) + _dynamic_model_bits(
        state.n_patterns, state.pattern_usage, state.pattern_bits
    )


def total_length(state) -> float:
    return model_length(state) + data_length(state)


def pattern_length(n_tokens: int, token_bits: float) -> float:
    """``L(p)`` for a pattern of ``n_tokens`` base tokens costing ``token_bits``."""
    return universal_int_length(n_tokens) + token_bits


def _gain(state, cover_len, entropy_sum, n_patterns, pattern_usage, pattern_bits) -> float:
    before = _dynamic_data_bits(state.cover_len, state.entropy_sum) + _dynamic_model_bits(
        state.n_patterns, state.pattern_usage, state.pattern_bits
    )
    after = _dynamic_data_bits(cover_len, entropy_sum) + _dynamic_model_bits(
        n_patterns, pattern_usage, pattern_bits
    )
    return before - after


def _gain_add(state, change: AddPattern) -> float:
    x, y = change.left, change.right
    for s in (x, y):
        if not state.is_live(s):
            raise EncodingError(f"unknown symbol {s}")
    c = change.count
    if c is None:
        c = state.count_bigram(x, y)
    if c < 1:
        raise EncodingError(f"bigram ({x}, {y}) does not occur in the cover")
    u = state.usage
    ux, uy = int(u[x]), int(u[y])
    h = state.entropy_sum
    if x == y:
        h += _xlogx(ux - 2 * c) - _xlogx(ux)
    else:
        h += _xlogx(ux - c) - _xlogx(ux) + _xlogx(uy - c) - _xlogx(uy)
    h += _xlogx(c)
    absorbed = c * (state.is_pattern(x) + state.is_pattern(y))
    bits = pattern_length(
        int(state.lengths[x] + state.lengths[y]), float(state.costs[x] + state.costs[y])
    )
    return _gain(
        state,
        state.cover_len - c,
        h,
        state.n_patterns + 1,
        state.pattern_usage + c - absorbed,
        state.pattern_bits + bits,
    )


def _gain_remove(state, change: RemovePattern) -> float:
    pattern = state.patterns.get(change.pattern_id)
    if pattern is None:
        raise EncodingError(f"unknown pattern {change.pattern_id}")
    sym = state.pattern_symbol(pattern.id)
    u = state.usage
    uq = int(u[sym])
    h = state.entropy_sum - _xlogx(uq)
    if uq:
        grow: dict[int, int] = {}
        for t in pattern.expansion:
            grow[t] = grow.get(t, 0) + uq
        for t, g in grow.items():
            ut = int(u[t])
            h += _xlogx(ut + g) - _xlogx(ut)
    return _gain(
        state,
        state.cover_len + uq * (len(pattern.expansion) - 1),
        h,
        state.n_patterns - 1,
        state.pattern_usage - uq,
        state.pattern_bits - state.pattern_bits_of(pattern.id),
    )


def delta_gain(state, change: Change) -> float:
    """Bits saved by applying ``change``; positive means it compresses.

    Evaluated on the exact post-change state without mutating ``state``.
    """
    if isinstance(change, AddPattern):
        return _gain_add(state, change)
    if isinstance(change, RemovePattern):
        return _gain_remove(state, change)
    raise TypeError(f"unsupported change {change!r}")
