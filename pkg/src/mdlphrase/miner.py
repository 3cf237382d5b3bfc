"""Greedy bigram merging steered by description length.

Each round counts bigrams in the current cover, ranks them by phrase length
times occurrence count, and tests the best non-blacklisted one.  A candidate
that saves bits becomes a pattern, after which its two children are offered
for pruning.  A candidate that does not is blacklisted until its count grows
and charged against the failure budget.
"""
from __future__ import annotations

import enum
import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Optional

import numpy as np

from . import kernels
from .encoding import AddPattern, RemovePattern, delta_gain, total_length
from .model import ModelState, Pattern, decode
from .preprocess import TokenSequence

__all__ = [
    "TieBreak",
    "MiningConfig",
    "Candidate",
    "Blacklist",
    "MiningEvent",
    "MiningResult",
    "count_bigrams",
    "select_candidate",
    "apply_candidate",
    "try_prune",
    "mine",
    "decode",
]

log = logging.getLogger(__name__)


class TieBreak(str, enum.Enum):
    """How to order bigrams of equal score.

    ``COUNT``: more occurrences first.  ``LENGTH``: longer phrase first.
    Either way the flattened token strings decide next, then symbol ids.
    """

    COUNT = "count"
    LENGTH = "length"


@dataclass(frozen=True)
class MiningConfig:
    failure_budget: int = 10_000
    max_steps: Optional[int] = None
    tie_break: TieBreak = TieBreak.COUNT

    def __post_init__(self):
        if self.failure_budget < 1:
            raise ValueError("failure budget must be positive")
        if self.max_steps is not None and self.max_steps < 0:
            raise ValueError("max_steps must be nonnegative")
        object.__setattr__(self, "tie_break", TieBreak(self.tie_break))


@dataclass(frozen=True)
class Candidate:
    left: int
    right: int
    count: int
    phrase_length: int

    @property
    def bigram(self) -> tuple[int, int]:
        return (self.left, self.right)

    @property
    def score(self) -> int:
        return self.phrase_length * self.count


class Blacklist:
    """Rejected bigrams and their counts at rejection time."""

    def __init__(self):
        self._entries: dict[tuple[int, int], int] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, bigram) -> bool:
        return bigram in self._entries

    def add(self, bigram: tuple[int, int], count: int) -> None:
        self._entries[bigram] = count

    def allows(self, bigram: tuple[int, int], count: int) -> bool:
        """True unless blacklisted at a count ``>= count``; lifts stale entries."""
        recorded = self._entries.get(bigram)
        if recorded is None:
            return True
        if count > recorded:
            del self._entries[bigram]
            return True
        return False


@dataclass(frozen=True)
class MiningEvent:
    step: int
    kind: str  # "accept" | "prune" | "reject"
    left: int
    right: int
    pattern_id: Optional[int]
    phrase_length: int
    count: int
    total_bits_before: float
    total_bits_after: float
    cumulative_failures: int


@dataclass
class MiningResult:
    state: ModelState
    events: list[MiningEvent]
    baseline_bits: float
    final_bits: float
    wall_time: float
    stop_reason: str
    config: MiningConfig = field(default_factory=MiningConfig)

    @property
    def patterns(self) -> list[Pattern]:
        return [self.state.patterns[k] for k in sorted(self.state.patterns)]

    @property
    def cover(self) -> np.ndarray:
        return self.state.cover

    @property
    def compression_percent(self) -> float:
        return 100.0 * (1.0 - self.final_bits / self.baseline_bits)

    def kind_counts(self) -> Counter:
        return Counter(e.kind for e in self.events)

    def decode(self) -> np.ndarray:
        return decode(self.state.cover, self.state.patterns, self.state.n_vocab)

    def occurrences(self) -> dict[int, int]:
        """Occurrences of each pattern in the derivation of the cover.

        A pattern nested inside another used pattern counts once per use of
        the outer one, as well as for its own direct uses.
        """
        state = self.state
        nested: dict[int, Counter] = {}

        def contained(pid: int) -> Counter:
            if pid in nested:
                return nested[pid]
            pattern = state.registry[pid]
            inside: Counter = Counter()
            if pid in state.patterns:
                inside[pid] += 1
            for child in (pattern.left, pattern.right):
                if state.is_pattern(child):
                    inside.update(contained(state.pattern_id(child)))
            nested[pid] = inside
            return inside

        for pid in range(len(state.registry)):  # bottom-up keeps recursion shallow
            contained(pid)
        totals: Counter = Counter()
        for pid in state.patterns:
            used = state.pattern_usage_of(pid)
            if used:
                for inner, k in nested[pid].items():
                    totals[inner] += used * k
        return {pid: totals.get(pid, 0) for pid in sorted(state.patterns)}


def count_bigrams(cover) -> dict[tuple[int, int], int]:
    """Greedy non-overlapping occurrence count of every adjacent pair.

    >>> count_bigrams([0, 0, 0])
    {(0, 0): 1}
    """
    left, right, count = kernels.count_pairs(np.asarray(cover, dtype=np.int64))
    return {(int(a), int(b)): int(c) for a, b, c in zip(left, right, count)}


def _rank(
    left: np.ndarray,
    right: np.ndarray,
    count: np.ndarray,
    lengths: np.ndarray,
    blacklist: Blacklist,
    tie_break: TieBreak,
    lex_key: Callable[[int, int], tuple],
) -> Iterator[Candidate]:
    """Yield admissible candidates best first."""
    keep = count >= 2
    left, right, count = left[keep], right[keep], count[keep]
    if left.size == 0:
        return
    plen = lengths[left] + lengths[right]
    score = plen * count
    secondary = count if tie_break is TieBreak.COUNT else plen
    order = np.lexsort((-secondary, -score))
    s_sorted, t_sorted = score[order], secondary[order]
    cuts = np.flatnonzero((s_sorted[1:] != s_sorted[:-1]) | (t_sorted[1:] != t_sorted[:-1])) + 1
    bounds = np.concatenate(([0], cuts, [order.size])).tolist()
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        group = order[lo:hi].tolist()
        if len(group) > 1:
            group.sort(key=lambda g: (lex_key(int(left[g]), int(right[g])), int(left[g]), int(right[g])))
        for g in group:
            bigram = (int(left[g]), int(right[g]))
            c = int(count[g])
            if blacklist.allows(bigram, c):
                yield Candidate(bigram[0], bigram[1], c, int(plen[g]))


def select_candidate(
    counts: Mapping[tuple[int, int], int],
    blacklist: Blacklist,
    tie_break: TieBreak | str = TieBreak.COUNT,
    lengths: Optional[Mapping[int, int]] = None,
    names: Optional[Callable[[int], tuple]] = None,
) -> Optional[Candidate]:
    """Best admissible bigram by ``phrase_length * count``, or ``None``.

    ``lengths`` maps symbols to their token length (default 1) and ``names``
    maps a symbol to its flattened token strings for the lexicographic tie
    break (default: the symbol id).
    """
    if not counts:
        return None
    pairs = list(counts)
    left = np.array([p[0] for p in pairs], dtype=np.int64)
    right = np.array([p[1] for p in pairs], dtype=np.int64)
    count = np.array([counts[p] for p in pairs], dtype=np.int64)
    size = int(max(left.max(), right.max())) + 1
    lens = np.ones(size, dtype=np.int64)
    for sym, n in (lengths or {}).items():
        if sym < size:
            lens[sym] = n
    names = names or (lambda s: (s,))
    ranked = _rank(
        left, right, count, lens, blacklist, TieBreak(tie_break), lambda a, b: names(a) + names(b)
    )
    return next(ranked, None)


def apply_candidate(state: ModelState, candidate: Candidate, step: int = 0, delta_bits: float = 0.0) -> Pattern:
    """Commit ``candidate`` as a new pattern, rewriting the cover in place."""
    return state.add_pattern(candidate.left, candidate.right, step, delta_bits)


def try_prune(state: ModelState, symbol: int) -> tuple[bool, float]:
    """Remove pattern ``symbol`` if that does not lengthen the encoding.

    Base tokens and already removed patterns are left alone.  Returns whether
    the pattern was removed and the tested gain.
    """
    if not state.is_pattern(symbol):
        return False, 0.0
    pid = state.pattern_id(symbol)
    if pid not in state.patterns:
        return False, 0.0
    gain = delta_gain(state, RemovePattern(pid))
    if gain >= 0:
        state.remove_pattern(pid)
        return True, gain
    return False, gain


class _Namer:
    """Cached flattened token strings per symbol, for tie breaking."""

    def __init__(self, state: ModelState):
        self.state = state
        self.vocab = state.sequence.vocabulary
        self.cache: dict[int, tuple[str, ...]] = {}

    def __call__(self, sym: int) -> tuple[str, ...]:
        hit = self.cache.get(sym)
        if hit is None:
            hit = tuple(self.vocab[t] for t in self.state.flatten(sym))
            self.cache[sym] = hit
        return hit


def mine(
    sequence: TokenSequence,
    config: Optional[MiningConfig] = None,
    on_event: Optional[Callable[[MiningEvent, ModelState], None]] = None,
) -> MiningResult:
    """Mine a pattern set for ``sequence``.

    ``on_event`` is called after every accept, prune and reject with the
    event and the state as it stands after that event.
    """
    config = config or MiningConfig()
    if len(sequence) == 0:
        raise ValueError("cannot mine an empty sequence")
    started = time.perf_counter()
    state = ModelState(sequence)
    names = _Namer(state)
    blacklist = Blacklist()
    events: list[MiningEvent] = []
    baseline = total_length(state)
    current = baseline
    failures = 0
    step = 0
    accepted = 0
    stop_reason = "exhausted"

    def emit(event: MiningEvent) -> None:
        events.append(event)
        if on_event is not None:
            on_event(event, state)

    while True:
        if config.max_steps is not None and accepted >= config.max_steps:
            stop_reason = "max_steps"
            break
        left, right, count = kernels.count_pairs(state.cover)
        ranked = _rank(
            left,
            right,
            count,
            state.lengths,
            blacklist,
            config.tie_break,
            lambda a, b: names(a) + names(b),
        )
        progressed = False
        for cand in ranked:
            gain = delta_gain(state, AddPattern(cand.left, cand.right, cand.count))
            if gain > 0:
                step += 1
                accepted += 1
                pattern = apply_candidate(state, cand, step, gain)
                before, current = current, total_length(state)
                emit(
                    MiningEvent(step, "accept", cand.left, cand.right, pattern.id,
                                cand.phrase_length, cand.count, before, current, failures)
                )
                for child in dict.fromkeys(cand.bigram):
                    if not state.is_pattern(child):
                        continue
                    used = state.pattern_usage_of(state.pattern_id(child)) if state.is_live(child) else 0
                    removed, _ = try_prune(state, child)
                    if removed:
                        step += 1
                        child_pattern = state.registry[state.pattern_id(child)]
                        before, current = current, total_length(state)
                        emit(
                            MiningEvent(step, "prune", child_pattern.left, child_pattern.right,
                                        child_pattern.id, len(child_pattern), used,
                                        before, current, failures)
                        )
                progressed = True
                break
            failures += 1
            blacklist.add(cand.bigram, cand.count)
            emit(
                MiningEvent(step, "reject", cand.left, cand.right, None, cand.phrase_length,
                            cand.count, current, current - gain, failures)
            )
            if failures >= config.failure_budget:
                stop_reason = "failure_budget"
                break
        if not progressed:
            break
    wall = time.perf_counter() - started
    log.info(
        "mined %d patterns in %d steps (%d failures, %s) %.1f -> %.1f bits",
        len(state.patterns), step, failures, stop_reason, baseline, current,
    )
    return MiningResult(state, events, baseline, current, wall, stop_reason, config)
