"""Post-processing of mined patterns: similarity, clustering, near duplicates,
length statistics, compression curves and the long-and-frequent comparison."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import squareform

__all__ = [
    "TermVector",
    "ClusterTree",
    "RunStats",
    "ComparisonRecord",
    "term_vector",
    "cosine_similarity",
    "cosine_distance_matrix",
    "ward_cluster",
    "token_edit_distance",
    "near_duplicate_groups",
    "length_distribution",
    "compression_curve",
    "compare_long_frequent",
]


@dataclass
class TermVector:
    pattern_id: int
    counts: dict[str, int]

    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.counts.values()))


def is_placeholder(token: str) -> bool:
    return len(token) > 2 and token[0] == "{" and token[-1] == "}"


def term_vector(pattern_id: int, tokens: Iterable[str], skip_placeholders: bool = False) -> TermVector:
    counts = Counter(t for t in tokens if not (skip_placeholders and is_placeholder(t)))
    return TermVector(pattern_id, dict(counts))


def cosine_similarity(u: TermVector, v: TermVector) -> float:
    nu, nv = u.norm(), v.norm()
    if nu == 0 or nv == 0:
        raise ValueError("cosine similarity of a zero vector")
    small, large = (u.counts, v.counts) if len(u.counts) <= len(v.counts) else (v.counts, u.counts)
    dot = sum(c * large.get(t, 0) for t, c in small.items())
    return min(1.0, dot / (nu * nv))


def cosine_distance_matrix(vectors: Sequence[TermVector]) -> np.ndarray:
    """Dense ``1 - cos`` matrix over all pairs."""
    vocab: dict[str, int] = {}
    for vec in vectors:
        for tok in vec.counts:
            vocab.setdefault(tok, len(vocab))
    mat = np.zeros((len(vectors), max(1, len(vocab))))
    for i, vec in enumerate(vectors):
        for tok, c in vec.counts.items():
            mat[i, vocab[tok]] = c
    norms = np.linalg.norm(mat, axis=1)
    if np.any(norms == 0):
        raise ValueError("cannot cluster an empty term vector")
    unit = mat / norms[:, None]
    dist = 1.0 - unit @ unit.T
    np.clip(dist, 0.0, 2.0, out=dist)
    np.fill_diagonal(dist, 0.0)
    return (dist + dist.T) / 2


@dataclass
class ClusterTree:
    """Agglomerative merges and flat cluster labels at a distance cut.

    ``merges`` rows follow scipy's linkage layout: the two merged cluster
    indices, the merge distance and the size of the new cluster.
    """

    ids: list[int]
    merges: np.ndarray
    labels: list[int]
    cut: float

    def clusters(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for pid, lab in zip(self.ids, self.labels):
            groups.setdefault(lab, []).append(pid)
        return sorted(groups.values(), key=lambda g: (-len(g), g))


def ward_cluster(vectors: Sequence[TermVector], cut: float = 0.5) -> ClusterTree:
    """Ward-linkage clustering on cosine distances, cut into flat clusters."""
    ids = [v.pattern_id for v in vectors]
    if len(vectors) == 0:
        return ClusterTree([], np.empty((0, 4)), [], cut)
    if len(vectors) == 1:
        return ClusterTree(ids, np.empty((0, 4)), [1], cut)
    dist = cosine_distance_matrix(vectors)
    merges = linkage(squareform(dist, checks=False), method="ward")
    labels = fcluster(merges, t=cut, criterion="distance")
    return ClusterTree(ids, merges, [int(x) for x in labels], cut)


def token_edit_distance(p: Sequence[str], q: Sequence[str], limit: Optional[int] = None) -> int:
    """Levenshtein distance over tokens with unit costs.

    With ``limit``, any distance above it is reported as ``limit + 1``.
    """
    if len(p) < len(q):
        p, q = q, p
    if limit is not None and len(p) - len(q) > limit:
        return limit + 1
    prev = list(range(len(q) + 1))
    for i, a in enumerate(p, 1):
        cur = [i] + [0] * len(q)
        for j, b in enumerate(q, 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a != b))
        if limit is not None and min(cur) > limit:
            return limit + 1
        prev = cur
    return prev[-1]


def near_duplicate_groups(patterns: Mapping[int, Sequence[str]], max_distance: int = 2) -> list[list[int]]:
    """Connected components of the "within ``max_distance`` edits" graph."""
    if max_distance < 0:
        raise ValueError("max_distance must be nonnegative")
    ids = sorted(patterns)
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_len = sorted(ids, key=lambda i: len(patterns[i]))
    for a_pos, a in enumerate(by_len):
        la = len(patterns[a])
        for b in by_len[a_pos + 1:]:
            if len(patterns[b]) - la > max_distance:
                break
            if find(a) == find(b):
                continue
            if token_edit_distance(patterns[a], patterns[b], limit=max_distance) <= max_distance:
                parent[find(b)] = find(a)
    groups: dict[int, list[int]] = {}
    for i in ids:
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: (-len(g), g))


def length_distribution(lengths: Iterable[int], min_length: int = 5) -> dict:
    """Box-plot summary of the lengths ``>= min_length`` (empty dict if none)."""
    kept = np.array([n for n in lengths if n >= min_length], dtype=float)
    if kept.size == 0:
        return {}
    q1, med, q3 = np.percentile(kept, [25, 50, 75])
    return {
        "count": int(kept.size),
        "min": float(kept.min()),
        "q1": float(q1),
        "median": float(med),
        "q3": float(q3),
        "max": float(kept.max()),
        "mean": float(kept.mean()),
    }


def compression_curve(events, baseline_bits: Optional[float] = None) -> list[tuple[int, float]]:
    """``(step, compression %)`` after each accept and prune.

    The baseline defaults to the bits before the first event.
    """
    events = list(events)
    if not events:
        return []
    base = events[0].total_bits_before if baseline_bits is None else baseline_bits
    return [
        (e.step, 100.0 * (1.0 - e.total_bits_after / base))
        for e in events
        if e.kind in ("accept", "prune")
    ]


@dataclass(frozen=True)
class ComparisonRecord:
    min_length: int
    min_frequency: int
    mdl_qualifying: int
    sequitur_qualifying: int
    mdl_total: int
    sequitur_total: int

    @property
    def advantage(self) -> int:
        return self.mdl_qualifying - self.sequitur_qualifying


def compare_long_frequent(
    mdl_patterns: Iterable[tuple[int, int]],
    sequitur_rules: Iterable[tuple[int, int]],
    min_length: int = 5,
    min_frequency: int = 10,
) -> ComparisonRecord:
    """Count long-and-frequent phrases per method.

    Both inputs are ``(length, frequency)`` pairs, frequency being the number
    of occurrences in the text.
    """
    mdl = list(mdl_patterns)
    seq = list(sequitur_rules)

    def ok(item):
        return item[0] >= min_length and item[1] >= min_frequency

    return ComparisonRecord(
        min_length,
        min_frequency,
        sum(map(ok, mdl)),
        sum(map(ok, seq)),
        len(mdl),
        len(seq),
    )


@dataclass
class RunStats:
    corpus: str
    failure_budget: int
    wall_time: float
    baseline_bits: float
    final_bits: float
    compression_percent: float
    steps: int
    accepted: int
    pruned: int
    rejected: int
    n_patterns: int
    n_tokens: int
    n_vocab: int
    stop_reason: str
    backend: str
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_result(cls, result, corpus: str = "", backend: str = "") -> "RunStats":
        kinds = result.kind_counts()
        steps = max((e.step for e in result.events), default=0)
        return cls(
            corpus=corpus,
            failure_budget=result.config.failure_budget,
            wall_time=result.wall_time,
            baseline_bits=result.baseline_bits,
            final_bits=result.final_bits,
            compression_percent=result.compression_percent,
            steps=steps,
            accepted=kinds.get("accept", 0),
            pruned=kinds.get("prune", 0),
            rejected=kinds.get("reject", 0),
            n_patterns=len(result.state.patterns),
            n_tokens=result.state.n_tokens,
            n_vocab=result.state.n_vocab,
            stop_reason=result.stop_reason,
            backend=backend,
        )
