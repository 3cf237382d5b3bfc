import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdlphrase.analysis import (
    RunStats,
    TermVector,
    compare_long_frequent,
    compression_curve,
    cosine_distance_matrix,
    cosine_similarity,
    length_distribution,
    near_duplicate_groups,
    term_vector,
    token_edit_distance,
    ward_cluster,
)
from mdlphrase.miner import MiningEvent


def tv(pid, counts):
    return TermVector(pid, dict(counts))


def naive_ward_heights(dist: np.ndarray) -> list[float]:
    """Textbook Lance-Williams Ward recurrence, O(n^3)."""
    clusters = {i: 1 for i in range(len(dist))}
    d = {(i, j): dist[i, j] for i in clusters for j in clusters if i < j}
    nxt = len(dist)
    heights = []
    while len(clusters) > 1:
        (i, j), h = min(d.items(), key=lambda kv: kv[1])
        heights.append(h)
        ni, nj = clusters.pop(i), clusters.pop(j)
        new = {}
        for k, nk in clusters.items():
            dik = d[tuple(sorted((i, k)))]
            djk = d[tuple(sorted((j, k)))]
            new[(k, nxt)] = math.sqrt(
                ((ni + nk) * dik**2 + (nj + nk) * djk**2 - nk * h**2) / (ni + nj + nk)
            )
        d = {key: v for key, v in d.items() if i not in key and j not in key}
        d.update(new)
        clusters[nxt] = ni + nj
        nxt += 1
    return heights


def test_cosine_examples():
    assert cosine_similarity(tv(0, {"a": 2, "b": 1}), tv(1, {"a": 2, "b": 1})) == pytest.approx(1.0)
    assert cosine_similarity(tv(0, {"a": 1}), tv(1, {"b": 3})) == 0.0
    assert cosine_similarity(tv(0, {"a": 1, "b": 1}), tv(1, {"a": 1})) == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(ValueError):
        cosine_similarity(tv(0, {}), tv(1, {"a": 1}))


counts = st.dictionaries(st.sampled_from("abcdef"), st.integers(1, 5), min_size=1)


@settings(max_examples=200, deadline=None)
@given(counts, counts)
def test_cosine_symmetric_bounded(u, v):
    s = cosine_similarity(tv(0, u), tv(1, v))
    assert 0.0 <= s <= 1.0
    assert s == pytest.approx(cosine_similarity(tv(1, v), tv(0, u)))


def test_term_vector_skip_placeholders():
    assert term_vector(3, ["no", "{date}", "no"]).counts == {"no": 2, "{date}": 1}
    assert term_vector(3, ["no", "{date}", "no"], skip_placeholders=True).counts == {"no": 2}


def test_ward_single_vector():
    tree = ward_cluster([tv(7, {"a": 1})])
    assert tree.clusters() == [[7]]


def test_ward_two_identical_one_orthogonal():
    vecs = [tv(1, {"a": 1, "b": 2}), tv(2, {"a": 1, "b": 2}), tv(3, {"z": 1})]
    tree = ward_cluster(vecs, cut=0.5)
    assert tree.merges[0, 2] == pytest.approx(0.0, abs=1e-9)
    assert sorted(tree.clusters()) == [[1, 2], [3]]


def two_groups(rng, n=5):
    vecs = []
    for i in range(n):
        vecs.append(tv(i, {"x": 5 + int(rng.integers(0, 3)), "y": 4, "z": int(rng.integers(0, 2)) or 1}))
    for i in range(n, 2 * n):
        vecs.append(tv(i, {"p": 5, "q": 3 + int(rng.integers(0, 3)), "r": 1}))
    return vecs


def test_ward_two_groups_against_reference():
    vecs = two_groups(np.random.default_rng(0))
    tree = ward_cluster(vecs, cut=0.5)
    assert sorted(tree.clusters()) == [[0, 1, 2, 3, 4], [5, 6, 7, 8, 9]]
    ours = sorted(tree.merges[:, 2].tolist())
    ref = sorted(naive_ward_heights(cosine_distance_matrix(vecs)))
    assert ours == pytest.approx(ref, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(counts, min_size=2, max_size=9))
def test_ward_matches_reference_and_is_monotone(raw):
    vecs = [tv(i, c) for i, c in enumerate(raw)]
    tree = ward_cluster(vecs, cut=0.5)
    heights = tree.merges[:, 2]
    assert np.all(np.diff(heights) >= -1e-12)
    ref = naive_ward_heights(cosine_distance_matrix(vecs))
    assert sorted(heights.tolist()) == pytest.approx(sorted(ref), abs=1e-9)
    members = sorted(pid for group in tree.clusters() for pid in group)
    assert members == list(range(len(vecs)))


def test_edit_distance_examples():
    assert token_edit_distance(["a", "b"], ["a", "b"]) == 0
    assert token_edit_distance("induce or attempt".split(), "induce or to attempt".split()) == 1
    assert token_edit_distance(["a", "b", "c"], []) == 3
    assert token_edit_distance(list("abcdef"), list("uvwxyz"), limit=2) == 3


words = st.lists(st.sampled_from(["a", "b", "c"]), max_size=7)


@settings(max_examples=300, deadline=None)
@given(words, words, words)
def test_edit_distance_is_metric(p, q, r):
    d = token_edit_distance
    assert (d(p, q) == 0) == (p == q)
    assert d(p, q) == d(q, p)
    assert d(p, r) <= d(p, q) + d(q, r)
    assert min(d(p, q), 2) == min(d(p, q, limit=1), 2)


def test_near_duplicate_groups():
    pats = {
        1: "induce or attempt to induce".split(),
        2: "induce or to attempt to induce".split(),
        3: "any security".split(),
        4: "any security".split(),
    }
    assert near_duplicate_groups(pats, 1) == [[1, 2], [3, 4]]
    assert near_duplicate_groups(pats, 0) == [[3, 4], [1], [2]]
    assert near_duplicate_groups({1: ["a"], 2: ["b", "c", "d"]}, 1) == [[1], [2]]
    with pytest.raises(ValueError):
        near_duplicate_groups(pats, -1)


def test_length_distribution():
    assert length_distribution([5, 7, 9])["median"] == 7
    assert length_distribution([2, 3, 4]) == {}
    single = length_distribution([6])
    assert single["min"] == single["q1"] == single["median"] == single["max"] == 6


def event(step, kind, before, after):
    return MiningEvent(step, kind, 0, 1, 0, 2, 2, before, after, 0)


def test_compression_curve():
    assert compression_curve([]) == []
    assert compression_curve([event(1, "accept", 1000.0, 800.0)]) == [(1, pytest.approx(20.0))]
    curve = compression_curve([
        event(0, "reject", 1000.0, 1010.0),
        event(1, "accept", 1000.0, 900.0),
        event(2, "prune", 900.0, 900.0),
    ])
    assert [s for s, _ in curve] == [1, 2]
    assert curve[-1][1] == pytest.approx(10.0)


def test_compare_long_frequent():
    rec = compare_long_frequent([], [])
    assert (rec.mdl_qualifying, rec.sequitur_qualifying) == (0, 0)
    rec = compare_long_frequent([(5, 10), (4, 50), (8, 9)], [(5, 10), (6, 12), (2, 99)])
    assert (rec.mdl_qualifying, rec.sequitur_qualifying) == (1, 2)
    assert (rec.mdl_total, rec.sequitur_total, rec.advantage) == (3, 3, -1)


def test_run_stats_from_result():
    from conftest import seq
    from mdlphrase.miner import mine

    result = mine(seq("a b c d " * 10))
    stats = RunStats.from_result(result, corpus="toy", backend="x")
    assert stats.accepted == result.kind_counts()["accept"]
    assert stats.compression_percent == pytest.approx(result.compression_percent)
    assert stats.n_tokens == 40
