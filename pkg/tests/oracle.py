"""Straight-from-the-formulas description length evaluator.

Deliberately shares no code with ``mdlphrase``: it recomputes every term from
the raw token sequence, the cover, and the pattern expansions.
"""
from __future__ import annotations

import math
from collections import Counter

C0 = 2.865064


def lstar(n: int) -> float:
    assert n >= 1
    total = math.log2(C0)
    x = float(n)
    while True:
        x = math.log2(x)
        if x <= 0:
            break
        total += x
    return total


def log2_comb(n: int, k: int) -> float:
    return math.log2(math.comb(n, k))


def composition_bits(total: int, parts: int) -> float:
    if total >= parts:
        return log2_comb(total - 1, parts - 1)
    return log2_comb(total + parts - 1, parts - 1)


def total_bits(tokens, cover, expansions) -> tuple[float, float]:
    """Return ``(model_bits, data_bits)``.

    tokens: original base-token sequence; cover: list of hashable symbols;
    expansions: {pattern symbol: tuple of base tokens} for every pattern in P.
    Anything in ``cover`` not in ``expansions`` is a base token.
    """
    n = len(tokens)
    freq = Counter(tokens)
    usage = Counter(cover)
    used = sum(usage.values())
    data = lstar(n) + sum(u * -math.log2(u / used) for u in usage.values())

    n_vocab = len(freq)
    model = lstar(n_vocab) + log2_comb(n - 1, n_vocab - 1)
    model += lstar(len(expansions) + 1)
    if expansions:
        usage_p = sum(usage.get(p, 0) for p in expansions)
        shifted = usage_p if usage_p >= len(expansions) else usage_p + 1
        model += lstar(shifted) + composition_bits(usage_p, len(expansions))
        for exp in expansions.values():
            model += lstar(len(exp)) + sum(-math.log2(freq[v] / n) for v in exp)
    return model, data


def replace_greedy(cover, left, right, new):
    out = []
    i = 0
    count = 0
    while i < len(cover):
        if i + 1 < len(cover) and cover[i] == left and cover[i + 1] == right:
            out.append(new)
            i += 2
            count += 1
        else:
            out.append(cover[i])
            i += 1
    return out, count


def expand(cover, sym, expansion):
    out = []
    for s in cover:
        if s == sym:
            out.extend(expansion)
        else:
            out.append(s)
    return out
