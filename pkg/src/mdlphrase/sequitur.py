"""Token-level Sequitur grammar induction and rule post-processing.

The online algorithm keeps two invariants while reading the sequence left to
right: no digram occurs twice (non-overlapping) in the grammar, and every
rule is referenced at least twice.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

__all__ = [
    "RuleRef",
    "Grammar",
    "ExpandedRule",
    "GrammarError",
    "sequitur_mine",
    "expand_rules",
    "filter_rules",
    "check_invariants",
]


class GrammarError(ValueError):
    """Malformed grammar, e.g. a cyclic or dangling rule reference."""


class RuleRef(NamedTuple):
    """Reference to a rule inside a rule body."""

    id: int

    def __str__(self) -> str:
        return f"R{self.id}"


GrammarSymbol = Union[int, RuleRef]


@dataclass
class Grammar:
    start: list[GrammarSymbol]
    rules: dict[int, list[GrammarSymbol]]
    usage: dict[int, int] = field(default_factory=dict)

    def expand(self, body: Sequence[GrammarSymbol] | None = None) -> list[int]:
        """Fully expand ``body`` (default: the start rule) to tokens."""
        memo: dict[int, list[int]] = {}
        return _expand(self.start if body is None else body, self.rules, memo, set())


def _expand(body, rules, memo, active) -> list[int]:
    out: list[int] = []
    for sym in body:
        if isinstance(sym, RuleRef):
            out.extend(_expand_rule(sym.id, rules, memo, active))
        else:
            out.append(int(sym))
    return out


def _expand_rule(rid, rules, memo, active) -> list[int]:
    if rid in memo:
        return memo[rid]
    if rid in active:
        raise GrammarError(f"rule R{rid} refers to itself")
    if rid not in rules:
        raise GrammarError(f"reference to undefined rule R{rid}")
    active.add(rid)
    memo[rid] = _expand(rules[rid], rules, memo, active)
    active.discard(rid)
    return memo[rid]


# -- online induction -------------------------------------------------------


class _Rule:
    __slots__ = ("id", "guard", "refs")

    def __init__(self, rid: int):
        self.id = rid
        self.refs: set = set()
        g = _Sym(None)
        g.guard_of = self
        g.prev = g.next = g
        self.guard = g

    @property
    def count(self) -> int:
        return len(self.refs)

    def first(self) -> "_Sym":
        return self.guard.next

    def last(self) -> "_Sym":
        return self.guard.prev


class _Sym:
    __slots__ = ("value", "rule", "prev", "next", "guard_of")

    def __init__(self, value, rule: _Rule | None = None):
        # terminals: token id >= 0; nonterminals: ~rule.id (< 0); guards: None
        self.value = value
        self.rule = rule
        self.prev: _Sym | None = None
        self.next: _Sym | None = None
        self.guard_of: _Rule | None = None


class _Sequitur:
    def __init__(self):
        self.digrams: dict[tuple[int, int], _Sym] = {}
        self.rules: dict[int, _Rule] = {}
        self.pending: list[_Rule] = []
        self._next_id = 0
        self.start = self._new_rule()

    def _new_rule(self) -> _Rule:
        rule = _Rule(self._next_id)
        self._next_id += 1
        self.rules[rule.id] = rule
        return rule

    def _terminal(self, value: int) -> _Sym:
        return _Sym(value)

    def _nonterminal(self, rule: _Rule) -> _Sym:
        sym = _Sym(~rule.id, rule)
        rule.refs.add(sym)
        return sym

    def _copy(self, sym: _Sym) -> _Sym:
        return self._nonterminal(sym.rule) if sym.rule is not None else self._terminal(sym.value)

    # linked list and digram index -----------------------------------

    def _delete_digram(self, s: _Sym) -> None:
        if s.guard_of is not None or s.next.guard_of is not None:
            return
        key = (s.value, s.next.value)
        if self.digrams.get(key) is s:
            del self.digrams[key]

    def _join(self, left: _Sym, right: _Sym) -> None:
        if left.next is not None:
            self._delete_digram(left)
            # overlapping triples only index their second digram; keep the
            # first one known when the second goes away
            rp, rn = right.prev, right.next
            if (rp is not None and rn is not None and right.value is not None
                    and right.value == rp.value == rn.value):
                self.digrams[(right.value, rn.value)] = right
            lp, ln = left.prev, left.next
            if (lp is not None and ln is not None and left.value is not None
                    and left.value == ln.value == lp.value):
                self.digrams[(lp.value, left.value)] = lp
        left.next = right
        right.prev = left

    def _insert_after(self, s: _Sym, y: _Sym) -> None:
        self._join(y, s.next)
        self._join(s, y)

    def _delete(self, s: _Sym) -> None:
        self._join(s.prev, s.next)
        if s.guard_of is None:
            self._delete_digram(s)
            if s.rule is not None:
                rule = s.rule
                rule.refs.discard(s)
                if rule.count == 1:
                    self.pending.append(rule)

    # the two invariants ----------------------------------------------

    def _check(self, s: _Sym) -> bool:
        if s.guard_of is not None or s.next.guard_of is not None:
            return False
        key = (s.value, s.next.value)
        found = self.digrams.get(key)
        if found is None:
            self.digrams[key] = s
            return False
        if found is not s and found.next is not s:
            self._match(s, found)
        return True

    def _substitute(self, s: _Sym, rule: _Rule) -> None:
        q = s.prev
        self._delete(q.next)
        self._delete(q.next)
        self._insert_after(q, self._nonterminal(rule))
        if not self._check(q):
            self._check(q.next)

    def _match(self, ss: _Sym, m: _Sym) -> None:
        if m.prev.guard_of is not None and m.next.next.guard_of is not None:
            # the earlier occurrence is a whole rule body: reuse it
            rule = m.prev.guard_of
            self._substitute(ss, rule)
        else:
            rule = self._new_rule()
            self._insert_after(rule.last(), self._copy(ss))
            self._insert_after(rule.last(), self._copy(ss.next))
            self._substitute(m, rule)
            self._substitute(ss, rule)
            first = rule.first()
            self.digrams[(first.value, first.next.value)] = first
        self._enforce_utility()

    def _enforce_utility(self) -> None:
        while self.pending:
            rule = self.pending.pop()
            if rule.id in self.rules and rule.count == 1:
                self._expand(next(iter(rule.refs)))

    def _expand(self, s: _Sym) -> None:
        """Inline the body of the singly used rule referenced by ``s``."""
        rule = s.rule
        left, right = s.prev, s.next
        first, last = rule.first(), rule.last()
        self._delete_digram(left)
        self._delete_digram(s)
        rule.refs.discard(s)
        del self.rules[rule.id]
        left.next, first.prev = first, left
        last.next, right.prev = right, last
        self._check(left)
        if last.next is right and right.prev is last:
            self._check(last)

    def feed(self, tokens) -> None:
        start = self.start
        for tok in tokens:
            self._insert_after(start.last(), self._terminal(int(tok)))
            prev = start.last().prev
            if prev.guard_of is None:
                self._check(prev)

    # export ---------------------------------------------------------

    def _body(self, rule: _Rule, renumber: dict[int, int]) -> list[GrammarSymbol]:
        out: list[GrammarSymbol] = []
        s = rule.first()
        while s.guard_of is None:
            if s.rule is not None:
                out.append(RuleRef(renumber[s.rule.id]))
            else:
                out.append(s.value)
            s = s.next
        return out

    def export(self) -> Grammar:
        # number rules densely in order of first reference, depth first
        renumber: dict[int, int] = {}
        order: list[_Rule] = []
        stack = [self.start]
        while stack:
            rule = stack.pop()
            found = []
            s = rule.first()
            while s.guard_of is None:
                if s.rule is not None and s.rule.id not in renumber:
                    renumber[s.rule.id] = len(renumber) + 1
                    order.append(s.rule)
                    found.append(s.rule)
                s = s.next
            stack.extend(reversed(found))
        start = self._body(self.start, renumber)
        rules = {renumber[r.id]: self._body(r, renumber) for r in order}
        usage = {renumber[r.id]: r.count for r in order}
        return Grammar(start, dict(sorted(rules.items())), dict(sorted(usage.items())))


def sequitur_mine(tokens) -> Grammar:
    """Induce a Sequitur grammar over a token id sequence.

    Accepts a :class:`~mdlphrase.preprocess.TokenSequence` or any iterable
    of ints.

    >>> g = sequitur_mine([0, 1, 0, 1])
    >>> g.start, g.rules
    ([RuleRef(id=1), RuleRef(id=1)], {1: [0, 1]})
    """
    ids = getattr(tokens, "tokens", tokens)
    engine = _Sequitur()
    engine.feed(np.asarray(ids, dtype=np.int64).tolist())
    return engine.export()


# -- post-processing ---------------------------------------------------------


@dataclass(frozen=True)
class ExpandedRule:
    rule_id: int
    tokens: tuple[int, ...]
    usage: int  # occurrences in the expanded text, counting nesting
    references: int  # direct references in the grammar

    @property
    def length(self) -> int:
        return len(self.tokens)


def expand_rules(grammar: Grammar) -> list[ExpandedRule]:
    """Flatten every rule and count how often it occurs in the expansion."""
    memo: dict[int, list[int]] = {}
    for rid in grammar.rules:
        _expand_rule(rid, grammar.rules, memo, set())

    refs: Counter = Counter()
    direct: dict[int, Counter] = {}
    for rid, body in grammar.rules.items():
        direct[rid] = Counter(s.id for s in body if isinstance(s, RuleRef))
        refs.update(direct[rid])
    start_refs = Counter(s.id for s in grammar.start if isinstance(s, RuleRef))
    refs.update(start_refs)

    # parents before children: a rule's text count is fixed once every rule
    # referring to it has been counted
    parents: dict[int, set] = {rid: set() for rid in grammar.rules}
    for rid, kids in direct.items():
        for kid in kids:
            parents[kid].add(rid)
    occurrences: dict[int, int] = {}
    remaining = {rid: len(ps) for rid, ps in parents.items()}
    ready = sorted(rid for rid, n in remaining.items() if n == 0)
    while ready:
        rid = ready.pop()
        occurrences[rid] = start_refs.get(rid, 0) + sum(
            occurrences[p] * direct[p][rid] for p in parents[rid]
        )
        for kid in direct[rid]:
            remaining[kid] -= 1
            if remaining[kid] == 0:
                ready.append(kid)
    if len(occurrences) != len(grammar.rules):
        raise GrammarError("cyclic rule references")
    return [
        ExpandedRule(rid, tuple(memo[rid]), occurrences[rid], refs.get(rid, 0))
        for rid in sorted(grammar.rules)
    ]


def filter_rules(expanded, min_length: int = 5, min_frequency: int = 10) -> list[ExpandedRule]:
    """Rules at least ``min_length`` tokens long used at least ``min_frequency`` times."""
    kept = [r for r in expanded if r.length >= min_length and r.usage >= min_frequency]
    return sorted(kept, key=lambda r: (-r.length, -r.usage, r.rule_id))


def check_invariants(grammar: Grammar) -> list[str]:
    """Return violations of digram uniqueness and rule utility (empty if none)."""
    problems = []
    bodies = [("start", grammar.start)] + [(f"R{rid}", b) for rid, b in grammar.rules.items()]
    seen: dict[tuple, tuple[str, int]] = {}
    for name, body in bodies:
        for i in range(len(body) - 1):
            key = (body[i], body[i + 1])
            prior = seen.get(key)
            if prior is None:
                seen[key] = (name, i)
            elif not (prior == (name, i - 1) and body[i] == body[i + 1]):
                problems.append(f"digram {key} repeated in {prior[0]} and {name}")
            # else: overlaps the recorded occurrence inside a run (x x x)
    refs = Counter(
        s.id for _, body in bodies for s in body if isinstance(s, RuleRef)
    )
    for rid in grammar.rules:
        if refs.get(rid, 0) < 2:
            problems.append(f"rule R{rid} used {refs.get(rid, 0)} time(s)")
        if len(grammar.rules[rid]) < 2:
            problems.append(f"rule R{rid} has a body shorter than two symbols")
    return problems
