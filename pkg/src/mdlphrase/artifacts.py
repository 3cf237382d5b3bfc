"""Reading and writing the on-disk report files."""
from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .miner import MiningEvent, MiningResult
from .sequitur import ExpandedRule, Grammar, RuleRef

__all__ = [
    "EVENT_FIELDS",
    "PatternRecord",
    "pattern_records",
    "write_patterns",
    "read_patterns",
    "write_events",
    "read_events",
    "write_json",
    "read_json",
    "grammar_to_dict",
    "grammar_from_dict",
    "write_rules_csv",
    "read_rules_csv",
    "write_rows",
]

EVENT_FIELDS = [
    "step",
    "kind",
    "pattern_id",
    "phrase_length",
    "count",
    "total_bits_before",
    "total_bits_after",
    "cumulative_failures",
    "left",
    "right",
]


@dataclass(frozen=True)
class PatternRecord:
    id: int
    expansion: list[str]
    usage: int
    occurrences: int
    created_at_step: int
    delta_bits: float
    left: int
    right: int

    @property
    def length(self) -> int:
        return len(self.expansion)

    @property
    def text(self) -> str:
        return " ".join(self.expansion)


def pattern_records(result: MiningResult) -> list[PatternRecord]:
    state = result.state
    occ = result.occurrences()
    return [
        PatternRecord(
            id=p.id,
            expansion=state.expansion_tokens(p.id),
            usage=state.pattern_usage_of(p.id),
            occurrences=occ[p.id],
            created_at_step=p.created_at_step,
            delta_bits=p.delta_bits,
            left=p.left,
            right=p.right,
        )
        for p in result.patterns
    ]


def write_json(path: str | os.PathLike, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def read_json(path: str | os.PathLike):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_patterns(path: str | os.PathLike, records: Iterable[PatternRecord]) -> None:
    write_json(path, [asdict(r) for r in records])


def read_patterns(path: str | os.PathLike) -> list[PatternRecord]:
    return [PatternRecord(**item) for item in read_json(path)]


def write_events(path: str | os.PathLike, events: Iterable[MiningEvent]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVENT_FIELDS)
        for e in events:
            writer.writerow([
                e.step, e.kind, "" if e.pattern_id is None else e.pattern_id,
                e.phrase_length, e.count, repr(e.total_bits_before),
                repr(e.total_bits_after), e.cumulative_failures, e.left, e.right,
            ])


def read_events(path: str | os.PathLike) -> list[MiningEvent]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            MiningEvent(
                step=int(row["step"]),
                kind=row["kind"],
                left=int(row.get("left") or -1),
                right=int(row.get("right") or -1),
                pattern_id=int(row["pattern_id"]) if row["pattern_id"] else None,
                phrase_length=int(row["phrase_length"]),
                count=int(row["count"]),
                total_bits_before=float(row["total_bits_before"]),
                total_bits_after=float(row["total_bits_after"]),
                cumulative_failures=int(row["cumulative_failures"]),
            )
            for row in csv.DictReader(fh)
        ]


def _sym_out(sym):
    return str(sym) if isinstance(sym, RuleRef) else int(sym)


def _sym_in(item):
    if isinstance(item, str):
        if not item.startswith("R"):
            raise ValueError(f"bad grammar symbol {item!r}")
        return RuleRef(int(item[1:]))
    return int(item)


def grammar_to_dict(grammar: Grammar, vocabulary: Sequence[str]) -> dict:
    return {
        "vocabulary": list(vocabulary),
        "start": [_sym_out(s) for s in grammar.start],
        "rules": {f"R{rid}": [_sym_out(s) for s in body] for rid, body in grammar.rules.items()},
        "usage": {f"R{rid}": n for rid, n in grammar.usage.items()},
    }


def grammar_from_dict(data: dict) -> tuple[Grammar, list[str]]:
    rules = {int(k[1:]): [_sym_in(s) for s in body] for k, body in data["rules"].items()}
    usage = {int(k[1:]): int(n) for k, n in data.get("usage", {}).items()}
    grammar = Grammar([_sym_in(s) for s in data["start"]], rules, usage)
    return grammar, list(data["vocabulary"])


RULE_FIELDS = ["rule_id", "length", "usage", "references", "text"]


def write_rules_csv(path: str | os.PathLike, rules: Iterable[ExpandedRule], vocabulary: Sequence[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RULE_FIELDS)
        for r in rules:
            writer.writerow([
                f"R{r.rule_id}", r.length, r.usage, r.references,
                " ".join(vocabulary[t] for t in r.tokens),
            ])


def read_rules_csv(path: str | os.PathLike) -> list[dict]:
    """Rows of a rules table with numeric columns converted."""
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            {
                "rule_id": row["rule_id"],
                "length": int(row["length"]),
                "usage": int(row["usage"]),
                "references": int(row["references"]),
                "text": row["text"],
            }
            for row in csv.DictReader(fh)
        ]


def write_rows(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
