"""Text to token sequences: placeholder substitution, tokenization, id mapping."""
from __future__ import annotations

import os
import re
import sys
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DEFAULT_LABELS",
    "RULES_ENV_VAR",
    "ConfigurationError",
    "PlaceholderRule",
    "TokenSequence",
    "apply_placeholders",
    "tokenize",
    "build_sequence",
    "load_rules",
    "parse_rules",
    "default_rules",
    "read_tokens",
    "write_tokens",
]

DEFAULT_LABELS = ("date", "enum", "money", "percentage", "period", "reference", "term")
RULES_ENV_VAR = "MDLPHRASE_RULES"


class ConfigurationError(ValueError):
    """Invalid placeholder rules or rule files."""


@dataclass(frozen=True)
class PlaceholderRule:
    label: str
    pattern: str
    priority: int

    def __post_init__(self):
        if not self.label or any(ch.isspace() for ch in self.label):
            raise ConfigurationError(f"bad placeholder label {self.label!r}")
        if "{" in self.label or "}" in self.label:
            raise ConfigurationError(f"braces are not allowed in label {self.label!r}")

    @property
    def placeholder(self) -> str:
        return "{" + self.label + "}"

    def compile(self) -> re.Pattern:
        try:
            return re.compile(self.pattern, re.IGNORECASE)
        except re.error as exc:
            raise ConfigurationError(
                f"rule {self.label!r} (priority {self.priority}) has an invalid pattern: {exc}"
            ) from exc


def _check_rules(rules: Sequence[PlaceholderRule]) -> list[PlaceholderRule]:
    seen: dict[int, str] = {}
    for rule in rules:
        if rule.priority in seen:
            raise ConfigurationError(
                f"priority {rule.priority} used by both {seen[rule.priority]!r} and {rule.label!r}"
            )
        seen[rule.priority] = rule.label
    return sorted(rules, key=lambda r: r.priority)


def apply_placeholders(text: str, rules: Sequence[PlaceholderRule]) -> str:
    """Replace rule matches with ``{label}``, lowest priority first.

    Each rule sees the output of the rules before it.
    """
    compiled = [(rule.placeholder, rule.compile()) for rule in _check_rules(rules)]
    for placeholder, regex in compiled:
        text = regex.sub(placeholder, text)
    return text


@lru_cache(maxsize=1)
def _token_regex() -> re.Pattern:
    punct = "".join(
        ch
        for ch in map(chr, range(sys.maxunicode + 1))
        if unicodedata.category(ch).startswith("P")
    )
    cls = re.escape(punct)
    # placeholders first so their braces are not split off
    return re.compile(rf"\{{[^\s{{}}]+\}}|[{cls}]|[^\s{cls}]+")


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Split ``text`` into words and single punctuation characters.

    >>> tokenize("No broker, dealer.")
    ['no', 'broker', ',', 'dealer', '.']
    """
    if lowercase:
        text = text.lower()
    return _token_regex().findall(text)


@dataclass
class TokenSequence:
    """A corpus as dense token ids plus its vocabulary and token frequencies."""

    tokens: np.ndarray
    vocabulary: list[str]
    frequency: np.ndarray
    index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.tokens = np.asarray(self.tokens, dtype=np.int64)
        self.frequency = np.asarray(self.frequency, dtype=np.int64)
        if not self.index:
            self.index = {tok: i for i, tok in enumerate(self.vocabulary)}

    def __len__(self) -> int:
        return int(self.tokens.size)

    @property
    def n_vocab(self) -> int:
        return len(self.vocabulary)

    def token_strings(self, ids: Iterable[int] | None = None) -> list[str]:
        vocab = self.vocabulary
        return [vocab[i] for i in (self.tokens if ids is None else ids)]


def build_sequence(tokens: Sequence[str]) -> TokenSequence:
    """Assign ids in first-appearance order and count frequencies."""
    index: dict[str, int] = {}
    ids = np.empty(len(tokens), dtype=np.int64)
    for pos, tok in enumerate(tokens):
        if not tok:
            raise ValueError("empty token")
        ids[pos] = index.setdefault(tok, len(index))
    vocabulary = list(index)
    frequency = np.bincount(ids, minlength=len(vocabulary)).astype(np.int64)
    return TokenSequence(ids, vocabulary, frequency, index)


def parse_rules(text: str, source: str = "<rules>") -> list[PlaceholderRule]:
    """Parse ``<priority> <label> <regex>`` lines; ``#`` starts a comment line."""
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split(None, 2)
        if len(parts) != 3:
            raise ConfigurationError(f"{source}:{lineno}: expected '<priority> <label> <regex>'")
        try:
            priority = int(parts[0])
        except ValueError:
            raise ConfigurationError(f"{source}:{lineno}: priority must be an integer") from None
        rule = PlaceholderRule(parts[1], parts[2], priority)
        rule.compile()
        rules.append(rule)
    return _check_rules(rules)


def load_rules(path: str | os.PathLike) -> list[PlaceholderRule]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read rule file {path}: {exc}") from exc
    return parse_rules(text, str(path))


def default_rules() -> list[PlaceholderRule]:
    """Rules from ``$MDLPHRASE_RULES`` if set, else the bundled US Code rules."""
    override = os.environ.get(RULES_ENV_VAR)
    if override:
        return load_rules(override)
    text = resources.files("mdlphrase").joinpath("data/us_code_rules.txt").read_text("utf-8")
    return parse_rules(text, "us_code_rules.txt")


def write_tokens(path: str | os.PathLike, tokens: Sequence[str], one_per_line: bool = True) -> None:
    sep = "\n" if one_per_line else " "
    body = sep.join(tokens)
    Path(path).write_text(body + "\n" if tokens else "", encoding="utf-8")


def read_tokens(path: str | os.PathLike) -> list[str]:
    """Read a token file in either layout (tokens never contain whitespace)."""
    return Path(path).read_text(encoding="utf-8").split()


def frequency_table(sequence: TokenSequence) -> dict:
    return {
        "n_tokens": len(sequence),
        "vocabulary": sequence.vocabulary,
        "frequency": [int(f) for f in sequence.frequency],
    }

