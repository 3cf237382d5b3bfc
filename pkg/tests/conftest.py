from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracle  # noqa: E402

from mdlphrase.preprocess import build_sequence  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


def seq(text_or_tokens):
    tokens = text_or_tokens.split() if isinstance(text_or_tokens, str) else list(text_or_tokens)
    return build_sequence(tokens)


def oracle_view(state):
    """The state as plain Python data: (tokens, cover, {symbol: base tokens})."""
    tokens = state.sequence.tokens.tolist()
    cover = state.cover.tolist()
    expansions = {state.pattern_symbol(pid): p.expansion for pid, p in state.patterns.items()}
    return tokens, cover, expansions


def oracle_total(state) -> float:
    return sum(oracle.total_bits(*oracle_view(state)))


def random_tokens(rng: np.random.Generator, n: int, vocab: int) -> list[str]:
    return [f"t{i}" for i in rng.integers(0, vocab, size=n)]


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


# acceptance criteria register here; the summary prints one line each
CRITERIA: list[tuple[str, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in CRITERIA:
        terminalreporter.write_line(f"{status:4s}  {name}: {detail}")
