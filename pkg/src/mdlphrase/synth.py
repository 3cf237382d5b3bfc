"""Synthetic corpora with planted phrases, for tests and benchmarks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = ["PlantSpec", "planted_corpus", "random_corpus", "zipf_corpus"]


@dataclass(frozen=True)
class PlantSpec:
    phrase_len: int = 8
    repeats: int = 50
    noise_tokens: int = 2000
    noise_vocab: int = 100
    phrases: int = 1
    total_length: Optional[int] = None
    seed: int = 0

    def validate(self) -> int:
        """Check the parameters and return the number of noise tokens to draw."""
        if self.phrase_len < 1 or self.phrases < 1:
            raise ValueError("phrases need at least one token")
        if self.repeats < 0 or self.noise_tokens < 0:
            raise ValueError("counts must be nonnegative")
        planted = self.phrase_len * self.repeats * self.phrases
        noise = self.noise_tokens
        if self.total_length is not None:
            noise = self.total_length - planted
            if noise < 0:
                raise ValueError(
                    f"planted phrases need {planted} tokens but the corpus has {self.total_length}"
                )
        if noise > 0 and self.noise_vocab < 1:
            raise ValueError("noise needs a nonempty vocabulary")
        return noise


def planted_corpus(spec: PlantSpec) -> list[str]:
    """Uniform noise with ``repeats`` copies of each planted phrase.

    Phrase tokens (``w<phrase>_<pos>``) never occur in the noise, so each
    phrase occurs exactly ``repeats`` times.
    """
    noise_len = spec.validate()
    rng = np.random.default_rng(spec.seed)
    noise = [f"n{i}" for i in rng.integers(0, max(spec.noise_vocab, 1), size=noise_len)]
    phrases = [[f"w{k}_{i}" for i in range(spec.phrase_len)] for k in range(spec.phrases)]
    inserts = [k for k in range(spec.phrases) for _ in range(spec.repeats)]
    rng.shuffle(inserts)
    slots = np.sort(rng.integers(0, noise_len + 1, size=len(inserts)))
    out: list[str] = []
    prev = 0
    for slot, k in zip(slots.tolist(), inserts):
        out.extend(noise[prev:slot])
        out.extend(phrases[k])
        prev = slot
    out.extend(noise[prev:])
    return out


def random_corpus(n_tokens: int, vocab: int, seed: int = 0) -> list[str]:
    rng = np.random.default_rng(seed)
    return [f"t{i}" for i in rng.integers(0, vocab, size=n_tokens)]


def zipf_corpus(
    n_tokens: int = 50_000,
    vocab: int = 2000,
    n_phrases: int = 40,
    phrase_len: tuple[int, int] = (3, 15),
    repeats: tuple[int, int] = (5, 60),
    exponent: float = 1.1,
    seed: int = 0,
) -> list[str]:
    """Zipf-distributed words with phrases (built from the same words) planted in.

    Closer to running text than :func:`planted_corpus`: phrases share
    vocabulary with the background and with each other.
    """
    rng = np.random.default_rng(seed)
    ranks = np.arange(1, vocab + 1, dtype=float)
    probs = ranks ** -exponent
    probs /= probs.sum()

    def draw(k):
        return [f"v{i}" for i in rng.choice(vocab, size=k, p=probs)]

    phrases = [draw(int(rng.integers(phrase_len[0], phrase_len[1] + 1))) for _ in range(n_phrases)]
    inserts = [p for p in phrases for _ in range(int(rng.integers(repeats[0], repeats[1] + 1)))]
    rng.shuffle(inserts)
    planted = sum(map(len, inserts))
    noise = draw(max(0, n_tokens - planted))
    slots = np.sort(rng.integers(0, len(noise) + 1, size=len(inserts)))
    out: list[str] = []
    prev = 0
    for slot, phrase in zip(slots.tolist(), inserts):
        out.extend(noise[prev:slot])
        out.extend(phrase)
        prev = slot
    out.extend(noise[prev:])
    return out[:n_tokens] if len(out) > n_tokens else out
