"""Phrase mining by minimum description length, with a Sequitur baseline."""
from __future__ import annotations

__version__ = "0.1.0"

from .encoding import AddPattern, EncodingError, RemovePattern, delta_gain, total_length
from .kernels import BACKEND
from .miner import MiningConfig, MiningResult, TieBreak, mine
from .model import ModelState, decode
from .preprocess import ConfigurationError, apply_placeholders, build_sequence, tokenize
from .sequitur import expand_rules, filter_rules, sequitur_mine

__all__ = [
    "__version__",
    "BACKEND",
    "AddPattern",
    "RemovePattern",
    "EncodingError",
    "ConfigurationError",
    "MiningConfig",
    "MiningResult",
    "ModelState",
    "TieBreak",
    "apply_placeholders",
    "build_sequence",
    "decode",
    "delta_gain",
    "expand_rules",
    "filter_rules",
    "mine",
    "sequitur_mine",
    "tokenize",
    "total_length",
]
