"""Compare the compiled and numpy cover kernels, alone and inside a full mining run.

    python benchmarks/bench_kernels.py [--tokens 200000] [--repeat 5]
"""
from __future__ import annotations

import argparse
import json
import sys
import timeit

import numpy as np

from mdlphrase import _pykernels, kernels
from mdlphrase.miner import MiningConfig, mine
from mdlphrase.preprocess import build_sequence
from mdlphrase.synth import zipf_corpus

KERNELS = ("count_pairs", "count_pair", "replace_pair", "expand_symbol")


def best_of(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 1000:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def kernel_timings(cover: np.ndarray, backend, repeat: int) -> dict[str, float]:
    left, right = int(cover[10]), int(cover[11])
    new = int(cover.max()) + 1
    replaced, _ = backend.replace_pair(cover, left, right, new)
    expansion = np.array([left, right])
    return {
        "count_pairs": best_of(lambda: backend.count_pairs(cover), repeat),
        "count_pair": best_of(lambda: backend.count_pair(cover, left, right), repeat),
        "replace_pair": best_of(lambda: backend.replace_pair(cover, left, right, new), repeat),
        "expand_symbol": best_of(lambda: backend.expand_symbol(replaced, new, expansion), repeat),
    }


def mine_timing(seq, backend, failures: int, repeat: int) -> float:
    saved = {name: getattr(kernels, name) for name in KERNELS}
    try:
        for name in KERNELS:
            setattr(kernels, name, getattr(backend, name))
        return min(
            mine(seq, MiningConfig(failure_budget=failures)).wall_time for _ in range(repeat)
        )
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tokens", type=int, default=200_000)
    ap.add_argument("--vocab", type=int, default=5000)
    ap.add_argument("--mine-tokens", type=int, default=50_000)
    ap.add_argument("--failures", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true", help="print machine-readable results")
    args = ap.parse_args(argv)

    if kernels.compiled_backend is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1
    backends = {"cython": kernels.compiled_backend, "numpy": _pykernels}
    cover = build_sequence(zipf_corpus(n_tokens=args.tokens, vocab=args.vocab, seed=0)).tokens
    seq = build_sequence(zipf_corpus(n_tokens=args.mine_tokens, seed=3))

    results = {name: kernel_timings(cover, b, args.repeat) for name, b in backends.items()}
    for name, b in backends.items():
        results[name]["mine"] = mine_timing(seq, b, args.failures, max(1, args.repeat // 2))

    if args.json:
        print(json.dumps(results, indent=2))
        return 0
    print(f"kernels on {args.tokens} tokens; mine on {args.mine_tokens} tokens, f={args.failures}")
    print(f"{'operation':<15}{'cython (ms)':>13}{'numpy (ms)':>13}{'speedup':>10}")
    for op in list(KERNELS) + ["mine"]:
        c, p = results["cython"][op] * 1e3, results["numpy"][op] * 1e3
        print(f"{op:<15}{c:>13.3f}{p:>13.3f}{p / c:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
