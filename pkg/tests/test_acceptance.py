"""One test per acceptance criterion; each records a PASS/FAIL/SKIP line."""
from __future__ import annotations

import functools
import json
import os
import time
from itertools import product
from pathlib import Path

import numpy as np
import pytest

import oracle
from conftest import CRITERIA, oracle_total, oracle_view, random_tokens, seq
from mdlphrase.analysis import compare_long_frequent, compression_curve
from mdlphrase.artifacts import pattern_records
from mdlphrase.cli import main
from mdlphrase.encoding import total_length
from mdlphrase.miner import MiningConfig, mine
from mdlphrase.preprocess import apply_placeholders, build_sequence, default_rules, tokenize
from mdlphrase.sequitur import check_invariants, expand_rules, sequitur_mine
from mdlphrase.synth import PlantSpec, planted_corpus, zipf_corpus

USC_ENV = "MDLPHRASE_TITLE15_TEXT"


def criterion(name):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except pytest.skip.Exception as exc:
                CRITERIA.append((name, "SKIP", str(exc)))
                print(f"SKIP {name}: {exc}")
                raise
            except BaseException as exc:
                CRITERIA.append((name, "FAIL", f"{type(exc).__name__}: {exc}".splitlines()[0]))
                print(f"FAIL {name}")
                raise
            CRITERIA.append((name, "PASS", detail or ""))
            print(f"PASS {name}: {detail}")

        return run

    return wrap


def test_lossless_random_corpora():
    @criterion("losslessness on 200 random corpora")
    def check():
        rng = np.random.default_rng(20240101)
        started = time.perf_counter()
        patterns = 0
        for _ in range(200):  # |S| <= 5000, |V| <= 50
            n = int(rng.integers(1, 5001))
            v = int(rng.integers(1, 51))
            tokens = random_tokens(rng, n, v)
            if rng.random() < 0.5:
                # splice in repeated random motifs so there is something to mine
                for _ in range(int(rng.integers(1, 4))):
                    motif = random_tokens(rng, int(rng.integers(2, 10)), v)
                    for pos in rng.integers(0, n, size=int(rng.integers(2, 40))):
                        tokens[pos:pos + len(motif)] = motif
                tokens = tokens[:5000]
            s = seq(tokens)
            result = mine(s)
            assert np.array_equal(result.decode(), s.tokens)
            result.state.check()
            patterns += len(result.patterns)
        elapsed = time.perf_counter() - started
        assert elapsed < 60, f"took {elapsed:.1f}s"
        return f"200/200 decoded exactly, {patterns} patterns total, {elapsed:.1f}s (< 60s)"

    check()


def small_corpora():
    """Every sequence of length <= 6 over 3 symbols, plus 600 random ones up to 20 over 5."""
    for n in range(1, 7):
        for tup in product("abc", repeat=n):
            yield list(tup)
    rng = np.random.default_rng(7)
    for k in range(600):
        n = int(rng.integers(1, 21))
        v = int(rng.integers(1, 6))
        if k % 2:
            motif = [f"t{i}" for i in rng.integers(0, v, size=int(rng.integers(1, 5)))]
            out = (motif * 20)[:n]
            flips = rng.integers(0, n, size=int(rng.integers(0, 3)))
            for f in flips:
                out[f] = f"t{int(rng.integers(0, v))}"
            yield out
        else:
            yield random_tokens(rng, n, v)


def test_encoding_oracle_equivalence():
    @criterion("encoding oracle equivalence (|S|<=20, |V|<=5) within 1e-9 at every step")
    def check():
        worst = 0.0
        states = 0
        corpora = 0
        for tokens in small_corpora():
            corpora += 1
            s = seq(tokens)
            errs = []

            def on_event(event, state):
                errs.append(abs(total_length(state) - oracle_total(state)))

            result = mine(s, on_event=on_event)
            errs.append(abs(result.baseline_bits - sum(oracle.total_bits(tokens, tokens, {}))))
            worst = max(worst, *errs)
            states += len(errs)
        assert worst <= 1e-9, f"max deviation {worst:.3g} bits"
        return f"{corpora} corpora, {states} states, max |diff| = {worst:.2e} bits"

    check()


def hypothetical_add(view, left, right, new_sym):
    tokens, cover, exps = view
    flat = lambda s: exps.get(s, (s,))  # noqa: E731
    new_cover, _ = oracle.replace_greedy(cover, left, right, new_sym)
    new_exps = dict(exps)
    new_exps[new_sym] = tuple(flat(left)) + tuple(flat(right))
    return sum(oracle.total_bits(tokens, cover, exps)) - sum(oracle.total_bits(tokens, new_cover, new_exps))


def hypothetical_remove(view, sym):
    tokens, cover, exps = view
    rest = {k: v for k, v in exps.items() if k != sym}
    return sum(oracle.total_bits(tokens, cover, exps)) - sum(
        oracle.total_bits(tokens, oracle.expand(cover, sym, exps[sym]), rest)
    )


def soundness_corpora():
    rng = np.random.default_rng(99)
    for k in range(50):
        spec = PlantSpec(
            phrase_len=int(rng.integers(2, 7)),
            repeats=int(rng.integers(2, 15)),
            noise_tokens=int(rng.integers(20, 300)),
            noise_vocab=int(rng.integers(2, 12)),
            phrases=int(rng.integers(1, 3)),
            seed=k,
        )
        yield planted_corpus(spec)


def test_acceptance_soundness():
    @criterion("acceptance soundness over 50 runs (oracle replay)")
    def check():
        decisions = agree = 0
        counts = {"accept": 0, "reject": 0, "prune": 0}
        for tokens in soundness_corpora():
            s = seq(tokens)
            pre = [oracle_view_initial(s)]
            log = []

            def on_event(event, state):
                view = pre[-1]
                if event.kind == "prune":
                    sym = state.pattern_symbol(event.pattern_id)
                    log.append((event.kind, hypothetical_remove(view, sym) >= 0))
                else:
                    new_sym = state.n_vocab + len(state.registry) - (event.kind == "accept")
                    log.append((event.kind, hypothetical_add(view, event.left, event.right, new_sym) > 0))
                pre.append(oracle_view(state))

            mine(s, MiningConfig(failure_budget=10_000), on_event)
            for kind, oracle_says_commit in log:
                decisions += 1
                counts[kind] += 1
                agree += oracle_says_commit == (kind != "reject")
        assert agree == decisions, f"{decisions - agree} disagreements"
        assert counts["accept"] > 0 and counts["reject"] > 0
        return f"{agree}/{decisions} decisions agree ({counts})"

    check()


def oracle_view_initial(s):
    tokens = s.tokens.tolist()
    return tokens, list(tokens), {}


def all_event_logs():
    rng = np.random.default_rng(5)
    for k in range(30):
        n = int(rng.integers(50, 3000))
        v = int(rng.integers(2, 30))
        yield mine(seq(random_tokens(rng, n, v))).events
    for k in range(10):
        yield mine(seq(planted_corpus(PlantSpec(noise_vocab=int(rng.integers(5, 100)), seed=k)))).events
    yield mine(seq(zipf_corpus(n_tokens=10_000, vocab=500, seed=1)), MiningConfig(failure_budget=1000)).events


def test_monotone_compression():
    @criterion("monotone compression in every event log")
    def check():
        logs = accepts = prunes = 0
        for events in all_event_logs():
            logs += 1
            for e in events:
                if e.kind == "accept":
                    accepts += 1
                    assert e.total_bits_after < e.total_bits_before
                elif e.kind == "prune":
                    prunes += 1
                    assert e.total_bits_after <= e.total_bits_before
            values = [c for _, c in compression_curve(events)]
            assert all(b >= a for a, b in zip(values, values[1:]))
        return f"{logs} logs, {accepts} accepts strictly decrease, {prunes} prunes never increase"

    check()


def test_planted_pattern_recovery():
    @criterion("planted 8-token phrase x50 in 2000 noise tokens, f=1000")
    def check():
        spec = PlantSpec(phrase_len=8, repeats=50, noise_tokens=2000, noise_vocab=100, seed=7)
        s = seq(planted_corpus(spec))
        started = time.perf_counter()
        result = mine(s, MiningConfig(failure_budget=1000))
        elapsed = time.perf_counter() - started
        planted = [f"w0_{i}" for i in range(8)]
        found = [r for r in pattern_records(result) if r.expansion == planted]
        assert found, "planted phrase not mined"
        assert elapsed < 10
        return f"found with {found[0].occurrences} occurrences in {elapsed:.3f}s (< 10s)"

    check()


def test_parameter_freeness(tmp_path):
    @criterion("pattern set byte-identical across reporting thresholds")
    def check():
        tokens = tmp_path / "z.tokens"
        tokens.write_text("\n".join(zipf_corpus(n_tokens=8000, vocab=300, seed=2)) + "\n", encoding="utf-8")
        blobs = set()
        events = set()
        thresholds = [(5, 10), (1, 1), (2, 50), (20, 3)]
        for i, (length, freq) in enumerate(thresholds):
            out = tmp_path / f"run{i}"
            assert main(["mine", str(tokens), "-o", str(out), "--failures", "2000",
                         "--min-length", str(length), "--min-freq", str(freq)]) == 0
            blobs.add((out / "patterns.json").read_bytes())
            events.add((out / "events.csv").read_bytes())
            stats = json.loads((out / "stats.json").read_text())
            assert stats["extra"]["min_length"] == length
        assert len(blobs) == 1 and len(events) == 1
        n = len(json.loads(blobs.pop()))
        return f"{len(thresholds)} threshold settings -> one patterns.json ({n} patterns)"

    check()


def test_sequitur_invariants():
    @criterion("Sequitur invariants and losslessness on 100 random corpora")
    def check():
        rng = np.random.default_rng(31)
        rules = 0
        for k in range(100):
            n = int(rng.integers(1, 4000))
            v = int(rng.integers(1, 40))
            if k % 3 == 0:
                motif = rng.integers(0, v, size=int(rng.integers(2, 9))).tolist()
                tokens = []
                while len(tokens) < n:
                    tokens.extend(motif if rng.random() < 0.5 else rng.integers(0, v, size=3).tolist())
            else:
                tokens = rng.integers(0, v, size=n).tolist()
            g = sequitur_mine(tokens)
            assert g.expand() == tokens
            problems = check_invariants(g)
            assert problems == [], problems[:3]
            rules += len(g.rules)
        return f"100/100 grammars valid and lossless ({rules} rules)"

    check()


def test_comparison_property():
    @criterion("planted corpora give MDL long-and-frequent count >= 1")
    def check():
        counts = []
        for phrase_len, repeats, seed in [(5, 10, 1), (8, 50, 2), (12, 20, 3), (6, 15, 4)]:
            tokens = planted_corpus(PlantSpec(phrase_len=phrase_len, repeats=repeats, seed=seed))
            s = seq(tokens)
            result = mine(s, MiningConfig(failure_budget=1000))
            rules = expand_rules(sequitur_mine(s))
            rec = compare_long_frequent(
                [(r.length, r.occurrences) for r in pattern_records(result)],
                [(r.length, r.usage) for r in rules],
            )
            assert rec.mdl_qualifying >= 1, (phrase_len, repeats, rec)
            counts.append((phrase_len, repeats, rec.mdl_qualifying, rec.sequitur_qualifying))
        return "(len, repeats, mdl, sequitur) = " + ", ".join(map(str, counts))

    check()


def test_failure_budget_sensitivity(tmp_path):
    @criterion("failure-budget sweep f in {1000, 10000} on 50k tokens")
    def check():
        tokens = tmp_path / "zipf50k.tokens"
        tokens.write_text("\n".join(zipf_corpus(n_tokens=50_000, seed=3)) + "\n", encoding="utf-8")
        out = tmp_path / "sweep"
        assert main(["sweep", str(tokens), "-o", str(out), "--failures", "1000", "10000"]) == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        header = lines[0].split(",")
        rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
        comp = {int(r["failures"]): float(r["compression_percent"]) for r in rows}
        times = {int(r["failures"]): float(r["wall_time"]) for r in rows}
        assert comp[10_000] >= comp[1_000]
        return ", ".join(f"f={f}: {comp[f]:.2f}% in {times[f]:.2f}s" for f in sorted(comp))

    check()


def test_title15_integration():
    @criterion("optional Title 15 integration (non-gating)")
    def check():
        path = os.environ.get(USC_ENV)
        if not path or not Path(path).is_file():
            pytest.skip(f"set {USC_ENV} to a plain-text Title 15 to run")
        text = Path(path).read_text(encoding="utf-8")
        s = build_sequence(tokenize(apply_placeholders(text, default_rules())))
        result = mine(s, MiningConfig(failure_budget=10_000))
        target = "use of the mails or any means or instrumentality of interstate commerce".split()
        hits = [r for r in pattern_records(result) if r.expansion == target]
        assert hits, "target phrase not mined as a pattern"
        count = hits[0].occurrences
        assert abs(count - 56) <= 5.6, f"count {count}"
        return f"found with count {count}"

    check()
