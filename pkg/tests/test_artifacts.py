from conftest import seq
from mdlphrase.artifacts import (
    grammar_from_dict,
    grammar_to_dict,
    pattern_records,
    read_events,
    read_json,
    read_patterns,
    read_rules_csv,
    write_events,
    write_json,
    write_patterns,
    write_rules_csv,
)
from mdlphrase.miner import MiningConfig, mine
from mdlphrase.sequitur import expand_rules, sequitur_mine
from mdlphrase.synth import PlantSpec, planted_corpus


def test_patterns_and_events_roundtrip(tmp_path):
    s = seq(planted_corpus(PlantSpec(noise_vocab=15, seed=2)))
    result = mine(s, MiningConfig(failure_budget=100))
    records = pattern_records(result)
    write_patterns(tmp_path / "p.json", records)
    assert read_patterns(tmp_path / "p.json") == records
    write_events(tmp_path / "e.csv", result.events)
    assert read_events(tmp_path / "e.csv") == result.events
    header = (tmp_path / "e.csv").read_text().splitlines()[0].split(",")
    assert header[:8] == [
        "step", "kind", "pattern_id", "phrase_length", "count",
        "total_bits_before", "total_bits_after", "cumulative_failures",
    ]


def test_grammar_roundtrip(tmp_path):
    s = seq("a b c a b c d a b c d")
    g = sequitur_mine(s)
    write_json(tmp_path / "g.json", grammar_to_dict(g, s.vocabulary))
    back, vocab = grammar_from_dict(read_json(tmp_path / "g.json"))
    assert back.start == g.start and back.rules == g.rules and back.usage == g.usage
    assert vocab == s.vocabulary
    assert back.expand() == s.tokens.tolist()


def test_rules_csv_roundtrip(tmp_path):
    s = seq("a b c a b c d a b c d")
    rules = expand_rules(sequitur_mine(s))
    write_rules_csv(tmp_path / "r.csv", rules, s.vocabulary)
    rows = read_rules_csv(tmp_path / "r.csv")
    assert [(r["length"], r["usage"], r["references"]) for r in rows] == [
        (r.length, r.usage, r.references) for r in rules
    ]
    assert rows[0]["rule_id"].startswith("R")
