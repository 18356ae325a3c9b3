import csv
import io
import json

import pytest

from trie_smooth import (
    AdversarialFamily,
    Alphabet,
    ExperimentConfig,
    StarLikeError,
    format_csv,
    generate_family,
    lcp,
    make_convex,
    make_del,
    make_sub,
    run_height_experiment,
    sweep_n,
    write_csv,
)
from trie_smooth.harness import CSV_COLUMNS, LABEL, default_repetitions, thread_count

B = Alphabet.binary()


def test_common_prefix_family():
    fam = AdversarialFamily(block="1", repetitions=64)
    a, b = generate_family(fam, 2, B)
    assert a.prefix == (1,) * 64 + (0,) and b.prefix == (1,) * 64 + (1,)
    assert a.period == (1,)
    assert lcp(a, b, 200).value == 64
    strings = generate_family(AdversarialFamily(block="10", repetitions=5), 8, B)
    assert all(s.window(10) == (1, 0) * 5 for s in strings)
    assert len({s.prefix for s in strings}) == 8
    with pytest.raises(ValueError):
        generate_family(AdversarialFamily(repetitions=4, tail_width=2), 5, B)


def test_list_families(tmp_path):
    specs = [{"prefix": "", "period": "01"}, {"prefix": "1", "period": "0"}]
    fam = AdversarialFamily(kind="periodic", strings=specs)
    assert [s.to_json() for s in generate_family(fam, 2, B)] == specs
    with pytest.raises(ValueError):
        generate_family(fam, 3, B)
    same = AdversarialFamily(kind="periodic", strings=[{"prefix": "", "period": "01"}, {"prefix": "01", "period": "01"}])
    with pytest.raises(ValueError, match="equal"):
        generate_family(same, 2, B)
    (tmp_path / "strings.json").write_text(json.dumps(specs))
    loaded = AdversarialFamily.from_json({"kind": "explicit", "file": "strings.json"}, tmp_path)
    assert len(generate_family(loaded, 2, B)) == 2
    with pytest.raises(ValueError):
        AdversarialFamily(kind="random")


def test_default_repetitions_cover_the_window():
    assert default_repetitions("1", 256, 22) == 256
    assert default_repetitions("10", 100, 30) == 120


def test_config_invariants():
    with pytest.raises(ValueError):
        ExperimentConfig(pfa=make_sub(0.5), n=1)
    with pytest.raises(ValueError):
        ExperimentConfig(pfa=make_sub(0.5), trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(pfa=make_sub(0.5), depth_cap=0)
    assert ExperimentConfig(pfa=make_sub(0.5)).cap_for(1024) == 16 * 10 + 64


def test_config_loading(tmp_path):
    from trie_smooth import dump_pfa
    dump_pfa(make_sub(0.5), tmp_path / "sub.json")
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "pfa": "sub.json", "family": {"block": "1"}, "n": 8, "trials": 3,
        "budget": {"m": 40, "L": 500}, "seed": 5,
    }))
    cfg = ExperimentConfig.load(cfg_path)
    assert cfg.n == 8 and cfg.m == 40 and cfg.max_input_len == 500 and cfg.seed == 5


def test_experiment_statistics_and_reproducibility():
    cfg = ExperimentConfig(pfa=make_sub(0.5), n=64, trials=12, depth_cap=64, seed=3)
    a = run_height_experiment(cfg)
    assert a == run_height_experiment(cfg)
    assert a.trials == 12 and a.saturated == 0 and a.label == LABEL
    assert a.min <= a.mean <= a.max
    assert a.gamma == pytest.approx(0.5) and a.upper_bound == 14 and a.lower_bound == pytest.approx(10.8)
    assert a.verdict == "Logarithmic"


def test_thread_count_does_not_change_results(monkeypatch):
    cfg = ExperimentConfig(pfa=make_sub(0.3), n=32, trials=6, depth_cap=48)
    assert run_height_experiment(cfg, threads=1) == run_height_experiment(cfg, threads=3)
    monkeypatch.setenv("TRIE_SMOOTH_THREADS", "2")
    assert thread_count() == 2
    monkeypatch.delenv("TRIE_SMOOTH_THREADS")
    assert thread_count() == 1


def test_deep_agreement_triggers_second_stage():
    # a cap above the first sampling stage, with near-certain long agreement
    cfg = ExperimentConfig(pfa=make_sub(0.02), n=4, trials=10, depth_cap=100, seed=1)
    stats = run_height_experiment(cfg)
    assert stats.saturated + sum(h is not None and h >= 64 for h in stats.heights) > 0


def test_unbounded_experiment_runs_without_bounds():
    cfg = ExperimentConfig(pfa=make_del(0.2), family=AdversarialFamily(repetitions=512), n=16, trials=5,
                           depth_cap=128)
    stats = run_height_experiment(cfg)
    assert stats.verdict == "Unbounded" and stats.saturated == 5 and stats.mean is None
    assert stats.unreliable
    row = stats.row()
    assert row["gamma"] is None and row["upper_bound"] is None and row["lower_bound"] is None


def test_non_star_like_is_rejected():
    from trie_smooth import Pfa
    read = {("s", "0", "q0"): 1.0, ("s", "1", "q1"): 1.0}
    write = {("q0", "0", "q1"): 0.5, ("q0", "0", "s"): 0.5, ("q1", "1", "s"): 1.0}
    pfa = Pfa.from_tables(B, ["s"], ["q0", "q1"], read, write, {"s": 1.0})
    with pytest.raises(StarLikeError):
        run_height_experiment(ExperimentConfig(pfa=pfa, n=4))


def test_non_semi_deterministic_pfa_has_no_lower_bound():
    cfg = ExperimentConfig(pfa=make_convex((0.4, 0.3, 0.3), 0.3, 0.5, 0.5, 0.5), n=16, trials=3, depth_cap=64)
    stats = run_height_experiment(cfg)
    assert stats.upper_bound is not None and stats.lower_bound is None and stats.P is None


def test_csv_schema(tmp_path):
    cfg = ExperimentConfig(pfa=make_sub(0.5), n=16, trials=4, depth_cap=40)
    rows = sweep_n(cfg, [16, 32])
    text = format_csv(rows)
    parsed = list(csv.reader(io.StringIO(text)))
    assert tuple(parsed[0]) == CSV_COLUMNS
    assert [r[0] for r in parsed[1:]] == ["16", "32"]
    assert format_csv(sweep_n(cfg, [])) == ",".join(CSV_COLUMNS) + "\n"
    write_csv(rows, tmp_path / "out.csv")
    assert (tmp_path / "out.csv").read_text() == text


def test_csv_float_precision():
    from trie_smooth.harness import _cell
    assert _cell(1 / 3) == "0.333333333333"
    assert _cell(None) == "" and _cell(7) == "7"
