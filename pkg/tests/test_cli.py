import json
import subprocess
import sys

import pytest

from trie_smooth import dump_pfa, make_convex, make_del, make_ins, make_sub
from trie_smooth.cli import main


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, pfa in (("sub", make_sub(0.5)), ("ins", make_ins(0.5, 0.5)), ("del", make_del(0.2)),
                      ("mix", make_convex((0.4, 0.3, 0.3), 0.3, 0.5, 0.5, 0.5))):
        paths[name] = tmp_path / f"{name}.json"
        dump_pfa(pfa, paths[name])
    cfg = {"pfa": "sub.json", "family": {"block": "1"}, "n": 16, "trials": 5, "depth_cap": 48}
    paths["cfg"] = tmp_path / "cfg.json"
    paths["cfg"].write_text(json.dumps(cfg))
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_exit_codes(files, capsys):
    code, out, _ = run(capsys, "check", "--pfa", files["sub"])
    assert code == 0 and "verdict: Logarithmic" in out
    code, out, _ = run(capsys, "check", "--pfa", files["del"])
    assert code == 2 and "Unbounded" in out


def test_degenerate_exit_code(tmp_path, capsys):
    doc = {
        "alphabet": ["0", "1"], "input_states": ["s"], "output_states": ["q"], "initial": {"s": 1.0},
        "read": [{"from": "s", "symbol": "0", "to": "s", "p": 1.0}, {"from": "s", "symbol": "1", "to": "q", "p": 1.0}],
        "write": [{"from": "q", "symbol": "1", "to": "s", "p": 1.0}],
    }
    path = tmp_path / "deg.json"
    path.write_text(json.dumps(doc))
    assert run(capsys, "check", "--pfa", path)[0] == 3


def test_validate_and_classify(files, tmp_path, capsys):
    assert run(capsys, "validate", "--pfa", files["sub"])[:2] == (0, "ok\n")
    doc = json.loads(files["sub"].read_text())
    doc["write"][0]["p"] = 0.1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", "--pfa", bad)
    assert code == 1 and "write[0]" in out
    code, out, _ = run(capsys, "classify", "--pfa", files["del"], "--json")
    flags = json.loads(out)
    assert flags["is_read_semi_deterministic"] and not flags["is_read_deterministic"]


def test_gamma_and_bounds(files, capsys):
    code, out, _ = run(capsys, "gamma", "--pfa", files["ins"], "--json")
    assert code == 0 and abs(json.loads(out)["gamma"] - 0.875) < 1e-9
    code, out, err = run(capsys, "gamma", "--pfa", files["del"])
    assert code == 1 and "Unbounded" in err
    code, out, _ = run(capsys, "lower-bound", "--pfa", files["sub"], "--n", 1024, "--epsilon", 0.1, "--json")
    assert json.loads(out)["lower_bound"] == pytest.approx(18.0)
    code, out, err = run(capsys, "lower-bound", "--pfa", files["mix"], "--n", 1024)
    assert code == 1 and "read-semi-deterministic" in err
    code, out, _ = run(capsys, "report", "--pfa", files["sub"], "--n", 1024, "--epsilon", 0.1)
    assert json.loads(out)["bounds"]["upper"] == 22


def test_coincidence(files, capsys):
    code, out, _ = run(capsys, "coincidence", "--pfa", files["sub"], "--input", '{"prefix": "", "period": "0"}',
                       "--m", 3, "--json")
    assert json.loads(out)["lower"] == pytest.approx(0.125)
    code, out, _ = run(capsys, "coincidence", "--pfa", files["sub"], "--input", '{"prefix": "", "period": "0"}',
                       "--m", 3, "--mc", 20000, "--json")
    got = json.loads(out)
    assert abs(got["estimate"] - 0.125) < 4 * got["stderr"]


def test_simulate_and_sweep(files, tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--config", files["cfg"])
    assert code == 0 and out.startswith("n,mean_height")
    out_path = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "sweep", "--config", files["cfg"], "--n", "8,16", "--out", out_path)
    assert code == 0 and out == ""
    assert len(out_path.read_text().splitlines()) == 3


def test_make_pfa(tmp_path, capsys):
    path = tmp_path / "x.json"
    assert run(capsys, "make-pfa", "ins", "--p", 0.3, "--q", 0.4, "--out", path)[0] == 0
    assert run(capsys, "validate", "--pfa", path)[0] == 0
    code, _, err = run(capsys, "make-pfa", "ins", "--p", 0.3, "--out", path)
    assert code == 1 and "--q" in err


def test_missing_file_is_a_clean_error(capsys, tmp_path):
    code, _, err = run(capsys, "check", "--pfa", tmp_path / "nope.json")
    assert code == 1 and err.startswith("error:")


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "trie_smooth", "check", "--pfa", str(files["sub"])],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "Logarithmic" in proc.stdout
