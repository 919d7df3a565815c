import csv
import io
import json
import math
import subprocess
import sys

import pytest

from pttrimmer import __version__
from pttrimmer.cli import EVOLVE_COLUMNS, SPECTRUM_COLUMNS, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = text.splitlines()
    header = [line for line in lines if line.startswith("#")]
    body = [line for line in lines if not line.startswith("#")]
    return header, list(csv.DictReader(io.StringIO("\n".join(body))))


def test_spectrum_columns_and_values(capsys):
    code, out, _ = run(["spectrum", "--j-min", "0.5", "--j-max", "2", "--steps", "4"], capsys)
    assert code == 0
    header, rows = parse_csv(out)
    assert header[0] == f"# pttrimmer {__version__} spectrum"
    config = json.loads(header[1].removeprefix("# config: "))
    assert config["n_steps"] == 4 and config["gamma"] == 1.0
    assert list(rows[0]) == SPECTRUM_COLUMNS
    assert [r["phase"] for r in rows] == ["Broken", "Symmetric", "Symmetric", "Symmetric"]
    last = rows[-1]
    assert float(last["j"]) == 2.0
    assert float(last["re_ep"]) == pytest.approx(5 + math.sqrt(7), abs=1e-12)
    assert float(last["im_ep"]) == 0
    assert float(last["abs_a_plus"]) == pytest.approx(1, abs=1e-12)
    first = rows[0]
    assert float(first["im_ep"]) == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert float(first["pt_residual_e_plus"]) > 0.5


def test_spectrum_single_point_at_ep(capsys):
    ep = repr(1 / math.sqrt(2))
    code, out, _ = run(["spectrum", "--j-min", ep, "--j-max", ep], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 1 and rows[0]["phase"] == "ExceptionalPoint"


def test_spectrum_default_sweep_and_json(capsys):
    code, out, _ = run(["spectrum", "--format", "json"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert len(payload["rows"]) == 200
    assert payload["rows"][0]["j"] == 0.05 and payload["rows"][-1]["j"] == 2.0


def test_evolve_output(tmp_path, capsys):
    path = tmp_path / "evolve.csv"
    code, out, _ = run(["evolve", "--initial", "active", "--t-max", "1", "--points", "11",
                        "--out", str(path)], capsys)
    assert code == 0 and out == ""
    header, rows = parse_csv(path.read_text())
    assert header[0].endswith(" evolve")
    assert list(rows[0]) == EVOLVE_COLUMNS
    assert len(rows) == 11
    assert float(rows[0]["p_active"]) == 1.0 and float(rows[0]["p_passive"]) == 0.0
    assert float(rows[-1]["t"]) == 1.0


def test_evolve_at_ep(capsys):
    ep = repr(1 / math.sqrt(2))
    code, _, err = run(["evolve", "--j", ep, "--t-max", "1", "--points", "5"], capsys)
    assert code == 2 and "exceptional point" in err
    code, out, _ = run(["evolve", "--j", ep, "--t-max", "1", "--points", "5", "--method", "rk4"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 5


def test_output_is_deterministic(tmp_path, capsys):
    args = ["evolve", "--j", "0.5", "--t-max", "3", "--points", "31"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gamma": 2, "j": 3, "n_points": 3, "t_max": 1}))
    code, out, _ = run(["evolve", "--config", str(cfg), "--j", "4"], capsys)
    assert code == 0
    header, rows = parse_csv(out)
    config = json.loads(header[1].removeprefix("# config: "))
    assert config["gamma"] == 2.0 and config["j"] == 4.0 and config["omega"] == 5.0
    assert config["n_points"] == 3 and isinstance(config["n_points"], int)
    assert len(rows) == 3


@pytest.mark.parametrize("content", ['{"bogus": 1}', "[1, 2]", "not json", '{"gamma": "x"}', '{"n_points": 2.5}'])
def test_bad_config(tmp_path, capsys, content):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(content)
    code, _, err = run(["evolve", "--config", str(cfg)], capsys)
    assert code == 2 and err.startswith("pttrimmer: error:")


@pytest.mark.parametrize("argv", [
    ["spectrum", "--gamma", "-1"],
    ["spectrum", "--j-min", "2", "--j-max", "1"],
    ["spectrum", "--steps", "1"],
    ["evolve", "--points", "1"],
    ["evolve", "--t-max", "0"],
    ["evolve", "--j", "nan"],
])
def test_invalid_values(capsys, argv):
    code, _, err = run(argv, capsys)
    assert code == 2 and "error" in err


def test_unwritable_output(tmp_path, capsys):
    code, _, err = run(["spectrum", "--steps", "3", "--out", str(tmp_path / "missing" / "x.csv")], capsys)
    assert code == 2 and "cannot write" in err


def test_verify_report(capsys):
    code, out, _ = run(["verify", "--t-max", "2", "--points", "201"], capsys)
    report = json.loads(out)
    assert code == 0 and report["passed"] and report["failures"] == []
    names = {c["name"] for c in report["checks"]}
    assert {"ep_location", "printed_beta_symmetric_gamma0", "printed_beta_broken_sign"} <= names
    info = [c for c in report["checks"] if c["informational"]]
    assert info and all(c["measured"] is not None for c in info)


def test_verify_fault_injection(capsys):
    code, out, _ = run(["verify", "--t-max", "2", "--points", "201", "--tolerance-scale", "0"], capsys)
    report = json.loads(out)
    assert code == 1 and not report["passed"] and report["failures"]


def test_verify_hermitian_limit(capsys):
    code, out, _ = run(["verify", "--gamma", "0", "--j", "1", "--t-max", "2", "--points", "201"], capsys)
    report = json.loads(out)
    assert code == 0
    names = {c["name"] for c in report["checks"]}
    assert any("unitar" in n for n in names) and any("period" in n for n in names)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pttrimmer", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
