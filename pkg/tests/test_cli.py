import cmath
import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from sepbell.cli import UsageError, main, parse_complex, parse_grid
from sepbell.states import PureState, dump_state, werner_state


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_witness_psi_mu(capsys):
    doc = run_json(capsys, "witness", "--n", "2", "--d", "2", "--state", "psi-mu", "--mu", "1", "--pairing", "canonical")
    res = doc["result"]
    assert res["value"][0] == pytest.approx(2) and res["value"][1] == pytest.approx(0, abs=1e-15)
    assert res["verdicts"]["entangled_certified"]


def test_witness_werner_not_certified(capsys):
    res = run_json(capsys, "witness", "--n", "2", "--d", "2", "--state", "werner", "--p", "0.3")["result"]
    assert res["re_part"] == pytest.approx(0.6)
    assert not res["verdicts"]["entangled_certified"]
    assert res["separability"]["violated"] == []


def test_witness_state_file(capsys, tmp_path):
    path = tmp_path / "plus.json"
    path.write_text(dump_state(PureState(1, 2, np.array([1, 1]) / np.sqrt(2))))
    res = run_json(capsys, "witness", "--n", "1", "--d", "2", "--state", f"file:{path}", "--pairing", "canonical")["result"]
    assert res["value"][0] == pytest.approx(1)


def test_witness_density_file_and_explicit_pairing(capsys, tmp_path):
    path = tmp_path / "w.json"
    path.write_text(dump_state(werner_state(2, 3, 0.5)))
    pairing = json.dumps({"dim": 3, "pairs": [[1, 2]], "unpaired": 0, "eta": [1, 0]})
    res = run_json(capsys, "witness", "--n", "2", "--d", "3", "--state", f"file:{path}", "--pairing", pairing)["result"]
    # <psi_max|Sigma|psi_max> over the pair plus the unpaired diagonal, mixed with noise
    pure = (2 * 2 + 1) / 3
    noise = 1 / 9
    assert res["re_part"] == pytest.approx(0.5 * pure + 0.5 * noise)


def test_config_echo_includes_defaults(capsys):
    cfg = run_json(capsys, "enumerate", "--d", "4")["config"]
    for key in ("n", "d", "seed", "format", "cap_dim", "cap_dim_source", "eta", "command"):
        assert key in cfg
    assert cfg["cap_dim_source"] == "default"


def test_enumerate(capsys):
    res = run_json(capsys, "enumerate", "--d", "5", "--eta", "i")["result"]
    assert res["count"] == 15
    assert all(p["eta"] == [0.0, 1.0] for p in res["pairings"])


def test_sweep_werner_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--n", "3", "--d", "2", "--family", "werner", "--grid", "0:1:0.01")
    assert code == 0
    lines = out.splitlines()
    meta = {l.split(":", 1)[0][2:]: l.split(":", 1)[1] for l in lines if l.startswith("#")}
    assert "config" in meta
    assert float(meta["numeric_threshold"]) == pytest.approx(0.25, abs=1e-6)
    rows = list(csv.DictReader(io.StringIO("\n".join(l for l in lines if not l.startswith("#")))))
    assert len(rows) == 101
    crossed = [float(r["p"]) for r in rows if r["sep_violated"] == "1"]
    assert min(crossed) == pytest.approx(0.26)
    for r in rows:
        assert float(r["re"]) == pytest.approx(4 * float(r["p"]), abs=1e-12)
    # 17 significant digits round trip
    assert any(len(r["p"].replace(".", "").lstrip("0")) == 17 for r in rows)


def test_sweep_mu_json(capsys):
    res = run_json(capsys, "sweep", "--n", "2", "--d", "2", "--family", "mu", "--grid", "0:1:0.125", "--format", "json")["result"]
    rows = res["rows"]
    assert len(rows) == 9
    for r in rows:
        mu = cmath.exp(2j * cmath.pi * r["t"])
        assert r["re"] == pytest.approx(2 * mu.real, abs=1e-12)
        assert r["im"] == pytest.approx(2 * mu.imag, abs=1e-12)


def test_scan_exhaustive(capsys):
    res = run_json(capsys, "scan", "--n", "2", "--d", "4", "--state", "werner", "--p", "0.8", "--strategy", "exhaustive")["result"]
    assert res["examined"] == 9 and res["total_combinations"] == 9
    assert res["best"]["re_part"] == pytest.approx(1.6)


def test_sample(capsys):
    res = run_json(capsys, "sample", "--n", "2", "--d", "2", "--state", "werner", "--p", "0.6", "--shots", "20000", "--seed", "4")["result"]
    assert abs(res["re"]["mean"] - 1.2) <= 5 * res["re"]["std_error"]
    assert res["re"]["num_settings"] == 2


def test_verify_small(capsys):
    code, out, err = run(capsys, "verify", "--n", "1", "--d", "2", "--shots", "2000")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["all_passed"]
    assert "[PASS]" in err and "[FAIL]" not in err


def test_usage_errors(capsys):
    assert run(capsys, "witness", "--n", "0")[0] == 2
    assert run(capsys, "witness", "--state", "bogus")[0] == 2
    assert run(capsys, "witness", "--state", "file:/nonexistent/x.json")[0] == 2
    assert run(capsys, "witness", "--n", "2", "--d", "2", "--pairing", '{"dim": 3, "pairs": [[0, 1]], "unpaired": 2}')[0] == 2
    assert run(capsys, "witness", "--format", "csv")[0] == 2
    assert run(capsys, "sweep", "--grid", "1:0:0.1")[0] == 2
    assert run(capsys, "witness", "--state", "werner", "--p", "1.5")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["witness", "--mu", "nonsense"])
    assert exc.value.code == 2


def test_size_cap_exit_code(capsys, monkeypatch):
    code, _, err = run(capsys, "witness", "--n", "20", "--d", "2", "--state", "werner")
    assert code == 3 and "cap" in err
    monkeypatch.setenv("SEPBELL_CAP_DIM", "8")
    assert run(capsys, "witness", "--n", "4", "--d", "2")[0] == 3
    doc = run_json(capsys, "witness", "--n", "3", "--d", "2")
    assert doc["config"]["cap_dim"] == 8 and doc["config"]["cap_dim_source"] == "env:SEPBELL_CAP_DIM"
    doc = run_json(capsys, "witness", "--n", "3", "--d", "2", "--cap-dim", "16")
    assert doc["config"]["cap_dim_source"] == "flag"


def test_output_files_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "sub" / "b.json"
    argv = ["sample", "--n", "2", "--d", "3", "--state", "separable", "--seed", "11", "--shots", "500"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert not [p for p in tmp_path.rglob("*.tmp")]


def test_parse_helpers():
    assert parse_complex("-i") == -1j
    assert parse_complex("phase:0.5") == pytest.approx(1j)
    assert parse_grid("0:1:0.25") == [0, 0.25, 0.5, 0.75, 1]
    with pytest.raises(UsageError):
        parse_grid("0:1")
    with pytest.raises(UsageError):
        parse_complex("x")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sepbell", "enumerate", "--d", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["count"] == 3
