import json
import shutil
import subprocess

import pytest

from modtransfer import __version__
from modtransfer.cli import main, resolve_config
from modtransfer.errors import DomainError
from modtransfer.io import parse_complex, read_table


@pytest.fixture(autouse=True)
def _isolated_env(tmp_path, monkeypatch):
    for k in list(__import__("os").environ):
        if k.startswith("MODTRANSFER_"):
            monkeypatch.delenv(k)
    monkeypatch.setenv("MODTRANSFER_CACHE_DIR", str(tmp_path / "cache"))


@pytest.fixture(scope="module")
def pf_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("pf") / "pf.csv"
    assert main(["periodfn", "--R", "9.5337", "--out", str(p)]) == 0
    return p


def _body(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


# ---------------------------------------------------------------- lengths and zeta

def test_lengths_smallest(capsys, tmp_path):
    assert main(["lengths", "--max-trace", "3"]) == 0
    out = capsys.readouterr().out
    assert f"# version = {__version__}" in out
    body = _body(out)
    assert body[0] == "trace,length,multiplicity,necklaces"
    assert body[1:] == ["3,1.9248473002384139,1,12"]
    assert (tmp_path / "cache" / "length_spectrum.json").exists()


def test_lengths_oracle(capsys):
    assert main(["lengths", "--max-trace", "12", "--verify-oracle", "--no-cache"]) == 0
    assert "agree" in capsys.readouterr().err
    assert main(["lengths", "--max-trace", "12", "--verify-oracle", "--word-bound", "8"]) == 1
    assert "unresolved" in capsys.readouterr().err


def test_zeta(capsys):
    assert main(["zeta", "--torus", "--s", "1"]) == 0
    row = _body(capsys.readouterr().out)[1].split(",")
    assert parse_complex(row[1]).real == pytest.approx(0.39957640089372805, abs=1e-15)
    assert main(["zeta", "--s", "2", "--max-trace", "3", "--k-max", "1"]) == 0
    row = _body(capsys.readouterr().out)[1].split(",")
    assert parse_complex(row[1]).real == pytest.approx(0.975674250694001849726893186788, abs=1e-14)


@pytest.mark.parametrize("argv", [
    ["zeta", "--s", "0.5"],
    ["zeta"],
    ["scan", "--r", "5:1:0.1"],
    ["scan", "--r", "garbage"],
    ["scan", "--N", "3"],
    ["lengths", "--max-trace", "-2"],
])
def test_domain_errors_exit_1(argv, capsys):
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_env_validation(monkeypatch):
    monkeypatch.setenv("MODTRANSFER_N", "3")
    assert main(["scan", "--r", "9.5:9.6:0.01"]) == 1
    monkeypatch.setenv("MODTRANSFER_N", "abc")
    assert main(["scan", "--r", "9.5:9.6:0.01"]) == 1


def test_unwritable_output_exit_2(tmp_path):
    assert main(["lengths", "--max-trace", "3", "--out", str(tmp_path / "no" / "x.csv")]) == 2


# ---------------------------------------------------------------- configuration

def test_config_precedence(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# comment\nN = 28\nn-max = 60\n")
    env = {"MODTRANSFER_N": "26", "MODTRANSFER_K": "6"}
    c = resolve_config("scan", {"N": 30}, cfg_file, env)
    assert (c.N, c.n_max, c.K) == (30, 60, 6)
    c = resolve_config("scan", {}, cfg_file, env)
    assert (c.N, c.n_max, c.K) == (28, 60, 6)
    c = resolve_config("scan", {}, None, env)
    assert (c.N, c.n_max, c.K) == (26, 50, 6)
    c = resolve_config("scan", {}, None, {})
    assert (c.N, c.n_max, c.K) == (24, 50, 4)


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("N 28\n")
    with pytest.raises(DomainError):
        resolve_config("scan", {}, bad, {})
    assert main(["scan", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_help_documents_precedence(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    assert "precedence" in out and "MODTRANSFER_" in out


# ---------------------------------------------------------------- scan and resonance

def test_scan(capsys):
    assert main(["scan", "--r", "9.4:9.7:0.01"]) == 0
    body = _body(capsys.readouterr().out)
    assert body[0] == "R,parity,det_abs"
    assert len(body) == 2
    R, parity, _ = body[1].split(",")
    assert float(R) == pytest.approx(9.53, abs=1e-9) and parity == "-1"


def test_resonance_json(tmp_path):
    out = tmp_path / "res.jsonl"
    assert main(["resonance", "--r", "9.4:9.7:0.01", "--format", "json", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    header = json.loads(lines[0])["header"]
    assert header["N"] == 24 and header["tol_three_term"] == 1e-6
    rec = json.loads(lines[1])
    assert rec["accepted"] is True
    assert abs(rec["lambda"] - 91.141) < 0.05
    assert rec["three_term_residual"] < 1e-6


def test_resonance_empty_window(capsys):
    assert main(["resonance", "--r", "1:2:0.01"]) == 0
    assert _body(capsys.readouterr().out)[1:] == []


def test_resonance_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["resonance", "--r", "12:12.3:0.01", "--out", str(a)]) == 0
    assert main(["resonance", "--r", "12:12.3:0.01", "--threads", "3", "--out", str(b)]) == 0
    assert a.read_bytes() != b""
    # the thread count is not part of the header, so the files are identical
    assert a.read_bytes() == b.read_bytes()


# ---------------------------------------------------------------- periodfn and verify

def test_periodfn_file(pf_file):
    header, cols, rows = read_table(pf_file)
    assert cols == ["kind", "x", "value"]
    assert float(header["R"]) == pytest.approx(9.5336952613, abs=1e-6)
    assert header["parity"] == "-1"
    assert sum(r[0] == "node" for r in rows) == int(header["N"]) == 48
    assert sum(r[0] == "psi" for r in rows) == 200
    assert float(header["three_term_residual"]) < 1e-6


def test_verify_round_trip(pf_file, capsys):
    assert main(["verify", str(pf_file)]) == 0
    assert capsys.readouterr().out.strip() == "PASS"


def test_periodfn_json_round_trip(tmp_path, capsys):
    p = tmp_path / "pf.jsonl"
    assert main(["periodfn", "--R", "13.78", "--format", "json", "--out", str(p)]) == 0
    assert json.loads(p.read_text().splitlines()[0])["header"]["parity"] == 1
    assert main(["verify", str(p)]) == 0
    assert capsys.readouterr().out.strip() == "PASS"


def test_periodfn_deterministic(pf_file, tmp_path):
    again = tmp_path / "again.csv"
    assert main(["periodfn", "--R", "9.5337", "--out", str(again)]) == 0
    assert again.read_bytes() == pf_file.read_bytes()


def test_periodfn_off_resonance_reports_failure(tmp_path):
    p = tmp_path / "off.csv"
    assert main(["periodfn", "--R", "10", "--parity", "1", "--no-polish", "--out", str(p)]) == 3
    assert main(["verify", str(p)]) == 1


def test_verify_corrupted(pf_file, tmp_path, capsys):
    lines = pf_file.read_text().splitlines()
    i = next(k for k, ln in enumerate(lines) if ln.startswith("node,"))
    kind, x, v = lines[i + 5].split(",")
    lines[i + 5] = ",".join([kind, x, "0.5+0.5i"])
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    assert main(["verify", str(bad)]) == 1
    assert capsys.readouterr().out.strip() == "FAIL"


@pytest.mark.parametrize("content", ["", "kind,x,value\nnode,abc,1+0i\n",
                                     "# R = 9.5\nfoo,bar\n1,2\n"])
def test_verify_malformed(content, tmp_path):
    p = tmp_path / "m.csv"
    p.write_text(content)
    assert main(["verify", str(p)]) == 1


def test_verify_truncated_nodes(pf_file, tmp_path):
    lines = [ln for ln in pf_file.read_text().splitlines()]
    i = next(k for k, ln in enumerate(lines) if ln.startswith("node,"))
    del lines[i]
    p = tmp_path / "short.csv"
    p.write_text("\n".join(lines) + "\n")
    assert main(["verify", str(p)]) == 1


def test_verify_missing_file(tmp_path):
    assert main(["verify", str(tmp_path / "nope.csv")]) == 2


@pytest.mark.skipif(shutil.which("modtransfer") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["modtransfer", "lengths", "--max-trace", "4", "--no-cache"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert _body(res.stdout)[1:] == ["3,1.9248473002384139,1,12", "4,2.6339157938496331,2,112 122"]
