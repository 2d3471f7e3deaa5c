import subprocess
import sys
from dataclasses import replace
from pathlib import Path

import pytest

from lvalues import cli, lattice
from lvalues.series import TruncSeries

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def fields(text):
    return dict(line.split(" = ", 1) for line in text.splitlines() if " = " in line)


@pytest.mark.parametrize("p,N,expected", [(2, 4, "[1, 0, 1, 1]"), (3, 4, "[1, 0, 0, 2]"), (2, 1, "[1]")])
def test_zeta(capsys, p, N, expected):
    code, out, _ = run(capsys, "zeta", "--set", f"p={p}", "--precision", str(N))
    assert code == 0
    assert fields(out)["zeta"] == expected
    assert out.startswith("# lvalues report\n") and out.endswith("verdict = OK\n")


def test_report_embeds_config(capsys):
    _, out, _ = run(capsys, "lvalue", "--set", 'coeffs=["1", "1"]', "--precision", "5")
    f = fields(out)
    assert f["config.coeffs"] == '["1", "1"]' and f["config.precision"] == "5"
    assert f["config.degree_bound"] == "5"


def test_euler_method_matches_trace(capsys):
    _, trace, _ = run(capsys, "zeta", "--precision", "8")
    _, euler, _ = run(capsys, "zeta", "--precision", "8", "--method", "euler")
    t, e = fields(trace), fields(euler)
    n = int(e["zeta.stable_to"])
    assert n >= 6
    assert e["zeta"].strip("[]").split(", ")[:n] == t["zeta"].strip("[]").split(", ")[:n]
    assert e["zeta.certified"] == "false"


def test_primes(capsys):
    code, out, _ = run(capsys, "primes", "--degree-bound", "3")
    f = fields(out)
    assert code == 0 and f["primes"] == "5"
    assert [f[f"prime_{i}.degree"] for i in range(5)] == ["1", "1", "2", "3", "3"]


def test_verify_rank0(capsys):
    code, out, _ = run(capsys, "verify", "--set", "coeffs=[]", "--precision", "6")
    f = fields(out)
    assert code == 0 and f["verdict"] == "VERIFIED"
    assert f["lhs"] == f["rhs"] == "[1, 0, 0, 0, 0, 0]"


def test_trace_check(capsys):
    code, out, _ = run(capsys, "trace-check", "--precision", "6", "--degree-bound", "8")
    f = fields(out)
    assert code == 0 and f["product"] == "[1, 0, 0, 0, 0, 0]" and f["stable_to"] == "6"


def test_other_commands_run(capsys):
    for cmd in ("euler", "exp-coeffs", "units", "class-module"):
        code, out, _ = run(capsys, cmd, "--set", 'coeffs=["1", "1"]', "--precision", "6")
        assert code == 0, cmd
        assert fields(out)["verdict"] == "OK"


@pytest.mark.parametrize("argv", [
    ["zeta", "--set", "bogus=1"],
    ["zeta", "--set", "p=4"],
    ["zeta", "--precision", "0"],
    ["lvalue", "--set", 'coeffs=["t+"]'],
    ["lvalue", "--set", "extension=y^2+t^2"],
    ["zeta", "/nonexistent/job.cfg"],
    [],
])
def test_config_errors_exit_64(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 64 and "config error" in err and out == ""


def test_uncertified_exits_2(capsys, monkeypatch):
    # a window solver that never finds units drives the search past its bound
    monkeypatch.setattr(lattice, "_window_units", lambda *a: [])
    monkeypatch.setattr(lattice, "MAX_WINDOW", 4)
    code, out, _ = run(capsys, "units", "--set", 'coeffs=["1", "1"]', "--precision", "6")
    f = fields(out)
    assert code == 2 and f["verdict"] == "NOT_CERTIFIED"
    assert f["error"].startswith("RankDeficient")


def test_mismatch_exits_1(capsys, monkeypatch):
    real = lattice.lvalue_trace

    def corrupted(E, N, M=None):
        val = real(E, N, M)
        F = val.field
        return TruncSeries(F, val.coeffs[:-1] + (F.add(val.coeffs[-1], 1),))

    monkeypatch.setattr(lattice, "lvalue_trace", corrupted)
    code, out, _ = run(capsys, "verify", "--precision", "6")
    f = fields(out)
    assert code == 1 and f["verdict"] == "VERIFICATION_FAILED" and f["lhs"] != f["rhs"]


def test_out_file_and_timings(capsys, tmp_path):
    target = tmp_path / "r.txt"
    code, out, _ = run(capsys, "zeta", "--out", str(target), "--timings")
    assert code == 0
    text = target.read_text()
    assert "time.trace = " in text
    _, plain, _ = run(capsys, "zeta")
    assert "time." not in plain


def test_config_file_parsing(tmp_path):
    cfg = cli.parse_config("# comment\ncommand = zeta\np = 3\ncoeffs = [\"t\", \"1\"]  # rank 2\n")
    assert (cfg.command, cfg.p, cfg.coeffs) == ("zeta", 3, ("t", "1"))
    assert cli.parse_config(cfg.dump()).dump() == cfg.dump()
    with pytest.raises(cli.ConfigError):
        cli.parse_config("precision 4\n")


def test_corpus_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.run_corpus(str(CORPUS), str(a), jobs=1) == 0
    assert cli.run_corpus(str(CORPUS), str(b), jobs=2) == 0
    names = sorted(p.name for p in a.iterdir())
    assert len(names) == len(list(CORPUS.glob("*.cfg")))
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "lvalues.cli", "zeta", "--precision", "4"],
                         capture_output=True, text=True, check=True).stdout
    assert "zeta = [1, 0, 1, 1]" in out
