import csv
import subprocess
import sys

import pytest

from gbsm_teleport import cli


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def test_fmt():
    assert cli.fmt(0.1 + 0.2) == "0.3"
    assert cli.fmt(3) == "3"
    assert cli.fmt("me-final") == "me-final"


def test_parse_grid():
    assert list(cli.parse_grid("0:1:3")) == [0.0, 0.5, 1.0]
    with pytest.raises(cli.UsageError):
        cli.parse_grid("0:1")


def test_sweep_success_analytic(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _ = run(["sweep-success", "--grid", "0.1:1:4", "--analytic", "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 4
    assert rows[-1]["p_attempt3"] == "0.9375"
    assert max(float(r["max_abs_diff"]) for r in rows) < 1e-10


def test_sweep_success_chi_axis(capsys):
    code, cap = run(["sweep-success", "--axis", "chi", "--grid", "0.2:0.785398163397:3", "--m", "1"], capsys)
    assert code == 0
    assert cap.out.splitlines()[0] == "concurrence,chi,p_attempt0,p_attempt1"


def test_sweep_maf_header(capsys):
    code, cap = run(["sweep-maf", "--grid", "0.5:1:2", "--m", "0"], capsys)
    lines = cap.out.splitlines()
    assert code == 0
    assert lines[0] == "concurrence,m,strategy,maf"
    assert lines[2] == "0.5,0,me-final,0.833333333333"


def test_usage_errors(capsys):
    for argv in (
        ["simulate", "--chi", "0.5", "--trials", "0"],
        ["simulate", "--chi", "0.5", "--a", "1", "--b", "1"],
        ["simulate"],
        ["sweep-success", "--grid", "0:1:5"],
    ):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2


def test_renormalize_accepts_raw_amplitudes(capsys):
    code, cap = run(["simulate", "--chi", "0.5", "--a", "1", "--b", "1", "--renormalize", "--trials", "1000", "--m", "1"], capsys)
    assert code == 0
    assert "a=0.707107" in cap.out


def test_io_error_exit_code(tmp_path, capsys):
    code, cap = run(["sweep-success", "--grid", "0.5:1:2", "--out", str(tmp_path / "no" / "x.csv")], capsys)
    assert code == 3
    assert "I/O error" in cap.err


def test_security_demo(capsys):
    code, cap = run(["security-demo", "--samples", "2000"], capsys)
    assert code == 0
    assert cap.out.count("Tr[rho_Bob rho_I] = 0.500000") == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "gbsm_teleport", "verify"], capture_output=True, text=True)
    assert r.returncode == 0, r.stdout + r.stderr
    assert "0 failed" in r.stdout
