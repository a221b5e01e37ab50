import csv
import io
import json
import random

import pytest

from sc6verify import cli
from sc6verify.qseries import sc6_series


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rq(capsys):
    assert run(capsys, "rq", "35") == (0, "12\n", "")
    assert run(capsys, "rq", "11", "--form", "mate")[1] == "4\n"


@pytest.mark.parametrize("method", ["series", "lattice"])
def test_sc6_13(capsys, method):
    code, out, _ = run(capsys, "sc6", "13", "--method", method)
    assert (code, out) == (0, "0\n")


def test_sc6_methods_agree(capsys):
    series = sc6_series(2001)
    rng = random.Random(23)
    for n in rng.sample(range(2001), 50):
        code, out, _ = run(capsys, "sc6", str(n), "--method", "lattice")
        assert code == 0 and int(out) == series[n], n


def test_sc6_series_small(capsys):
    for n in (0, 1, 5):
        code, out, _ = run(capsys, "sc6", str(n))
        assert code == 0 and int(out) == sc6_series(6)[n]


def test_classnum(capsys):
    code, out, _ = run(capsys, "classnum", "-83")
    assert code == 0 and "h = 3" in out and "(3, -1, 7)" in out


def test_decompose_csv(capsys):
    code, out, _ = run(capsys, "decompose", "--limit", "40")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 41
    row = rows[35]
    assert (row["r_Q"], row["4a_E"], row["4a_C"]) == ("12", "24", "24")
    assert all(int(r["4a_E"]) + int(r["4a_C"]) == 4 * int(r["r_Q"]) for r in rows)


def test_shimura(capsys):
    code, out, _ = run(capsys, "shimura", "--limit", "20")
    assert code == 0 and out.startswith("[PASS]")


def test_lvalue(capsys):
    code, out, _ = run(capsys, "lvalue", "--N", "35")
    assert code == 0 and "d_emp(35)" in out and "1.6338" in out


def test_threshold(capsys):
    code, out, _ = run(capsys, "threshold")
    assert code == 0 and "914155" in out and "916347.7794" in out and "reference" in out


def test_sweep_json_to_stdout(capsys):
    code, out, err = run(capsys, "sweep", "--max-n", "100", "--threads", "1", "--chunk", "30")
    assert code == 0
    assert json.loads(out)["exceptions"] == [2, 12, 13, 73]
    assert "[2, 12, 13, 73]" in err


def test_sweep_report_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "sweep", "--max-n", "50", "--threads", "2", "--chunk", "10", "--report", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["exceptions"] == [2, 12, 13]


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        [],
        ["rq"],
        ["rq", "x"],
        ["rq", "-1"],
        ["sc6", "-3"],
        ["classnum", "5"],
        ["lvalue", "--N", "36"],
        ["threshold", "--eup", "0.3"],
        ["sweep", "--max-n", "-5"],
        ["sweep", "--max-n", "10", "--chunk", "0"],
        ["decompose", "--limit", "-1"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert cli.main(argv) == 2


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("SC6_THREADS", "zero")
    assert cli.main(["sweep", "--max-n", "10"]) == 2
    # the flag wins over a broken environment value
    assert cli.main(["sweep", "--max-n", "10", "--threads", "1"]) == 0
    monkeypatch.setenv("SC6_THREADS", "2")
    assert cli._default_threads() == 2
    monkeypatch.setenv("SC6_THREADS", "0")
    with pytest.raises(cli.UsageError):
        cli._default_threads()


def test_checkpoint_mismatch_exits_3(capsys, tmp_path):
    ckpt = str(tmp_path / "c.ckpt")
    assert cli.main(["sweep", "--max-n", "100", "--threads", "1", "--checkpoint", ckpt]) == 0
    assert cli.main(["sweep", "--max-n", "200", "--threads", "1", "--checkpoint", ckpt]) == 3


def test_unwritable_report_exits_3(capsys, tmp_path):
    bad = str(tmp_path / "no" / "such" / "r.json")
    assert cli.main(["sweep", "--max-n", "10", "--threads", "1", "--report", bad]) == 3


def test_failed_check_exits_1(capsys, monkeypatch):
    monkeypatch.setattr(cli, "KNOWN_EXCEPTIONS", (2, 12))
    assert cli.main(["sweep", "--max-n", "20", "--threads", "1"]) == 1


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "sc6verify", "rq", "35"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "12\n"
    proc = subprocess.run([sys.executable, "-m", "sc6verify", "nope"], capture_output=True, text=True)
    assert proc.returncode == 2
