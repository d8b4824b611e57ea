# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from unisum import __version__
from unisum.shared.logger import UnisumLogger
from unisum.unisum_main import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main


def run_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out[out.index("{"):])


def test_package_imports_in_fresh_interpreter():
    modules = "unisum.forms, unisum.genus, unisum.verify, unisum.unisum_main"
    proc = subprocess.run(
        [sys.executable, "-c", f"import {modules}"],
        cwd=Path(__file__).resolve().parents[1],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr


def test_version(capsys):
    assert main(["--version"]) == EXIT_PASS
    assert __version__ in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["verify-tuple", "1,2,3"],
        ["represent", "1,1,-1,0,0,0", "5"],
        ["exceptions", "1", "1", "1"],
        ["descend", "--rule", "R9.9", "1,15", "2,2"],
        ["ratio-check", "diag(1,3,21)", "--m", "1", "--primes", "5,x"],
    ],
)
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_represent(capsys):
    code, out = run_json(capsys, "represent", "diag(1,3,21)", "49")
    assert code == EXIT_PASS
    assert out["count"] == 30
    assert len(out["representations"]) == 20

    code, out = run_json(
        capsys, "represent", "diag(1,3,21)", "49", "--constraint", "x=odd", "--all"
    )
    assert all(v[0] % 2 for v in out["representations"])
    assert len(out["representations"]) == out["count"]


def test_exceptions(capsys):
    code, out = run_json(capsys, "exceptions", "1", "1", "1", "--limit", "30")
    assert code == EXIT_PASS
    assert out["exceptions"] == [7, 15, 23, 28]


def test_verify_tuple(capsys):
    assert main(["verify-tuple", "5,1,2,2,1,1", "--limit", "200"]) == EXIT_PASS
    assert "verify-tuple: pass" in capsys.readouterr().out

    assert main(["verify-tuple", "2,0,2,0,2,0", "--limit", "40"]) == EXIT_FAIL
    out = capsys.readouterr().out
    assert "FAIL tuple.2,0,2,0,2,0: [7, 15, 23, 28, 31, 39]" in out


def test_verify_then_report(tmp_path, capsys):
    out = tmp_path / "thm14.json"
    argv = ["verify-thm14", "--limit", "50", "--jobs", "1", "--out", str(out)]
    assert main(argv) == EXIT_PASS
    data = json.loads(out.read_text())
    assert data["command"] == "verify-thm14"
    assert data["status"] == "pass"

    exported = tmp_path / "last.csv"
    argv = ["report", "--format", "csv", "--out", str(exported)]
    assert main(argv) == EXIT_PASS
    rows = list(csv.DictReader(io.StringIO(exported.read_text())))
    assert [r["name"] for r in rows] == [
        "thm14.search",
        "thm14.pipeline",
        "thm14.spinor",
    ]


def test_report_without_run(tmp_path):
    argv = ["report", "--format", "json", "--out", str(tmp_path / "r.json")]
    assert main(argv) == EXIT_USAGE


def test_quiet_flag_is_restored():
    assert main(["-qq", "rules"]) == EXIT_PASS
    assert UnisumLogger.console_level is None


def test_rules(capsys):
    assert main(["rules"]) == EXIT_PASS
    out = capsys.readouterr().out
    assert "R5.L" in out
    assert "INVALID" not in out


def test_genus(capsys, cache_dir):
    code, out = run_json(capsys, "genus", "diag(3,3,5)", "--primes", "7,11,13")
    assert code == EXIT_PASS
    assert len(out["classes"]) == 2
    assert (cache_dir / "genus").is_dir()


def test_genus_no_cache(capsys, tmp_path):
    other = tmp_path / "elsewhere"
    argv = ["--no-cache", "--cache-dir", str(other), "genus", "diag(3,3,5)"]
    code, out = run_json(capsys, *argv)
    assert code == EXIT_PASS
    assert not other.exists()


def test_ratio_check(capsys):
    code, out = run_json(
        capsys, "ratio-check", "diag(1,3,21)", "--m", "1", "--primes", "5,7,11"
    )
    assert code == EXIT_FAIL
    assert [row["passed"] for row in out["checks"]] == [True, False, True]
    assert out["classes"] == 2


def test_sieve(capsys):
    code, out = run_json(capsys, "sieve", "--a-max", "1", "--limit", "100")
    assert code == EXIT_PASS
    assert out["a_max"] == 1
    assert isinstance(out["tuples"], list)


def test_descend(capsys):
    code, out = run_json(capsys, "descend", "--rule", "RL4.2", "1,15", "2,2")
    assert code == EXIT_PASS
    assert out["final"] == [-7, 1]
