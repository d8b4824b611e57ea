# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import csv
import io
import json

import marshmallow
import pytest

from unisum import report
from unisum.report import CheckResult, RunReport
from unisum.shared.enums import CheckStatus
from unisum.shared.errors import CacheError, InvariantFailure, UsageError


def sample_report():
    return RunReport(
        "verify-tuple",
        [
            CheckResult.passed_with("tuple.5,1,2,2,1,1", {"limit": 100}),
            CheckResult.skipped("ratio.genus_63.m2", "m=2 is not represented"),
            CheckResult.failed_with(
                "tuple.2,0,2,0,2,0", [7, 15, 23], {"limit": 30}, "3 exception(s)"
            ),
        ],
        {"limit": 100},
        elapsed=0.25,
    )


def test_failure_needs_counterexample():
    with pytest.raises(InvariantFailure):
        CheckResult("tuple.x", CheckStatus.FAIL)
    with pytest.raises(InvariantFailure):
        CheckResult.failed_with("tuple.x", None)


def test_status_and_counts():
    r = sample_report()
    assert r.status == CheckStatus.FAIL
    assert r.counts == {"pass": 1, "fail": 1, "skipped": 1}
    assert r.exit_code == 1
    assert r.get_check("tuple.2,0,2,0,2,0").counterexample == [7, 15, 23]
    assert r.get_check("nope") is None

    clean = RunReport("verify-tuple", r.checks[:2])
    assert clean.status == CheckStatus.SKIPPED
    assert clean.exit_code == 0
    assert RunReport("verify-tuple", []).status == CheckStatus.PASS


def test_dump_without_timing():
    r = sample_report()
    for check in r.checks:
        check.elapsed = 0.5
    data = r.dump(timing=False)
    assert "elapsed" not in data
    assert all("elapsed" not in c for c in data["checks"])
    assert data["status"] == "fail"
    assert r.dump(timing=True)["elapsed"] == 0.25


def test_json_is_deterministic():
    first = report.format_json(sample_report(), timing=False)
    second = report.format_json(sample_report(), timing=False)
    assert first == second
    assert json.loads(first)["checks"][2]["counterexample"] == [7, 15, 23]


def test_csv():
    text = report.format_csv(sample_report(), timing=False)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == report.CSV_COLUMNS
    assert [row[1] for row in rows[1:]] == ["pass", "skipped", "fail"]
    assert rows[3][2] == '{"limit":30}'
    assert rows[3][3] == "[7,15,23]"
    assert rows[1][3] == ""


def test_render_unknown_format():
    with pytest.raises(UsageError):
        report.render(sample_report(), "xml")


def test_write_report(tmp_path):
    path = report.write_report(sample_report(), tmp_path / "out" / "r.csv", "csv")
    assert path.read_text().startswith(",".join(report.CSV_COLUMNS))


def test_last_report_round_trip():
    original = sample_report()
    path = report.save_last_report(original)
    assert path == report.last_report_path()
    loaded = report.load_last_report()
    assert loaded.command == original.command
    assert loaded.checks == original.checks
    assert loaded.status == CheckStatus.FAIL


def test_missing_last_report():
    with pytest.raises(UsageError):
        report.load_last_report()


def test_corrupt_last_report():
    path = report.last_report_path()
    path.parent.mkdir(parents=True)
    path.write_text("{oops")
    with pytest.raises(CacheError):
        report.load_last_report()

    path.write_text(json.dumps({"command": "verify-tuple"}))
    with pytest.raises(CacheError):
        report.load_last_report()


def test_schema_rejects_failure_without_counterexample():
    with pytest.raises(marshmallow.ValidationError):
        report.CheckResultSchema().load({"name": "tuple.x", "status": "fail"})
    loaded = report.CheckResultSchema().load({"name": "tuple.x", "status": "skipped"})
    assert loaded.status == CheckStatus.SKIPPED
