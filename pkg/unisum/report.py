# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
"""Check results, run reports and their json/csv renderings."""
import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import marshmallow
from marshmallow import EXCLUDE, Schema, fields, post_load, validates_schema
from marshmallow import ValidationError as MarshmallowValidationError
from marshmallow_enum import EnumField

from unisum import __version__
from unisum.shared.config import UnisumConfig
from unisum.shared.enums import CheckStatus, ReportFormat
from unisum.shared.errors import CacheError, InvariantFailure, UsageError
from unisum.shared.logger import UnisumLogger
from unisum.util import atomic_write_text, worst_status

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger

CSV_COLUMNS = ["name", "status", "params", "counterexample", "detail", "elapsed"]


class CheckResultSchema(Schema):
    class Meta:
        ordered = True

    name = fields.Str(required=True)
    status = EnumField(CheckStatus, by_value=True, required=True)
    params = fields.Dict(keys=fields.Str(), values=fields.Raw(), missing=dict)
    counterexample = fields.Raw(allow_none=True, missing=None)
    detail = fields.Str(allow_none=True, missing=None)
    elapsed = fields.Float(allow_none=True, missing=None)

    @validates_schema
    def validate_failure_evidence(self, data: Dict[str, Any], **kwargs: Any) -> None:
        if data["status"] == CheckStatus.FAIL and data.get("counterexample") is None:
            raise MarshmallowValidationError(
                f"failed check '{data['name']}' carries no counterexample"
            )

    @post_load
    def make_result(self, data: Dict[str, Any], **kwargs: Any) -> "CheckResult":
        return CheckResult(**data)


class CheckResult(object):
    """One named check. A failure always carries a counterexample, which is a
    concrete value or, for exhausted searches, the searched bound."""

    def __init__(
        self,
        name: str,
        status: CheckStatus,
        params: Optional[Dict[str, Any]] = None,
        counterexample: Any = None,
        detail: Optional[str] = None,
        elapsed: Optional[float] = None,
    ) -> None:
        self.name = name
        self.status = CheckStatus(status)
        self.params = dict(params or {})
        self.counterexample = counterexample
        self.detail = detail
        self.elapsed = elapsed
        if self.status == CheckStatus.FAIL and counterexample is None:
            raise InvariantFailure(f"failed check '{name}' needs a counterexample")

    @classmethod
    def passed_with(
        cls,
        name: str,
        params: Optional[Dict[str, Any]] = None,
        detail: Optional[str] = None,
    ) -> "CheckResult":
        return cls(name, CheckStatus.PASS, params, detail=detail)

    @classmethod
    def failed_with(
        cls,
        name: str,
        counterexample: Any,
        params: Optional[Dict[str, Any]] = None,
        detail: Optional[str] = None,
    ) -> "CheckResult":
        return cls(name, CheckStatus.FAIL, params, counterexample, detail)

    @classmethod
    def skipped(
        cls, name: str, detail: str, params: Optional[Dict[str, Any]] = None
    ) -> "CheckResult":
        return cls(name, CheckStatus.SKIPPED, params, detail=detail)

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CheckResult):
            return NotImplemented
        return self.dump(timing=False) == other.dump(timing=False)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.name}, {self.status.value})"

    def dump(self, timing: bool = True) -> Dict[str, Any]:
        data = CheckResultSchema().dump(self)
        if not timing:
            data.pop("elapsed", None)
        return data


class RunReportSchema(Schema):
    class Meta:
        ordered = True
        unknown = EXCLUDE

    command = fields.Str(required=True)
    version = fields.Str(missing=__version__)
    status = EnumField(CheckStatus, by_value=True, dump_only=True)
    counts = fields.Dict(keys=fields.Str(), values=fields.Int(), dump_only=True)
    params = fields.Dict(keys=fields.Str(), values=fields.Raw(), missing=dict)
    checks = fields.Nested(CheckResultSchema, many=True, required=True)
    elapsed = fields.Float(allow_none=True, missing=None)

    @post_load
    def make_report(self, data: Dict[str, Any], **kwargs: Any) -> "RunReport":
        return RunReport(**data)


class RunReport(object):
    def __init__(
        self,
        command: str,
        checks: List[CheckResult],
        params: Optional[Dict[str, Any]] = None,
        version: str = __version__,
        elapsed: Optional[float] = None,
    ) -> None:
        self.command = command
        self.checks = list(checks)
        self.params = dict(params or {})
        self.version = version
        self.elapsed = elapsed

    @property
    def status(self) -> CheckStatus:
        return worst_status([c.status for c in self.checks])

    @property
    def counts(self) -> Dict[str, int]:
        out = {s.value: 0 for s in CheckStatus}
        for c in self.checks:
            out[c.status.value] += 1
        return out

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if c.status == CheckStatus.FAIL]

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0

    def get_check(self, name: str) -> Optional[CheckResult]:
        for c in self.checks:
            if c.name == name:
                return c
        return None

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}({self.command}, {self.status.value},"
            f" {self.counts})"
        )

    def dump(self, timing: Optional[bool] = None) -> Dict[str, Any]:
        timing = config.REPORT_INCLUDE_TIMING if timing is None else timing
        data = RunReportSchema().dump(self)
        if not timing:
            data.pop("elapsed", None)
            for check in data["checks"]:
                check.pop("elapsed", None)
        return data


def format_json(report: RunReport, timing: Optional[bool] = None) -> str:
    return json.dumps(report.dump(timing), indent=2, sort_keys=True) + "\n"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def format_csv(report: RunReport, timing: Optional[bool] = None) -> str:
    """One row per check, in report order."""
    data = report.dump(timing)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for check in data["checks"]:
        writer.writerow([_cell(check.get(col)) for col in CSV_COLUMNS])
    return out.getvalue()


def render(report: RunReport, fmt: Union[str, ReportFormat]) -> str:
    try:
        fmt = ReportFormat(fmt)
    except ValueError:
        raise UsageError(f"unknown report format '{fmt}'")
    if fmt == ReportFormat.CSV:
        return format_csv(report)
    return format_json(report)


def write_report(
    report: RunReport, path: Union[str, Path], fmt: Union[str, ReportFormat]
) -> Path:
    path = atomic_write_text(path, render(report, fmt))
    logger.info(f"wrote {ReportFormat(fmt).value} report to '{path}'")
    return path


def last_report_path() -> Path:
    return Path(config.CACHE_DIR) / config.LAST_REPORT_NAME


def save_last_report(report: RunReport) -> Optional[Path]:
    """Persists the report for a later `report` command; never fatal."""
    try:
        return atomic_write_text(last_report_path(), format_json(report, timing=True))
    except CacheError as e:
        logger.warning(f"{e.msg}, last report not saved")
        return None


def load_last_report() -> RunReport:
    path = last_report_path()
    try:
        with path.open() as infile:
            obj = json.load(infile)
    except FileNotFoundError:
        raise UsageError(f"no report to export yet ('{path}'); run a verify command")
    except OSError as e:
        raise CacheError(f"failed to read: {e.strerror}", path) from e
    except json.JSONDecodeError as e:
        raise CacheError(f"invalid JSON: {e.msg}", path) from e

    try:
        return RunReportSchema().load(obj)
    except marshmallow.ValidationError as e:
        raise CacheError(f"report failed validation: {e.messages}", path) from e
