# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
"""Command line entry point. Exit codes: 0 all checks pass, 1 a check fails
(or a run-time error), 2 usage error."""
import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, List, Optional, Sequence

from unisum import __version__, forms, verify
from unisum.cache import cached_class_set
from unisum.descent import run_rule
from unisum.fixture import load_fixtures
from unisum.genus import ratio_check
from unisum.report import (
    CheckResult,
    RunReport,
    load_last_report,
    save_last_report,
    write_report,
)
from unisum.rules import builtin_rules, validate_rule
from unisum.shared.config import UnisumConfig
from unisum.shared.enums import ReportFormat
from unisum.shared.errors import (
    FormError,
    PreconditionError,
    TupleError,
    UnisumError,
    UnknownSetError,
    UsageError,
)
from unisum.shared.logger import UnisumLogger, verbosity_level
from unisum.tuples import candidate_sieve, parse_tuple, verify_universal
from unisum.util import parse_int_list

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

_USAGE_ERRORS = (UsageError, FormError, TupleError, PreconditionError, UnknownSetError)


def _emit(obj: Any) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _int_list(value: str) -> List[int]:
    try:
        return parse_int_list(value)
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got '{value}'")


def _finish(report: RunReport, args: argparse.Namespace) -> int:
    save_last_report(report)
    if getattr(args, "out", None):
        write_report(report, args.out, args.format)
    for check in report.failures:
        print(f"FAIL {check.name}: {json.dumps(check.counterexample, sort_keys=True)}")
    counts = ", ".join(f"{k}={v}" for k, v in report.counts.items())
    print(f"{report.command}: {report.status.value} ({counts})")
    return report.exit_code


def cmd_represent(args: argparse.Namespace) -> int:
    form = forms.parse_form(args.form)
    constraint = forms.RepConstraint.parse(args.constraint or [])
    reps = forms.representations(form, args.n, constraint)
    shown = reps if args.all else reps[: args.show]
    _emit(
        {
            "form": form.literal,
            "n": args.n,
            "constraint": repr(constraint),
            "count": len(reps),
            "representations": [list(r.vector) for r in shown],
        }
    )
    return EXIT_PASS


def cmd_exceptions(args: argparse.Namespace) -> int:
    es = forms.exception_set(args.a, args.b, args.c, args.limit)
    _emit({"form": [es.a, es.b, es.c], "limit": es.limit, "exceptions": es.members})
    return EXIT_PASS


def cmd_verify_tuple(args: argparse.Namespace) -> int:
    t = parse_tuple(args.tuple)
    jobs = args.jobs or 1
    ur = verify_universal(t, args.limit, shard_count=jobs)
    params = {"limit": args.limit}
    name = f"tuple.{t.literal}"
    if ur.passed:
        check = CheckResult.passed_with(name, params)
    else:
        shown = ur.exceptions[: verify.COUNTEREXAMPLES]
        check = CheckResult.failed_with(name, shown, params)
    report = RunReport("verify-tuple", [check], params)
    return _finish(report, args)


def cmd_verify_theorems(args: argparse.Namespace) -> int:
    return _finish(verify.cmd_verify_theorems(args.limit, args.jobs), args)


def cmd_verify_lemmas(args: argparse.Namespace) -> int:
    return _finish(verify.cmd_verify_lemmas(args.limit, args.jobs), args)


def cmd_verify_thm14(args: argparse.Namespace) -> int:
    return _finish(verify.cmd_verify_thm14(args.limit, args.jobs), args)


def cmd_verify_descent(args: argparse.Namespace) -> int:
    return _finish(verify.cmd_verify_descent(args.limit, args.jobs), args)


def cmd_verify_genus(args: argparse.Namespace) -> int:
    return _finish(verify.cmd_verify_genus(args.jobs), args)


def cmd_verify_all(args: argparse.Namespace) -> int:
    return _finish(verify.cmd_verify_all(args.jobs), args)


def cmd_genus(args: argparse.Namespace) -> int:
    form = forms.parse_form(args.form)
    primes = _int_list(args.primes) if args.primes else None
    cs = cached_class_set(form, primes)
    _emit(cs.dump())
    return EXIT_PASS


def cmd_ratio_check(args: argparse.Namespace) -> int:
    form = forms.parse_form(args.form)
    primes = _int_list(args.primes)
    closure_primes = _int_list(args.closure_primes) if args.closure_primes else None
    cs = cached_class_set(form, closure_primes)
    rows = []
    failed = False
    for p in primes:
        rc = ratio_check(cs, args.m, p)
        failed = failed or not rc.passed
        rows.append(
            {
                "p": p,
                "lhs": None if rc.lhs is None else str(rc.lhs),
                "rhs": rc.rhs,
                "passed": rc.passed,
                "msg": rc.msg,
            }
        )
    _emit({"form": form.literal, "m": args.m, "classes": len(cs), "checks": rows})
    return EXIT_FAIL if failed else EXIT_PASS


def cmd_descend(args: argparse.Namespace) -> int:
    trace = run_rule(args.rule, args.form, _int_list(args.vector))
    _emit(trace.dump())
    return EXIT_PASS


def cmd_sieve(args: argparse.Namespace) -> int:
    found = candidate_sieve(args.a_max, args.limit)
    tuples = [t.literal for t in found]
    _emit({"a_max": args.a_max, "limit": args.limit, "tuples": tuples})
    return EXIT_PASS


def cmd_rules(args: argparse.Namespace) -> int:
    anchors = {e.rule: e.anchor for e in load_fixtures().identities}
    failed = False
    for rule_id, rule in builtin_rules().items():
        ok, msg = validate_rule(rule)
        failed = failed or not ok
        status = "ok" if ok else f"INVALID ({msg})"
        anchor = anchors.get(rule_id, "")
        print(f"{rule_id:10} {rule.kind.value:10} {status:8} {anchor}")
    return EXIT_FAIL if failed else EXIT_PASS


def cmd_report(args: argparse.Namespace) -> int:
    report = load_last_report()
    write_report(report, args.out, args.format)
    return EXIT_PASS


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, help="also write the report to this path")
    p.add_argument(
        "--format",
        choices=[f.value for f in ReportFormat],
        default=ReportFormat.JSON.value,
        help="format for --out",
    )


def _add_jobs(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--jobs", type=int, default=None, help="worker processes (default: JOBS)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unisum",
        description="Bounded verification of universal sums of polygonal numbers",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--no-cache", action="store_true", help="do not read or write the cache"
    )
    parser.add_argument(
        "--cache-dir", type=Path, help="cache directory (default: UNISUM_CACHE_DIR)"
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="more logging (repeatable)"
    )
    parser.add_argument(
        "-q", "--quiet", action="count", default=0, help="less logging (repeatable)"
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(
        name: str, handler: Callable[[argparse.Namespace], int], **kw: Any
    ) -> argparse.ArgumentParser:
        p = sub.add_parser(name, **kw)
        p.set_defaults(handler=handler)
        return p

    p = add("represent", cmd_represent, help="representations of n by a form")
    p.add_argument("form")
    p.add_argument("n", type=int)
    p.add_argument(
        "--constraint",
        action="append",
        help="x=odd, y=even, z=1,7%%8 or primitive (repeatable)",
    )
    p.add_argument("--show", type=int, default=20, help="representations to print")
    p.add_argument("--all", action="store_true", help="print every representation")

    p = add("exceptions", cmd_exceptions, help="E(a,b,c) up to a limit")
    for coeff in ("a", "b", "c"):
        p.add_argument(coeff, type=int)
    p.add_argument("--limit", type=int, required=True)

    p = add("verify-tuple", cmd_verify_tuple, help="universality of one tuple")
    p.add_argument("tuple")
    p.add_argument("--limit", type=int, default=config.TUPLE_LIMIT)
    _add_jobs(p)
    _add_output(p)

    for name, handler, default, text in (
        ("verify-theorems", cmd_verify_theorems, config.TUPLE_LIMIT, "all tuples"),
        ("verify-lemmas", cmd_verify_lemmas, config.LEMMA_LIMIT, "lemma claims"),
        ("verify-thm14", cmd_verify_thm14, config.THM14_LIMIT, "8n+2 = x^2+y^2+8z^2"),
        ("verify-descent", cmd_verify_descent, config.DESCENT_LIMIT, "odd descents"),
    ):
        p = add(name, handler, help=text)
        p.add_argument("--limit", type=int, default=default)
        _add_jobs(p)
        _add_output(p)

    p = add("verify-genus", cmd_verify_genus, help="genus fixtures and ratios")
    _add_jobs(p)
    _add_output(p)

    p = add("verify-all", cmd_verify_all, help="every check at configured bounds")
    _add_jobs(p)
    _add_output(p)

    p = add("genus", cmd_genus, help="class set of a genus by neighbor closure")
    p.add_argument("form")
    p.add_argument("--primes", help="comma-separated odd primes")

    p = add("ratio-check", cmd_ratio_check, help="genus average ratios")
    p.add_argument("form")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--primes", required=True)
    p.add_argument("--closure-primes", help="primes for the neighbor closure")

    p = add("descend", cmd_descend, help="apply a rewrite rule or descent")
    p.add_argument("--rule", required=True)
    p.add_argument("form")
    p.add_argument("vector", help="comma-separated coordinates")

    p = add("sieve", cmd_sieve, help="candidate tuples up to a limit")
    p.add_argument("--a-max", type=int, required=True)
    p.add_argument("--limit", type=int, required=True)

    add("rules", cmd_rules, help="list rewrite rules")

    p = add("report", cmd_report, help="export the last verify report")
    p.add_argument(
        "--format", choices=[f.value for f in ReportFormat], required=True
    )
    p.add_argument("--out", type=Path, required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_PASS

    saved = (config.USE_CACHE, config.CACHE_DIR)
    if args.no_cache:
        config.USE_CACHE = False
    if args.cache_dir:
        config.CACHE_DIR = args.cache_dir
    if args.verbose or args.quiet:
        UnisumLogger.set_level(verbosity_level(args.verbose, args.quiet))

    try:
        return args.handler(args)
    except _USAGE_ERRORS as e:
        print(f"{parser.prog}: error: {e.msg}", file=sys.stderr)
        return EXIT_USAGE
    except UnisumError as e:
        logger.error(f"{args.command}: {e.msg}")
        return EXIT_FAIL
    finally:
        config.USE_CACHE, config.CACHE_DIR = saved
        if args.verbose or args.quiet:
            UnisumLogger.reset_level()


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
