# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
"""The verify-* commands: every bounded check of the fixture database, fanned
out over worker processes and merged back in a fixed order."""
import multiprocessing
import time
from math import isqrt
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import sympy

from unisum import forms
from unisum.cache import cached_class_set
from unisum.descent import (
    descend_lemma_4_2,
    descend_odd_1_5_10,
    descend_odd_binary,
    lagrange_even_odd_decomposition,
    max_rule_applications,
)
from unisum.fixture import (
    FixtureDatabase,
    GenusFixture,
    ProgressionClaim,
    TupleEntry,
    load_fixtures,
)
from unisum.forms import RepConstraint, TernaryForm
from unisum.genus import (
    GenusClassSet,
    aggregate_check,
    check_genus_fixture,
    genus_average,
    ratio_check,
    spinor_instance,
    spinor_instance_check,
)
from unisum.report import CheckResult, RunReport
from unisum.rules import builtin_rules, get_rule, validate_rule
from unisum.shared.config import UnisumConfig
from unisum.shared.enums import BinaryKind, KnownSet, Parity
from unisum.shared.errors import InvariantFailure, PreconditionError, UnisumError
from unisum.shared.logger import UnisumLogger
from unisum.tuples import compare_reachable, derive_completion, eq_1_1_check
from unisum.tuples import verify_universal
from unisum.util import ctxexc, ctxlog, is_square, odd_primes

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger

COUNTEREXAMPLES = 10
D1510 = TernaryForm.diag(1, 5, 10)
THREE_SQUARES = TernaryForm.diag(1, 1, 1)

Task = Tuple[Callable[..., List[CheckResult]], Tuple[Any, ...]]


def _run_task(task: Task) -> List[CheckResult]:
    fn, args = task
    start = time.perf_counter()
    try:
        results = fn(*args)
    except UnisumError as e:
        name = fn.__name__
        logger.warning(ctxexc("check raised", name))
        results = [CheckResult.failed_with(name, {"error": e.msg})]
    elapsed = round(time.perf_counter() - start, 6)
    for r in results:
        r.elapsed = elapsed
    return results


def run_checks(tasks: Sequence[Task], jobs: Optional[int] = None) -> List[CheckResult]:
    """Runs each task (possibly in a worker pool) and concatenates the results
    in task order, independently of the number of workers."""
    jobs = config.JOBS if jobs is None else jobs
    if jobs <= 1 or len(tasks) <= 1:
        chunks = [_run_task(t) for t in tasks]
    else:
        with multiprocessing.Pool(min(jobs, len(tasks))) as pool:
            chunks = pool.map(_run_task, tasks, chunksize=1)
    return [r for chunk in chunks for r in chunk]


def _report(
    command: str, tasks: Sequence[Task], params: Dict[str, Any], jobs: Optional[int]
) -> RunReport:
    logger.info(ctxlog(f"{len(tasks)} task(s) {params}", command))
    start = time.perf_counter()
    checks = run_checks(tasks, jobs)
    report = RunReport(
        command, checks, params, elapsed=round(time.perf_counter() - start, 6)
    )
    logger.info(ctxlog(f"finished: {report.counts}", command))
    for check in report.failures:
        logger.warning(ctxlog(f"failed: {check.counterexample}", command, check.name))
    return report


def _require(value: int, name: str, minimum: int) -> None:
    if value < minimum:
        raise PreconditionError(f"{name} must be >= {minimum}, got {value}")


# tuples and proof claims


def tuple_checks(entry: TupleEntry, limit: int) -> List[CheckResult]:
    """Universality up to limit, the recorded completion, and for corollary
    tuples equality of reachable sets with the source tuple."""
    t = entry.sum_tuple
    key = f"{entry.group.value}.{t.literal}"
    params = {"limit": limit}
    results = []

    report = verify_universal(t, limit)
    if report.passed:
        results.append(CheckResult.passed_with(f"tuple.{key}", params))
    else:
        results.append(
            CheckResult.failed_with(
                f"tuple.{key}",
                report.exceptions[:COUNTEREXAMPLES],
                params,
                f"{len(report.exceptions)} exception(s)",
            )
        )

    if entry.completion is not None:
        system = derive_completion(t)
        derived = [system.M, system.C]
        expected = [entry.completion.M, entry.completion.C]
        name = f"completion.{key}"
        if derived == expected:
            results.append(CheckResult.passed_with(name, detail=repr(system)))
        else:
            results.append(
                CheckResult.failed_with(
                    name, {"derived": derived, "recorded": expected}
                )
            )

    if entry.source is not None:
        cmp = compare_reachable(t, entry.source, limit)
        name = f"corollary.{t.literal}"
        params = {"limit": limit, "source": entry.source.literal}
        if cmp.equal:
            results.append(CheckResult.passed_with(name, params))
        else:
            results.append(
                CheckResult.failed_with(
                    name,
                    {
                        "only_tuple": cmp.only_left[:COUNTEREXAMPLES],
                        "only_source": cmp.only_right[:COUNTEREXAMPLES],
                    },
                    params,
                )
            )
    return results


def progression_check(claim: ProgressionClaim, limit: int, prefix: str) -> CheckResult:
    """Every claimed value modulus * n + r, start <= n <= limit, is represented."""
    name = f"{prefix}.{claim.name}"
    params = {"limit": limit, "claim": claim.literal}
    targets = claim.targets(limit)
    if not targets:
        return CheckResult.skipped(name, f"no n in [{claim.start}, {limit}]", params)
    coeffs = (claim.form.a11, claim.form.a22, claim.form.a33)
    marked = forms.represented_set(coeffs, targets[-1], claim.constraint)
    missing = [t for t in targets if not marked[t]]
    if missing:
        return CheckResult.failed_with(name, missing[:COUNTEREXAMPLES], params)
    return CheckResult.passed_with(name, params)


def progression_checks(
    claims: Sequence[ProgressionClaim], limit: int, prefix: str
) -> List[CheckResult]:
    return [progression_check(c, limit, prefix) for c in claims]


def eq_1_1_checks(limit: int) -> List[CheckResult]:
    cmp = eq_1_1_check(limit)
    params = {"limit": limit}
    if cmp.equal:
        return [CheckResult.passed_with("eq_1_1", params)]
    return [CheckResult.failed_with("eq_1_1", cmp.witnesses(COUNTEREXAMPLES), params)]


def cmd_verify_theorems(
    limit: Optional[int] = None,
    jobs: Optional[int] = None,
    db: Optional[FixtureDatabase] = None,
    claim_limit: Optional[int] = None,
) -> RunReport:
    limit = config.TUPLE_LIMIT if limit is None else limit
    claim_limit = config.CLAIM_LIMIT if claim_limit is None else claim_limit
    _require(limit, "limit", 1)
    db = db or load_fixtures()
    tasks: List[Task] = [(tuple_checks, (entry, limit)) for entry in db.tuples]
    tasks.append((eq_1_1_checks, (limit,)))
    tasks.append((progression_checks, (db.claims, claim_limit, "claim")))
    params = {"limit": limit, "claim_limit": claim_limit, "fixtures": db.name}
    return _report("verify-theorems", tasks, params, jobs)


# lemmas


def lemma_5_1_counts(n: int) -> Tuple[int, int]:
    """Representations of 8n+1 as a sum of three squares with 4 | x, and with
    x = 2 (mod 4)."""
    value = 8 * n + 1
    zero = RepConstraint(residues=[(4, [0]), None, None])
    two = RepConstraint(residues=[(4, [2]), None, None])
    return (
        forms.count(THREE_SQUARES, value, zero),
        forms.count(THREE_SQUARES, value, two),
    )


def lemma_5_1_checks(limit: int) -> List[CheckResult]:
    name = "lemma.equal_counts_8n_plus_1"
    top = 8 * limit + 1
    zero = forms.representation_counts(
        THREE_SQUARES, top, RepConstraint(residues=[(4, [0]), None, None])
    )
    two = forms.representation_counts(
        THREE_SQUARES, top, RepConstraint(residues=[(4, [2]), None, None])
    )
    squares = 0
    for n in range(limit + 1):
        value = 8 * n + 1
        if is_square(value):
            squares += 1
            continue
        a, b = int(zero[value]), int(two[value])
        if a != b or a == 0:
            return [
                CheckResult.failed_with(
                    name, {"n": n, "x=0%4": a, "x=2%4": b}, {"limit": limit}
                )
            ]
    return [
        CheckResult.passed_with(name, {"limit": limit, "squares_skipped": squares})
    ]


def exception_formula_checks(limit: int) -> List[CheckResult]:
    results = []
    for known in KnownSet:
        cmp = forms.exception_formula_check(known.value, limit)
        name = f"exceptions.{known.value}"
        params = {"limit": limit}
        if cmp.equal:
            results.append(CheckResult.passed_with(name, params))
        else:
            results.append(
                CheckResult.failed_with(
                    name,
                    {
                        "sieve_only": cmp.only_left[:COUNTEREXAMPLES],
                        "formula_only": cmp.only_right[:COUNTEREXAMPLES],
                    },
                    params,
                )
            )
    return results


def cmd_verify_lemmas(
    limit: Optional[int] = None,
    jobs: Optional[int] = None,
    db: Optional[FixtureDatabase] = None,
) -> RunReport:
    """The lemma progressions and the exceptional-set formulas up to limit; the
    equal-count lemma for 8n+1 up to min(limit, THM14_PIPELINE_LIMIT)."""
    limit = config.LEMMA_LIMIT if limit is None else limit
    _require(limit, "limit", 1)
    db = db or load_fixtures()
    count_limit = min(limit, config.THM14_PIPELINE_LIMIT)
    tasks: List[Task] = [
        (progression_checks, ([claim], limit, "lemma")) for claim in db.lemmas
    ]
    tasks.append((lemma_5_1_checks, (count_limit,)))
    tasks.append((exception_formula_checks, (limit,)))
    params = {"limit": limit, "count_limit": count_limit, "fixtures": db.name}
    return _report("verify-lemmas", tasks, params, jobs)


# identities and descents


def rule_checks(rule_ids: Sequence[str]) -> List[CheckResult]:
    results = []
    for rule_id in rule_ids:
        ok, msg = validate_rule(get_rule(rule_id))
        name = f"rule.{rule_id}"
        if ok:
            results.append(CheckResult.passed_with(name))
        else:
            results.append(CheckResult.failed_with(name, {"rule": rule_id}, None, msg))
    return results


def fixture_rule_checks(db: FixtureDatabase) -> List[CheckResult]:
    """Every rule named by the fixture file exists in the library."""
    known = builtin_rules()
    named = [e.rule for e in db.identities]
    named += [r for fx in db.genus for r in fx.rules]
    unknown = sorted({r for r in named if r not in known})
    if unknown:
        return [CheckResult.failed_with("identities", unknown)]
    return [CheckResult.passed_with("identities", {"rules": len(set(named))})]


def descent_1_5_10_checks(limit: int) -> List[CheckResult]:
    """All-odd descent from every representation of 40n + r^2 + 15, r = 1, 3."""
    name = "descent.odd_1_5_10"
    started = 0
    for n in range(limit + 1):
        for r in (1, 3):
            w = 40 * n + r * r + 15
            for rep in forms.representations(D1510, w):
                try:
                    trace = descend_odd_1_5_10(w, rep.vector)
                except InvariantFailure as e:
                    example = {"w": w, "start": list(rep.vector), "error": e.msg}
                    return [CheckResult.failed_with(name, example, {"limit": limit})]
                bad = not all(c % 2 for c in trace.final) or D1510(trace.final) != w
                if bad or trace.rule_applications > max_rule_applications(w):
                    example = {
                        "w": w,
                        "start": list(rep.vector),
                        "steps": trace.rule_applications,
                    }
                    return [CheckResult.failed_with(name, example, {"limit": limit})]
                started += 1
    return [CheckResult.passed_with(name, {"limit": limit, "starts": started})]


def descent_lemma_4_2_checks(limit: int) -> List[CheckResult]:
    """Odd representations by x^2 + 15y^2 from every (u, v), u, v >= 0, whose
    value is a positive multiple of 8 up to limit."""
    name = "descent.x2_15y2"
    started = 0
    for v in range(isqrt(limit // 15) + 1):
        for u in range(isqrt(limit - 15 * v * v) + 1):
            w = u * u + 15 * v * v
            if w == 0 or w % 8:
                continue
            try:
                final = descend_lemma_4_2(u, v).final
            except InvariantFailure as e:
                example = {"u": u, "v": v, "error": e.msg}
                return [CheckResult.failed_with(name, example, {"limit": limit})]
            if not (final[0] % 2 and final[1] % 2):
                return [CheckResult.failed_with(name, {"u": u, "v": v})]
            started += 1
    return [CheckResult.passed_with(name, {"limit": limit, "starts": started})]


def descent_binary_checks(limit: int) -> List[CheckResult]:
    """descend_odd_binary for every kind and every (u, v), u, v >= 0, in the
    kind's residue class with value up to limit."""
    results = []
    for kind in BinaryKind:
        name = f"descent.binary.{kind.value}"
        started = 0
        failed = None
        for u in range(isqrt(limit) + 1):
            for v in range(isqrt(limit) + 1):
                try:
                    a, b = descend_odd_binary(kind, u, v)
                except PreconditionError:
                    continue
                except InvariantFailure as e:
                    failed = {"u": u, "v": v, "error": e.msg}
                    break
                if not (a % 2 and b % 2):
                    failed = {"u": u, "v": v, "result": [a, b]}
                    break
                started += 1
            if failed:
                break
        if failed:
            results.append(CheckResult.failed_with(name, failed, {"limit": limit}))
        else:
            params = {"limit": limit, "starts": started}
            results.append(CheckResult.passed_with(name, params))
    return results


def cmd_verify_descent(
    limit: Optional[int] = None,
    jobs: Optional[int] = None,
    db: Optional[FixtureDatabase] = None,
    lemma_4_2_limit: Optional[int] = None,
) -> RunReport:
    limit = config.DESCENT_LIMIT if limit is None else limit
    lemma_4_2_limit = (
        config.LEMMA_4_2_LIMIT if lemma_4_2_limit is None else lemma_4_2_limit
    )
    _require(limit, "limit", 0)
    db = db or load_fixtures()
    tasks: List[Task] = [
        (rule_checks, (list(builtin_rules()),)),
        (fixture_rule_checks, (db,)),
        (descent_1_5_10_checks, (limit,)),
        (descent_lemma_4_2_checks, (lemma_4_2_limit,)),
        (descent_binary_checks, (40 * limit + 24,)),
    ]
    params = {"limit": limit, "lemma_4_2_limit": lemma_4_2_limit}
    return _report("verify-descent", tasks, params, jobs)


# genus


def _ratio_result(
    fx: GenusFixture, m: int, cs: GenusClassSet, bound: int
) -> CheckResult:
    name = f"ratio.{fx.name}.m{m}"
    primes = odd_primes(bound, coprime_to=2 * m * cs.determinant)
    params = {"m": m, "primes": primes}
    if genus_average(cs, m).value == 0:
        return CheckResult.skipped(name, f"m={m} is not represented by the genus")
    for p in primes:
        rc = ratio_check(cs, m, p)
        if not rc.passed:
            example = {"p": p, "lhs": str(rc.lhs), "rhs": rc.rhs}
            return CheckResult.failed_with(name, example, params, rc.msg)
    return CheckResult.passed_with(name, params)


def genus_checks(fx: GenusFixture, ratio_bound: int) -> List[CheckResult]:
    """The class-set fixture, ratio checks for m = 1, 2, the weighted aggregate
    identity and the square-count claims of one genus."""
    params = {"determinant": fx.determinant, "primes": list(fx.primes)}
    outcome = check_genus_fixture(
        fx.name, fx.representatives, fx.primes, closure=cached_class_set
    )
    name = f"genus.{fx.name}"
    if outcome.passed:
        params["classes"] = outcome.classes_found
        results = [CheckResult.passed_with(name, params)]
    else:
        results = [CheckResult.failed_with(name, outcome.failures, params)]

    cs = cached_class_set(fx.seed, fx.primes)
    results.extend(_ratio_result(fx, m, cs, ratio_bound) for m in (1, 2))

    agg = fx.aggregate
    if agg is not None:
        name = f"aggregate.{fx.name}"
        primes = odd_primes(ratio_bound, coprime_to=2 * agg.m * fx.determinant)
        failed = None
        for p in primes:
            lhs, rhs, ok = aggregate_check(
                fx.representatives, agg.weights, agg.m, agg.factor, agg.symbol, p
            )
            if not ok:
                failed = {"p": p, "lhs": lhs, "rhs": rhs}
                break
        params = {"m": agg.m, "primes": primes}
        if failed:
            results.append(CheckResult.failed_with(name, failed, params))
        else:
            results.append(CheckResult.passed_with(name, params))

    for claim in fx.counts:
        name = f"count.{fx.name}.{claim.n}"
        found = forms.count(claim.form, claim.n)
        params = {
            "form": claim.form.literal,
            "n": claim.n,
            "more_than": claim.more_than,
        }
        if found > claim.more_than:
            results.append(CheckResult.passed_with(name, params, f"r = {found}"))
        else:
            results.append(CheckResult.failed_with(name, {"r": found}, params))
    return results


def cmd_verify_genus(
    jobs: Optional[int] = None,
    db: Optional[FixtureDatabase] = None,
    ratio_bound: Optional[int] = None,
) -> RunReport:
    ratio_bound = config.RATIO_PRIME_BOUND if ratio_bound is None else ratio_bound
    db = db or load_fixtures()
    tasks: List[Task] = [(genus_checks, (fx, ratio_bound)) for fx in db.genus]
    params = {"ratio_prime_bound": ratio_bound, "fixtures": db.name}
    return _report("verify-genus", tasks, params, jobs)


# x^2 + y^2 + 8z^2 = 8n + 2


class Thm14Witness(NamedTuple):
    n: int
    case: int
    vector: Tuple[int, int, int]


def twice_triangular_root(n: int) -> Optional[int]:
    """m with n = m (m + 1), if any."""
    if not is_square(4 * n + 1):
        return None
    return (isqrt(4 * n + 1) - 1) // 2


def _unit_first(a: int, b: int, n: int) -> Tuple[int, int]:
    if a % 8 in (1, 7):
        return a, b
    if b % 8 in (1, 7):
        return b, a
    raise InvariantFailure(f"n={n}: neither {a} nor {b} is +-1 mod 8")


def _first_prime_3_mod_4(q: int) -> Optional[int]:
    for p in sorted(sympy.factorint(q)):
        if p % 4 == 3:
            return int(p)
    return None


def thm14_witness(n: int, spinor: bool = False) -> Thm14Witness:
    """(x, y, z) with x^2 + y^2 + 8z^2 = 8n + 2 and x = +-1 (mod 8), built
    along the proof: a constrained three-square split of 4n+1 when n is not
    twice a triangular number, two squares of 2m+1 when it has no prime factor
    3 mod 4, otherwise the four-square lift of such a prime (or the
    determinant-32 spinor instance when spinor is set)."""
    if n < 0:
        raise PreconditionError(f"n must be nonnegative, got {n}")
    m = twice_triangular_root(n)
    if m is None:
        case = 1
        constraint = RepConstraint(
            parities=[Parity.ODD, Parity.EVEN, Parity.ANY],
            residues=[None, None, (4, [(2 * n - 2) % 4])],
        )
        reps = forms.representations(THREE_SQUARES, 4 * n + 1, constraint)
        if not reps:
            raise InvariantFailure(f"n={n}: no split of {4 * n + 1} as required")
        x, y, z = reps[0].vector
        a, b = _unit_first(x + y, x - y, n)
        vector = (a, b, z // 2)
    else:
        q = 2 * m + 1
        p = _first_prime_3_mod_4(q)
        if p is None:
            case = 2
            if m % 4 == 0:
                vector = (q, q, 0)
            else:
                odd = [
                    (u, v)
                    for u, v in forms.binary_representations(4, q)
                    if u % 2 and v % 2
                ]
                if not odd:
                    raise InvariantFailure(f"n={n}: {q} is not u^2 + 4v^2, u, v odd")
                u, v = odd[0]
                base = u * u - 4 * v * v
                a, b = _unit_first(base + 4 * u * v, base - 4 * u * v, n)
                vector = (a, b, 0)
        else:
            case = 3
            s = q // p
            if spinor:
                inst = spinor_instance(p)
                if inst is None:
                    raise InvariantFailure(f"n={n}: no spinor instance for p={p}")
                u, b, w = inst.odd_triple
                first, second = _unit_first(s * u, s * b, n)
                vector = (first, second, s * w)
            else:
                triple = get_rule("R5.L").apply(lagrange_even_odd_decomposition(p))
                odd = [t for t in triple if t % 2]
                even = [t for t in triple if t % 2 == 0]
                x, y, z = s * odd[0], s * even[0] // 2, s * even[1] // 2
                first, second = _unit_first(x + 2 * y, x - 2 * y, n)
                vector = (first, second, z)

    a, b, c = vector
    if a * a + b * b + 8 * c * c != 8 * n + 2:
        raise InvariantFailure(f"n={n}: case {case} gave {vector}")
    return Thm14Witness(n, case, vector)


def thm14_search_checks(limit: int) -> List[CheckResult]:
    name = "thm14.search"
    top = 8 * limit + 2
    constraint = RepConstraint(residues=[(8, [1, 7]), None, None])
    marked = forms.represented_set((1, 1, 8), top, constraint)
    missing = [n for n in range(limit + 1) if not marked[8 * n + 2]]
    if missing:
        return [
            CheckResult.failed_with(name, missing[:COUNTEREXAMPLES], {"limit": limit})
        ]
    return [CheckResult.passed_with(name, {"limit": limit})]


def thm14_pipeline_checks(limit: int) -> List[CheckResult]:
    name = "thm14.pipeline"
    cases = {1: 0, 2: 0, 3: 0}
    for n in range(limit + 1):
        try:
            variants = [thm14_witness(n)]
            if variants[0].case == 3:
                variants.append(thm14_witness(n, spinor=True))
        except InvariantFailure as e:
            return [CheckResult.failed_with(name, {"n": n, "error": e.msg})]
        cases[variants[0].case] += 1
    params = {"limit": limit, "cases": {str(k): v for k, v in cases.items()}}
    return [CheckResult.passed_with(name, params)]


def spinor_checks(p_limit: int) -> List[CheckResult]:
    name = "thm14.spinor"
    instances, missing = spinor_instance_check(p_limit)
    params = {"p_limit": p_limit, "instances": len(instances)}
    if missing:
        return [CheckResult.failed_with(name, missing[:COUNTEREXAMPLES], params)]
    return [CheckResult.passed_with(name, params)]


def cmd_verify_thm14(
    limit: Optional[int] = None,
    jobs: Optional[int] = None,
    pipeline_limit: Optional[int] = None,
    spinor_limit: Optional[int] = None,
) -> RunReport:
    limit = config.THM14_LIMIT if limit is None else limit
    _require(limit, "limit", 0)
    pipeline_limit = min(
        limit,
        config.THM14_PIPELINE_LIMIT if pipeline_limit is None else pipeline_limit,
    )
    spinor_limit = config.SPINOR_PRIME_LIMIT if spinor_limit is None else spinor_limit
    tasks: List[Task] = [
        (thm14_search_checks, (limit,)),
        (thm14_pipeline_checks, (pipeline_limit,)),
        (spinor_checks, (spinor_limit,)),
    ]
    params = {
        "limit": limit,
        "pipeline_limit": pipeline_limit,
        "spinor_prime_limit": spinor_limit,
    }
    return _report("verify-thm14", tasks, params, jobs)


def cmd_verify_all(jobs: Optional[int] = None) -> RunReport:
    """Every verify command at the configured bounds, merged into one report."""
    db = load_fixtures()
    parts = [
        cmd_verify_theorems(jobs=jobs, db=db),
        cmd_verify_lemmas(jobs=jobs, db=db),
        cmd_verify_descent(jobs=jobs, db=db),
        cmd_verify_genus(jobs=jobs, db=db),
        cmd_verify_thm14(jobs=jobs),
    ]
    params = {part.command: part.params for part in parts}
    elapsed = round(sum(part.elapsed or 0.0 for part in parts), 6)
    checks = [c for part in parts for c in part.checks]
    report = RunReport("verify-all", checks, params, elapsed=elapsed)
    logger.info(ctxlog(f"finished: {report.counts}", "verify-all"))
    return report
