# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
"""Sum tuples: x(ax+b)/2 + y(cy+d)/2 + z(ez+f)/2 over the integers.

Reachability up to N is a two-pass bitset sumset, V1 + (V2 + V3). The inner
sumset V2 + V3 is kept as a boolean array and doubles as the witness oracle.
"""
from functools import lru_cache
from math import gcd, isqrt
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import sympy
from marshmallow import Schema, fields, post_load

from unisum import sieve
from unisum.forms import RepConstraint, SetComparison, TernaryForm
from unisum.shared.config import UnisumConfig
from unisum.shared.errors import InvariantFailure, PreconditionError, TupleError
from unisum.shared.fields import TupleField, VectorField
from unisum.shared.logger import UnisumLogger
from unisum.util import ctxlog, signed_range

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger

Vector = Tuple[int, int, int]
Term = Tuple[int, int]

# exceptions re-checked by the dictionary search, independent of the bitsets
_EXCEPTION_RECHECKS = 32


class SumTupleSchema(Schema):
    class Meta:
        ordered = True

    a = fields.Int(required=True)
    b = fields.Int(required=True)
    c = fields.Int(required=True)
    d = fields.Int(required=True)
    e = fields.Int(required=True)
    f = fields.Int(required=True)

    @post_load
    def make_tuple(self, data: Dict[str, int], **kwargs: Any) -> "SumTuple":
        return SumTuple(**data)


class SumTuple(object):
    def __init__(self, a: int, b: int, c: int, d: int, e: int, f: int) -> None:
        self.a, self.b, self.c, self.d, self.e, self.f = (
            int(v) for v in (a, b, c, d, e, f)
        )
        if not self.a >= self.c >= self.e > 0:
            raise TupleError(f"need a >= c >= e > 0: {self.literal}")
        for lead, lin in self.terms:
            if not 0 <= lin <= lead:
                raise TupleError(f"linear coefficient {lin} outside [0, {lead}]")
            if (lead - lin) % 2:
                raise TupleError(f"parity mismatch in term ({lead},{lin})")

    @property
    def coefficients(self) -> Tuple[int, int, int, int, int, int]:
        return (self.a, self.b, self.c, self.d, self.e, self.f)

    @property
    def terms(self) -> Tuple[Term, Term, Term]:
        return ((self.a, self.b), (self.c, self.d), (self.e, self.f))

    @property
    def literal(self) -> str:
        return ",".join(str(v) for v in self.coefficients)

    def evaluate(self, v: Sequence[int]) -> int:
        return sum(term(a, b, x) for (a, b), x in zip(self.terms, v))

    def __iter__(self) -> Iterator[int]:
        return iter(self.coefficients)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SumTuple):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __lt__(self, other: "SumTuple") -> bool:
        return self.coefficients < other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.literal})"

    def dump(self) -> Dict[str, int]:
        return SumTupleSchema().dump(self)


def parse_tuple(literal: str) -> SumTuple:
    parts = [p.strip() for p in literal.strip().strip("()").split(",")]
    if len(parts) != 6:
        raise TupleError(f"tuple literal needs six integers: '{literal}'")
    try:
        return SumTuple(*(int(p) for p in parts))
    except ValueError as e:
        raise TupleError(f"malformed tuple literal '{literal}'") from e


def format_tuple(t: SumTuple) -> str:
    return t.literal


def term(a: int, b: int, x: int) -> int:
    if (a - b) % 2:
        raise TupleError(f"term ({a},{b}) is not integral: a and b differ in parity")
    return x * (a * x + b) // 2


def term_bound(a: int, b: int, limit: int) -> int:
    """|x| beyond this gives term(a, b, x) > limit."""
    if a <= 0:
        raise TupleError(f"leading coefficient must be positive, got {a}")
    return (abs(b) + isqrt(b * b + 8 * a * max(limit, 0)) + 1) // (2 * a) + 1


def _term_table(a: int, b: int, limit: int) -> Dict[int, int]:
    """value -> first x in 0, 1, -1, 2, ... reaching it, for values in [0, limit]."""
    table: Dict[int, int] = {}
    for x in signed_range(term_bound(a, b, limit)):
        value = term(a, b, x)
        if 0 <= value <= limit and value not in table:
            table[value] = x
    return table


@lru_cache(maxsize=1024)
def _values(a: int, b: int, limit: int) -> Tuple[int, ...]:
    return tuple(sorted(_term_table(a, b, limit)))


def term_values_up_to(a: int, b: int, limit: int) -> List[int]:
    if limit < 0:
        return []
    return list(_values(a, b, limit))


class CompletionComponent(NamedTuple):
    weight: int
    stride: int
    residue: int


class CompletionSystemSchema(Schema):
    class Meta:
        ordered = True

    M = fields.Int(required=True)
    C = fields.Int(required=True)
    components = fields.List(VectorField(), required=True)

    @post_load
    def make_system(self, data: Dict[str, Any], **kwargs: Any) -> "CompletionSystem":
        return CompletionSystem(
            data["M"], data["C"], [CompletionComponent(*c) for c in data["components"]]
        )


class CompletionSystem(object):
    """M*n + C = sum w_i (m_i x_i + r_i)^2 where n is the tuple sum."""

    def __init__(self, M: int, C: int, components: Sequence[CompletionComponent]):
        self.M = M
        self.C = C
        self.components: List[CompletionComponent] = list(components)

    @property
    def form(self) -> TernaryForm:
        return TernaryForm.diag(*(c.weight for c in self.components))

    @property
    def constraint(self) -> RepConstraint:
        return RepConstraint(
            residues=[(c.stride, [c.residue]) for c in self.components]
        )

    def value(self, v: Sequence[int]) -> int:
        return sum(
            c.weight * (c.stride * x + c.residue) ** 2
            for c, x in zip(self.components, v)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompletionSystem):
            return NotImplemented
        return (self.M, self.C, self.components) == (
            other.M,
            other.C,
            other.components,
        )

    def __repr__(self) -> str:
        parts = " + ".join(
            f"{c.weight}({c.stride}x{i}+{c.residue})^2"
            for i, c in enumerate(self.components, 1)
        )
        return f"{self.__class__.__name__}({self.M}n+{self.C} = {parts})"

    def dump(self) -> Dict[str, Any]:
        return CompletionSystemSchema().dump(self)


def derive_completion(t: SumTuple) -> CompletionSystem:
    gs = [gcd(2 * a, b) for a, b in t.terms]
    M = 1
    for (a, _), g in zip(t.terms, gs):
        step = 8 * a // gcd(8 * a, g * g)
        M = M * step // gcd(M, step)
    components = [
        CompletionComponent(M * g * g // (8 * a), 2 * a // g, b // g)
        for (a, b), g in zip(t.terms, gs)
    ]
    C = sum(c.weight * c.residue ** 2 for c in components)
    system = CompletionSystem(M, C, components)

    xs = sympy.symbols("x1:4")
    lhs = sum(
        c.weight * (c.stride * x + c.residue) ** 2 for c, x in zip(components, xs)
    )
    half = sympy.Rational(1, 2)
    rhs = M * sum(half * x * (a * x + b) for (a, b), x in zip(t.terms, xs))
    if sympy.expand(lhs - C - rhs) != 0:
        raise InvariantFailure(f"completion of {t!r} does not expand to an identity")
    logger.debug(f"{t!r}: {system!r}")
    return system


class _WitnessOracle(object):
    """Reachable set of a tuple on [0, limit] plus witness recovery."""

    def __init__(self, t: SumTuple, limit: int, shard_count: int = 1) -> None:
        self.t = t
        self.limit = limit
        self.tables = [_term_table(a, b, limit) for a, b in t.terms]
        self.orders = [
            sorted(table.items(), key=lambda kv: _signed_key(kv[1]))
            for table in self.tables
        ]
        tail_bits = sieve.sumset(
            list(self.tables[1]), list(self.tables[2]), limit, shard_count
        )
        self.tail = sieve.array_from_bits(tail_bits, limit)
        self.reach = sieve.shifted_union(
            tail_bits, sorted(self.tables[0]), limit, shard_count
        )

    def witness(self, n: int) -> Optional[Vector]:
        if n < 0 or n > self.limit or not (self.reach >> n) & 1:
            return None
        for x_val, x in self.orders[0]:
            rest = n - x_val
            if rest < 0 or not self.tail[rest]:
                continue
            for y_val, y in self.orders[1]:
                z_val = rest - y_val
                if z_val in self.tables[2]:
                    return (x, y, self.tables[2][z_val])
        raise InvariantFailure(f"{self.t!r}: bitset marks {n} but no witness found")


def _signed_key(x: int) -> Tuple[int, int]:
    return (abs(x), 0 if x >= 0 else 1)


def _brute_force_witness(t: SumTuple, n: int) -> Optional[Vector]:
    tables = [_term_table(a, b, n) for a, b in t.terms]
    for x_val, x in tables[0].items():
        for y_val, y in tables[1].items():
            z = tables[2].get(n - x_val - y_val)
            if z is not None:
                return (x, y, z)
    return None


def reachable(t: SumTuple, limit: int, shard_count: int = 1) -> int:
    """Bitset of the tuple's values in [0, limit]."""
    return _WitnessOracle(t, limit, shard_count).reach


def is_representable(t: SumTuple, n: int) -> Optional[Vector]:
    if n < 0:
        raise PreconditionError(f"n must be nonnegative, got {n}")
    return _WitnessOracle(t, n).witness(n)


class UniversalityReportSchema(Schema):
    class Meta:
        ordered = True

    sum_tuple = TupleField(required=True, data_key="tuple")
    verified_limit = fields.Int(required=True)
    exceptions = fields.List(fields.Int(), required=True)
    witnesses = fields.Dict(keys=fields.Int(), values=VectorField(), missing=dict)

    @post_load
    def make_report(self, data: Dict[str, Any], **kwargs: Any) -> "UniversalityReport":
        return UniversalityReport(**data)


class UniversalityReport(object):
    def __init__(
        self,
        sum_tuple: SumTuple,
        verified_limit: int,
        exceptions: List[int],
        witnesses: Dict[int, Vector],
    ) -> None:
        self.sum_tuple = sum_tuple
        self.verified_limit = verified_limit
        self.exceptions = exceptions
        self.witnesses = witnesses

    @property
    def passed(self) -> bool:
        return not self.exceptions

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}({self.sum_tuple.literal},"
            f" N={self.verified_limit}, exceptions={self.exceptions[:8]})"
        )

    def dump(self) -> Dict[str, Any]:
        return UniversalityReportSchema().dump(self)


def _sample_points(limit: int, count: int) -> List[int]:
    if count <= 0 or limit < 0:
        return []
    if count == 1:
        return [limit]
    return sorted({limit * i // (count - 1) for i in range(count)})


def verify_universal(
    t: SumTuple, limit: int, shard_count: int = 1
) -> UniversalityReport:
    if limit < 0:
        raise PreconditionError(f"limit must be nonnegative, got {limit}")
    check = f"tuple({t.literal})"
    logger.debug(ctxlog(f"sieving up to {limit} in {shard_count} shard(s)", check))
    oracle = _WitnessOracle(t, limit, shard_count)
    exceptions = [int(n) for n in sieve.missing(oracle.reach, limit)]

    for n in exceptions[:_EXCEPTION_RECHECKS]:
        found = _brute_force_witness(t, n)
        if found is not None:
            raise InvariantFailure(f"{t!r}: {n} sieved out but {found} reaches it")

    witnesses: Dict[int, Vector] = {}
    excluded = set(exceptions)
    for n in _sample_points(limit, config.WITNESS_SAMPLES):
        if n in excluded:
            continue
        w = oracle.witness(n)
        if w is None or t.evaluate(w) != n:
            raise InvariantFailure(f"{t!r}: witness {w} does not evaluate to {n}")
        witnesses[n] = w

    report = UniversalityReport(t, limit, exceptions, witnesses)
    if report.passed:
        logger.debug(ctxlog(f"no exceptions up to {limit}", check))
    else:
        logger.warning(ctxlog(f"exceptions {exceptions[:10]}", check))
    return report


def eq_1_1_check(limit: int) -> SetComparison:
    """{p3(x) + p5(y)} against {p5(x) + 3 p5(y)} on [0, limit]."""
    if limit < 0:
        return SetComparison(limit, [], [])
    p3 = term_values_up_to(1, 1, limit)
    p5 = term_values_up_to(3, -1, limit)
    left = sieve.sumset(p3, p5, limit)
    right = sieve.sumset(p5, [3 * v for v in p5 if 3 * v <= limit], limit)
    return _compare_bits(left, right, limit)


def _compare_bits(left: int, right: int, limit: int) -> SetComparison:
    return SetComparison(
        limit,
        [int(n) for n in sieve.members(left & ~right, limit)],
        [int(n) for n in sieve.members(right & ~left, limit)],
    )


def compare_reachable(t1: SumTuple, t2: SumTuple, limit: int) -> SetComparison:
    return _compare_bits(reachable(t1, limit), reachable(t2, limit), limit)


def corollary_source(t: SumTuple) -> Optional[SumTuple]:
    """Swap the term pair 3p5 + p5 for p5 + p3; None if the pair is absent.

    Both pairs reach the same integers, so the two tuples share reachable sets.
    """
    terms = list(t.terms)
    if (9, 3) not in terms or (3, 1) not in terms:
        return None
    terms.remove((9, 3))
    terms.remove((3, 1))
    terms.extend([(3, 1), (1, 1)])
    terms.sort(reverse=True)
    return SumTuple(*(v for pair in terms for v in pair))


@lru_cache(maxsize=None)
def _pair_bits(c: int, d: int, e: int, f: int, limit: int) -> int:
    return sieve.sumset(_values(c, d, limit), _values(e, f, limit), limit)


def _covers(terms: Sequence[Term], limit: int) -> bool:
    (a, b), (c, d), (e, f) = terms
    inner = _pair_bits(c, d, e, f, limit)
    reach = sieve.shifted_union(inner, _values(a, b, limit), limit)
    return reach == sieve.window(limit)


def candidate_sieve(a_max: int, limit: int) -> List[SumTuple]:
    """Tuples with a <= a_max reaching every n <= limit.

    Terms are normalized as (a,b) >= (c,d) >= (e,f) lexicographically, so b >= d
    when a = c and d >= f when c = e. Each tuple is screened at growing limits.
    """
    if a_max < 1 or limit < 1:
        raise PreconditionError(f"need a_max >= 1 and limit >= 1: {a_max}, {limit}")
    stages = sorted({min(s, limit) for s in (64, 4096, limit)})
    pairs = [(a, b) for a in range(1, a_max + 1) for b in range(a % 2, a + 1, 2)]
    found: List[SumTuple] = []
    screened = 0
    for i, first in enumerate(pairs):
        for j, second in enumerate(pairs[: i + 1]):
            for third in pairs[: j + 1]:
                screened += 1
                terms = (first, second, third)
                if all(_covers(terms, stage) for stage in stages):
                    found.append(SumTuple(*first, *second, *third))
    found.sort()
    logger.info(
        f"candidate sieve a_max={a_max} limit={limit}: {len(found)} of {screened}"
    )
    return found

