# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
"""Drivers turning an arbitrary representation into one with odd coordinates.

Each step applies a library rule and divides the image by a power of two, so
the represented value is multiplied by scale / divisor^2. Sign flips are
recorded as steps too.
"""
import itertools
from math import isqrt
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import sympy
from marshmallow import Schema, fields, post_load

from unisum.forms import TernaryForm, parse_form
from unisum.rules import BinaryForm, Congruence, LinearRule, get_rule
from unisum.shared.config import UnisumConfig
from unisum.shared.enums import BinaryKind
from unisum.shared.errors import (
    FormError,
    InvariantFailure,
    PreconditionError,
    UsageError,
)
from unisum.shared.logger import UnisumLogger
from unisum.util import signed_range, two_adic_valuation, vector_gcd

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger

Coords = Tuple[int, ...]

SIGN = "sign"
SCALE = "scale"

_D1510 = TernaryForm.diag(1, 5, 10)

# (coefficient of u^2, coefficient of v^2, w mod 8)
_BINARY_KINDS = {
    BinaryKind.X2_3Y2: (1, 3, 4),
    BinaryKind.X2_7Y2: (1, 7, 0),
    BinaryKind.X3_5Y2: (3, 5, 0),
    BinaryKind.X2_15Y2: (1, 15, 0),
}


class DescentStepSchema(Schema):
    class Meta:
        ordered = True

    rule = fields.Str(required=True)
    divisor = fields.Int(missing=1)
    vector = fields.List(fields.Int(), required=True)

    @post_load
    def make_step(self, data: Dict[str, Any], **kwargs: Any) -> "DescentStep":
        return DescentStep(data["rule"], tuple(data["vector"]), data["divisor"])


class DescentStep(object):
    def __init__(self, rule: str, vector: Coords, divisor: int = 1) -> None:
        self.rule = rule
        self.vector = tuple(vector)
        self.divisor = divisor

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DescentStep):
            return NotImplemented
        return (self.rule, self.vector, self.divisor) == (
            other.rule,
            other.vector,
            other.divisor,
        )

    def __repr__(self) -> str:
        div = f"/{self.divisor}" if self.divisor != 1 else ""
        return f"{self.rule}{div} -> {self.vector}"


class DescentTraceSchema(Schema):
    class Meta:
        ordered = True

    form = fields.Str(required=True)
    value = fields.Int(required=True)
    start = fields.List(fields.Int(), required=True)
    steps = fields.List(fields.Nested(DescentStepSchema), missing=list)
    final = fields.List(fields.Int(), required=True)

    @post_load
    def make_trace(self, data: Dict[str, Any], **kwargs: Any) -> "DescentTrace":
        return DescentTrace(
            data["form"],
            data["value"],
            tuple(data["start"]),
            data["steps"],
            tuple(data["final"]),
        )


class DescentTrace(object):
    def __init__(
        self,
        form: str,
        value: int,
        start: Coords,
        steps: Optional[List[DescentStep]] = None,
        final: Optional[Coords] = None,
    ) -> None:
        self.form = form
        self.value = value
        self.start = tuple(start)
        self.steps: List[DescentStep] = steps or []
        self.final = tuple(final) if final is not None else self.start

    def record(self, rule: str, vector: Sequence[int], divisor: int = 1) -> Coords:
        step = DescentStep(rule, tuple(vector), divisor)
        logger.debug(f"{self.form}: {step!r}")
        self.steps.append(step)
        self.final = step.vector
        return step.vector

    @property
    def rule_applications(self) -> int:
        return sum(1 for s in self.steps if s.rule not in (SIGN, SCALE))

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}({self.form}, {self.value}: {self.start} ->"
            f" {self.final} in {len(self.steps)} steps)"
        )

    def dump(self) -> Dict[str, Any]:
        return DescentTraceSchema().dump(self)


def _apply_divided(rule_id: str, v: Sequence[int], divisor: int) -> Coords:
    image = get_rule(rule_id).apply(v)
    if any(c % divisor for c in image):
        raise InvariantFailure(
            f"{rule_id} image {image} of {tuple(v)} not divisible by {divisor}"
        )
    return tuple(c // divisor for c in image)


def _all_odd(v: Sequence[int]) -> bool:
    return all(c % 2 for c in v)


def max_rule_applications(w: int) -> int:
    """2 + ceil(log_4 w), the bound on rule applications of descend_odd_1_5_10."""
    e = 0
    while 4 ** e < w:
        e += 1
    return 2 + e


def descend_odd_1_5_10(w: int, start: Sequence[int]) -> DescentTrace:
    """All-odd representation by x^2+5y^2+10z^2 of w = 40n + r^2 + 15, r = 1 or 3."""
    if w <= 0 or (w - 16) % 40 and (w - 24) % 40:
        raise PreconditionError(
            f"{w} is not of the form 40n + r^2 + 15 with r in {{1,3}}"
        )
    if _D1510(start) != w:
        raise PreconditionError(f"{tuple(start)} does not represent {w} by {_D1510}")

    trace = DescentTrace(_D1510.literal, w, tuple(start))
    if _all_odd(start):
        return trace

    k = two_adic_valuation(vector_gcd(start))
    x0, y0, z0 = (c >> k for c in start)
    if k:
        trace.record(SCALE, (x0, y0, z0), 2 ** k)
    v: Coords = (x0, y0, z0)

    if not _all_odd(v):
        if x0 % 2 != y0 % 2:
            if k < 2:
                raise InvariantFailure(f"{w}: mixed parity {v} needs 4^2 | w")
            v = trace.record("R2.1-", _apply_divided("R2.1-", v, 1))
            k -= 2
        else:
            if k == 0:
                raise InvariantFailure(f"{w}: {v} has an even coordinate at 4^0")
            if x0 % 2:
                # x0, y0 odd and z0 even: avoid x0 = y0 - 2 z0 (mod 4)
                if (x0 - y0 + 2 * z0) % 4 == 0:
                    v = trace.record(SIGN, (-x0, y0, z0))
                v = trace.record("R2.1-", _apply_divided("R2.1-", v, 2), 2)
            elif ((x0 - y0) // 2) % 2 == 0:
                v = trace.record("R2.1-", _apply_divided("R2.1-", v, 2), 2)
            else:
                if (z0 - (y0 - x0) // 2) % 4:
                    v = trace.record(SIGN, (x0, y0, -z0))
                v = trace.record("R2.1-", _apply_divided("R2.1-", v, 2), 2)
                v = trace.record("R2.1-", _apply_divided("R2.1-", v, 4), 4)
            k -= 1
        if not _all_odd(v):
            raise InvariantFailure(f"{w}: case analysis left {v}")

    for _ in range(k):
        x, y, z = v
        rule_id = "R2.1+" if ((x + y) // 2 + z) % 2 else "R2.1-"
        v = trace.record(rule_id, _apply_divided(rule_id, v, 2), 2)
        if not _all_odd(v):
            raise InvariantFailure(f"{w}: {rule_id} lost oddness at {v}")

    if _D1510(v) != w:
        raise InvariantFailure(f"{w}: descent ended at {v} with value {_D1510(v)}")
    return trace


def descend_lemma_4_2(u: int, v: int) -> DescentTrace:
    """Odd (x, y) with x^2 + 15y^2 = u^2 + 15v^2 when 8 divides the value."""
    form = BinaryForm(1, 15)
    w = form((u, v))
    if w <= 0 or w % 8:
        raise PreconditionError(f"u^2+15v^2 = {w} must be positive and divisible by 8")
    trace = DescentTrace(form.literal, w, (u, v))
    if u % 2 and v % 2:
        return trace

    k = two_adic_valuation(vector_gcd((u, v)))
    cur: Coords = (u >> k, v >> k)
    trace.record(SCALE, cur, 2 ** k)
    if cur[0] % 2 != cur[1] % 2:
        if k < 2:
            raise InvariantFailure(f"{w}: mixed parity {cur} needs 4^2 | w")
        cur = trace.record("RL4.2", _apply_divided("RL4.2", cur, 1))
        k -= 2
    for _ in range(k):
        if (cur[0] - cur[1]) % 4:
            cur = trace.record(SIGN, (cur[0], -cur[1]))
        cur = trace.record("RL4.2", _apply_divided("RL4.2", cur, 2), 2)

    if not _all_odd(cur) or form(cur) != w:
        raise InvariantFailure(f"{w}: descent ended at {cur}")
    return trace


def descend_odd_binary(kind: Union[str, BinaryKind], u: int, v: int) -> Tuple[int, int]:
    try:
        kind = BinaryKind(kind)
    except ValueError:
        raise PreconditionError(f"unknown binary kind '{kind}'")
    p, q, residue = _BINARY_KINDS[kind]
    w = p * u * u + q * v * v
    if w <= 0 or w % 8 != residue:
        raise PreconditionError(
            f"{kind.value} at {(u, v)} gives {w}, need {residue} mod 8"
        )
    if u % 2 and v % 2:
        return (u, v)
    if kind == BinaryKind.X2_15Y2:
        final = descend_lemma_4_2(u, v).final
        return (final[0], final[1])

    for a in signed_range(isqrt(w // p)):
        if a % 2 == 0:
            continue
        rest = w - p * a * a
        if rest % q:
            continue
        b = isqrt(rest // q)
        if b * b * q == rest and b % 2:
            return (a, b)
    raise InvariantFailure(f"{w} has no odd representation by {kind.value}")


Predicate = Union[Congruence, Callable[[Sequence[int]], bool]]


def sign_normalize(
    v: Sequence[int],
    predicate: Predicate,
    allowed: Sequence[bool] = (True, True, True),
) -> Tuple[Optional[Coords], Optional[str]]:
    """First sign pattern in (+,+,+), (+,+,-), ... order meeting the predicate."""
    test = predicate.holds if isinstance(predicate, Congruence) else predicate
    for signs in itertools.product((1, -1), repeat=len(v)):
        if any(s < 0 and not ok for s, ok in zip(signs, allowed)):
            continue
        cand = tuple(s * c for s, c in zip(signs, v))
        if test(cand):
            return cand, None
    return None, f"no sign pattern of {tuple(v)} satisfies the predicate"


def lagrange_even_odd_decomposition(p: int) -> Tuple[int, int, int, int]:
    """p = a^2+b^2+c^2+d^2 with a even and b, c, d odd, for primes p = 3 (mod 4)."""
    if p % 4 != 3 or not sympy.isprime(p):
        raise PreconditionError(f"{p} is not a prime congruent to 3 mod 4")
    for a in range(0, isqrt(p) + 1, 2):
        rest_a = p - a * a
        for b in _odd_descending(isqrt(rest_a)):
            rest_b = rest_a - b * b
            for c in _odd_descending(isqrt(rest_b)):
                d2 = rest_b - c * c
                d = isqrt(d2)
                if d * d == d2 and d % 2:
                    triple = get_rule("R5.L").apply((a, b, c, d))
                    if sum(t * t for t in triple) != p * p:
                        raise InvariantFailure(f"{p}: {triple} does not represent p^2")
                    if sum(t % 2 for t in triple) != 1:
                        raise InvariantFailure(f"{p}: {triple} needs one odd entry")
                    return (a, b, c, d)
    raise InvariantFailure(f"{p} has no (even, odd, odd, odd) four-square split")


def _odd_descending(top: int) -> range:
    top = top if top % 2 else top - 1
    return range(top, 0, -2)


def _parse_binary(literal: str) -> BinaryForm:
    try:
        parts = [int(p) for p in literal.split(",")]
    except ValueError:
        raise UsageError(f"malformed binary form literal '{literal}'")
    if len(parts) not in (2, 3):
        raise UsageError(f"binary form literal needs 2 or 3 integers: '{literal}'")
    return BinaryForm(*parts)


def run_rule(rule_id: str, form_literal: str, vector: Sequence[int]) -> DescentTrace:
    """CLI entry: full drivers for R2.1 and RL4.2, one application otherwise."""
    rule = get_rule(rule_id)
    if rule_id in ("R2.1+", "R2.1-"):
        if parse_form(form_literal) != _D1510:
            raise UsageError(f"{rule_id} descends along {_D1510.literal}")
        return descend_odd_1_5_10(_D1510(vector), vector)
    if rule_id == "RL4.2":
        if len(vector) != 2:
            raise UsageError("RL4.2 takes two coordinates")
        return descend_lemma_4_2(*vector)

    if len(vector) != rule.arity:
        raise UsageError(f"{rule_id} takes {rule.arity} coordinates, got {len(vector)}")
    if isinstance(rule, LinearRule):
        try:
            given: Any = (
                parse_form(form_literal)
                if rule.arity == 3
                else _parse_binary(form_literal)
            )
        except FormError as e:
            raise UsageError(e.msg) from e
        if given != rule.source:
            raise UsageError(
                f"{rule_id} rewrites {rule.source.literal}, not {form_literal}"
            )
        value = given(vector)
    else:
        value = sum(c * c for c in vector) ** 2
    trace = DescentTrace(form_literal, value, tuple(vector))
    trace.record(rule_id, rule.apply(vector))
    return trace
