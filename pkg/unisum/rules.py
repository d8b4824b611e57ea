# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
"""Exact form identities used as rewrite rules.

A linear rule maps source coordinates v to target coordinates U v with
target(U v) = s * source(v), i.e. U^T G_target U = s G_source. Its conditions
are congruences on v under which U v is integral. A polynomial rule is an
identity target(images(v)) = source(v) checked by symbolic expansion.
"""
import itertools
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import sympy
from natsort import natsorted

from unisum.forms import TernaryForm
from unisum.shared.config import UnisumConfig
from unisum.shared.enums import RuleKind
from unisum.shared.errors import PreconditionError, RuleValidationError, UsageError
from unisum.shared.logger import UnisumLogger

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger

Rational = Union[int, str, Fraction]


class BinaryForm(NamedTuple):
    """a11 u^2 + a22 v^2 + a12 uv with a12 even."""

    a11: int
    a22: int
    a12: int = 0

    @property
    def gram(self) -> Tuple[Tuple[Fraction, ...], ...]:
        h = Fraction(self.a12, 2)
        return ((Fraction(self.a11), h), (h, Fraction(self.a22)))

    @property
    def literal(self) -> str:
        return f"{self.a11},{self.a22},{self.a12}"

    def __call__(self, v: Sequence[int]) -> int:
        u, w = v
        return self.a11 * u * u + self.a22 * w * w + self.a12 * u * w


AnyForm = Union[TernaryForm, BinaryForm]


class Congruence(NamedTuple):
    """sum(coeffs[i] * v[i]) = residue (mod modulus)."""

    coeffs: Tuple[int, ...]
    modulus: int
    residue: int = 0

    def holds(self, v: Sequence[int]) -> bool:
        total = sum(c * x for c, x in zip(self.coeffs, v))
        return (total - self.residue) % self.modulus == 0

    def describe(self, names: str = "xyz") -> str:
        parts = []
        for c, name in zip(self.coeffs, names):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign}{'' if abs(c) == 1 else abs(c)}{name}")
        lhs = "".join(parts).lstrip("+") or "0"
        return f"{lhs}={self.residue} (mod {self.modulus})"


def divisible(modulus: int, index: int, rank: int = 3) -> Congruence:
    coeffs = [0] * rank
    coeffs[index] = 1
    return Congruence(tuple(coeffs), modulus)


def congruent(i: int, j: int, modulus: int = 2, rank: int = 3) -> Congruence:
    coeffs = [0] * rank
    coeffs[i], coeffs[j] = 1, -1
    return Congruence(tuple(coeffs), modulus)


SUM_ZERO_MOD_3 = Congruence((1, 1, 1), 3)


def _rational(value: Rational) -> sympy.Rational:
    q = Fraction(value)
    return sympy.Rational(q.numerator, q.denominator)


def _gram(form: AnyForm) -> sympy.Matrix:
    return sympy.Matrix([[_rational(e) for e in row] for row in form.gram])


def _lcm(values: Sequence[int]) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


class RewriteRule(object):
    kind: RuleKind

    def __init__(
        self,
        rule_id: str,
        target: AnyForm,
        identity: str,
        conditions: Sequence[Congruence] = (),
    ) -> None:
        self.rule_id = rule_id
        self.target = target
        self.identity = identity
        self.conditions: Tuple[Congruence, ...] = tuple(conditions)

    @property
    def names(self) -> str:
        return "xyz" if self.arity == 3 else ("uv" if self.arity == 2 else "abcd")

    @property
    def arity(self) -> int:
        raise NotImplementedError

    def admits(self, v: Sequence[int]) -> bool:
        return all(c.holds(v) for c in self.conditions)

    def validate(self) -> Tuple[bool, Optional[str]]:
        raise NotImplementedError

    def apply(self, v: Sequence[int]) -> Tuple[int, ...]:
        raise NotImplementedError

    def summary(self) -> Dict[str, Any]:
        ok, msg = self.validate()
        return {
            "id": self.rule_id,
            "kind": self.kind.value,
            "identity": self.identity,
            "conditions": [c.describe(self.names) for c in self.conditions],
            "valid": ok,
            "detail": msg,
        }

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.rule_id})"


class LinearRule(RewriteRule):
    kind = RuleKind.LINEAR

    def __init__(
        self,
        rule_id: str,
        source: AnyForm,
        target: AnyForm,
        rows: Sequence[Sequence[Rational]],
        scale: Rational = 1,
        conditions: Sequence[Congruence] = (),
        identity: str = "",
    ) -> None:
        super().__init__(rule_id, target, identity, conditions)
        self.source = source
        self.matrix: Tuple[Tuple[Fraction, ...], ...] = tuple(
            tuple(Fraction(e) for e in row) for row in rows
        )
        self.scale = Fraction(scale)

    @property
    def arity(self) -> int:
        return len(self.matrix)

    @property
    def denominator(self) -> int:
        return _lcm([e.denominator for row in self.matrix for e in row])

    @property
    def grid_modulus(self) -> int:
        return _lcm([self.denominator] + [c.modulus for c in self.conditions])

    def image(self, v: Sequence[int]) -> Tuple[Fraction, ...]:
        return tuple(sum(e * x for e, x in zip(row, v)) for row in self.matrix)

    def validate(self) -> Tuple[bool, Optional[str]]:
        U = sympy.Matrix([[_rational(e) for e in row] for row in self.matrix])
        if U.shape != (len(self.target.gram), len(self.source.gram)):
            return False, f"{self.rule_id}: matrix shape {U.shape} does not match forms"
        lhs = U.T * _gram(self.target) * U
        rhs = _rational(self.scale) * _gram(self.source)
        for i, j in itertools.product(range(self.arity), repeat=2):
            if lhs[i, j] != rhs[i, j]:
                msg = f"entry ({i},{j}) {lhs[i, j]} != {rhs[i, j]}"
                return False, f"{self.rule_id}: {msg}"

        grid = self.grid_modulus
        for v in itertools.product(range(grid), repeat=self.arity):
            if not self.admits(v):
                continue
            img = self.image(v)
            if any(c.denominator != 1 for c in img):
                shown = ",".join(str(c) for c in img)
                return False, f"{self.rule_id}: class {v} mod {grid} maps to ({shown})"
        return True, None

    def apply(self, v: Sequence[int]) -> Tuple[int, ...]:
        if len(v) != self.arity:
            raise PreconditionError(f"{self.rule_id} takes {self.arity} coordinates")
        if not self.admits(v):
            failed = [
                c.describe(self.names) for c in self.conditions if not c.holds(v)
            ]
            raise PreconditionError(
                f"{self.rule_id} does not apply to {tuple(v)}: {failed}"
            )
        img = self.image(v)
        if any(c.denominator != 1 for c in img):
            raise PreconditionError(f"{self.rule_id} maps {tuple(v)} off the lattice")
        return tuple(int(c) for c in img)


class PolynomialRule(RewriteRule):
    kind = RuleKind.POLYNOMIAL

    def __init__(
        self,
        rule_id: str,
        source: str,
        target: AnyForm,
        images: Sequence[str],
        variables: str = "a b c d",
        identity: str = "",
    ) -> None:
        super().__init__(rule_id, target, identity)
        self.source = source
        self.images = tuple(images)
        self.variables = variables
        self.symbols = sympy.symbols(variables)

    @property
    def arity(self) -> int:
        return len(self.symbols)

    def _exprs(self) -> List[sympy.Expr]:
        scope = {str(s): s for s in self.symbols}
        return [sympy.sympify(text, locals=scope) for text in self.images]

    def validate(self) -> Tuple[bool, Optional[str]]:
        scope = {str(s): s for s in self.symbols}
        exprs = self._exprs()
        g = _gram(self.target)
        value = sum(
            g[i, j] * exprs[i] * exprs[j]
            for i, j in itertools.product(range(len(exprs)), repeat=2)
        )
        diff = sympy.expand(value - sympy.sympify(self.source, locals=scope))
        if diff != 0:
            return False, f"{self.rule_id}: identity leaves remainder {diff}"
        return True, None

    def apply(self, v: Sequence[int]) -> Tuple[int, ...]:
        if len(v) != self.arity:
            raise PreconditionError(f"{self.rule_id} takes {self.arity} values")
        subs = dict(zip(self.symbols, v))
        return tuple(int(e.subs(subs)) for e in self._exprs())


def validate_rule(rule: RewriteRule) -> Tuple[bool, Optional[str]]:
    ok, msg = rule.validate()
    if not ok:
        logger.warning(msg)
    return ok, msg


_H = Fraction(1, 2)

_D1510 = TernaryForm.diag(1, 5, 10)
_D236 = TernaryForm.diag(2, 3, 6)
_D2315 = TernaryForm.diag(2, 3, 15)
_D31015 = TernaryForm.diag(3, 10, 15)


def _library() -> List[RewriteRule]:
    x, y, z = 0, 1, 2
    return [
        LinearRule(
            "R1.1+",
            BinaryForm(3, 1),
            BinaryForm(3, 1),
            [[_H, _H], ["3/2", -_H]],
            conditions=[congruent(0, 1, rank=2)],
            identity="3u^2+v^2 = 3((u+v)/2)^2+((3u-v)/2)^2",
        ),
        LinearRule(
            "R1.1-",
            BinaryForm(3, 1),
            BinaryForm(3, 1),
            [[_H, -_H], ["3/2", _H]],
            conditions=[congruent(0, 1, rank=2)],
            identity="3u^2+v^2 = 3((u-v)/2)^2+((3u+v)/2)^2",
        ),
        LinearRule(
            "R2.1+",
            _D1510,
            _D1510,
            [[1, 5, -10], [1, -3, -2], [1, 1, 2]],
            scale=16,
            identity="16(x^2+5y^2+10z^2) = (x+5y-10z)^2+5(x-3y-2z)^2+10(x+y+2z)^2",
        ),
        LinearRule(
            "R2.1-",
            _D1510,
            _D1510,
            [[1, -5, -10], [1, 3, -2], [1, -1, 2]],
            scale=16,
            identity="16(x^2+5y^2+10z^2) = (x-5y-10z)^2+5(x+3y-2z)^2+10(x-y+2z)^2",
        ),
        LinearRule(
            "R2.ii",
            _D236,
            _D236,
            [[0, 1, 1], ["2/3", "-1/3", "2/3"], ["1/3", "1/3", "-2/3"]],
            conditions=[SUM_ZERO_MOD_3],
            identity="2x^2+3y^2+6z^2 = 2(y+z)^2+3((2x-y+2z)/3)^2+6((x+y-2z)/3)^2",
        ),
        LinearRule(
            "R2.iii",
            TernaryForm.diag(1, 3, 6),
            TernaryForm.diag(1, 3, 24),
            [[1, -3, 0], [1, 1, 0], [0, 0, 1]],
            scale=4,
            identity="4(x^2+3y^2+6z^2) = (x-3y)^2+3(x+y)^2+24z^2",
        ),
        LinearRule(
            "R2.iv",
            TernaryForm.diag(1, 1, 10),
            _D2315,
            [[1, -1, 0], ["1/3", "1/3", "10/3"], ["1/3", "1/3", "-2/3"]],
            scale=4,
            conditions=[SUM_ZERO_MOD_3],
            identity="4(x^2+y^2+10z^2) = 2(x-y)^2+3((x+y+10z)/3)^2+15((x+y-2z)/3)^2",
        ),
        LinearRule(
            "R2.v",
            TernaryForm.diag(1, 4, 9),
            TernaryForm.diag(1, 1, 18),
            [[1, -2, 0], [1, 2, 0], [0, 0, 1]],
            scale=2,
            identity="2(x^2+4y^2+9z^2) = (x-2y)^2+(x+2y)^2+18z^2",
        ),
        LinearRule(
            "R2.v0",
            TernaryForm.diag(1, 1, 36),
            TernaryForm.diag(1, 1, 72),
            [[1, -1, 0], [1, 1, 0], [0, 0, 1]],
            scale=2,
            identity="2(x^2+y^2+36z^2) = (x-y)^2+(x+y)^2+72z^2",
        ),
        LinearRule(
            "R3.G77",
            TernaryForm(2, 4, 7, 0, 0, 2),
            TernaryForm.diag(1, 7, 7),
            [[_H, "-3/2", 0], [_H, _H, 0], [0, 0, 1]],
            conditions=[congruent(x, y)],
            identity="2x^2+4y^2+7z^2+2xy = ((x-3y)/2)^2+7((x+y)/2)^2+7z^2",
        ),
        LinearRule(
            "R3.G77b",
            TernaryForm(2, 4, 7, 0, 0, 2),
            TernaryForm.diag(1, 7, 7),
            [[_H, 2, 0], [_H, 0, 0], [0, 0, 1]],
            conditions=[divisible(2, x)],
            identity="2x^2+4y^2+7z^2+2xy = (x/2+2y)^2+7(x/2)^2+7z^2",
        ),
        LinearRule(
            "R3.G156",
            TernaryForm(3, 3, 4, -2, 2, 0),
            TernaryForm.diag(1, 5, 6),
            [[_H, -_H, 2], [_H, -_H, 0], [_H, _H, 0]],
            conditions=[congruent(x, y)],
            identity="3x^2+3y^2+4z^2-2yz+2xz = (v+2z)^2+5v^2+6u^2,"
            " u=(x+y)/2, v=(x-y)/2",
        ),
        LinearRule(
            "R3.G335",
            TernaryForm(3, 2, 8, -2, 0, 0),
            TernaryForm.diag(3, 3, 5),
            [[1, 0, 0], [0, _H, 1], [0, _H, -1]],
            conditions=[divisible(2, y)],
            identity="3x^2+2y^2+8z^2-2yz = 3x^2+3(y/2+z)^2+5(y/2-z)^2",
        ),
        LinearRule(
            "R3.G335b",
            TernaryForm(3, 2, 8, -2, 0, 0),
            TernaryForm.diag(3, 3, 5),
            [[1, 0, 0], [0, _H, "-3/2"], [0, _H, _H]],
            conditions=[congruent(y, z)],
            identity="3x^2+2y^2+8z^2-2yz = 3x^2+3((y-3z)/2)^2+5((y+z)/2)^2",
        ),
        LinearRule(
            "R3.G617",
            TernaryForm.diag(2, 6, 14),
            TernaryForm.diag(1, 6, 7),
            [[_H, 0, "-7/2"], [0, 1, 0], [_H, 0, _H]],
            conditions=[congruent(x, z)],
            identity="2x^2+6y^2+14z^2 = ((x-7z)/2)^2+6y^2+7((x+z)/2)^2",
        ),
        LinearRule(
            "R3.G617a",
            TernaryForm(2, 5, 5, -4, 0, 0),
            TernaryForm.diag(2, 6, 14),
            [[1, 0, 0], [0, _H, _H], [0, _H, -_H]],
            conditions=[congruent(y, z)],
            identity="2x^2+5y^2+5z^2-4yz = 2x^2+6((y+z)/2)^2+14((y-z)/2)^2",
        ),
        LinearRule(
            "R3.G1155",
            TernaryForm(4, 4, 5, 0, 0, 2),
            TernaryForm.diag(1, 15, 5),
            [[_H, 2, 0], [_H, 0, 0], [0, 0, 1]],
            conditions=[divisible(2, x)],
            identity="4x^2+4y^2+5z^2+2xy = (x/2+2y)^2+15(x/2)^2+5z^2",
        ),
        LinearRule(
            "R3.G1714",
            TernaryForm.diag(2, 14, 14),
            TernaryForm.diag(1, 7, 14),
            [[_H, "-7/2", 0], [_H, _H, 0], [0, 0, 1]],
            conditions=[congruent(x, y)],
            identity="2x^2+14y^2+14z^2 = ((x-7y)/2)^2+7((x+y)/2)^2+14z^2",
        ),
        LinearRule(
            "R3.G1714a",
            TernaryForm.diag(2, 7, 7),
            TernaryForm.diag(2, 14, 14),
            [[1, 0, 0], [0, _H, _H], [0, _H, -_H]],
            conditions=[congruent(y, z)],
            identity="2x^2+7y^2+7z^2 = 2x^2+14((y+z)/2)^2+14((y-z)/2)^2",
        ),
        LinearRule(
            "R3.G3217",
            TernaryForm(6, 12, 7, 0, 0, 6),
            TernaryForm.diag(3, 21, 7),
            [[_H, 2, 0], [_H, 0, 0], [0, 0, 1]],
            conditions=[divisible(2, x)],
            identity="6x^2+12y^2+7z^2+6xy = 3(x/2+2y)^2+21(x/2)^2+7z^2",
        ),
        LinearRule(
            "R3.G3217b",
            TernaryForm(6, 12, 7, 0, 0, 6),
            TernaryForm.diag(3, 21, 7),
            [[_H, "-3/2", 0], [_H, _H, 0], [0, 0, 1]],
            conditions=[congruent(x, y)],
            identity="6x^2+12y^2+7z^2+6xy = 3((x-3y)/2)^2+21((x+y)/2)^2+7z^2",
        ),
        LinearRule(
            "R3.iv",
            TernaryForm.diag(1, 5, 6),
            TernaryForm.diag(1, 5, 6),
            [["-5/6", "5/6", 1], ["1/6", "-1/6", 1], ["1/6", "5/6", 0]],
            conditions=[congruent(x, y, modulus=6)],
            identity="x^2+5y^2+6z^2 = ((5y-5x)/6+z)^2+5((x-y)/6+z)^2+6((x+5y)/6)^2",
        ),
        LinearRule(
            "R4.2",
            TernaryForm(1, 6, 12, -6, 0, 0),
            TernaryForm.diag(1, 3, 21),
            [[1, 0, 0], [0, _H, -2], [0, _H, 0]],
            conditions=[divisible(2, y)],
            identity="x^2+6y^2+12z^2-6yz = x^2+3(y/2-2z)^2+21(y/2)^2",
        ),
        LinearRule(
            "R4.2b",
            TernaryForm(1, 6, 12, -6, 0, 0),
            TernaryForm.diag(1, 3, 21),
            [[1, 0, 0], [0, _H, "3/2"], [0, _H, -_H]],
            conditions=[congruent(y, z)],
            identity="x^2+6y^2+12z^2-6yz = x^2+3((y+3z)/2)^2+21((y-z)/2)^2",
        ),
        LinearRule(
            "R4.4",
            TernaryForm(1, 4, 4, -2, 0, 0),
            TernaryForm.diag(1, 1, 15),
            [[1, 0, 0], [0, _H, -2], [0, _H, 0]],
            conditions=[divisible(2, y)],
            identity="x^2+4y^2+4z^2-2yz = x^2+(y/2-2z)^2+15(y/2)^2",
        ),
        LinearRule(
            "R4.4b",
            TernaryForm(1, 4, 4, -2, 0, 0),
            TernaryForm.diag(1, 1, 15),
            [[1, 0, 0], [0, 2, -_H], [0, 0, _H]],
            conditions=[divisible(2, z)],
            identity="x^2+4y^2+4z^2-2yz = x^2+(2y-z/2)^2+15(z/2)^2",
        ),
        LinearRule(
            "R4.6",
            TernaryForm(2, 5, 11, 2, -2, 2),
            _D2315,
            [[1, _H, -_H], [0, -_H, "3/2"], [0, _H, _H]],
            conditions=[congruent(y, z)],
            identity="2x^2+5y^2+11z^2+2yz+2x(y-z) = 2(x+v)^2+3(u-2v)^2+15u^2,"
            " u=(y+z)/2, v=(y-z)/2",
        ),
        LinearRule(
            "R4.8",
            _D2315,
            _D2315,
            [[0, _H, "-5/2"], ["1/3", "5/6", "5/6"], ["1/3", "-1/6", "-1/6"]],
            conditions=[congruent(y, z), SUM_ZERO_MOD_3],
            identity="2x^2+3y^2+15z^2 = 2((y-5z)/2)^2+3((2x+5y+5z)/6)^2"
            "+15((2x-y-z)/6)^2",
        ),
        LinearRule(
            "R4.9",
            TernaryForm(7, 7, 12, 6, 6, 4),
            _D31015,
            [[_H, _H, 2], [_H, -_H, 0], [_H, _H, 0]],
            conditions=[congruent(x, y)],
            identity="7x^2+7y^2+12z^2+6(x+y)z+4xy = 3((x+y)/2+2z)^2+10((x-y)/2)^2"
            "+15((x+y)/2)^2",
        ),
        LinearRule(
            "R4.10",
            _D31015,
            _D31015,
            [["1/6", "5/3", "-5/6"], [_H, 0, _H], ["1/6", "-1/3", "-5/6"]],
            conditions=[congruent(x, z), SUM_ZERO_MOD_3],
            identity="3x^2+10y^2+15z^2 = 3((x+10y-5z)/6)^2+10((x+z)/2)^2"
            "+15((x-2y-5z)/6)^2",
        ),
        LinearRule(
            "RL4.2",
            BinaryForm(1, 15),
            BinaryForm(1, 15),
            [[1, -15], [1, 1]],
            scale=16,
            identity="16(u^2+15v^2) = (u-15v)^2+15(u+v)^2",
        ),
        PolynomialRule(
            "R5.L",
            source="(a**2+b**2+c**2+d**2)**2",
            target=TernaryForm.diag(1, 1, 1),
            images=("a**2+b**2-c**2-d**2", "2*a*c+2*b*d", "2*a*d-2*b*c"),
            identity="(a^2+b^2+c^2+d^2)^2 = (a^2+b^2-c^2-d^2)^2+(2ac+2bd)^2"
            "+(2ad-2bc)^2",
        ),
    ]


@lru_cache(maxsize=1)
def builtin_rules() -> Dict[str, RewriteRule]:
    """The rule library keyed by id, in natural id order; every rule validated."""
    library = natsorted(_library(), key=lambda r: r.rule_id)
    for rule in library:
        ok, msg = rule.validate()
        if not ok:
            raise RuleValidationError(msg)
    logger.debug(f"validated {len(library)} rules")
    return {rule.rule_id: rule for rule in library}


def get_rule(rule_id: str) -> RewriteRule:
    rules = builtin_rules()
    try:
        return rules[rule_id]
    except KeyError:
        raise UsageError(f"unknown rule '{rule_id}'; known: {', '.join(rules)}")
