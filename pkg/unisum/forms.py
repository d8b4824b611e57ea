# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import re
from math import isqrt
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np
from marshmallow import Schema, fields, post_load

from unisum import sieve
from unisum.shared.config import UnisumConfig
from unisum.shared.enums import KnownSet, Parity, ThreeFreeKind
from unisum.shared.errors import (
    ArithmeticOverflow,
    FormError,
    InvariantFailure,
    PreconditionError,
    UnknownSetError,
    UsageError,
)
from unisum.shared.logger import UnisumLogger
from unisum.util import signed_range, vector_gcd

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger

Vector = Tuple[int, int, int]
Gram = Tuple[Tuple[int, int, int], Tuple[int, int, int], Tuple[int, int, int]]

_INT = r"\s*([-+]?\d+)\s*"
_DIAG_RE = re.compile(rf"^\s*diag\({_INT},{_INT},{_INT}\)\s*$")


class TernaryFormSchema(Schema):
    class Meta:
        ordered = True

    a11 = fields.Int(required=True)
    a22 = fields.Int(required=True)
    a33 = fields.Int(required=True)
    a23 = fields.Int(missing=0)
    a13 = fields.Int(missing=0)
    a12 = fields.Int(missing=0)

    @post_load
    def make_form(self, data: Dict[str, int], **kwargs: Any) -> "TernaryForm":
        return TernaryForm(**data)


class TernaryForm(object):
    """a11 x^2 + a22 y^2 + a33 z^2 + a23 yz + a13 xz + a12 xy.

    Cross coefficients are the (even) polynomial coefficients; the Gram matrix
    holds their halves, so it is integral.
    """

    def __init__(self, a11, a22, a33, a23=0, a13=0, a12=0) -> None:
        try:
            coeffs = tuple(int(c) for c in (a11, a22, a33, a23, a13, a12))
        except (TypeError, ValueError) as e:
            raise FormError(f"form coefficients must be integers: {e}") from e
        self.a11, self.a22, self.a33, self.a23, self.a13, self.a12 = coeffs

        if any(c % 2 for c in coeffs[3:]):
            raise FormError(f"cross coefficients must be even: {self.literal}")

        g = self.gram
        minor2 = g[0][0] * g[1][1] - g[0][1] ** 2
        if g[0][0] <= 0 or minor2 <= 0 or det3(g) <= 0:
            raise FormError(f"form is not positive definite: {self.literal}")

    @classmethod
    def diag(cls, a: int, b: int, c: int) -> "TernaryForm":
        return cls(a, b, c)

    @classmethod
    def from_gram(cls, g: Sequence[Sequence[int]]) -> "TernaryForm":
        return cls(g[0][0], g[1][1], g[2][2], 2 * g[1][2], 2 * g[0][2], 2 * g[0][1])

    @property
    def coefficients(self) -> Tuple[int, int, int, int, int, int]:
        return (self.a11, self.a22, self.a33, self.a23, self.a13, self.a12)

    @property
    def gram(self) -> Gram:
        h23, h13, h12 = self.a23 // 2, self.a13 // 2, self.a12 // 2
        return (
            (self.a11, h12, h13),
            (h12, self.a22, h23),
            (h13, h23, self.a33),
        )

    @property
    def determinant(self) -> int:
        return det3(self.gram)

    @property
    def is_diagonal(self) -> bool:
        return self.a23 == self.a13 == self.a12 == 0

    @property
    def literal(self) -> str:
        return ",".join(str(c) for c in self.coefficients)

    def polynomial(self) -> str:
        terms = []
        monomials = ("x^2", "y^2", "z^2", "yz", "xz", "xy")
        for coeff, mono in zip(self.coefficients, monomials):
            if coeff == 0:
                continue
            sign = "-" if coeff < 0 else "+"
            mag = abs(coeff)
            terms.append(f"{sign}{'' if mag == 1 else mag}{mono}")
        text = "".join(terms)
        return text[1:] if text.startswith("+") else text

    def bounds(self, n: int) -> Vector:
        """Coordinate bounds |x_i| <= isqrt(n (G^-1)_ii), exact."""
        g = self.gram
        det = self.determinant
        cof = (
            g[1][1] * g[2][2] - g[1][2] ** 2,
            g[0][0] * g[2][2] - g[0][2] ** 2,
            g[0][0] * g[1][1] - g[0][1] ** 2,
        )
        return tuple(isqrt(n * c // det) for c in cof)  # type: ignore

    def __call__(self, v: Sequence[int]) -> int:
        return evaluate(self, v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TernaryForm):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.literal})"

    def __str__(self) -> str:
        return self.polynomial()

    def dump(self) -> Dict[str, int]:
        return TernaryFormSchema().dump(self)


class Representation(NamedTuple):
    x: int
    y: int
    z: int
    value: int

    @property
    def vector(self) -> Vector:
        return (self.x, self.y, self.z)


def _normalize_residues(
    res: Optional[Tuple[int, Iterable[int]]]
) -> Optional[Tuple[int, FrozenSet[int]]]:
    if res is None:
        return None
    modulus, values = res
    modulus = int(modulus)
    if modulus < 1:
        raise FormError(f"residue modulus must be >= 1, got {modulus}")
    reduced = frozenset(int(v) % modulus for v in values)
    if not reduced:
        raise FormError("residue sets must be nonempty")
    return (modulus, reduced)


class RepConstraint(object):
    """Per-coordinate parity and residue requirements plus a primitivity flag."""

    def __init__(
        self,
        parities: Sequence[Parity] = (Parity.ANY, Parity.ANY, Parity.ANY),
        residues: Sequence[Optional[Tuple[int, Iterable[int]]]] = (None, None, None),
        primitive: bool = False,
    ) -> None:
        if len(parities) != 3 or len(residues) != 3:
            raise FormError("constraints need one entry per coordinate")
        self.parities: Tuple[Parity, ...] = tuple(Parity(p) for p in parities)
        self.residues: Tuple[Optional[Tuple[int, FrozenSet[int]]], ...] = tuple(
            _normalize_residues(r) for r in residues
        )
        self.primitive = bool(primitive)

    @classmethod
    def parse(cls, items: Sequence[str]) -> "RepConstraint":
        """CLI syntax: `x=odd`, `y=even`, `x=1,7%8`, `primitive`."""
        parities = [Parity.ANY] * 3
        residues: List[Optional[Tuple[int, List[int]]]] = [None] * 3
        primitive = False
        for item in items:
            item = item.strip()
            if item == "primitive":
                primitive = True
                continue
            m = re.match(r"^([xyz])=(odd|even|any|[-\d,]+%\d+)$", item)
            if not m:
                raise UsageError(f"malformed constraint '{item}'")
            idx = "xyz".index(m.group(1))
            spec = m.group(2)
            if "%" in spec:
                res, mod = spec.split("%")
                residues[idx] = (int(mod), [int(r) for r in res.split(",") if r])
            else:
                parities[idx] = Parity(spec)
        try:
            return cls(parities, residues, primitive)
        except FormError as e:
            raise UsageError(e.msg) from e

    @property
    def unconstrained(self) -> bool:
        return (
            all(p == Parity.ANY for p in self.parities)
            and all(r is None for r in self.residues)
            and not self.primitive
        )

    def accepts_coordinate(self, i: int, value: int) -> bool:
        parity = self.parities[i]
        if parity == Parity.ODD and value % 2 == 0:
            return False
        if parity == Parity.EVEN and value % 2 == 1:
            return False
        res = self.residues[i]
        if res is not None and value % res[0] not in res[1]:
            return False
        return True

    def accepts(self, v: Sequence[int]) -> bool:
        if not all(self.accepts_coordinate(i, x) for i, x in enumerate(v)):
            return False
        return not self.primitive or vector_gcd(v) == 1

    def allowed(self, i: int, bound: int) -> List[int]:
        return [x for x in range(-bound, bound + 1) if self.accepts_coordinate(i, x)]

    def __repr__(self) -> str:
        parts = []
        for name, parity, res in zip("xyz", self.parities, self.residues):
            if parity != Parity.ANY:
                parts.append(f"{name}={parity.value}")
            if res is not None:
                listed = ",".join(str(r) for r in sorted(res[1]))
                parts.append(f"{name}={listed}%{res[0]}")
        if self.primitive:
            parts.append("primitive")
        return f"{self.__class__.__name__}({' '.join(parts)})"


NO_CONSTRAINT = RepConstraint()


class ExceptionSet(object):
    def __init__(self, a: int, b: int, c: int, limit: int, members: List[int]) -> None:
        self.a = a
        self.b = b
        self.c = c
        self.limit = limit
        self.members: List[int] = members

    def prefix(self, limit: int) -> "ExceptionSet":
        return ExceptionSet(
            self.a, self.b, self.c, limit, [m for m in self.members if m <= limit]
        )

    def __contains__(self, n: int) -> bool:
        return n in set(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        shown = ",".join(str(m) for m in self.members[:8])
        more = ",..." if len(self.members) > 8 else ""
        return (
            f"{self.__class__.__name__}(E({self.a},{self.b},{self.c})<= {self.limit}:"
            f" {{{shown}{more}}})"
        )


class SetComparison(object):
    """Outcome of comparing two integer sets on [0, limit]."""

    def __init__(self, limit: int, only_left: List[int], only_right: List[int]) -> None:
        self.limit = limit
        self.only_left = only_left
        self.only_right = only_right

    @property
    def equal(self) -> bool:
        return not self.only_left and not self.only_right

    def witnesses(self, count: int = 10) -> List[int]:
        return sorted(self.only_left + self.only_right)[:count]

    def __bool__(self) -> bool:
        return self.equal

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(limit={self.limit},equal={self.equal},"
            f"witnesses={self.witnesses(5)})"
        )


def parse_form(literal: str) -> TernaryForm:
    m = _DIAG_RE.match(literal)
    if m:
        return TernaryForm.diag(*(int(g) for g in m.groups()))
    parts = [p.strip() for p in literal.split(",")]
    if len(parts) != 6:
        raise FormError(f"form literal needs six integers or diag(a,b,c): '{literal}'")
    try:
        return TernaryForm(*(int(p) for p in parts))
    except ValueError as e:
        raise FormError(f"malformed form literal '{literal}'") from e


def format_form(form: TernaryForm) -> str:
    if form.is_diagonal:
        return f"diag({form.a11},{form.a22},{form.a33})"
    return form.literal


def evaluate(form: TernaryForm, v: Sequence[int]) -> int:
    x, y, z = (int(c) for c in v)
    value = (
        form.a11 * x * x
        + form.a22 * y * y
        + form.a33 * z * z
        + form.a23 * y * z
        + form.a13 * x * z
        + form.a12 * x * y
    )
    if value > config.MAX_FORM_VALUE:
        raise ArithmeticOverflow(f"{form!r} at {(x, y, z)} exceeds MAX_FORM_VALUE")
    return value


def determinant(form: TernaryForm) -> int:
    return form.determinant


def representations(
    form: TernaryForm, n: int, constraint: RepConstraint = NO_CONSTRAINT
) -> List[Representation]:
    """Every (x, y, z) with form(x, y, z) = n under the constraint, in
    lexicographic order. z is solved from the quadratic once x, y are fixed."""
    if n < 0:
        return []
    if n > config.MAX_FORM_VALUE:
        raise ArithmeticOverflow(f"n={n} exceeds MAX_FORM_VALUE")
    bx, by, _ = form.bounds(n)
    a33x2 = 2 * form.a33
    found: List[Representation] = []
    for x in range(-bx, bx + 1):
        if not constraint.accepts_coordinate(0, x):
            continue
        for y in range(-by, by + 1):
            if not constraint.accepts_coordinate(1, y):
                continue
            b = form.a13 * x + form.a23 * y
            c = form.a11 * x * x + form.a22 * y * y + form.a12 * x * y - n
            disc = b * b - 2 * a33x2 * c
            if disc < 0:
                continue
            s = isqrt(disc)
            if s * s != disc:
                continue
            for num in sorted({-b - s, -b + s}):
                if num % a33x2:
                    continue
                z = num // a33x2
                if constraint.accepts((x, y, z)):
                    found.append(Representation(x, y, z, n))
    return found


def count(form: TernaryForm, n: int, constraint: RepConstraint = NO_CONSTRAINT) -> int:
    return len(representations(form, n, constraint))


def representation_counts(
    form: TernaryForm, limit: int, constraint: RepConstraint = NO_CONSTRAINT
) -> np.ndarray:
    """r(n, form) under the constraint for every n in [0, limit], in one pass."""
    if constraint.primitive:
        return np.array(
            [count(form, n, constraint) for n in range(limit + 1)], dtype=np.int64
        )

    bounds = form.bounds(limit)
    if form.is_diagonal:
        per_coord = []
        for i, coeff in enumerate((form.a11, form.a22, form.a33)):
            arr = np.zeros(limit + 1, dtype=np.int64)
            vals = np.array(constraint.allowed(i, bounds[i]), dtype=np.int64)
            np.add.at(arr, coeff * vals * vals, 1)
            per_coord.append(arr)
        pair = _truncated_convolution(per_coord[0], per_coord[1], limit)
        return _truncated_convolution(pair, per_coord[2], limit)

    out = np.zeros(limit + 1, dtype=np.int64)
    zs = np.array(constraint.allowed(2, bounds[2]), dtype=np.int64)
    a33x4 = 4 * form.a33
    for x in constraint.allowed(0, bounds[0]):
        for y in constraint.allowed(1, bounds[1]):
            q = form.a11 * x * x + form.a22 * y * y + form.a12 * x * y
            b = form.a13 * x + form.a23 * y
            # a33 z^2 + b z + q has its real minimum q - b^2 / (4 a33)
            if a33x4 * q - b * b > a33x4 * limit:
                continue
            vals = form.a33 * zs * zs + b * zs + q
            vals = vals[vals <= limit]
            np.add.at(out, vals, 1)
    return out


def _truncated_convolution(
    left: np.ndarray, right: np.ndarray, limit: int
) -> np.ndarray:
    if np.count_nonzero(left) > np.count_nonzero(right):
        left, right = right, left
    out = np.zeros(limit + 1, dtype=np.int64)
    for k in np.flatnonzero(left):
        out[k:] += left[k] * right[: limit + 1 - k]
    return out


def represented_set(
    coeffs: Sequence[int], limit: int, constraint: RepConstraint = NO_CONSTRAINT
) -> np.ndarray:
    """Boolean array: is n = a x^2 + b y^2 + c z^2 under the constraint."""
    if constraint.primitive:
        raise UsageError("primitive constraints are not supported by the sieve")
    if limit < 0:
        return np.zeros(0, dtype=bool)
    value_sets = []
    for i, coeff in enumerate(coeffs):
        bound = isqrt(limit // coeff)
        value_sets.append(
            sorted({coeff * x * x for x in constraint.allowed(i, bound)})
        )
    # the smallest coefficient has the most values; it becomes the bitset
    order = sorted(range(3), key=lambda i: -len(value_sets[i]))
    inner = sieve.sumset(value_sets[order[0]], value_sets[order[1]], limit)
    reach = sieve.shifted_union(inner, value_sets[order[2]], limit)
    return sieve.array_from_bits(reach, limit)


def exception_set(a: int, b: int, c: int, limit: int) -> ExceptionSet:
    if min(a, b, c) <= 0:
        raise FormError(f"coefficients must be positive: {(a, b, c)}")
    if limit < 0:
        return ExceptionSet(a, b, c, limit, [])
    marked = represented_set((a, b, c), limit)
    return ExceptionSet(a, b, c, limit, [int(n) for n in np.flatnonzero(~marked)])


def known_set_members(name: KnownSet, limit: int) -> List[int]:
    """Closed-form descriptions of the exceptional sets used by the proofs."""
    found = set()

    def fours_times_8l7() -> None:
        q = 1
        while 7 * q <= limit:
            found.update(range(7 * q, limit + 1, 8 * q))
            q *= 4

    name = KnownSet(name)
    if name == KnownSet.E111:
        fours_times_8l7()
    elif name == KnownSet.E149:
        if limit >= 2:
            found.add(2)
        fours_times_8l7()
        found.update(range(3, limit + 1, 8))
        found.update(range(3, limit + 1, 9))
    elif name == KnownSet.E1510:
        scale = 1
        while 2 * scale <= limit:
            for m in range(2, limit // scale + 1, 5):
                found.add(m * scale)
                if (m + 1) * scale <= limit:
                    found.add((m + 1) * scale)
            scale *= 25
    elif name == KnownSet.E236:
        found.update(range(1, limit + 1, 3))
        fours_times_8l7()
    return sorted(found)


_KNOWN_COEFFS = {
    KnownSet.E111: (1, 1, 1),
    KnownSet.E149: (1, 4, 9),
    KnownSet.E1510: (1, 5, 10),
    KnownSet.E236: (2, 3, 6),
}


def exception_formula_check(name: str, limit: int) -> SetComparison:
    try:
        known = KnownSet(name)
    except ValueError:
        raise UnknownSetError(
            f"unknown set '{name}'; expected one of {[k.value for k in KnownSet]}"
        )
    sieved = set(exception_set(*_KNOWN_COEFFS[known], limit).members)
    closed = set(known_set_members(known, limit))
    result = SetComparison(limit, sorted(sieved - closed), sorted(closed - sieved))
    logger.debug(f"{known.value} up to {limit}: {result!r}")
    return result


def kronecker_symbol(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1, by quadratic reciprocity."""
    if n <= 0 or n % 2 == 0:
        raise PreconditionError(f"Jacobi symbol needs odd n >= 1, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


_THREE_FREE_WEIGHT = {
    ThreeFreeKind.Y2_2Z2: 2,
    ThreeFreeKind.X2_5Y2: 5,
    ThreeFreeKind.X2_5Z2: 5,
}


def binary_representations(k: int, value: int) -> List[Tuple[int, int]]:
    """All (u, v) with u^2 + k v^2 = value, nonnegative-first order on u then v."""
    found = []
    for u in signed_range(isqrt(value)):
        rest = value - u * u
        if rest % k:
            continue
        v2 = rest // k
        v = isqrt(v2)
        if v * v != v2:
            continue
        found.extend([(u, v)] if v == 0 else [(u, v), (u, -v)])
    return found


def three_free_rewrite(kind: str, u: int, v: int) -> Tuple[int, int]:
    kind = ThreeFreeKind(kind)
    if u == 0 and v == 0:
        raise PreconditionError("three_free_rewrite needs (u, v) != (0, 0)")
    if u % 3 or v % 3:
        return (u, v)
    k = _THREE_FREE_WEIGHT[kind]
    value = u * u + k * v * v
    for cand in binary_representations(k, value):
        if cand[0] % 3 or cand[1] % 3:
            logger.debug(f"{kind.value}: ({u},{v}) -> {cand}")
            return cand
    raise InvariantFailure(f"no 3-free representation of {value} by {kind.value}")


def det3(g: Sequence[Sequence[int]]) -> int:
    return (
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
        - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    )
