# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
from bisect import bisect_left
from collections import deque
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np
from marshmallow import Schema, fields, post_load
from marshmallow_enum import EnumField
from sympy import isprime, nextprime, primerange

from unisum.forms import TernaryForm, count, det3, kronecker_symbol
from unisum.shared.config import UnisumConfig
from unisum.shared.enums import Provenance
from unisum.shared.errors import (
    ArithmeticOverflow,
    FormError,
    InvariantFailure,
    PreconditionError,
)
from unisum.shared.fields import FormField, FractionField, VectorField
from unisum.shared.logger import UnisumLogger
from unisum.util import ctxlog, vector_gcd

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger

Vector = Tuple[int, int, int]
Matrix = Tuple[Vector, Vector, Vector]
Coefficients = Tuple[int, int, int, int, int, int]

_IDENTITY: Matrix = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
_SHORT_VECTOR_BOUND = 2 ** 31

# x^2 + 4y^2 + 9z^2 - 4yz = x^2 + (2y - z)^2 + 8z^2
SPINOR_FORM = TernaryForm(1, 4, 9, -4, 0, 0)


def _mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    return tuple(  # type: ignore
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )


def _transpose(a: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(a[j][i] for j in range(3)) for i in range(3))  # type: ignore


def _congruence(u: Sequence[Sequence[int]], g: Sequence[Sequence[int]]) -> Matrix:
    """U^T G U"""
    return _mat_mul(_mat_mul(_transpose(u), g), u)


def _bilinear(g: Sequence[Sequence[int]], v: Sequence[int], w: Sequence[int]) -> int:
    return sum(v[i] * g[i][j] * w[j] for i in range(3) for j in range(3))


def _gram_apply(g: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    out = (sum(g[i][j] * v[j] for j in range(3)) for i in range(3))
    return tuple(out)  # type: ignore


def _cross(v: Sequence[int], w: Sequence[int]) -> Vector:
    return (
        v[1] * w[2] - v[2] * w[1],
        v[2] * w[0] - v[0] * w[2],
        v[0] * w[1] - v[1] * w[0],
    )


def _columns(v1: Vector, v2: Vector, v3: Vector) -> Matrix:
    return _transpose((v1, v2, v3))


class IsometryMatrix(object):
    """Integral U with det U = +-1 and U^T G_f U = G_g for its pair (f, g).

    Column j holds the coordinates, in f's basis, of the j-th basis vector of g.
    """

    def __init__(self, rows: Sequence[Sequence[int]]) -> None:
        self.rows: Matrix = tuple(
            tuple(int(x) for x in r) for r in rows
        )  # type: ignore
        if len(self.rows) != 3 or any(len(r) != 3 for r in self.rows):
            raise FormError(f"isometry must be 3x3: {rows}")
        if abs(self.determinant) != 1:
            raise FormError(f"isometry must be unimodular, det={self.determinant}")

    @property
    def determinant(self) -> int:
        return det3(self.rows)

    def transform(self, form: TernaryForm) -> TernaryForm:
        return TernaryForm.from_gram(_congruence(self.rows, form.gram))

    def verify(self, f: TernaryForm, g: TernaryForm) -> bool:
        return _congruence(self.rows, f.gram) == g.gram

    def compose(self, other: "IsometryMatrix") -> "IsometryMatrix":
        return IsometryMatrix(_mat_mul(self.rows, other.rows))

    def inverse(self) -> "IsometryMatrix":
        m = self.rows
        adj = [[0] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                minor = [
                    [m[r][c] for c in range(3) if c != i] for r in range(3) if r != j
                ]
                cof = minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0]
                adj[i][j] = (-1) ** (i + j) * cof
        det = self.determinant
        return IsometryMatrix([[x * det for x in row] for row in adj])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IsometryMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({[list(r) for r in self.rows]})"

    def dump(self) -> Dict[str, Any]:
        return {"rows": [list(r) for r in self.rows]}


IDENTITY = IsometryMatrix(_IDENTITY)


def _size_reduce(form: TernaryForm) -> Tuple[TernaryForm, Matrix]:
    """Pairwise reduction: |2 B(e_i, e_j)| <= f(e_i) whenever f(e_i) <= f(e_j)."""
    g0 = form.gram
    u = [list(r) for r in _IDENTITY]
    g = g0
    changed = True
    while changed:
        changed = False
        for i in range(3):
            for j in range(3):
                if i == j or g[i][i] > g[j][j] or 2 * abs(g[i][j]) <= g[i][i]:
                    continue
                q = (2 * g[i][j] + g[i][i]) // (2 * g[i][i])
                for r in range(3):
                    u[r][j] -= q * u[r][i]
                g = _congruence(u, g0)
                changed = True
    return TernaryForm.from_gram(g), tuple(tuple(r) for r in u)  # type: ignore


def _short_vector_key(item: Tuple[Vector, int]) -> Tuple:
    v, norm = item
    return (norm, tuple((abs(c), c < 0) for c in v))


def short_vectors(form: TernaryForm, bound: int) -> List[Tuple[Vector, int]]:
    """Nonzero v with form(v) <= bound, ordered by norm then coordinates."""
    if bound > _SHORT_VECTOR_BOUND:
        raise ArithmeticOverflow(f"short vector bound {bound} is too large")
    if bound <= 0:
        return []
    bx, by, bz = form.bounds(bound)
    x, y, z = np.meshgrid(
        np.arange(-bx, bx + 1, dtype=np.int64),
        np.arange(-by, by + 1, dtype=np.int64),
        np.arange(-bz, bz + 1, dtype=np.int64),
        indexing="ij",
    )
    a11, a22, a33, a23, a13, a12 = form.coefficients
    values = (
        a11 * x * x
        + a22 * y * y
        + a33 * z * z
        + a23 * y * z
        + a13 * x * z
        + a12 * x * y
    )
    mask = (values > 0) & (values <= bound)
    found = [
        ((int(vx), int(vy), int(vz)), int(n))
        for vx, vy, vz, n in zip(x[mask], y[mask], z[mask], values[mask])
    ]
    return sorted(found, key=_short_vector_key)


def _successive_minima(vectors: Iterable[Tuple[Vector, int]]) -> List[int]:
    chosen: List[Vector] = []
    minima: List[int] = []
    for v, norm in vectors:
        if len(chosen) == 1 and _cross(chosen[0], v) == (0, 0, 0):
            continue
        if len(chosen) == 2 and det3((chosen[0], chosen[1], v)) == 0:
            continue
        chosen.append(v)
        minima.append(norm)
        if len(chosen) == 3:
            break
    return minima


@lru_cache(maxsize=4096)
def _minimal_bases(coeffs: Coefficients) -> Tuple[Coefficients, Tuple[Matrix, ...]]:
    """The least coefficient tuple over bases realizing the successive minima,
    with every basis (as a matrix over the input basis) that attains it."""
    form = TernaryForm(*coeffs)
    reduced, u0 = _size_reduce(form)
    g = reduced.gram
    vectors = short_vectors(reduced, max(reduced.a11, reduced.a22, reduced.a33))
    minima = _successive_minima(vectors)
    if len(minima) != 3:
        raise InvariantFailure(f"{form!r}: short vectors span rank {len(minima)}")
    layers = [[v for v, n in vectors if n == lam] for lam in minima]

    best: Optional[Coefficients] = None
    bases: List[Matrix] = []
    for v1 in layers[0]:
        for v2 in layers[1]:
            if _cross(v1, v2) == (0, 0, 0):
                continue
            b12 = _bilinear(g, v1, v2)
            for v3 in layers[2]:
                if abs(det3((v1, v2, v3))) != 1:
                    continue
                cand = (
                    minima[0],
                    minima[1],
                    minima[2],
                    2 * _bilinear(g, v2, v3),
                    2 * _bilinear(g, v1, v3),
                    2 * b12,
                )
                if best is None or cand < best:
                    best = cand
                    bases = [_columns(v1, v2, v3)]
                elif cand == best:
                    bases.append(_columns(v1, v2, v3))
    if best is None:
        raise InvariantFailure(f"{form!r}: no basis realizes the successive minima")
    return best, tuple(_mat_mul(u0, b) for b in bases)


def reduce_with_isometry(form: TernaryForm) -> Tuple[TernaryForm, IsometryMatrix]:
    best, bases = _minimal_bases(form.coefficients)
    return TernaryForm(*best), IsometryMatrix(bases[0])


def reduce(form: TernaryForm) -> TernaryForm:
    """Minkowski-reduced representative: a11 <= a22 <= a33 are the successive
    minima and the cross terms are the least possible for those minima."""
    return reduce_with_isometry(form)[0]


canonical_form = reduce


def aut_size(form: TernaryForm) -> int:
    return len(_minimal_bases(form.coefficients)[1])


def is_equivalent(f: TernaryForm, g: TernaryForm) -> Optional[IsometryMatrix]:
    """An isometry carrying f to g, or None.

    The search over minimal-vector bases happens once per form inside
    `reduce`; two forms are equivalent exactly when their canonical forms
    agree, and the isometry is the composite of the two reducing maps.
    """
    if f.determinant != g.determinant:
        return None
    cf, uf = reduce_with_isometry(f)
    cg, ug = reduce_with_isometry(g)
    if cf != cg:
        return None
    u = uf.compose(ug.inverse())
    if not u.verify(f, g):
        raise InvariantFailure(f"{u!r} does not carry {f!r} to {g!r}")
    return u


class _EchelonBasis(object):
    """Integer row-echelon basis of the lattice spanned by the added vectors."""

    def __init__(self, n: int = 3) -> None:
        self.n = n
        self.rows: List[List[int]] = []
        self.pivots: List[int] = []

    def add(self, vec0: Sequence[int]) -> None:
        vec = list(vec0)
        for j in range(self.n):
            if not vec[j]:
                continue
            if j not in self.pivots:
                where = bisect_left(self.pivots, j)
                self.rows.insert(where, vec)
                self.pivots.insert(where, j)
                return
            row = self.rows[self.pivots.index(j)]
            a, b = row[j], vec[j]
            if b % a == 0:
                q = b // a
                for k in range(j, self.n):
                    vec[k] -= q * row[k]
            elif a % b == 0:
                row[j:], vec[j:] = vec[j:], row[j:]
                q = a // b
                for k in range(j, self.n):
                    vec[k] -= q * row[k]
            else:
                x, y, g = _xgcd(a, b)
                ag, mbg = a // g, -b // g
                for k in range(j, self.n):
                    aa, bb = row[k], vec[k]
                    row[k] = x * aa + y * bb
                    vec[k] = mbg * aa + ag * bb


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    return x, y, g


def _check_neighbor_prime(form: TernaryForm, p: int) -> None:
    if p % 2 == 0 or not isprime(p):
        raise PreconditionError(f"neighbor prime must be an odd prime, got {p}")
    if form.determinant % p == 0:
        raise PreconditionError(f"p={p} divides det {form.determinant} of {form!r}")


def isotropic_lines(form: TernaryForm, p: int) -> List[Vector]:
    """Projective points v mod p with form(v) = 0 (mod p), first nonzero entry 1."""
    points = [(1, a, b) for a in range(p) for b in range(p)]
    points += [(0, 1, b) for b in range(p)] + [(0, 0, 1)]
    return [v for v in points if form(v) % p == 0]


def _lift(form: TernaryForm, v: Vector, p: int) -> Vector:
    value = form(v)
    if value % (p * p) == 0:
        return v
    c = _gram_apply(form.gram, v)
    i = next(k for k in range(3) if c[k] % p)
    t = (-(value // p) * pow(2 * c[i], -1, p)) % p
    w = list(v)
    w[i] += p * t
    return tuple(w)  # type: ignore


def _neighbor(form: TernaryForm, w: Vector, p: int) -> TernaryForm:
    """The lattice {x in L : B(w, x) = 0 mod p} + Z w/p, as a form."""
    g = form.gram
    c = _gram_apply(g, w)
    i = next(k for k in range(3) if c[k] % p)
    inv = pow(c[i], -1, p)
    echelon = _EchelonBasis()
    for j in range(3):
        e = [0, 0, 0]
        if j == i:
            e[i] = p
        else:
            e[j] = 1
            e[i] = -(c[j] * inv % p)
        echelon.add([p * x for x in e])
    echelon.add(w)
    rows = echelon.rows
    if len(rows) != 3:
        raise InvariantFailure(f"neighbor of {form!r} at {w} has rank {len(rows)}")

    gram = [[_bilinear(g, rows[a], rows[b]) for b in range(3)] for a in range(3)]
    if any(x % (p * p) for row in gram for x in row):
        raise InvariantFailure(f"neighbor of {form!r} at {w} mod {p} is not integral")
    return TernaryForm.from_gram([[x // (p * p) for x in row] for row in gram])


def p_neighbors(form: TernaryForm, p: int) -> List[TernaryForm]:
    """Reduced forms of all p-neighbors, one per isotropic line mod p."""
    _check_neighbor_prime(form, p)
    out = []
    for v in isotropic_lines(form, p):
        neighbor = _neighbor(form, _lift(form, v, p), p)
        if neighbor.determinant != form.determinant:
            raise InvariantFailure(f"{p}-neighbor {neighbor!r} changed the determinant")
        out.append(reduce(neighbor))
    logger.debug(f"{form!r}: {len(out)} neighbors at p={p}")
    return out


def default_primes(form: TernaryForm, how_many: Optional[int] = None) -> List[int]:
    """The first NEIGHBOR_PRIME_COUNT odd primes not dividing det."""
    how_many = config.NEIGHBOR_PRIME_COUNT if how_many is None else how_many
    primes: List[int] = []
    p = 2
    while len(primes) < how_many:
        p = int(nextprime(p))
        if form.determinant % p:
            primes.append(p)
    return primes


class GenusClass(NamedTuple):
    form: TernaryForm
    aut_size: int


class GenusClassSchema(Schema):
    class Meta:
        ordered = True

    form = FormField(required=True)
    aut_size = fields.Int(required=True)

    @post_load
    def make_class(self, data: Dict[str, Any], **kwargs: Any) -> GenusClass:
        return GenusClass(**data)


class GenusClassSetSchema(Schema):
    class Meta:
        ordered = True

    determinant = fields.Int(required=True)
    classes = fields.Nested(GenusClassSchema, many=True, required=True)
    provenance = EnumField(Provenance, by_value=True, required=True)
    primes = fields.List(fields.Int(), missing=list)
    skipped_primes = fields.List(fields.Int(), missing=list)

    @post_load
    def make_class_set(self, data: Dict[str, Any], **kwargs: Any) -> "GenusClassSet":
        return GenusClassSet(**data)


class GenusClassSet(object):
    def __init__(
        self,
        determinant: int,
        classes: List[GenusClass],
        provenance: Provenance,
        primes: Optional[List[int]] = None,
        skipped_primes: Optional[List[int]] = None,
    ) -> None:
        self.determinant = determinant
        self.classes = list(classes)
        self.provenance = Provenance(provenance)
        self.primes = list(primes or [])
        self.skipped_primes = list(skipped_primes or [])

        if not self.classes:
            raise FormError("a genus class set needs at least one class")
        for c in self.classes:
            if c.form.determinant != determinant:
                raise FormError(f"{c.form!r} does not have determinant {determinant}")

    @classmethod
    def from_representatives(
        cls, forms: Sequence[TernaryForm], provenance: Provenance = Provenance.FIXTURE
    ) -> "GenusClassSet":
        """Checks equal determinants and pairwise inequivalence."""
        if not forms:
            raise FormError("a genus class set needs at least one class")
        det = forms[0].determinant
        for f in forms[1:]:
            if f.determinant != det:
                raise FormError(f"{f!r} has det {f.determinant}, expected {det}")
        for i, f in enumerate(forms):
            for g in forms[i + 1 :]:
                if is_equivalent(f, g) is not None:
                    raise FormError(f"representatives {f!r} and {g!r} are equivalent")
        return cls(det, [GenusClass(f, aut_size(f)) for f in forms], provenance)

    @property
    def forms(self) -> List[TernaryForm]:
        return [c.form for c in self.classes]

    @property
    def mass(self) -> Fraction:
        return sum((Fraction(1, c.aut_size) for c in self.classes), Fraction(0))

    def canonical_forms(self) -> List[TernaryForm]:
        return sorted((reduce(f) for f in self.forms), key=lambda f: f.coefficients)

    def same_classes(self, other: "GenusClassSet") -> bool:
        return self.canonical_forms() == other.canonical_forms()

    def __len__(self) -> int:
        return len(self.classes)

    def __repr__(self) -> str:
        forms = ", ".join(f.literal for f in self.forms)
        return (
            f"{self.__class__.__name__}(det={self.determinant}, "
            f"{self.provenance.value}, [{forms}])"
        )

    def dump(self) -> Dict[str, Any]:
        return GenusClassSetSchema().dump(self)


def neighbor_class_set(
    seed: TernaryForm, primes: Optional[Sequence[int]] = None
) -> GenusClassSet:
    """Closure of the seed's class under p-neighbor steps for the given primes."""
    primes = default_primes(seed) if primes is None else list(primes)
    for p in primes:
        _check_neighbor_prime(seed, p)
    start = reduce(seed)
    seen: Dict[Coefficients, TernaryForm] = {start.coefficients: start}
    queue = deque([start])
    skipped: List[int] = []
    while queue:
        form = queue.popleft()
        for p in primes:
            if p in skipped:
                continue
            neighbors = p_neighbors(form, p)
            if not neighbors:
                logger.warning(f"{seed!r}: no isotropic line mod {p}, skipping p={p}")
                skipped.append(p)
                continue
            for nb in neighbors:
                if nb.coefficients not in seen:
                    seen[nb.coefficients] = nb
                    queue.append(nb)

    forms = [seen[k] for k in sorted(seen)]
    logger.info(f"{seed!r}: neighbor closure over {primes} found {len(forms)} classes")
    return GenusClassSet(
        seed.determinant,
        [GenusClass(f, aut_size(f)) for f in forms],
        Provenance.NEIGHBOR_CLOSURE,
        primes=list(primes),
        skipped_primes=skipped,
    )


class GenusAverageSchema(Schema):
    class Meta:
        ordered = True

    n = fields.Int(required=True)
    value = FractionField(required=True)

    @post_load
    def make_average(self, data: Dict[str, Any], **kwargs: Any) -> "GenusAverage":
        return GenusAverage(**data)


class GenusAverage(NamedTuple):
    n: int
    value: Fraction

    def dump(self) -> Dict[str, Any]:
        return GenusAverageSchema().dump(self)


def genus_average(cs: GenusClassSet, n: int) -> GenusAverage:
    weighted = sum(
        (Fraction(count(c.form, n), c.aut_size) for c in cs.classes), Fraction(0)
    )
    return GenusAverage(n, weighted / cs.mass)


class RatioCheck(NamedTuple):
    m: int
    p: int
    lhs: Optional[Fraction]
    rhs: int
    passed: bool
    msg: Optional[str] = None


def ratio_check(cs: GenusClassSet, m: int, p: int) -> RatioCheck:
    """r(gen, m p^2) / r(gen, m) against p + 1 - (-m det / p)."""
    if p % 2 == 0 or not isprime(p) or (2 * m * cs.determinant) % p == 0:
        msg = f"p={p} must be an odd prime not dividing 2*{m}*{cs.determinant}"
        return RatioCheck(m, p, None, 0, False, msg)
    rhs = p + 1 - kronecker_symbol(-m * cs.determinant, p)
    base = genus_average(cs, m).value
    if base == 0:
        msg = f"m={m} is not represented by the genus"
        return RatioCheck(m, p, None, rhs, False, msg)
    lhs = genus_average(cs, m * p * p).value / base
    ok = lhs == rhs
    if not ok:
        msg = f"m={m} p={p}: {lhs} != {rhs}"
        logger.warning(ctxlog(msg, "ratio", str(cs.determinant)))
    return RatioCheck(m, p, lhs, rhs, ok)


def aggregate_check(
    forms: Sequence[TernaryForm],
    weights: Sequence[int],
    m: int,
    factor: int,
    symbol: int,
    p: int,
) -> Tuple[int, int, bool]:
    """sum_i weight_i r(m p^2, f_i) against factor (p + 1 - (symbol / p))."""
    if p % 2 == 0 or not isprime(p):
        raise PreconditionError(f"aggregate prime must be an odd prime, got {p}")
    lhs = sum(w * count(f, m * p * p) for f, w in zip(forms, weights))
    rhs = factor * (p + 1 - kronecker_symbol(symbol, p))
    return lhs, rhs, lhs == rhs


class FixtureOutcome(NamedTuple):
    name: str
    determinant: int
    classes_found: int
    failures: List[str]

    @property
    def passed(self) -> bool:
        return not self.failures


def check_genus_fixture(
    name: str,
    representatives: Sequence[TernaryForm],
    primes: Sequence[int],
    closure: Optional[Callable[[TernaryForm, Sequence[int]], GenusClassSet]] = None,
) -> FixtureOutcome:
    """Equal determinants, pairwise inequivalence, and a neighbor closure from
    the first representative that finds exactly the listed classes."""
    closure = closure or neighbor_class_set
    failures = []
    det = representatives[0].determinant
    for f in representatives[1:]:
        if f.determinant != det:
            failures.append(f"determinant: {f.literal} has {f.determinant}, not {det}")
    for i, f in enumerate(representatives):
        for g in representatives[i + 1 :]:
            if is_equivalent(f, g) is not None:
                failures.append(f"inequivalence: {f.literal} ~ {g.literal}")

    found = closure(representatives[0], primes)
    expected = sorted(
        (reduce(f) for f in representatives), key=lambda f: f.coefficients
    )
    if found.canonical_forms() != expected:
        failures.append(
            f"closure: found {[f.literal for f in found.forms]}, "
            f"expected {[f.literal for f in expected]}"
        )
    for msg in failures:
        logger.warning(ctxlog(msg, "genus", name))
    return FixtureOutcome(name, det, len(found), failures)


def paper_genus_fixture_check(
    fixtures: Iterable[Any],
    closure: Optional[Callable[[TernaryForm, Sequence[int]], GenusClassSet]] = None,
) -> List[FixtureOutcome]:
    """Runs check_genus_fixture over objects with name, representatives, primes."""
    return [
        check_genus_fixture(fx.name, fx.representatives, fx.primes, closure)
        for fx in fixtures
    ]


class SpinorInstanceSchema(Schema):
    class Meta:
        ordered = True

    p = fields.Int(required=True)
    vector = VectorField(required=True)
    odd_triple = VectorField(required=True)


class SpinorInstance(NamedTuple):
    p: int
    vector: Vector
    odd_triple: Vector

    def dump(self) -> Dict[str, Any]:
        return SpinorInstanceSchema().dump(self)


def spinor_instance(p: int) -> Optional[SpinorInstance]:
    """A primitive (u, v, w) with SPINOR_FORM = 2p^2, u and w odd, w then v
    ascending; 2p^2 = u^2 + (2v - w)^2 + 8w^2 with all three odd."""
    n = 2 * p * p
    for w in range(1, isqrt(n // 8) + 1, 2):
        rest = n - 8 * w * w
        s = isqrt(rest)
        for v in range(-((s - w) // 2), (w + s) // 2 + 1):
            b = 2 * v - w
            if b * b > rest:
                continue
            u = isqrt(rest - b * b)
            if u * u != rest - b * b or u % 2 == 0 or vector_gcd((u, v, w)) != 1:
                continue
            if SPINOR_FORM((u, v, w)) != n:
                raise InvariantFailure(f"spinor identity broken at {(u, v, w)}")
            return SpinorInstance(p, (u, v, w), (u, b, w))
    return None


def spinor_instance_check(p_limit: int) -> Tuple[List[SpinorInstance], List[int]]:
    """(instances, primes without one) for primes p = 3 (mod 4), p <= p_limit."""
    if p_limit < 3:
        raise PreconditionError(f"p_limit must be >= 3, got {p_limit}")
    instances, missing = [], []
    for p in primerange(3, p_limit + 1):
        if p % 4 != 3:
            continue
        inst = spinor_instance(int(p))
        if inst is None:
            logger.warning(ctxlog(f"no primitive odd instance for p={p}", "spinor"))
            missing.append(int(p))
        else:
            instances.append(inst)
    return instances, missing

