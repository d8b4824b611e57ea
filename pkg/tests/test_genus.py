# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
from fractions import Fraction

import pytest

from unisum import genus
from unisum.fixture import load_fixtures
from unisum.forms import TernaryForm
from unisum.genus import GenusClassSet, IsometryMatrix
from unisum.shared.enums import Provenance
from unisum.shared.errors import FormError, PreconditionError

THREE_SQUARES = TernaryForm.diag(1, 1, 1)
D1321 = TernaryForm.diag(1, 3, 21)
F63 = TernaryForm(1, 6, 12, -6, 0, 0)
GENUS_63 = GenusClassSet.from_representatives([D1321, F63])
SHEAR = IsometryMatrix([[1, 1, 0], [0, 1, 0], [0, 0, 1]])


def test_isometry_matrix():
    assert SHEAR.compose(SHEAR.inverse()) == genus.IDENTITY
    image = SHEAR.transform(D1321)
    assert image == TernaryForm(1, 4, 21, 0, 0, 2)
    assert SHEAR.verify(D1321, image)
    with pytest.raises(FormError):
        IsometryMatrix([[2, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_reduce():
    assert genus.reduce(TernaryForm.diag(10, 5, 1)) == TernaryForm.diag(1, 5, 10)
    assert genus.reduce(SHEAR.transform(D1321)) == genus.reduce(D1321)
    reduced = genus.reduce(F63)
    assert reduced.determinant == 63
    assert reduced.a11 <= reduced.a22 <= reduced.a33


@pytest.mark.parametrize(
    "form,size",
    [
        (D1321, 8),
        (TernaryForm.diag(1, 1, 15), 16),
        (THREE_SQUARES, 48),
    ],
)
def test_aut_size(form, size):
    assert genus.aut_size(form) == size


def test_is_equivalent():
    assert genus.is_equivalent(D1321, D1321) == genus.IDENTITY
    u = genus.is_equivalent(TernaryForm.diag(1, 5, 10), TernaryForm.diag(10, 5, 1))
    assert u is not None
    assert u.verify(TernaryForm.diag(1, 5, 10), TernaryForm.diag(10, 5, 1))
    sheared = SHEAR.transform(D1321)
    assert genus.is_equivalent(D1321, sheared).verify(D1321, sheared)


def test_is_not_equivalent():
    other = TernaryForm(3, 2, 8, -2, 0, 0)
    assert genus.is_equivalent(TernaryForm.diag(3, 3, 5), other) is None
    assert genus.is_equivalent(D1321, F63) is None
    assert genus.is_equivalent(D1321, THREE_SQUARES) is None


def test_short_vectors():
    found = genus.short_vectors(THREE_SQUARES, 1)
    assert len(found) == 6
    assert all(norm == 1 for _, norm in found)
    assert genus.short_vectors(THREE_SQUARES, 0) == []
    norms = [n for _, n in genus.short_vectors(D1321, 30)]
    assert norms == sorted(norms)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_isotropic_lines(p):
    lines = genus.isotropic_lines(THREE_SQUARES, p)
    assert len(lines) == p + 1
    assert all(THREE_SQUARES(v) % p == 0 for v in lines)


def test_p_neighbors_class_number_one():
    neighbors = genus.p_neighbors(THREE_SQUARES, 3)
    assert len(neighbors) == 4
    assert all(nb == THREE_SQUARES for nb in neighbors)


def test_p_neighbors_preconditions():
    with pytest.raises(PreconditionError):
        genus.p_neighbors(D1321, 3)
    with pytest.raises(PreconditionError):
        genus.p_neighbors(D1321, 9)


def test_default_primes():
    assert genus.default_primes(D1321) == [5, 11, 13, 17, 19]
    assert genus.default_primes(THREE_SQUARES, 2) == [3, 5]


def test_neighbor_class_set():
    cs = genus.neighbor_class_set(TernaryForm.diag(3, 3, 5), [7, 11, 13])
    assert len(cs) == 2
    assert cs.provenance == Provenance.NEIGHBOR_CLOSURE
    expected = GenusClassSet.from_representatives(
        [TernaryForm.diag(3, 3, 5), TernaryForm(3, 2, 8, -2, 0, 0)]
    )
    assert cs.same_classes(expected)


def test_class_set_rejects():
    with pytest.raises(FormError):
        GenusClassSet.from_representatives(
            [TernaryForm.diag(1, 5, 10), TernaryForm.diag(10, 5, 1)]
        )
    with pytest.raises(FormError):
        GenusClassSet.from_representatives([D1321, THREE_SQUARES])
    with pytest.raises(FormError):
        GenusClassSet.from_representatives([])


def test_class_set_schema():
    cs = genus.GenusClassSetSchema().load(GENUS_63.dump())
    assert cs.same_classes(GENUS_63)
    assert cs.mass == GENUS_63.mass
    assert cs.dump()["classes"][0]["form"] == "diag(1,3,21)"


def test_genus_average():
    one = GenusClassSet.from_representatives([THREE_SQUARES])
    assert one.mass == Fraction(1, 48)
    assert genus.genus_average(one, 1).value == 6
    assert genus.genus_average(one, 3).value == 8
    assert genus.genus_average(GENUS_63, 25).value == 14


def test_ratio_check():
    rc = genus.ratio_check(GENUS_63, 1, 5)
    assert rc.passed
    assert rc.lhs == Fraction(7) and rc.rhs == 7
    for p in (11, 13, 17):
        assert genus.ratio_check(GENUS_63, 1, p).passed


def test_ratio_check_refusals():
    bad_prime = genus.ratio_check(GENUS_63, 1, 7)
    assert not bad_prime.passed and bad_prime.lhs is None and bad_prime.msg
    unrepresented = genus.ratio_check(GENUS_63, 2, 5)
    assert not unrepresented.passed and "not represented" in unrepresented.msg


def test_aggregate_check():
    assert genus.aggregate_check([D1321, F63], [1, 1], 1, 4, -7, 5) == (28, 28, True)
    with pytest.raises(PreconditionError):
        genus.aggregate_check([D1321, F63], [1, 1], 1, 4, -7, 2)


@pytest.mark.parametrize("fx", load_fixtures().genus, ids=lambda fx: fx.name)
def test_genus_fixture(fx):
    outcome = genus.check_genus_fixture(fx.name, fx.representatives, fx.primes)
    assert outcome.passed, outcome.failures
    assert outcome.classes_found == len(fx.representatives)


def test_genus_fixture_incomplete():
    outcome = genus.check_genus_fixture(
        "incomplete", [TernaryForm.diag(3, 3, 5)], [7, 11, 13]
    )
    assert not outcome.passed
    assert outcome.failures[0].startswith("closure")


def test_genus_fixture_batch(db):
    outcomes = genus.paper_genus_fixture_check([db.genus_fixture("genus_45")])
    assert [o.passed for o in outcomes] == [True]


def test_spinor_instance():
    inst = genus.spinor_instance(3)
    assert inst.vector == (1, -1, 1)
    assert inst.odd_triple == (1, -3, 1)
    assert genus.SPINOR_FORM(inst.vector) == 18


def test_spinor_instance_check():
    instances, missing = genus.spinor_instance_check(50)
    assert missing == []
    assert [i.p for i in instances] == [3, 7, 11, 19, 23, 31, 43, 47]
    for inst in instances:
        u, b, w = inst.odd_triple
        assert u * u + b * b + 8 * w * w == 2 * inst.p ** 2
        assert u % 2 and b % 2 and w % 2
    with pytest.raises(PreconditionError):
        genus.spinor_instance_check(2)
