# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import numpy as np
import pytest
import sympy

from unisum import forms
from unisum.forms import RepConstraint, TernaryForm, parse_form
from unisum.shared.enums import KnownSet, Parity, ThreeFreeKind
from unisum.shared.errors import (
    ArithmeticOverflow,
    FormError,
    PreconditionError,
    UnknownSetError,
    UsageError,
)

D1321 = TernaryForm.diag(1, 3, 21)
F63 = TernaryForm(1, 6, 12, -6, 0, 0)


def test_parse_form_literals():
    assert parse_form("diag(1, 3, 21)") == D1321
    assert parse_form("1,6,12,-6,0,0") == F63
    assert forms.format_form(D1321) == "diag(1,3,21)"
    assert forms.format_form(F63) == "1,6,12,-6,0,0"


@pytest.mark.parametrize(
    "literal", ["diag(1,3)", "1,2,3", "a,b,c,d,e,f", "1,1,1,1,0,0", "1,1,-1,0,0,0"]
)
def test_parse_form_rejects(literal):
    with pytest.raises(FormError):
        parse_form(literal)


def test_not_positive_definite():
    # x^2 + y^2 + z^2 + 4xy is indefinite
    with pytest.raises(FormError):
        TernaryForm(1, 1, 1, 0, 0, 4)


def test_evaluate():
    assert forms.evaluate(TernaryForm.diag(1, 5, 10), (0, 0, 0)) == 0
    assert forms.evaluate(D1321, (5, 1, 1)) == 49
    # 2x^2 + 2y^2 + 9z^2 + 2yz - 2xz
    assert forms.evaluate(TernaryForm(2, 2, 9, 2, -2, 0), (1, 1, 1)) == 13


def test_evaluate_overflow():
    with pytest.raises(ArithmeticOverflow):
        forms.evaluate(D1321, (2 ** 64, 0, 0))


def test_determinant():
    assert D1321.determinant == 63
    assert F63.determinant == 63
    assert TernaryForm(1, 4, 9, -4, 0, 0).determinant == 32
    assert TernaryForm.diag(1, 1, 1).determinant == 1


def test_polynomial_text():
    assert str(TernaryForm(1, 4, 9, -4, 0, 0)) == "x^2+4y^2+9z^2-4yz"
    assert D1321.dump() == {"a11": 1, "a22": 3, "a33": 21, "a23": 0, "a13": 0, "a12": 0}


def test_representations_49():
    reps = forms.representations(D1321, 49)
    vectors = {r.vector for r in reps}
    assert len(reps) == 30
    assert (5, 1, 1) in vectors and (-5, -1, -1) in vectors
    assert (7, 0, 0) in vectors and (-7, 0, 0) in vectors
    assert all(D1321(v) == 49 for v in vectors)
    assert [r.vector for r in reps] == sorted(vectors)


def test_representations_edges():
    assert [r.vector for r in forms.representations(TernaryForm.diag(1, 1, 1), 0)] == [
        (0, 0, 0)
    ]
    assert forms.representations(D1321, -1) == []


def test_representations_with_parity():
    odd_x = RepConstraint(parities=[Parity.ODD, Parity.ANY, Parity.ANY])
    reps = forms.representations(TernaryForm.diag(1, 1, 8), 10, odd_x)
    vectors = {r.vector for r in reps}
    assert {(1, 1, 1), (-1, -1, -1), (1, -1, 1)} <= vectors
    assert all(v[0] % 2 for v in vectors)


def test_count():
    assert forms.count(D1321, 1) == 2
    assert forms.count(D1321, 25) == 14
    assert forms.count(D1321, 25) + forms.count(F63, 25) == 4 * (5 + 1 + 1)


def test_representation_counts_match_count():
    for form in (D1321, F63, TernaryForm(2, 2, 9, 2, -2, 0)):
        counts = forms.representation_counts(form, 120)
        assert [int(c) for c in counts] == [forms.count(form, n) for n in range(121)]


CROSS_TERM_FORMS = [
    F63,
    TernaryForm(1, 4, 9, -4, 0, 0),
    TernaryForm(2, 2, 9, 2, -2, 0),
    TernaryForm(3, 3, 5, 2, 2, 2),
    TernaryForm(2, 3, 4, -2, -2, 0),
]


def box_counts(form, limit, radius=20):
    """r(n) for n <= limit by brute force over a box, as v^T G v."""
    axis = np.arange(-radius, radius + 1)
    v = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    values = np.einsum("ki,ij,kj->k", v, np.array(form.gram), v)
    return np.bincount(values[values <= limit], minlength=limit + 1)


def test_representation_counts_cross_terms_in_z():
    f = TernaryForm(1, 4, 9, -4, 0, 0)
    assert forms.count(f, 33) == 16
    assert int(forms.representation_counts(f, 33)[33]) == 16
    vectors = {r.vector for r in forms.representations(f, 33)}
    assert {(0, 3, 1), (0, -3, -1)} <= vectors


@pytest.mark.parametrize("form", CROSS_TERM_FORMS)
def test_representation_counts_match_brute_force(form):
    limit = 200
    expected = box_counts(form, limit)
    counts = forms.representation_counts(form, limit)
    assert [int(c) for c in counts] == [int(c) for c in expected]
    assert [forms.count(form, n) for n in range(limit + 1)] == list(expected)


@pytest.mark.parametrize("form", CROSS_TERM_FORMS)
def test_representations_closed_under_negation(form):
    for n in range(201):
        vectors = {r.vector for r in forms.representations(form, n)}
        assert {(-x, -y, -z) for x, y, z in vectors} == vectors
        assert all(form(v) == n for v in vectors)


@pytest.mark.parametrize("form", CROSS_TERM_FORMS)
def test_evaluate_matches_gram_product(form):
    rng = np.random.default_rng(63)
    gram = sympy.Matrix(form.gram)
    for v in rng.integers(-1000, 1001, size=(200, 3)):
        column = sympy.Matrix([int(c) for c in v])
        assert forms.evaluate(form, v) == (column.T * gram * column)[0]


def test_representation_counts_with_constraint():
    c = RepConstraint(residues=[(4, [0]), None, None])
    counts = forms.representation_counts(TernaryForm.diag(1, 1, 1), 60, c)
    expected = [forms.count(TernaryForm.diag(1, 1, 1), n, c) for n in range(61)]
    assert [int(x) for x in counts] == expected


def test_primitive_constraint():
    prim = RepConstraint(primitive=True)
    reps = forms.representations(TernaryForm.diag(1, 1, 1), 4, prim)
    assert reps == []
    assert forms.count(TernaryForm.diag(1, 1, 1), 4) == 6


def test_rep_constraint_parse():
    c = RepConstraint.parse(["x=odd", "y=even", "z=1,7%8", "primitive"])
    assert c.parities == (Parity.ODD, Parity.EVEN, Parity.ANY)
    assert c.residues[2] == (8, frozenset({1, 7}))
    assert c.primitive
    assert c.accepts((1, 2, 7)) and not c.accepts((1, 2, 3))
    assert RepConstraint.parse([]).unconstrained


@pytest.mark.parametrize("item", ["w=odd", "x=prime", "x=1%0"])
def test_rep_constraint_parse_rejects(item):
    with pytest.raises(UsageError):
        RepConstraint.parse([item])


def test_represented_set_agrees_with_counts():
    marked = forms.represented_set((1, 5, 10), 500)
    counts = forms.representation_counts(TernaryForm.diag(1, 5, 10), 500)
    assert np.array_equal(marked, counts > 0)


def test_represented_set_rejects_primitive():
    with pytest.raises(UsageError):
        forms.represented_set((1, 1, 1), 10, RepConstraint(primitive=True))


@pytest.mark.parametrize(
    "coeffs,limit,expected",
    [
        ((1, 1, 1), 30, [7, 15, 23, 28]),
        ((1, 4, 9), 15, [2, 3, 7, 11, 12, 15]),
        ((1, 5, 10), 10, [2, 3, 7, 8]),
    ],
)
def test_exception_set(coeffs, limit, expected):
    es = forms.exception_set(*coeffs, limit)
    assert es.members == expected
    assert expected[0] in es and 1 not in es


def test_exception_set_prefix():
    es = forms.exception_set(1, 1, 1, 100)
    assert es.prefix(30).members == [7, 15, 23, 28]


def test_exception_set_rejects_nonpositive():
    with pytest.raises(FormError):
        forms.exception_set(1, 0, 1, 10)


@pytest.mark.parametrize("known", list(KnownSet))
def test_exception_formulas(known):
    assert forms.exception_formula_check(known.value, 3000).equal


def test_exception_formula_empty_range():
    cmp = forms.exception_formula_check("E111", 0)
    assert cmp.equal and cmp.witnesses() == []


def test_exception_formula_unknown():
    with pytest.raises(UnknownSetError):
        forms.exception_formula_check("E123", 10)


def test_kronecker_symbol():
    assert forms.kronecker_symbol(-7, 5) == -1
    assert forms.kronecker_symbol(-7, 11) == 1
    assert forms.kronecker_symbol(-63, 3) == 0
    for n in range(1, 60, 2):
        assert forms.kronecker_symbol(1, n) == 1


def test_kronecker_symbol_matches_sympy():
    for n in range(1, 80, 2):
        for a in range(-40, 40):
            assert forms.kronecker_symbol(a, n) == sympy.jacobi_symbol(a, n)


@pytest.mark.parametrize("n", [0, -3, 4])
def test_kronecker_symbol_rejects(n):
    with pytest.raises(PreconditionError):
        forms.kronecker_symbol(3, n)


def test_binary_representations():
    assert forms.binary_representations(4, 5) == [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    assert forms.binary_representations(7, 3) == []


def test_three_free_rewrite():
    assert forms.three_free_rewrite(ThreeFreeKind.Y2_2Z2, 3, 3) == (5, 1)
    assert forms.three_free_rewrite("x2+5y2", 1, 0) == (1, 0)
    assert forms.three_free_rewrite(ThreeFreeKind.X2_5Z2, 3, 0) == (2, 1)


def test_three_free_rewrite_zero():
    with pytest.raises(PreconditionError):
        forms.three_free_rewrite(ThreeFreeKind.X2_5Y2, 0, 0)
