# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import pytest

from unisum import tuples
from unisum.forms import TernaryForm
from unisum.shared.errors import PreconditionError, TupleError
from unisum.tuples import CompletionComponent, SumTuple, parse_tuple

THREE_TRIANGULAR = SumTuple(1, 1, 1, 1, 1, 1)


def test_parse_tuple():
    t = parse_tuple("(5, 1, 2, 2, 1, 1)")
    assert t == SumTuple(5, 1, 2, 2, 1, 1)
    assert t.literal == "5,1,2,2,1,1"
    assert t.terms == ((5, 1), (2, 2), (1, 1))
    assert tuples.format_tuple(t) == "5,1,2,2,1,1"


@pytest.mark.parametrize(
    "literal",
    [
        "1,1,1",  # too short
        "1,1,2,2,1,1",  # a < c
        "5,2,2,2,1,1",  # parity of (5,2)
        "2,4,2,0,1,1",  # b > a
        "2,0,2,0,0,0",  # e = 0
        "x,1,1,1,1,1",
    ],
)
def test_parse_tuple_rejects(literal):
    with pytest.raises(TupleError):
        parse_tuple(literal)


def test_term():
    assert tuples.term(1, 1, 3) == 6
    assert tuples.term(3, 1, -1) == 1
    assert tuples.term(16, 4, 1) == 10
    with pytest.raises(TupleError):
        tuples.term(2, 1, 1)


def test_term_values_up_to():
    assert tuples.term_values_up_to(1, 1, 10) == [0, 1, 3, 6, 10]
    # 12 comes from x = -3
    assert tuples.term_values_up_to(3, 1, 12) == [0, 1, 2, 5, 7, 12]
    assert tuples.term_values_up_to(5, 1, 13) == [0, 2, 3, 9, 11]
    assert tuples.term_values_up_to(1, 1, -1) == []


def test_term_values_are_complete():
    for a, b in [(2, 0), (3, 1), (8, 2), (15, 9), (16, 4)]:
        brute = sorted(
            {tuples.term(a, b, x) for x in range(-60, 61)} & set(range(201))
        )
        assert tuples.term_values_up_to(a, b, 200) == brute


def test_derive_completion():
    system = tuples.derive_completion(SumTuple(5, 1, 2, 2, 1, 1))
    assert (system.M, system.C) == (40, 16)
    assert system.components == [
        CompletionComponent(1, 10, 1),
        CompletionComponent(10, 2, 1),
        CompletionComponent(5, 2, 1),
    ]
    assert system.form == TernaryForm.diag(1, 10, 5)

    seven = tuples.derive_completion(SumTuple(7, 1, 1, 1, 1, 1))
    assert (seven.M, seven.C) == (56, 15)

    eight = tuples.derive_completion(SumTuple(16, 4, 2, 0, 1, 1))
    assert (eight.M, eight.C) == (8, 2)
    assert eight.components[1] == CompletionComponent(8, 1, 0)


def test_completion_identity_holds_pointwise():
    t = SumTuple(15, 5, 6, 4, 1, 1)
    system = tuples.derive_completion(t)
    for v in [(0, 0, 0), (1, -2, 3), (-4, 5, -1)]:
        assert system.value(v) == system.M * t.evaluate(v) + system.C


def test_completion_matches_fixtures(db):
    for entry in db.tuples:
        if entry.completion is None:
            continue
        system = tuples.derive_completion(entry.sum_tuple)
        assert (system.M, system.C) == tuple(entry.completion)


def test_is_representable():
    assert tuples.is_representable(THREE_TRIANGULAR, 0) == (0, 0, 0)
    assert tuples.is_representable(SumTuple(16, 4, 2, 0, 1, 1), 1) == (0, 0, 1)
    t = SumTuple(5, 1, 2, 2, 1, 1)
    w = tuples.is_representable(t, 4)
    assert w is not None and t.evaluate(w) == 4
    assert tuples.is_representable(SumTuple(2, 0, 2, 0, 2, 0), 7) is None
    with pytest.raises(PreconditionError):
        tuples.is_representable(t, -1)


def test_verify_universal():
    report = tuples.verify_universal(THREE_TRIANGULAR, 5000)
    assert report.passed
    for n, w in report.witnesses.items():
        assert THREE_TRIANGULAR.evaluate(w) == n

    assert tuples.verify_universal(SumTuple(5, 1, 2, 2, 1, 1), 5000).passed


def test_verify_universal_exceptions():
    report = tuples.verify_universal(SumTuple(2, 0, 2, 0, 2, 0), 40)
    assert not report.passed
    assert report.exceptions == [7, 15, 23, 28, 31, 39]
    assert report.dump()["tuple"] == "2,0,2,0,2,0"


@pytest.mark.parametrize("shard_count", [1, 4, 16])
def test_verify_universal_sharded(shard_count):
    t = SumTuple(8, 2, 3, 1, 1, 1)
    serial = tuples.verify_universal(t, 3000)
    sharded = tuples.verify_universal(t, 3000, shard_count=shard_count)
    assert serial.exceptions == sharded.exceptions == []

    failing = SumTuple(2, 0, 2, 0, 2, 0)
    report = tuples.verify_universal(failing, 40, shard_count=shard_count)
    assert report.exceptions == [7, 15, 23, 28, 31, 39]


def test_eq_1_1():
    assert tuples.eq_1_1_check(0).equal
    assert tuples.eq_1_1_check(10 ** 4).equal


def test_corollary_source():
    t = SumTuple(9, 3, 7, 1, 3, 1)
    source = tuples.corollary_source(t)
    assert source == SumTuple(7, 1, 3, 1, 1, 1)
    assert tuples.compare_reachable(t, source, 3000).equal
    assert tuples.corollary_source(THREE_TRIANGULAR) is None


def test_candidate_sieve_small():
    assert tuples.candidate_sieve(1, 1000) == [THREE_TRIANGULAR]


def test_candidate_sieve_contains_listed_tuples(db):
    found = set(tuples.candidate_sieve(8, 2000))
    for entry in db.by_group("thm_1_1"):
        if entry.sum_tuple.a <= 8:
            assert entry.sum_tuple in found


def test_candidate_sieve_rejects():
    with pytest.raises(PreconditionError):
        tuples.candidate_sieve(0, 10)
