# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import pkg_resources
import pytest

from unisum import fixture
from unisum.forms import TernaryForm
from unisum.shared.enums import Parity, TupleGroup
from unisum.shared.errors import FixtureError
from unisum.tuples import SumTuple

SHIPPED = pkg_resources.resource_string("unisum", "fixtures/theorems.yml").decode()


def test_shipped_fixtures(db):
    assert len(db.tuples) == 44
    assert db.group_counts() == fixture.GROUP_COUNTS
    # (6,2,5,5,1,1) is listed under two theorems
    assert len({e.sum_tuple for e in db.tuples}) == 43
    assert len(db.genus) == 12
    assert len(db.lemmas) == 4


def test_corollary_sources(db):
    for entry in db.by_group(TupleGroup.COR_1_1):
        assert entry.source is not None
        assert entry.completion is None


def test_genus_fixture_lookup(db):
    fx = db.genus_fixture("genus_63")
    assert fx.seed == TernaryForm.diag(1, 3, 21)
    assert fx.determinant == 63
    assert fx.aggregate.weights == [1, 1]
    assert fx.counts[0].n == 49
    assert db.genus_fixture("genus_1") is None


def test_progression_claim(db):
    claim = next(c for c in db.claims if c.name == "odd_1_5_10")
    assert claim.targets(1) == [16, 24, 56, 64]
    assert claim.constraint.parities == (Parity.ODD,) * 3
    assert claim.literal == "40n+{16,24} by 1,5,10,0,0,0"

    lemma = next(c for c in db.lemmas if c.name == "six_n_plus_1.odd")
    assert lemma.start == 1
    assert lemma.targets(0) == []
    assert lemma.targets(2) == [7, 13]


def test_read_fixtures(tmp_path):
    path = tmp_path / "theorems.yml"
    path.write_text(SHIPPED)
    db = fixture.read_fixtures(path)
    assert db.tuples[0].sum_tuple == SumTuple(5, 1, 2, 2, 1, 1)
    with pytest.raises(FixtureError):
        fixture.read_fixtures(tmp_path / "missing.yml")


def test_wrong_group_count():
    text = SHIPPED.replace(
        "  - {group: thm_1_4, tuple: [16, 4, 2, 0, 1, 1], completion: {M: 8, C: 2}}\n",
        "",
    )
    with pytest.raises(FixtureError) as e:
        fixture.parse_fixtures(text)
    assert "thm_1_4" in e.value.msg


def test_wrong_corollary_source():
    text = SHIPPED.replace("source: [7, 1, 3, 1, 1, 1]", "source: [7, 3, 3, 1, 1, 1]")
    with pytest.raises(FixtureError) as e:
        fixture.parse_fixtures(text)
    assert "term swap" in e.value.msg


def test_broken_tuple():
    text = SHIPPED.replace("tuple: [5, 1, 2, 2, 1, 1]", "tuple: [5, 2, 2, 2, 1, 1]")
    with pytest.raises(FixtureError):
        fixture.parse_fixtures(text)


def test_broken_yaml():
    with pytest.raises(FixtureError):
        fixture.parse_fixtures("tuples: [unbalanced", origin="inline")
