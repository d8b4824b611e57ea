# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import pytest

from unisum import util
from unisum.shared.enums import CheckStatus
from unisum.shared.errors import CacheError


def test_worst_status():
    assert util.worst_status([]) == CheckStatus.PASS
    assert util.worst_status(["pass", "skipped"]) == CheckStatus.SKIPPED
    assert util.worst_status([CheckStatus.FAIL, CheckStatus.SKIPPED]) == "fail"
    with pytest.raises(ValueError):
        util.status_priority("unknown")


def test_content_hash():
    first = util.content_hash({"a": 1, "b": [2]})
    assert first == util.content_hash({"b": [2], "a": 1})
    assert util.content_hash([1, 2]) != util.content_hash([2, 1])


def test_ctxlog():
    line = util.ctxlog("done", "verify-genus", "genus_63")
    assert line == "verify-genus.genus_63| done"
    assert util.ctxlog("done") == "?| done"


def test_atomic_write_text(tmp_path):
    path = util.atomic_write_text(tmp_path / "a" / "b.txt", "hello")
    assert path.read_text() == "hello"
    util.atomic_write_text(path, "again")
    assert path.read_text() == "again"
    assert [p.name for p in path.parent.iterdir()] == ["b.txt"]

    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(CacheError):
        util.atomic_write_text(blocker / "x.txt", "nope")


def test_number_helpers():
    assert [n for n in range(50) if util.is_square(n)] == [0, 1, 4, 9, 16, 25, 36, 49]
    assert not util.is_square(-4)
    assert list(util.signed_range(2)) == [0, 1, -1, 2, -2]
    assert util.vector_gcd((6, -4, 10)) == 2
    assert util.vector_gcd((0, 0)) == 0
    assert util.odd_primes(20) == [3, 5, 7, 11, 13, 17, 19]
    assert util.odd_primes(30, coprime_to=2 * 63) == [5, 11, 13, 17, 19, 23, 29]
    assert util.two_adic_valuation(40) == 3
    assert util.parse_int_list("7, 11,13") == [7, 11, 13]
