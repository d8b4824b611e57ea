# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import numpy as np
import pytest

from unisum import sieve


def test_bits_round_trip():
    flags = np.zeros(50, dtype=bool)
    flags[[0, 3, 17, 49]] = True
    bits = sieve.bits_from_array(flags)
    assert bits == (1 | 1 << 3 | 1 << 17 | 1 << 49)
    assert np.array_equal(sieve.array_from_bits(bits, 49), flags)


def test_values_outside_window_are_dropped():
    bits = sieve.bits_from_values([-1, 2, 5, 11], 10)
    assert list(sieve.members(bits, 10)) == [2, 5]
    assert list(sieve.missing(bits, 4)) == [0, 1, 3, 4]


def test_sumset():
    bits = sieve.sumset([0, 1, 4], [0, 2], 5)
    assert list(sieve.members(bits, 5)) == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("shard_count", [1, 2, 3, 4, 16])
def test_sharded_union_matches_serial(shard_count):
    squares = [k * k for k in range(40)]
    base = sieve.bits_from_values(squares, 1500)
    serial = sieve.shifted_union(base, squares, 1500)
    sharded = sieve.shifted_union(base, squares, 1500, shard_count=shard_count)
    assert serial == sharded


@pytest.mark.parametrize("shard_count", [1, 4, 16])
def test_more_shards_than_shifts(shard_count):
    base = sieve.bits_from_values([0, 3, 8], 40)
    bits = sieve.shifted_union(base, [0, 5, 9], 40, shard_count=shard_count)
    assert list(sieve.members(bits, 40)) == [0, 3, 5, 8, 9, 12, 13, 17]
