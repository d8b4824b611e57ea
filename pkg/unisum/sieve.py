# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
"""One bit per integer in [0, limit], held in a Python int.

Bit k set means k is reachable. A sumset with a value set B is the OR of the
bitset shifted by every b in B, which CPython runs word by word. numpy is only
used to move between bitsets and boolean arrays.
"""
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, List, Sequence

import numpy as np

from unisum.shared.config import UnisumConfig
from unisum.shared.logger import UnisumLogger

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger


def window(limit: int) -> int:
    return (1 << (limit + 1)) - 1


def bits_from_array(flags: np.ndarray) -> int:
    packed = np.packbits(np.asarray(flags, dtype=np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def array_from_bits(bits: int, limit: int) -> np.ndarray:
    nbytes = (limit + 8) // 8
    raw = np.frombuffer((bits & window(limit)).to_bytes(nbytes, "little"), np.uint8)
    return np.unpackbits(raw, bitorder="little")[: limit + 1].astype(bool)


def bits_from_values(values: Iterable[int], limit: int) -> int:
    flags = np.zeros(limit + 1, dtype=bool)
    arr = np.fromiter((v for v in values if 0 <= v <= limit), dtype=np.int64)
    flags[arr] = True
    return bits_from_array(flags)


def members(bits: int, limit: int) -> np.ndarray:
    return np.flatnonzero(array_from_bits(bits, limit))


def missing(bits: int, limit: int) -> np.ndarray:
    return np.flatnonzero(~array_from_bits(bits, limit))


def _shifted_or(bits: int, shifts: Sequence[int], limit: int) -> int:
    acc = 0
    for s in shifts:
        acc |= bits << s
    return acc & window(limit)


def shifted_union(
    bits: int, shifts: Sequence[int], limit: int, shard_count: int = 1
) -> int:
    """OR of `bits << s` for s in shifts, truncated to [0, limit].

    With shard_count > 1 the shifts are split into contiguous shards handled
    by worker processes; OR is order-free so the merge is deterministic.
    """
    shifts = [int(s) for s in shifts if 0 <= s <= limit]
    if shard_count <= 1 or len(shifts) < 2 * shard_count:
        return _shifted_or(bits, shifts, limit)

    shards: List[List[int]] = [
        [int(s) for s in chunk] for chunk in np.array_split(shifts, shard_count)
    ]
    workers = max(1, min(shard_count, config.JOBS))
    logger.debug(f"sumset over {len(shifts)} shifts in {len(shards)} shards")
    acc = 0
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(
            _shifted_or, [bits] * len(shards), shards, [limit] * len(shards)
        ):
            acc |= part
    return acc


def sumset(
    left: Sequence[int], right: Sequence[int], limit: int, shard_count: int = 1
) -> int:
    """Bitset of {a + b} in [0, limit]; loops over the shorter value list."""
    if len(left) > len(right):
        left, right = right, left
    return shifted_union(bits_from_values(right, limit), left, limit, shard_count)
