# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import hashlib
import json
import os
import sys
import tempfile
from math import gcd, isqrt
from pathlib import Path
from typing import Any, Iterator, List, Optional, Sequence, Union

from sympy import primerange

from unisum.shared.config import UnisumConfig
from unisum.shared.enums import CheckStatus
from unisum.shared.errors import CacheError
from unisum.shared.logger import UnisumLogger

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger


def status_priority(status: CheckStatus) -> int:
    try:
        status = CheckStatus(status)
    except ValueError:
        msg = f"{status} is not a valid CheckStatus"
        logger.error(msg)
        raise

    sorted_pri = [  # low to high
        CheckStatus.PASS,
        CheckStatus.SKIPPED,
        CheckStatus.FAIL,
    ]
    return sorted_pri.index(status)


def worst_status(statuses: Sequence[CheckStatus]) -> CheckStatus:
    worst = CheckStatus.PASS
    for status in statuses:
        if status_priority(status) > status_priority(worst):
            worst = CheckStatus(status)
    return worst


def content_hash(obj: Any) -> str:
    digest = hashlib.sha256()
    digest.update(json.dumps(obj, sort_keys=True).encode("utf-8"))
    return digest.hexdigest()


def ctxexc(msg: str, check: Optional[str] = None, sub: Optional[str] = None) -> str:
    exc_type, exc_value = sys.exc_info()[:2]
    if exc_type or exc_value:
        msg = f"{msg} ({exc_type.__name__}: {exc_value})"
    return ctxlog(msg, check, sub)


def ctxlog(msg: str, check: Optional[str] = None, sub: Optional[str] = None) -> str:
    return f"{ctxprefix(check, sub)}| {msg}"


def ctxprefix(check: Optional[str] = None, sub: Optional[str] = None) -> str:
    prefix = ".".join(str(x) for x in (check, sub) if x)
    return prefix or "?"


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            "w", dir=str(path.parent), prefix=f".{path.name}.", delete=False
        ) as tmp:
            tmp.write(text)
            tmp_name = tmp.name
        os.replace(tmp_name, path)
    except OSError as e:
        raise CacheError(f"failed to write: {e.strerror}", path) from e
    logger.debug(f"wrote '{path}'")
    return path


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def signed_range(bound: int) -> Iterator[int]:
    """0, 1, -1, 2, -2, ... up to +-bound (nonnegative first)."""
    yield 0
    for k in range(1, bound + 1):
        yield k
        yield -k


def vector_gcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def odd_primes(bound: int, coprime_to: int = 1) -> List[int]:
    """Odd primes p < bound with gcd(p, coprime_to) = 1."""
    return [int(p) for p in primerange(3, bound) if coprime_to % p != 0]


def parse_int_list(value: str) -> List[int]:
    return [int(x) for x in value.replace(" ", "").split(",") if x]


def two_adic_valuation(n: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    return (n & -n).bit_length() - 1
