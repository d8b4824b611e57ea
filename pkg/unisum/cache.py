# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import json
from pathlib import Path
from typing import Optional, Sequence

import marshmallow

from unisum import __version__
from unisum.forms import TernaryForm
from unisum.genus import (
    GenusClassSet,
    GenusClassSetSchema,
    default_primes,
    neighbor_class_set,
)
from unisum.shared.config import UnisumConfig
from unisum.shared.errors import CacheError
from unisum.shared.logger import UnisumLogger
from unisum.util import atomic_write_text, content_hash

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger


def cache_key(seed: TernaryForm, primes: Sequence[int]) -> str:
    return content_hash(
        {"seed": seed.literal, "primes": list(primes), "version": __version__}
    )


def cache_path(seed: TernaryForm, primes: Sequence[int]) -> Path:
    return Path(config.CACHE_DIR) / "genus" / f"{cache_key(seed, primes)}.json"


def read_class_set(path: Path) -> Optional[GenusClassSet]:
    """None (with a warning) for missing or unreadable entries."""
    if not path.is_file():
        return None
    try:
        with path.open() as infile:
            obj = json.load(infile)
        return GenusClassSetSchema().load(obj)
    except OSError as e:
        logger.warning(f"unable to read cache entry '{path}': {e.strerror}")
    except json.JSONDecodeError:
        logger.warning(f"invalid JSON in cache entry '{path}'")
    except marshmallow.ValidationError as e:
        logger.warning(f"cache entry '{path}' failed validation: {e.messages}")
    return None


def write_class_set(path: Path, cs: GenusClassSet) -> Path:
    text = json.dumps(GenusClassSetSchema().dump(cs), indent=2, sort_keys=True)
    return atomic_write_text(path, text + "\n")


def cached_class_set(
    seed: TernaryForm, primes: Optional[Sequence[int]] = None
) -> GenusClassSet:
    """neighbor_class_set through the on-disk cache (when USE_CACHE is on)."""
    primes = default_primes(seed) if primes is None else list(primes)
    if not config.USE_CACHE:
        return neighbor_class_set(seed, primes)

    path = cache_path(seed, primes)
    cs = read_class_set(path)
    if cs is not None:
        logger.info(f"cache hit for {seed!r} primes={primes}")
        return cs

    logger.info(f"cache miss for {seed!r} primes={primes}")
    cs = neighbor_class_set(seed, primes)
    try:
        write_class_set(path, cs)
    except CacheError as e:
        logger.warning(f"{e.msg}, continuing without cache")
    return cs
