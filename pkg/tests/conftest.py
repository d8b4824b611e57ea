# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import pytest

from unisum.fixture import load_fixtures
from unisum.shared.config import UnisumConfig

config = UnisumConfig.get_config()


@pytest.fixture(autouse=True)
# fix an annoying artifact of pytest's otherwise useful '-s' mode
def prettier_output():
    print()
    yield
    print()


@pytest.fixture(autouse=True)
def cache_dir(tmp_path):
    """Every test gets its own cache directory with caching switched on."""
    saved = (config.CACHE_DIR, config.USE_CACHE)
    config.CACHE_DIR = tmp_path / "cache"
    config.USE_CACHE = True
    yield config.CACHE_DIR
    config.CACHE_DIR, config.USE_CACHE = saved


@pytest.fixture(scope="session")
def db():
    return load_fixtures()
