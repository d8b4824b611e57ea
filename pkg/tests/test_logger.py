# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import logging

from unisum.shared.config import UnisumConfig
from unisum.shared.logger import UnisumLogger, verbosity_level

config = UnisumConfig.get_config()


def test_verbosity_level():
    assert verbosity_level(0, 0) == logging.INFO
    assert verbosity_level(1, 0) == logging.DEBUG
    assert verbosity_level(5, 0) == logging.DEBUG
    assert verbosity_level(0, 1) == logging.WARNING
    assert verbosity_level(0, 9) == logging.ERROR
    assert verbosity_level(1, 1) == logging.INFO


def test_set_level_reaches_every_logger():
    first = UnisumLogger("unisum.test.first").logger
    UnisumLogger.set_level(logging.ERROR)
    try:
        second = UnisumLogger("unisum.test.second").logger
        for logger in (first, second):
            assert logger.getEffectiveLevel() == logging.ERROR
            assert not logger.isEnabledFor(logging.WARNING)
    finally:
        UnisumLogger.reset_level()
    assert UnisumLogger.console_level is None
    assert first.getEffectiveLevel() == config.LOG_LEVEL
