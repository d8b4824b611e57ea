# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import logging
from logging import Logger
from logging.handlers import RotatingFileHandler
from typing import ClassVar, Dict, Optional

import logzero
from pydantic import BaseModel, ByteSize

from unisum.shared.config import UnisumConfig

config = UnisumConfig.get_config()


class LoggerModel(BaseModel):
    name: str
    file: Optional[str] = config.LOG_FILE
    level: int = config.LOG_LEVEL
    max_bytes: ByteSize = config.LOG_MAX_BYTES
    backup_count: int = config.LOG_BACKUP_COUNT
    file_level: int = config.LOG_FILE_LEVEL
    format: str = config.LOG_FORMAT


class UnisumLogger:
    """logzero logger per module; console levels can be changed for every
    registered logger at once (CLI -v/-q)."""

    registry: ClassVar[Dict[str, Logger]] = {}
    console_level: ClassVar[Optional[int]] = None

    def __init__(self, name: str, **kwargs) -> None:
        self.model = LoggerModel(name=name, **kwargs)
        level = self.model.level
        if UnisumLogger.console_level is not None:
            level = UnisumLogger.console_level
        self.logger: Logger = logzero.setup_logger(
            name=self.model.name,
            logfile=self.model.file,
            level=level,
            maxBytes=self.model.max_bytes,
            backupCount=self.model.backup_count,
            fileLoglevel=self.model.file_level,
            formatter=logzero.LogFormatter(fmt=self.model.format),
        )
        UnisumLogger.registry[name] = self.logger

    @classmethod
    def set_level(cls, level: int) -> None:
        """Console level of every unisum logger; file handlers keep theirs."""
        cls.console_level = level
        logger_level = level
        if config.LOG_FILE:
            logger_level = min(level, config.LOG_FILE_LEVEL)
        for logger in cls.registry.values():
            logger.setLevel(logger_level)
            for handler in logger.handlers:
                if not isinstance(handler, RotatingFileHandler):
                    handler.setLevel(level)

    @classmethod
    def reset_level(cls) -> None:
        cls.set_level(config.LOG_LEVEL)
        cls.console_level = None


def verbosity_level(verbose: int, quiet: int) -> int:
    """INFO shifted one step per -v (towards DEBUG) or -q (towards ERROR)."""
    steps = [logging.DEBUG, logging.INFO, logging.WARNING, logging.ERROR]
    index = steps.index(logging.INFO) - verbose + quiet
    return steps[max(0, min(index, len(steps) - 1))]
