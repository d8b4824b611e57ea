# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import logging
import os
from pathlib import Path
from typing import Optional

import psutil
from pydantic import (
    BaseSettings,
    ByteSize,
    DirectoryPath,
    Field,
    NonNegativeInt,
    PositiveInt,
    conint,
    validator,
)

_ENV_FILE = os.getenv("UNISUM_ENV_FILE", ".env")


def _default_jobs() -> int:
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


class UnisumConfig(BaseSettings):
    __instance__: "UnisumConfig" = None

    def __init__(__pydantic_self__):
        if UnisumConfig.__instance__ is not None:
            raise Exception("You cannot create another SingletonSettings instance")
        UnisumConfig.__instance__ = __pydantic_self__
        super().__init__()

    @staticmethod
    def get_config() -> "UnisumConfig":
        if not UnisumConfig.__instance__:
            UnisumConfig()
        return UnisumConfig.__instance__

    ENV_FILE: Path = _ENV_FILE
    SRC_ROOT: DirectoryPath = Path(__file__).parent.parent.absolute()
    FIXTURES_RESOURCE: str = "fixtures/theorems.yml"

    CACHE_DIR: Path = Field(
        Path.home() / ".cache" / "unisum", env="UNISUM_CACHE_DIR"
    )
    USE_CACHE: bool = True
    LAST_REPORT_NAME: str = "last_report.json"

    DEBUG: bool = False
    TESTING: bool = False

    # desk-scale bounds
    TUPLE_LIMIT: PositiveInt = 10 ** 6
    LEMMA_LIMIT: PositiveInt = 10 ** 5
    CLAIM_LIMIT: PositiveInt = 10 ** 4
    DESCENT_LIMIT: PositiveInt = 10 ** 3
    LEMMA_4_2_LIMIT: PositiveInt = 10 ** 5
    THM14_LIMIT: NonNegativeInt = 10 ** 5
    THM14_PIPELINE_LIMIT: NonNegativeInt = 2 * 10 ** 3
    RATIO_PRIME_BOUND: conint(gt=2) = 30
    SPINOR_PRIME_LIMIT: conint(ge=3) = 10 ** 3
    NEIGHBOR_PRIME_COUNT: PositiveInt = 5
    WITNESS_SAMPLES: NonNegativeInt = 16
    JOBS: PositiveInt = Field(default_factory=_default_jobs)

    # form values beyond this are a hard error, never wraparound
    MAX_FORM_VALUE: PositiveInt = 2 ** 127 - 1

    REPORT_INCLUDE_TIMING: bool = True

    LOG_FILE: Optional[str] = None
    LOG_FORMAT: str = (
        "%(color)s[%(levelname)1.1s %(asctime)s %(process)d"
        " %(module)s:%(lineno)d]%(end_color)s %(message)s"
    )
    LOG_LEVEL: int = -1
    LOG_MAX_BYTES: ByteSize = "5MiB"
    LOG_BACKUP_COUNT: int = 3
    LOG_FILE_LEVEL: int = -1

    @validator("LOG_LEVEL")
    def default_log_level(cls, v, values):
        if v >= 0:
            return v
        elif "DEBUG" in values and values["DEBUG"]:
            return logging.DEBUG
        else:
            return logging.INFO

    @validator("LOG_FILE_LEVEL")
    def default_file_log_level(cls, v, values):
        if v >= 0:
            return v
        elif "LOG_LEVEL" in values:
            return values["LOG_LEVEL"]
        else:
            return logging.INFO

    class Config(BaseSettings.Config):
        arbitrary_types_allowed = True
        case_sensitive = True
        env_file = _ENV_FILE
        validate_assignment = True
