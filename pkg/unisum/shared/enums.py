# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
from enum import Enum


class StrEnum(str, Enum):
    pass


class CheckStatus(StrEnum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class Parity(StrEnum):
    ANY = "any"
    ODD = "odd"
    EVEN = "even"


class BinaryKind(StrEnum):
    X2_3Y2 = "x2+3y2"  # w = 4 (mod 8)
    X2_7Y2 = "x2+7y2"  # w = 0 (mod 8)
    X3_5Y2 = "3x2+5y2"  # w = 0 (mod 8)
    X2_15Y2 = "x2+15y2"  # w = 0 (mod 8)


class ThreeFreeKind(StrEnum):
    Y2_2Z2 = "y2+2z2"
    X2_5Y2 = "x2+5y2"
    X2_5Z2 = "x2+5z2"


class KnownSet(StrEnum):
    E111 = "E111"
    E149 = "E149"
    E1510 = "E1510"
    E236 = "E236"


class Provenance(StrEnum):
    FIXTURE = "fixture"
    NEIGHBOR_CLOSURE = "neighbor-closure"


class ReportFormat(StrEnum):
    JSON = "json"
    CSV = "csv"


class TupleGroup(StrEnum):
    THM_1_1 = "thm_1_1"
    THM_1_2 = "thm_1_2"
    THM_1_3_I = "thm_1_3_i"
    THM_1_3_II = "thm_1_3_ii"
    COR_1_1 = "cor_1_1"
    THM_1_4 = "thm_1_4"


class RuleKind(StrEnum):
    LINEAR = "linear"
    POLYNOMIAL = "polynomial"
