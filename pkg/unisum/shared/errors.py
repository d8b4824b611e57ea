# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.


class UnisumError(Exception):
    def __init__(self, msg):
        super().__init__(msg)
        self.msg = msg


class FormError(UnisumError):
    """Malformed literal, odd cross coefficient or a form that is not positive."""


class TupleError(UnisumError):
    """A sum tuple or polygonal term with broken ordering or parity."""


class PreconditionError(UnisumError):
    pass


class InvariantFailure(UnisumError):
    """A search that a cited lemma guarantees to succeed came up empty."""


class RuleValidationError(UnisumError):
    pass


class UnknownSetError(UnisumError):
    pass


class ArithmeticOverflow(UnisumError):
    pass


class UsageError(UnisumError):
    pass


class CacheError(UnisumError):
    def __init__(self, msg, path=None):
        if path is not None:
            msg = f"{msg} ('{path}')"
        super().__init__(msg)
        self.path = path


class FixtureError(UnisumError):
    pass
