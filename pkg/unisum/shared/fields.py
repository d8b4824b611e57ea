# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import re
from fractions import Fraction
from typing import Any, Optional

import marshmallow

from unisum.shared.errors import FormError, TupleError

_FRACTION_RE = re.compile(r"^\s*([-+]?\d+)\s*(?:/\s*(\d+)\s*)?$")


class FormField(marshmallow.fields.Field):
    """A ternary form given as `a11,a22,a33,a23,a13,a12` or `diag(a,b,c)`."""

    default_error_messages = {"invalid_form": "not a valid form literal: {error}"}

    def _serialize(self, value, attr, obj, **kwargs) -> Optional[str]:
        if value is None:
            return None
        from unisum.forms import format_form

        return format_form(value)

    def _deserialize(self, value, attr, data, **kwargs):
        from unisum.forms import TernaryForm, parse_form

        if isinstance(value, TernaryForm):
            return value
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        try:
            return parse_form(str(value))
        except FormError as e:
            raise self.make_error("invalid_form", error=e.msg) from e


class TupleField(marshmallow.fields.Field):
    """A sum tuple given as `a,b,c,d,e,f` or a six-element list."""

    default_error_messages = {"invalid_tuple": "not a valid sum tuple: {error}"}

    def _serialize(self, value, attr, obj, **kwargs) -> Optional[str]:
        if value is None:
            return None
        return value.literal

    def _deserialize(self, value, attr, data, **kwargs):
        from unisum.tuples import SumTuple, parse_tuple

        if isinstance(value, SumTuple):
            return value
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        try:
            return parse_tuple(str(value))
        except TupleError as e:
            raise self.make_error("invalid_tuple", error=e.msg) from e


class FractionField(marshmallow.fields.Field):
    """Exact rationals as "p/q" strings ("p" when integral)."""

    default_error_messages = {"invalid_fraction": "not a rational 'p/q': {value}"}

    def _serialize(self, value, attr, obj, **kwargs) -> Optional[str]:
        if value is None:
            return None
        return str(Fraction(value))

    def _deserialize(self, value, attr, data, **kwargs) -> Fraction:
        if isinstance(value, (int, Fraction)):
            return Fraction(value)
        m = _FRACTION_RE.match(str(value))
        if not m or (m.group(2) is not None and int(m.group(2)) == 0):
            raise self.make_error("invalid_fraction", value=value)
        return Fraction(int(m.group(1)), int(m.group(2) or 1))


class VectorField(marshmallow.fields.List):
    """Fixed-length integer vector."""

    def __init__(self, length: int = 3, **kwargs: Any) -> None:
        super().__init__(marshmallow.fields.Int(), **kwargs)
        self.length = length

    def _deserialize(self, value, attr, data, **kwargs):
        out = super()._deserialize(value, attr, data, **kwargs)
        if len(out) != self.length:
            raise marshmallow.ValidationError(
                f"expected {self.length} integers, got {len(out)}"
            )
        return tuple(out)
