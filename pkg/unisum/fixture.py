# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
"""The checked-in fixture database: tuples, identities, genera and claims."""
from collections import Counter
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Union

import marshmallow
import pkg_resources
import ruamel.yaml
from marshmallow import Schema, fields, post_load, validate
from marshmallow import ValidationError as MarshmallowValidationError
from marshmallow_enum import EnumField
from ruamel.yaml.error import YAMLError, YAMLFutureWarning, YAMLWarning

from unisum.forms import RepConstraint, TernaryForm
from unisum.shared.config import UnisumConfig
from unisum.shared.enums import Parity, TupleGroup
from unisum.shared.errors import FixtureError
from unisum.shared.fields import FormField, TupleField
from unisum.shared.logger import UnisumLogger
from unisum.tuples import SumTuple, corollary_source

config = UnisumConfig.get_config()
logger = UnisumLogger(__name__).logger

yaml = ruamel.yaml.YAML(typ="safe")
yaml.default_flow_style = False

GROUP_COUNTS = {
    TupleGroup.THM_1_1: 7,
    TupleGroup.THM_1_2: 18,
    TupleGroup.THM_1_3_I: 4,
    TupleGroup.THM_1_3_II: 5,
    TupleGroup.COR_1_1: 9,
    TupleGroup.THM_1_4: 1,
}


class Completion(NamedTuple):
    M: int
    C: int


class CompletionSchema(Schema):
    class Meta:
        ordered = True

    M = fields.Int(required=True, validate=validate.Range(min=1))
    C = fields.Int(required=True, validate=validate.Range(min=0))

    @post_load
    def make_completion(self, data: Dict[str, int], **kwargs: Any) -> Completion:
        return Completion(**data)


class TupleEntrySchema(Schema):
    class Meta:
        ordered = True

    group = EnumField(TupleGroup, by_value=True, required=True)
    sum_tuple = TupleField(required=True, data_key="tuple")
    completion = fields.Nested(CompletionSchema, missing=None)
    source = TupleField(missing=None)

    @post_load
    def make_entry(self, data: Dict[str, Any], **kwargs: Any) -> "TupleEntry":
        return TupleEntry(**data)


class TupleEntry(NamedTuple):
    group: TupleGroup
    sum_tuple: SumTuple
    completion: Optional[Completion] = None
    source: Optional[SumTuple] = None


class IdentityEntrySchema(Schema):
    class Meta:
        ordered = True

    rule = fields.Str(required=True)
    anchor = fields.Str(missing="")

    @post_load
    def make_identity(self, data: Dict[str, str], **kwargs: Any) -> "IdentityEntry":
        return IdentityEntry(**data)


class IdentityEntry(NamedTuple):
    rule: str
    anchor: str = ""


class AggregateSchema(Schema):
    class Meta:
        ordered = True

    m = fields.Int(required=True, validate=validate.Range(min=1))
    weights = fields.List(fields.Int(), required=True)
    factor = fields.Int(required=True)
    symbol = fields.Int(required=True)

    @post_load
    def make_aggregate(self, data: Dict[str, Any], **kwargs: Any) -> "Aggregate":
        return Aggregate(**data)


class Aggregate(NamedTuple):
    """sum_i weights[i] r(m p^2, f_i) = factor (p + 1 - (symbol / p))"""

    m: int
    weights: List[int]
    factor: int
    symbol: int


class CountClaimSchema(Schema):
    class Meta:
        ordered = True

    form = FormField(required=True)
    n = fields.Int(required=True, validate=validate.Range(min=0))
    more_than = fields.Int(required=True)

    @post_load
    def make_count(self, data: Dict[str, Any], **kwargs: Any) -> "CountClaim":
        return CountClaim(**data)


class CountClaim(NamedTuple):
    form: TernaryForm
    n: int
    more_than: int


class GenusFixtureSchema(Schema):
    class Meta:
        ordered = True

    name = fields.Str(required=True)
    representatives = fields.List(
        FormField(), required=True, validate=validate.Length(min=1)
    )
    primes = fields.List(fields.Int(), required=True, validate=validate.Length(min=1))
    rules = fields.List(fields.Str(), missing=list)
    aggregate = fields.Nested(AggregateSchema, missing=None)
    counts = fields.Nested(CountClaimSchema, many=True, missing=list)

    @post_load
    def make_fixture(self, data: Dict[str, Any], **kwargs: Any) -> "GenusFixture":
        return GenusFixture(**data)


class GenusFixture(NamedTuple):
    name: str
    representatives: List[TernaryForm]
    primes: List[int]
    rules: List[str]
    aggregate: Optional[Aggregate] = None
    counts: List[CountClaim] = []

    @property
    def seed(self) -> TernaryForm:
        return self.representatives[0]

    @property
    def determinant(self) -> int:
        return self.seed.determinant


class ProgressionClaimSchema(Schema):
    class Meta:
        ordered = True

    name = fields.Str(required=True)
    form = FormField(required=True)
    modulus = fields.Int(required=True, validate=validate.Range(min=1))
    residues = fields.List(
        fields.Int(), required=True, validate=validate.Length(min=1)
    )
    parities = fields.List(
        EnumField(Parity, by_value=True),
        missing=lambda: [Parity.ANY] * 3,
        validate=validate.Length(equal=3),
    )
    start = fields.Int(missing=0, validate=validate.Range(min=0))

    @post_load
    def make_claim(self, data: Dict[str, Any], **kwargs: Any) -> "ProgressionClaim":
        return ProgressionClaim(**data)


class ProgressionClaim(NamedTuple):
    """modulus * n + r is represented by form, under the parities, for every
    residue r and every n >= start."""

    name: str
    form: TernaryForm
    modulus: int
    residues: List[int]
    parities: List[Parity]
    start: int = 0

    @property
    def constraint(self) -> RepConstraint:
        return RepConstraint(parities=self.parities)

    def targets(self, limit: int) -> List[int]:
        """The claimed values for start <= n <= limit, ascending."""
        return sorted(
            self.modulus * n + r
            for r in self.residues
            for n in range(self.start, limit + 1)
        )

    @property
    def literal(self) -> str:
        rs = ",".join(str(r) for r in self.residues)
        return f"{self.modulus}n+{{{rs}}} by {self.form.literal}"


class FixtureDatabaseSchema(Schema):
    class Meta:
        ordered = True

    name = fields.Str(required=True)
    description = fields.Str(missing="")
    tuples = fields.Nested(TupleEntrySchema, many=True, required=True)
    identities = fields.Nested(IdentityEntrySchema, many=True, missing=list)
    genus = fields.Nested(GenusFixtureSchema, many=True, missing=list)
    claims = fields.Nested(ProgressionClaimSchema, many=True, missing=list)
    lemmas = fields.Nested(ProgressionClaimSchema, many=True, missing=list)

    @post_load
    def make_database(self, data: Dict[str, Any], **kwargs: Any) -> "FixtureDatabase":
        db = FixtureDatabase(**data)
        db.validate()
        return db


class FixtureDatabase(object):
    def __init__(
        self,
        name: str,
        tuples: List[TupleEntry],
        description: str = "",
        identities: Optional[List[IdentityEntry]] = None,
        genus: Optional[List[GenusFixture]] = None,
        claims: Optional[List[ProgressionClaim]] = None,
        lemmas: Optional[List[ProgressionClaim]] = None,
    ) -> None:
        self.name = name
        self.description = description
        self.tuples = list(tuples)
        self.identities = list(identities or [])
        self.genus = list(genus or [])
        self.claims = list(claims or [])
        self.lemmas = list(lemmas or [])

    def by_group(self, group: TupleGroup) -> List[TupleEntry]:
        return [e for e in self.tuples if e.group == TupleGroup(group)]

    def group_counts(self) -> Dict[TupleGroup, int]:
        counts = Counter(e.group for e in self.tuples)
        return {g: counts.get(g, 0) for g in TupleGroup}

    def genus_fixture(self, name: str) -> Optional[GenusFixture]:
        for fx in self.genus:
            if fx.name == name:
                return fx
        return None

    def validate(self) -> None:
        """Raises marshmallow.ValidationError on any structural problem."""
        counts = self.group_counts()
        wrong = {g.value: n for g, n in counts.items() if n != GROUP_COUNTS[g]}
        if wrong:
            raise MarshmallowValidationError(
                f"tuple counts per group {wrong} do not match {_counts_literal()}"
            )

        for entry in self.tuples:
            is_corollary = entry.group == TupleGroup.COR_1_1
            if is_corollary and entry.source is None:
                raise MarshmallowValidationError(
                    f"{entry.sum_tuple.literal}: corollary entries need a source"
                )
            if not is_corollary and entry.source is not None:
                raise MarshmallowValidationError(
                    f"{entry.sum_tuple.literal}: only corollary entries have a source"
                )
            if is_corollary and corollary_source(entry.sum_tuple) != entry.source:
                raise MarshmallowValidationError(
                    f"{entry.sum_tuple.literal}: source {entry.source.literal} does"
                    " not follow from the term swap"
                )

        names = [fx.name for fx in self.genus]
        if len(set(names)) != len(names):
            raise MarshmallowValidationError("Duplicate genus fixture name(s)")
        for fx in self.genus:
            if fx.aggregate and len(fx.aggregate.weights) != len(fx.representatives):
                raise MarshmallowValidationError(
                    f"{fx.name}: one aggregate weight per representative"
                )

        for claim in self.claims + self.lemmas:
            if not claim.form.is_diagonal:
                raise MarshmallowValidationError(
                    f"claim '{claim.name}' needs a diagonal form"
                )

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}({self.name}, {len(self.tuples)} tuples, "
            f"{len(self.genus)} genera, {len(self.claims)} claims)"
        )


def _counts_literal() -> str:
    return ", ".join(f"{g.value}: {n}" for g, n in GROUP_COUNTS.items())


def parse_fixtures(
    text: Union[str, bytes], origin: str = "fixtures"
) -> FixtureDatabase:
    try:
        obj = yaml.load(text)
        return FixtureDatabaseSchema().load(obj)
    except (YAMLError, YAMLWarning, YAMLFutureWarning) as e:
        msg = f"'{origin}' YAML failed to parse:\n{str(e)}"
        logger.warning(msg)
        raise FixtureError(msg) from e
    except marshmallow.ValidationError as e:
        msg = f"'{origin}' failed validation:\n{str(e)}"
        logger.warning(msg)
        raise FixtureError(msg) from e


def read_fixtures(path: Union[str, Path]) -> FixtureDatabase:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise FixtureError(f"failed to read fixtures '{path}': {e.strerror}") from e
    return parse_fixtures(text, str(path))


@lru_cache(maxsize=1)
def load_fixtures() -> FixtureDatabase:
    """The fixture database shipped with the package."""
    try:
        text = pkg_resources.resource_string("unisum", config.FIXTURES_RESOURCE)
    except OSError as e:
        raise FixtureError(
            f"failed to read fixtures '{config.FIXTURES_RESOURCE}': {e.strerror}"
        ) from e
    db = parse_fixtures(text, config.FIXTURES_RESOURCE)
    logger.debug(f"loaded {db!r}")
    return db
