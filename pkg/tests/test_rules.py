# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import itertools

import pytest
from natsort import natsorted

from unisum.forms import TernaryForm
from unisum.rules import (
    BinaryForm,
    LinearRule,
    PolynomialRule,
    builtin_rules,
    divisible,
    get_rule,
    validate_rule,
)
from unisum.shared.enums import RuleKind
from unisum.shared.errors import PreconditionError, UsageError

_H = "1/2"


def test_library_is_valid_and_ordered():
    rules = builtin_rules()
    assert list(rules) == natsorted(rules)
    assert {"R2.1+", "R2.1-", "RL4.2", "R4.4", "R5.L"} <= set(rules)
    for rule in rules.values():
        assert validate_rule(rule) == (True, None)


def test_rules_named_by_fixtures_exist(db):
    rules = builtin_rules()
    for entry in db.identities:
        assert entry.rule in rules
    for fx in db.genus:
        assert set(fx.rules) <= set(rules)


def test_get_rule_unknown():
    with pytest.raises(UsageError):
        get_rule("R9.9")


def test_rule_2_1_application():
    rule = get_rule("R2.1+")
    assert rule.kind == RuleKind.LINEAR
    image = rule.apply((1, 1, 1))
    assert image == (-4, -4, 4)
    assert TernaryForm.diag(1, 5, 10)(image) == 16 * 16


def test_rule_lemma_4_2_application():
    image = get_rule("RL4.2").apply((1, 1))
    assert image == (-14, 2)
    assert BinaryForm(1, 15)(image) == 256


def test_rules_preserve_values():
    for rule in builtin_rules().values():
        if not isinstance(rule, LinearRule):
            continue
        grid = rule.grid_modulus
        for v in itertools.product(range(-grid, grid + 1), repeat=rule.arity):
            if not rule.admits(v):
                continue
            assert rule.target(rule.apply(v)) == rule.scale * rule.source(v)


def test_rule_conditions_enforced():
    rule = get_rule("R4.4")
    assert validate_rule(rule) == (True, None)
    with pytest.raises(PreconditionError):
        rule.apply((1, 1, 1))
    assert rule.apply((1, 2, 1)) == (1, -1, 1)


def test_corrupted_rule_fails_validation():
    corrupted = LinearRule(
        "R4.2x",
        TernaryForm(1, 6, 12, -6, 0, 0),
        TernaryForm.diag(1, 3, 21),
        [[1, 0, 0], [0, _H, 2], [0, _H, 0]],
        conditions=[divisible(2, 1)],
    )
    ok, msg = validate_rule(corrupted)
    assert not ok
    assert msg.startswith("R4.2x")


def test_rule_off_lattice_fails_validation():
    # without the parity condition the halves leave the lattice
    loose = LinearRule(
        "R4.4x",
        TernaryForm(1, 4, 4, -2, 0, 0),
        TernaryForm.diag(1, 1, 15),
        [[1, 0, 0], [0, _H, -2], [0, _H, 0]],
    )
    ok, msg = validate_rule(loose)
    assert not ok and "mod 2" in msg


def test_polynomial_rule():
    rule = get_rule("R5.L")
    assert rule.kind == RuleKind.POLYNOMIAL
    assert rule.apply((0, 1, 1, 1)) == (-1, 2, -2)
    assert rule.apply((0, 3, 1, 1)) == (7, 6, -6)
    broken = PolynomialRule(
        "R5.Lx",
        source="(a**2+b**2+c**2+d**2)**2",
        target=TernaryForm.diag(1, 1, 1),
        images=("a**2+b**2-c**2-d**2", "2*a*c+2*b*d", "2*a*d+2*b*c"),
    )
    assert not validate_rule(broken)[0]


def test_summary():
    summary = get_rule("R4.4").summary()
    assert summary["valid"] is True
    assert summary["conditions"] == ["y=0 (mod 2)"]
